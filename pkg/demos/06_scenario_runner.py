"""Reproducible scenario runs: config in, CSV + JSON out, byte-stable.

The same machinery backs the `torgap run` command line; exit codes are
0 success, 2 config error, 3 precondition failure, 4 falsified invariant.
"""

import json
import tempfile
from pathlib import Path

from torgap import ScenarioConfig, run

config = ScenarioConfig(
    kind="torsion",
    params={"family": "uniform_gap", "n_range": [0, 8]},
    seed=0,
)

with tempfile.TemporaryDirectory() as out:
    record = run(config, out_dir=out, emit_plots=True)
    print(f"ran '{config.kind}' in {record.wall_time:.3f}s, digest {record.input_digest[:16]}")
    print("\nfiles written:")
    for p in sorted(Path(out).iterdir()):
        print("  ", p.name)
    print("\ntorsion.csv:")
    print((Path(out) / "torsion.csv").read_text())

    first = (Path(out) / "torsion.csv").read_bytes()
    run(config, out_dir=out)
    second = (Path(out) / "torsion.csv").read_bytes()
    print("byte-identical on re-run:", first == second)

cli_config = {
    "kind": "gap",
    "params": {"family": "decaying_gap", "n_range": [2, 10]},
    "seed": 0,
    "precision": "double",
}
print("equivalent CLI usage:")
print("  $ cat > gap.json <<'EOF'")
print(json.dumps(cli_config, indent=2))
print("  EOF")
print("  $ torgap run gap.json --out results --emit-plots")
