"""Scenario configuration, execution, and deterministic result persistence.

A scenario is a single JSON document naming a kind, its inputs (inline
integer matrices, file references, or named presets), and run parameters.
Running one produces a RunRecord and writes a CSV plus a JSON document
atomically (write-temp-then-rename); identical config, seed, and library
version reproduce the CSV byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, FalsifiedInvariantError, PreconditionError
from .exact import IntMatrix
from .expander import BlockGraph, propagation_bound, random_regular_graph, single_edge_mesh
from .slices import (
    bass_note_scan,
    build_chain_model,
    build_slice_model,
    coexact_gap,
    exp_decay_check,
    raw_metric_gap,
    surjectivity,
    torsion_gap_audit,
)
from .symplectic import LagrangianPair, SymplecticAction, decay_constant_check, uniform_transversality_scan
from .torsion import (
    GluingFamily,
    decaying_gap_family,
    glued_torsion,
    standard_chain,
    uniform_gap_family,
)

KINDS = ("torsion", "gap", "decay", "angles", "chain", "expander", "audit", "scan", "bassnote")

CSV_COLUMNS = {
    "torsion": ["N", "order", "invariant_factors", "free_rank"],
    "gap": ["family_id", "N", "lambda1", "cofill_constant", "delta", "residual"],
    "decay": ["k_max", "c", "exact_constant", "sampled_max", "violations", "samples"],
    "angles": ["k_plus", "k_minus", "angle"],
    "chain": ["block_count", "lambda1", "cofill_constant", "defect"],
    "expander": ["graph_id", "n", "d", "c_G", "p_B", "derived", "measured"],
    "audit": ["N", "lambda1", "delta", "h1_order", "bound", "passes"],
    "scan": ["family_id", "N", "lambda1"],
    "bassnote": ["family_id", "N", "lambda1"],
}

FAMILY_PRESETS = {
    "uniform_gap": uniform_gap_family,
    "decaying_gap": decaying_gap_family,
}


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    params: dict
    seed: int = 0
    precision: str = "double"
    out_dir: str = "."

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "seed": self.seed,
            "precision": self.precision,
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        kind = raw.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {kind!r}; expected one of {KINDS}")
        precision = raw.get("precision", "double")
        if precision not in ("double", "extended"):
            raise ConfigError(f"precision must be 'double' or 'extended', got {precision!r}")
        seed = raw.get("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("params must be an object")
        return cls(kind=kind, params=params, seed=seed, precision=precision,
                   out_dir=raw.get("out_dir", "."))


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ScenarioConfig.from_dict(raw)


@dataclass
class RunRecord:
    config: ScenarioConfig
    rows: list[dict]
    extras: dict = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__
    input_digest: str = ""

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "rows": self.rows,
            "extras": self.extras,
            "wall_time": self.wall_time,
            "version": self.version,
            "input_digest": self.input_digest,
        }


# -- input parsing ------------------------------------------------------------

def _matrix_from(spec, base: Path | None = None) -> IntMatrix:
    if isinstance(spec, dict) and "path" in spec:
        p = Path(spec["path"])
        if base is not None and not p.is_absolute():
            p = base / p
        try:
            with open(p, "r", encoding="utf-8") as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read matrix file {p}: {exc}") from exc
    if not isinstance(spec, list):
        raise ConfigError("matrix must be a list of rows or a file reference")
    try:
        return IntMatrix([[int(x) for x in row] for row in spec])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad matrix entries: {exc}") from exc


def _family_from(spec, base: Path | None = None) -> tuple[str, GluingFamily]:
    if isinstance(spec, str):
        spec = {"preset": spec}
    if not isinstance(spec, dict):
        raise ConfigError("family must be a preset name or an object")
    if "preset" in spec:
        name = spec["preset"]
        if name not in FAMILY_PRESETS:
            raise ConfigError(f"unknown family preset {name!r}; have {sorted(FAMILY_PRESETS)}")
        return name, FAMILY_PRESETS[name]()
    try:
        act = SymplecticAction.standard(_matrix_from(spec["matrix"], base))
        pair = LagrangianPair(_matrix_from(spec["plus"], base), _matrix_from(spec["minus"], base))
        fam = GluingFamily(act, pair, int(spec.get("twist_exponent", 2)))
    except KeyError as exc:
        raise ConfigError(f"family object missing field {exc}") from exc
    except PreconditionError as exc:
        raise ConfigError(f"invalid family data: {exc}") from exc
    return spec.get("id", "custom"), fam


def _n_range(params) -> list[int]:
    rng = params.get("n_range")
    if (not isinstance(rng, (list, tuple))) or len(rng) != 2:
        raise ConfigError("n_range must be [lo, hi]")
    lo, hi = rng
    if not (isinstance(lo, int) and isinstance(hi, int)) or lo > hi or lo < 0:
        raise ConfigError("n_range must be a nonempty range of nonnegative integers")
    return list(range(lo, hi + 1))


def _base_metric(params, dim: int) -> np.ndarray | None:
    raw = params.get("base_metric")
    if raw is None:
        return None
    arr = np.asarray(raw, dtype=float)
    if arr.shape != (dim, dim):
        raise ConfigError(f"base_metric must be {dim}x{dim}")
    return arr


def _thread_count() -> int:
    raw = os.environ.get("TORGAP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pmap(fn, items):
    workers = _thread_count()
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- scenario bodies -----------------------------------------------------------

def _run_torsion(cfg: ScenarioConfig):
    fam_id, fam = _family_from(cfg.params.get("family", "uniform_gap"))
    rows = []
    for N in _n_range(cfg.params):
        grp = glued_torsion(fam, N)
        rows.append({
            "N": N,
            "order": grp.order() if grp.is_finite else 0,
            "invariant_factors": ";".join(str(f) for f in grp.invariant_factors),
            "free_rank": grp.free_rank,
        })
    return rows, {"family_id": fam_id}


def _run_gap(cfg: ScenarioConfig):
    fam_id, fam = _family_from(cfg.params.get("family", "uniform_gap"))
    G0 = _base_metric(cfg.params, fam.action.dim)
    samples = int(cfg.params.get("decay_samples", 50))

    def one(N):
        model = build_slice_model(fam.action, fam.pair, N, G0)
        gap = coexact_gap(model)
        delta = exp_decay_check(model, samples=samples, seed=cfg.seed, gap=gap)
        row = {
            "family_id": fam_id,
            "N": N,
            "lambda1": gap.lambda1,
            "cofill_constant": gap.cofill_constant,
            "delta": delta.delta if delta.delta is not None else "",
            "residual": gap.residual,
            "witness": gap.witness.tolist(),  # JSON only; not a CSV column
        }
        check = None
        if cfg.precision == "extended":
            raw = raw_metric_gap(model, "extended")
            check = {"N": N, "raw_lambda1": raw,
                     "rel_error": abs(gap.lambda1 - raw) / raw}
        return row, check

    results = _pmap(one, _n_range(cfg.params))
    rows = [r for r, _ in results]
    extras = {"family_id": fam_id}
    checks = [c for _, c in results if c is not None]
    if checks:
        extras["raw_cross_check"] = checks
    return rows, extras


def _run_decay(cfg: ScenarioConfig):
    fam_id, fam = _family_from(cfg.params.get("family", "uniform_gap"))
    k_values = cfg.params.get("k_max", [15, 30])
    if isinstance(k_values, int):
        k_values = [k_values]
    samples = int(cfg.params.get("samples", 1000))
    rows = []
    for k in k_values:
        rep = decay_constant_check(fam.action, fam.pair.plus_basis, int(k), samples, seed=cfg.seed)
        rows.append({
            "k_max": k,
            "c": rep.c,
            "exact_constant": rep.exact_constant,
            "sampled_max": rep.sampled_max,
            "violations": rep.violations,
            "samples": rep.samples,
        })
    return rows, {"family_id": fam_id}


def _run_angles(cfg: ScenarioConfig):
    fam_id, fam = _family_from(cfg.params.get("family", "uniform_gap"))
    k_max = int(cfg.params.get("k_max", 40))
    table = uniform_transversality_scan(fam.action, fam.pair, k_max)
    rows = [
        {"k_plus": i, "k_minus": j, "angle": float(table.angles[i, j])}
        for i in range(k_max + 1) for j in range(k_max + 1)
    ]
    extras = {
        "family_id": fam_id,
        "K0": table.K0,
        "infimum": table.infimum,
        "full_min": table.full_min,
        "limit_angle": table.limit_angle,
    }
    return rows, extras


def _run_chain(cfg: ScenarioConfig):
    counts = cfg.params.get("block_counts", [3, 10, 100])
    twist = cfg.params.get("twist")
    tw = _matrix_from(twist) if twist is not None else None
    dim = int(cfg.params.get("dim", 4))
    rows = []
    for b in counts:
        spec = standard_chain(int(b), twist=tw, dim=dim)
        model = build_chain_model(spec)
        defect = model.defect()
        if defect:
            rows.append({"block_count": b, "lambda1": "", "cofill_constant": "", "defect": defect})
            continue
        gap = coexact_gap(model)
        rows.append({
            "block_count": b,
            "lambda1": gap.lambda1,
            "cofill_constant": gap.cofill_constant,
            "defect": 0,
        })
    return rows, {}


def _run_expander(cfg: ScenarioConfig):
    count = int(cfg.params.get("count", 20))
    degree = int(cfg.params.get("degree", 3))
    n_lo, n_hi = cfg.params.get("size_range", [20, 200])
    mesh = single_edge_mesh(d=degree)
    sizes = np.linspace(int(n_lo), int(n_hi), count).astype(int)
    sizes += sizes % 2  # regular graphs of odd degree need even order
    rows = []
    for i, n in enumerate(sizes):
        base = random_regular_graph(int(n), degree, seed=cfg.seed + i)
        bound = propagation_bound(BlockGraph(base, mesh))
        rows.append({
            "graph_id": i,
            "n": int(n),
            "d": degree,
            "c_G": bound.c_G,
            "p_B": bound.p_pair,
            "derived": bound.derived_lower_bound,
            "measured": bound.measured_lambda1,
        })
        if not bound.passes:
            raise FalsifiedInvariantError(
                f"measured gap {bound.measured_lambda1} below derived bound {bound.derived_lower_bound}")
    return rows, {}


def _run_audit(cfg: ScenarioConfig):
    fam_id, fam = _family_from(cfg.params.get("family", "uniform_gap"))
    G0 = _base_metric(cfg.params, fam.action.dim)
    table = torsion_gap_audit(fam, _n_range(cfg.params),
                              G0=G0, samples=int(cfg.params.get("samples", 100)), seed=cfg.seed)
    rows = [{
        "N": r.N,
        "lambda1": r.lambda1,
        "delta": r.delta if r.delta is not None else "",
        "h1_order": r.h1_order,
        "bound": r.bound,
        "passes": int(r.passes),
    } for r in table.rows]
    return rows, {"family_id": fam_id, "kappa": table.kappa}


def _scan_families(cfg: ScenarioConfig):
    fams = cfg.params.get("families", {"uniform_gap": "uniform_gap", "decaying_gap": "decaying_gap"})
    if not isinstance(fams, dict) or not fams:
        raise ConfigError("families must be a nonempty object of id -> family spec")
    return {fid: _family_from(spec)[1] for fid, spec in sorted(fams.items())}


def _run_scan(cfg: ScenarioConfig):
    families = _scan_families(cfg)
    Ns = _n_range(cfg.params)

    def one(item):
        fid, fam = item
        out = []
        for N in Ns:
            model = build_slice_model(fam.action, fam.pair, N)
            if not surjectivity(model).surjective:
                continue
            out.append({"family_id": fid, "N": N, "lambda1": coexact_gap(model).lambda1})
        return out

    rows = [r for chunk in _pmap(one, sorted(families.items())) for r in chunk]
    return rows, {}


def _run_bassnote(cfg: ScenarioConfig):
    families = _scan_families(cfg)
    values = bass_note_scan(families, _n_range(cfg.params))
    rows = [{"family_id": fid, "N": N, "lambda1": lam} for lam, fid, N in values]
    return rows, {}


_RUNNERS = {
    "torsion": _run_torsion,
    "gap": _run_gap,
    "decay": _run_decay,
    "angles": _run_angles,
    "chain": _run_chain,
    "expander": _run_expander,
    "audit": _run_audit,
    "scan": _run_scan,
    "bassnote": _run_bassnote,
}


# -- output ---------------------------------------------------------------------

def _format_cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (np.floating,)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_csv(kind: str, rows: list[dict]) -> str:
    cols = CSV_COLUMNS[kind]
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _digest(config: ScenarioConfig) -> str:
    blob = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def run(config: ScenarioConfig, out_dir: str | Path | None = None,
        write: bool = True, emit_plots: bool = False) -> RunRecord:
    """Execute one scenario; optionally persist CSV/JSON (and plot CSV) atomically."""
    runner = _RUNNERS.get(config.kind)
    if runner is None:
        raise ConfigError(f"unknown scenario kind {config.kind!r}")
    start = time.perf_counter()
    rows, extras = runner(config)
    record = RunRecord(
        config=config,
        rows=rows,
        extras=extras,
        wall_time=time.perf_counter() - start,
        input_digest=_digest(config),
    )
    if write:
        out = Path(out_dir) if out_dir is not None else Path(config.out_dir)
        _atomic_write(out / f"{config.kind}.csv", rows_to_csv(config.kind, rows))
        _atomic_write(out / f"{config.kind}.json",
                      json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n")
        if emit_plots:
            emit_plot_data(record, out)
    return record


PLOT_COLUMNS = {
    "torsion": ["N", "order"],
    "gap": ["family_id", "N", "lambda1"],
    "decay": ["k_max", "exact_constant"],
    "angles": ["k_plus", "k_minus", "angle"],
    "chain": ["block_count", "lambda1"],
    "expander": ["n", "derived", "measured"],
    "audit": ["N", "lambda1", "h1_order", "passes"],
    "scan": ["family_id", "N", "lambda1"],
    "bassnote": ["family_id", "N", "lambda1"],
}


def emit_plot_data(record: RunRecord, out_dir: str | Path | None = None) -> Path:
    """Long-format plotting CSV for a completed record."""
    if not record.rows:
        raise PreconditionError("record has no rows to plot")
    kind = record.config.kind
    cols = PLOT_COLUMNS[kind]
    lines = [",".join(cols)]
    rows = record.rows
    if kind == "bassnote":
        rows = sorted(rows, key=lambda r: r["lambda1"])
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in cols))
    out = Path(out_dir) if out_dir is not None else Path(record.config.out_dir)
    path = out / f"{kind}_plot.csv"
    _atomic_write(path, "\n".join(lines) + "\n")
    return path
