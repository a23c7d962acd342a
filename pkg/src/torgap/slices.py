"""Finite-dimensional slice model of the coexact-form spectral gap.

A gluing twisted by a growing power of a hyperbolic action is modeled by a
chain of slices n in [-N, N], each carrying the surface homology V with the
pulled-back metric G_n = (A^-n)^T G_0 A^-n, capped at the two ends by the
transported kill subspaces. The difference operator D sends edge data to
slice classes; its smallest singular value squared is the coexact-gap analog,
and the optimal cofilling constant is its reciprocal square root.

Raw metrics blow up like |lambda|^(2N), so the operator is assembled in
per-slice whitened coordinates where every block involves one power of A and
one Cholesky factor; block norms and condition numbers are then independent
of N. A raw-metric assembly is kept for cross-validation (double precision to
N = 3, arbitrary precision via mpmath beyond).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    DimensionError,
    InconsistentClassError,
    PreconditionError,
    SurjectivityError,
)
from .exact import IntMatrix
from .symplectic import LagrangianPair, SymplecticAction, classify_spectrum, subspace_angle
from .torsion import GluingFamily, glued_torsion

EIG_RESIDUAL_TOL = 1e-13   # relative eigen-residual target for the gap solve
SURJECTIVITY_TOL = 1e-10   # singular values below this count as rank defect


# -- model construction ----------------------------------------------------

@dataclass
class SliceModel:
    """Slice chain with pullback metrics and Lagrangian caps.

    The caps sit on the outermost edges: the right cap carries A^N (plus
    subspace), the left cap A^-N (minus subspace), so the total twist across
    the chain is A^2N, split symmetrically. `convention="one-sided"` instead
    runs slices over [0, 2N] with untwisted plus cap on the left and the full
    A^2N-transported minus cap on the right; the two agree up to a unimodular
    re-framing of the base metric.
    """

    action: SymplecticAction
    pair: LagrangianPair
    N: int
    G0: np.ndarray
    convention: str
    slice_positions: list[int]
    A_float: np.ndarray
    Ainv_float: np.ndarray
    W0: np.ndarray            # G0 = W0^T W0
    H0: np.ndarray            # base edge metric (G0 + A^-T G0 A^-1) / 2
    WH: np.ndarray            # H0 = WH^T WH
    block_P: np.ndarray       # whitened coefficient of the right edge
    block_Q: np.ndarray       # whitened coefficient of the left edge
    cap_plus_block: np.ndarray
    cap_minus_block: np.ndarray
    cap_plus_raw: np.ndarray  # raw basis of the right cap subspace
    cap_minus_raw: np.ndarray
    cap_plus_whitener: np.ndarray   # maps cap coefficients to whitened coordinates
    cap_minus_whitener: np.ndarray
    _power_cache: dict

    @property
    def dim(self) -> int:
        return self.action.dim

    @property
    def genus(self) -> int:
        return self.action.genus

    @property
    def n_slices(self) -> int:
        return len(self.slice_positions)

    def transport(self, n: int) -> np.ndarray:
        """A^-n as floats, cached."""
        if n not in self._power_cache:
            base = self.Ainv_float if n >= 0 else self.A_float
            out = np.eye(self.dim)
            for _ in range(abs(n)):
                out = base @ out
            self._power_cache[n] = out
        return self._power_cache[n]

    def slice_metric(self, n: int) -> np.ndarray:
        T = self.transport(n)
        return T.T @ self.G0 @ T

    def edge_metric(self, n: int) -> np.ndarray:
        """Metric of the edge between slices n and n+1: average of neighbors."""
        T = self.transport(n)
        return T.T @ self.H0 @ T

    def whiten_class(self, v: np.ndarray, n: int) -> np.ndarray:
        return self.W0 @ (self.transport(n) @ v)

    def unwhiten_class(self, vt: np.ndarray, n: int) -> np.ndarray:
        # A^n (W0^-1 vt): products only; solving against A^-n would hit its
        # lambda^2n condition number long before the powers overflow
        return self.transport(-n) @ np.linalg.solve(self.W0, vt)

    def operator(self) -> "FillingOperator":
        return _assemble_slice_operator(self)


@dataclass
class FillingOperator:
    """Whitened difference operator with its layout metadata.

    Square: the domain (interior edges plus two g-dimensional caps) matches
    the codomain (all slice classes) in dimension, so surjectivity, injectivity
    and invertibility coincide.
    """

    matrix: sp.csc_matrix
    n_slices: int
    dim: int
    cap_dims: tuple[int, int]
    kind: str
    model: object

    _lu: object = None
    _sigma_max_sq: float | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def lu(self):
        if self._lu is None:
            self._lu = spla.splu(self.matrix)
        return self._lu

    def norm_estimate(self) -> float:
        """Power-iteration estimate of the largest eigenvalue of D D^T."""
        if self._sigma_max_sq is None:
            m = self.matrix
            x = np.ones(m.shape[0])
            x /= np.linalg.norm(x)
            for _ in range(30):
                y = m @ (m.T @ x)
                nrm = np.linalg.norm(y)
                if nrm == 0:
                    break
                x = y / nrm
            self._sigma_max_sq = float(x @ (m @ (m.T @ x)))
        return self._sigma_max_sq


def _cholesky_factor(G: np.ndarray, what: str) -> np.ndarray:
    try:
        L = np.linalg.cholesky(np.asarray(G, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise PreconditionError(f"{what} is not positive definite") from exc
    return L.T  # G = W^T W with upper-triangular W


def build_slice_model(act: SymplecticAction, pair: LagrangianPair, N: int,
                      G0: np.ndarray | None = None,
                      convention: str = "symmetric") -> SliceModel:
    """Assemble the slice model for a pair of caps twisted N steps apart."""
    if N < 0:
        raise PreconditionError("N must be nonnegative")
    if convention not in ("symmetric", "one-sided"):
        raise PreconditionError(f"unknown convention {convention!r}")
    pair.validate_against(act)
    dim = act.dim
    if G0 is None:
        G0 = np.eye(dim)
    G0 = np.asarray(G0, dtype=float)
    if G0.shape != (dim, dim) or not np.allclose(G0, G0.T, atol=1e-12):
        raise PreconditionError("base metric must be symmetric of the action dimension")
    W0 = _cholesky_factor(G0, "base metric")

    A = act.matrix_float()
    Ainv = act.inverse_float()
    H0 = (G0 + Ainv.T @ G0 @ Ainv) / 2.0
    WH = _cholesky_factor(H0, "edge metric")
    WHinv = np.linalg.inv(WH)
    P = W0 @ WHinv
    Q = W0 @ Ainv @ WHinv

    # Cap bookkeeping. The whitening of a cap edge transports by the edge
    # position, the operator row by the adjacent slice position; the two
    # transports cancel the cap's own twist except for one factor of A on the
    # left (the edge metric averages one slice further out).
    plus_f = pair.plus_basis.to_float()
    minus_f = pair.minus_basis.to_float()
    if convention == "symmetric":
        positions = list(range(-N, N + 1))
        right_row, right_gram = plus_f, plus_f
        left_row, left_gram = minus_f, A @ minus_f
        right_raw = np.linalg.matrix_power(A, N) @ plus_f
        left_raw = np.linalg.matrix_power(Ainv, N) @ minus_f
    else:
        positions = list(range(0, 2 * N + 1))
        right_row, right_gram = minus_f, minus_f
        left_row, left_gram = plus_f, A @ plus_f
        right_raw = np.linalg.matrix_power(A, 2 * N) @ minus_f
        left_raw = plus_f

    F_right = _cholesky_factor(right_gram.T @ H0 @ right_gram, "right cap Gram")
    F_left = _cholesky_factor(left_gram.T @ H0 @ left_gram, "left cap Gram")

    return SliceModel(
        action=act,
        pair=pair,
        N=N,
        G0=G0,
        convention=convention,
        slice_positions=positions,
        A_float=A,
        Ainv_float=Ainv,
        W0=W0,
        H0=H0,
        WH=WH,
        block_P=P,
        block_Q=Q,
        cap_plus_block=W0 @ right_row @ np.linalg.inv(F_right),
        cap_minus_block=W0 @ left_row @ np.linalg.inv(F_left),
        cap_plus_raw=right_raw,
        cap_minus_raw=left_raw,
        cap_plus_whitener=F_right,
        cap_minus_whitener=F_left,
        _power_cache={},
    )


def _assemble_slice_operator(model: SliceModel) -> FillingOperator:
    dim = model.dim
    g = model.genus
    n_slices = model.n_slices
    n_interior = n_slices - 1
    rows = n_slices * dim
    cols = g + n_interior * dim + g

    data, ri, ci = [], [], []

    def put(block: np.ndarray, r0: int, c0: int, sign: float):
        for i in range(block.shape[0]):
            for j in range(block.shape[1]):
                x = block[i, j]
                if x != 0.0:
                    data.append(sign * x)
                    ri.append(r0 + i)
                    ci.append(c0 + j)

    for idx in range(n_slices):
        r0 = idx * dim
        if idx < n_slices - 1:
            put(model.block_P, r0, g + idx * dim, +1.0)
        else:
            put(model.cap_plus_block, r0, cols - g, +1.0)
        if idx > 0:
            put(model.block_Q, r0, g + (idx - 1) * dim, -1.0)
        else:
            put(model.cap_minus_block, r0, 0, -1.0)

    mat = sp.csc_matrix(sp.coo_matrix((data, (ri, ci)), shape=(rows, cols)))
    return FillingOperator(matrix=mat, n_slices=n_slices, dim=dim,
                           cap_dims=(g, g), kind="slice", model=model)


# -- surjectivity ----------------------------------------------------------

@dataclass(frozen=True)
class SurjectivityReport:
    surjective: bool
    defect: int
    cap_angle: float


def surjectivity(model: SliceModel) -> SurjectivityReport:
    """Caps span the ambient space iff the difference operator is onto."""
    left = model.cap_minus_raw
    right = model.cap_plus_raw
    ql, _ = np.linalg.qr(left)
    qr_, _ = np.linalg.qr(right)
    combined = np.hstack([ql, qr_])
    s = np.linalg.svd(combined, compute_uv=False)
    rank = int((s > SURJECTIVITY_TOL).sum())
    defect = model.dim - rank
    return SurjectivityReport(defect == 0, defect, subspace_angle(left, right))


# -- the gap ----------------------------------------------------------------

@dataclass(frozen=True)
class GapReport:
    """Smallest eigenvalue of the class Laplacian with its cofilling dual.

    cofill_constant is measured by actually solving for the witness's
    minimal primitive; duality says it equals lambda1^(-1/2).
    """

    lambda1: float
    cofill_constant: float
    witness: np.ndarray           # raw slice classes, shape (n_slices, dim)
    witness_whitened: np.ndarray
    residual: float
    iterations: int
    n_slices: int


def _inverse_iteration(op: FillingOperator, tol: float, max_iter: int) -> tuple[float, np.ndarray, float, int]:
    lu = op.lu()
    m = op.matrix
    scale = op.norm_estimate()
    n = m.shape[0]
    x = np.ones(n) / math.sqrt(n)
    lam = float(x @ (m @ (m.T @ x)))
    res = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        # (D D^T)^-1 x via two triangular solves on the same factorization
        y = lu.solve(lu.solve(x), trans="T")
        nrm = np.linalg.norm(y)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise FloatingPointError("inverse iteration produced a degenerate vector")
        x = y / nrm
        kx = m @ (m.T @ x)
        lam = float(x @ kx)
        res = float(np.linalg.norm(kx - lam * x))
        if res <= tol * scale:
            break
    return lam, x, res, it


def coexact_gap(model, tol: float = EIG_RESIDUAL_TOL, max_iter: int = 200_000) -> GapReport:
    """Bottom of the spectrum of D D^* by shift-free inverse iteration.

    Accepts a SliceModel, a ChainModel, or a bare FillingOperator. Raises
    SurjectivityError (naming the defect dimension) when the operator is not
    onto, which is the positive-b1 analog of the model.
    """
    if isinstance(model, SliceModel):
        rep = surjectivity(model)
        if not rep.surjective:
            raise SurjectivityError(rep.defect)
        op = model.operator()
    elif isinstance(model, ChainModel):
        defect = model.defect()
        if defect:
            raise SurjectivityError(defect)
        op = model.operator()
    elif isinstance(model, FillingOperator):
        op = model
    else:
        raise PreconditionError(f"cannot compute a gap for {type(model).__name__}")

    lam, x, res, it = _inverse_iteration(op, tol, max_iter)

    b = op.lu().solve(x)
    cofill_constant = float(np.linalg.norm(b))  # |x| = 1

    if isinstance(op.model, SliceModel):
        m = op.model
        witness = np.empty((m.n_slices, m.dim))
        for idx, n in enumerate(m.slice_positions):
            witness[idx] = m.unwhiten_class(x[idx * m.dim:(idx + 1) * m.dim], n)
    elif isinstance(op.model, ChainModel):
        w0 = op.model.W0
        witness = np.vstack([
            np.linalg.solve(w0, x[i * op.dim:(i + 1) * op.dim]) for i in range(op.n_slices)
        ])
    else:
        witness = x.reshape(op.n_slices, op.dim).copy()

    return GapReport(
        lambda1=lam,
        cofill_constant=cofill_constant,
        witness=witness,
        witness_whitened=x,
        residual=res,
        iterations=it,
        n_slices=op.n_slices,
    )


# -- cofilling ---------------------------------------------------------------

@dataclass(frozen=True)
class CofillResult:
    """Solution of D b = alpha with its norms in the model metrics."""

    interior_edges: np.ndarray       # (n_slices - 1, dim) raw edge vectors
    cap_minus_coeff: np.ndarray
    cap_plus_coeff: np.ndarray
    norm: float
    class_norm: float
    residual: float


def _whiten_classes(model: SliceModel, alpha: np.ndarray) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (model.n_slices, model.dim):
        raise DimensionError(f"expected classes of shape {(model.n_slices, model.dim)}, got {alpha.shape}")
    out = np.empty(model.n_slices * model.dim)
    for idx, n in enumerate(model.slice_positions):
        out[idx * model.dim:(idx + 1) * model.dim] = model.whiten_class(alpha[idx], n)
    return out


def cofill(model: SliceModel, alpha: np.ndarray, residual_tol: float = 1e-10) -> CofillResult:
    """Minimum-norm primitive of per-slice classes alpha.

    On a surjective model the operator is square invertible, so this is the
    unique primitive; otherwise alpha must lie in the range, and the
    least-squares residual is reported in the error when it does not.
    """
    at = _whiten_classes(model, alpha)
    op = model.operator()
    rep = surjectivity(model)
    if rep.surjective:
        bt = op.lu().solve(at)
    else:
        dense = op.matrix.toarray()
        bt, *_ = np.linalg.lstsq(dense, at, rcond=None)
        resid = np.linalg.norm(dense @ bt - at)
        if resid > residual_tol * max(np.linalg.norm(at), 1e-30):
            raise InconsistentClassError(float(resid))
    resid = float(np.linalg.norm(op.matrix @ bt - at))

    g = model.genus
    dim = model.dim
    n_int = model.n_slices - 1
    cap_minus = np.linalg.solve(model.cap_minus_whitener, bt[:g])
    cap_plus = np.linalg.solve(model.cap_plus_whitener, bt[g + n_int * dim:])
    interior = np.empty((n_int, dim))
    for i in range(n_int):
        n = model.slice_positions[i]  # edge between slices at positions[i], positions[i]+1
        seg = bt[g + i * dim: g + (i + 1) * dim]
        interior[i] = model.transport(-n) @ np.linalg.solve(model.WH, seg)
    return CofillResult(
        interior_edges=interior,
        cap_minus_coeff=cap_minus,
        cap_plus_coeff=cap_plus,
        norm=float(np.linalg.norm(bt)),
        class_norm=float(np.linalg.norm(at)),
        residual=resid,
    )


@dataclass(frozen=True)
class PushedPrimitive:
    """One-sided primitive built by pushing a cap-subspace class to the cap."""

    start_slice: int
    edge_vectors: np.ndarray      # constant class on edges from start to the cap
    cap_coeff: np.ndarray
    per_edge_norms: np.ndarray
    decay_base: float             # c = 1 / min expanding modulus
    decay_constant: float         # measured C with norms <= C c^(m-n) |alpha|
    total_norm: float


def pushed_primitive(model: SliceModel, alpha_n: np.ndarray, n: int) -> PushedPrimitive:
    """Feasible primitive of a class at slice n supported on [n, N] plus the cap.

    Requires the class to lie in the transported plus subspace (the right cap).
    The recursion pushes the class one slice at a time and absorbs it at the
    cap; in the reduced model the pushed representative is the class itself,
    so the edge data is constant and the per-edge norms decay geometrically.
    """
    if model.convention != "symmetric":
        raise PreconditionError("pushed primitives are implemented for the symmetric convention")
    if n not in model.slice_positions:
        raise PreconditionError(f"slice {n} out of range")
    alpha_n = np.asarray(alpha_n, dtype=float)
    cap = model.cap_plus_raw
    coeff, res, *_ = np.linalg.lstsq(cap, alpha_n, rcond=None)
    resid = np.linalg.norm(cap @ coeff - alpha_n)
    if resid > 1e-8 * max(np.linalg.norm(alpha_n), 1e-30):
        raise PreconditionError("class does not lie in the transported plus subspace")

    N = model.N
    edges = np.tile(alpha_n, (N - n + 1, 1))  # edges m+1/2 for m = n..N; last is the cap edge
    # norms in whitened form: the raw quadratic form cancels catastrophically
    # once the transported metric dwarfs the class
    norms = np.array([
        float(np.linalg.norm(model.WH @ (model.transport(m) @ alpha_n))) for m in range(n, N + 1)
    ])
    split = classify_spectrum(model.action)
    c = 1.0 / min(abs(w) for w in split.expanding_eigenvalues)
    ref = slice_norm(model, alpha_n, n)
    C = float(max(norms[m - n] / (c ** (m - n) * ref) for m in range(n, N + 1)))
    return PushedPrimitive(
        start_slice=n,
        edge_vectors=edges,
        cap_coeff=coeff,
        per_edge_norms=norms,
        decay_base=c,
        decay_constant=C,
        total_norm=float(np.linalg.norm(norms)),
    )


def slice_norm(model: SliceModel, v: np.ndarray, n: int) -> float:
    """Norm of a class at slice n in the pulled-back metric."""
    if n not in model.slice_positions:
        raise PreconditionError(f"slice {n} out of range [{model.slice_positions[0]}, {model.slice_positions[-1]}]")
    v = np.asarray(v, dtype=float)
    return float(np.linalg.norm(model.whiten_class(v, n)))


# -- transversality and decay ------------------------------------------------

@dataclass(frozen=True)
class TransversalityReport:
    constant: float        # C with |v+-|_0 <= C lambda1^(-1/2) |v|_0
    residual: float
    lambda1: float


def transversality_decomposition(model: SliceModel, v: np.ndarray,
                                 gap: GapReport | None = None):
    """Split v along the two transported cap subspaces; measure the constant."""
    rep = surjectivity(model)
    if not rep.surjective:
        raise SurjectivityError(rep.defect)
    v = np.asarray(v, dtype=float)
    basis = np.hstack([model.cap_plus_raw, model.cap_minus_raw])
    coeff = np.linalg.solve(basis, v)
    g = model.genus
    v_plus = model.cap_plus_raw @ coeff[:g]
    v_minus = model.cap_minus_raw @ coeff[g:]
    residual = float(np.linalg.norm(v - v_plus - v_minus) / max(np.linalg.norm(v), 1e-30))
    if gap is None:
        gap = coexact_gap(model)
    n0 = 0 if model.convention == "symmetric" else model.N
    denom = slice_norm(model, v, n0)
    C = max(slice_norm(model, v_plus, n0), slice_norm(model, v_minus, n0))
    C = float(C * math.sqrt(gap.lambda1) / max(denom, 1e-300))
    return v_plus, v_minus, TransversalityReport(C, residual, gap.lambda1)


@dataclass(frozen=True)
class DeltaReport:
    """Largest decay rate delta passing for every sampled plus-subspace class.

    The check compares the class norm at the far slice against the base slice:
    |v|_(N-1) <= lambda0^(-1/2) (1 - delta)^N |v|_0 for all samples.
    """

    delta: float | None
    lambda0: float
    samples: int
    violations: int
    degenerate: bool
    skipped: bool = False
    reason: str | None = None


def exp_decay_check(model: SliceModel, samples: int = 200, seed: int = 0,
                    gap: GapReport | None = None,
                    gap_floor: float = 1e-12) -> DeltaReport:
    """Sample transported-plus classes and measure their per-chain decay."""
    if model.convention != "symmetric":
        raise PreconditionError("decay check is implemented for the symmetric convention")
    rep = surjectivity(model)
    if not rep.surjective:
        raise SurjectivityError(rep.defect)
    if gap is None:
        gap = coexact_gap(model)
    lam = gap.lambda1
    if lam < gap_floor:
        return DeltaReport(None, lam, 0, 0, False, skipped=True,
                           reason=f"gap {lam:.3e} below threshold {gap_floor:.1e}")
    if model.N <= 1:
        return DeltaReport(None, lam, 0, 0, degenerate=True,
                           reason="window N <= 1 leaves delta unconstrained")

    rng = np.random.default_rng(seed)
    g = model.genus
    N = model.N
    worst = np.inf
    violations = 0
    for _ in range(samples):
        coeff = rng.standard_normal(g)
        nrm = np.linalg.norm(coeff)
        if nrm < 1e-12:
            continue
        v = model.cap_plus_raw @ (coeff / nrm)
        ratio = slice_norm(model, v, N - 1) / max(slice_norm(model, v, 0), 1e-300)
        scaled = ratio * math.sqrt(lam)
        delta_s = 1.0 - scaled ** (1.0 / N)
        worst = min(worst, delta_s)
        if delta_s <= 0:
            violations += 1
    return DeltaReport(float(worst), lam, samples, violations, False)


@dataclass(frozen=True)
class SequenceVerdict:
    holds: bool
    bound: float
    last_term: float
    margin: float


def sequence_lemma_check(C: float, a) -> SequenceVerdict:
    """Verify a_N <= C (1 + 1/C)^-(N-1) a_0 for an admissible positive sequence.

    Admissible means every tail sum past m is at most C a_m; the first
    offending m is named when the hypothesis fails.
    """
    a = [float(x) for x in a]
    if len(a) < 2:
        raise PreconditionError("need at least a_0 and a_1")
    if any(x <= 0 for x in a):
        raise PreconditionError("sequence terms must be positive")
    if C <= 0:
        raise PreconditionError("C must be positive")
    N = len(a) - 1
    tail = 0.0
    for m in range(N - 1, -1, -1):
        tail += a[m + 1]
        if tail > C * a[m] * (1 + 1e-12):
            raise PreconditionError(f"hypothesis fails first at m = {m}: tail {tail:.6g} > C*a_m {C * a[m]:.6g}")
    bound = C / (1 + 1 / C) ** (N - 1) * a[0]
    holds = a[N] <= bound * (1 + 1e-9)
    return SequenceVerdict(holds, bound, a[N], bound - a[N])


# -- torsion-vs-gap audit -----------------------------------------------------

@dataclass(frozen=True)
class AuditRow:
    N: int
    lambda1: float
    delta: float | None
    h1_order: int
    bound: float
    passes: bool


@dataclass(frozen=True)
class AuditTable:
    rows: tuple[AuditRow, ...]
    kappa: float

    @property
    def all_pass(self) -> bool:
        return all(r.passes for r in self.rows)


def torsion_gap_audit(family: GluingFamily, N_values, G0: np.ndarray | None = None,
                      samples: int = 100, seed: int = 0) -> AuditTable:
    """Check order(H1) >= kappa * lambda1^dim * (1 + delta)^N row by row.

    kappa is fitted at the smallest N, so that row passes with equality; rows
    where the torsion is infinite or the decay check is skipped are recorded
    with delta = None and a conservative (delta = 0) bound.
    """
    N_values = sorted(N_values)
    if not N_values:
        raise PreconditionError("empty N range")
    rows = []
    kappa = None
    for N in N_values:
        model = build_slice_model(family.action, family.pair, N, G0)
        gap = coexact_gap(model)
        delta_rep = exp_decay_check(model, samples=samples, seed=seed, gap=gap)
        delta = delta_rep.delta
        grp = glued_torsion(family, N)
        order = grp.order() if grp.is_finite else 0
        two_g = family.action.dim
        growth = (1.0 + (delta or 0.0)) ** N
        if kappa is None:
            kappa = order / (gap.lambda1 ** two_g * growth) if order else 1.0
        bound = kappa * gap.lambda1 ** two_g * growth
        passes = order >= bound * (1 - 1e-9) if order else False
        rows.append(AuditRow(N, gap.lambda1, delta, order, bound, passes))
    return AuditTable(tuple(rows), float(kappa))


# -- chain models -------------------------------------------------------------

@dataclass
class ChainModel:
    """Block-chain analog of the slice model: absorption at every interface.

    Each interface carries the ambient space with the base metric; its two
    kill subspaces provide absorption channels into the adjacent blocks,
    whitened so that each channel group is orthonormal in the class metric.
    The interfaces are homologically decoupled, so the operator is block
    diagonal and its gap is the worst interface gap, independent of length.
    """

    spec: object
    G0: np.ndarray
    W0: np.ndarray
    blocks: list[np.ndarray]     # whitened absorption block per interface
    dim: int

    def defect(self) -> int:
        total = 0
        for blk in self.blocks:
            s = np.linalg.svd(blk, compute_uv=False)
            total += int((s <= SURJECTIVITY_TOL).sum()) + max(self.dim - len(s), 0)
        return total

    def interface_defects(self) -> list[int]:
        out = []
        for blk in self.blocks:
            s = np.linalg.svd(blk, compute_uv=False)
            out.append(int((s <= SURJECTIVITY_TOL).sum()) + max(self.dim - len(s), 0))
        return out

    def operator(self) -> FillingOperator:
        mats = [sp.csc_matrix(b) for b in self.blocks]
        mat = sp.block_diag(mats, format="csc")
        return FillingOperator(matrix=mat, n_slices=len(self.blocks), dim=self.dim,
                               cap_dims=(0, 0), kind="chain", model=self)


def build_chain_model(spec, G0: np.ndarray | None = None) -> ChainModel:
    """Whitened absorption operator of a block chain.

    Every interior slice of the resulting model has full-rank local absorption
    exactly when the interface kill data is complementary; otherwise the model
    still builds and reports its surjectivity defect (ambient dimension minus
    the rank of the kill-lattice sum, per interface).
    """
    dim = spec.ambient_dim
    if G0 is None:
        G0 = np.eye(dim)
    G0 = np.asarray(G0, dtype=float)
    W0 = _cholesky_factor(G0, "base metric")
    blocks = []
    for iface in spec.interfaces:
        left = iface.left_kill.to_float()
        right = iface.right_kill.to_float()
        if iface.twist is not None:
            right = iface.twist.to_float() @ right
        parts = []
        for side, cols in (("left", left), ("right", right)):
            F = _cholesky_factor(cols.T @ G0 @ cols, f"{side} kill Gram")
            parts.append(W0 @ cols @ np.linalg.inv(F))
        blocks.append(np.hstack(parts))
    return ChainModel(spec=spec, G0=G0, W0=W0, blocks=blocks, dim=dim)


# -- scans ---------------------------------------------------------------------

def bass_note_scan(families: dict, N_values, G0: np.ndarray | None = None) -> list[tuple[float, str, int]]:
    """Sorted multiset of bottom eigenvalues across families and chain lengths."""
    out = []
    for name, family in families.items():
        for N in N_values:
            model = build_slice_model(family.action, family.pair, N, G0)
            rep = surjectivity(model)
            if not rep.surjective:
                continue
            gap = coexact_gap(model)
            out.append((gap.lambda1, name, N))
    out.sort()
    return out


# -- raw-metric cross validation ------------------------------------------------

def _raw_operator_and_metrics(model: SliceModel):
    dim, g = model.dim, model.genus
    n_slices = model.n_slices
    n_int = n_slices - 1
    rows = n_slices * dim
    cols = g + n_int * dim + g
    D = np.zeros((rows, cols))
    Wp = model.cap_plus_raw
    Wm = model.cap_minus_raw
    for idx in range(n_slices):
        r0 = idx * dim
        if idx < n_slices - 1:
            D[r0:r0 + dim, g + idx * dim: g + (idx + 1) * dim] += np.eye(dim)
        else:
            D[r0:r0 + dim, cols - g:] += Wp
        if idx > 0:
            D[r0:r0 + dim, g + (idx - 1) * dim: g + idx * dim] -= np.eye(dim)
        else:
            D[r0:r0 + dim, :g] -= Wm
    Mcod = np.zeros((rows, rows))
    for idx, n in enumerate(model.slice_positions):
        Mcod[idx * dim:(idx + 1) * dim, idx * dim:(idx + 1) * dim] = model.slice_metric(n)
    Mdom = np.zeros((cols, cols))
    first = model.slice_positions[0]
    Mdom[:g, :g] = Wm.T @ model.edge_metric(first - 1) @ Wm
    for i in range(n_int):
        n = model.slice_positions[i]
        Mdom[g + i * dim: g + (i + 1) * dim, g + i * dim: g + (i + 1) * dim] = model.edge_metric(n)
    Mdom[cols - g:, cols - g:] = Wp.T @ model.edge_metric(model.slice_positions[-1]) @ Wp
    return D, Mdom, Mcod


def raw_metric_gap(model: SliceModel, precision: str = "double", dps: int = 60) -> float:
    """lambda1 from the raw (unwhitened) generalized eigenproblem.

    In double precision the raw metrics carry condition |lambda|^(4N), so the
    result is only trustworthy for small N; `precision="extended"` reruns the
    same assembly in mpmath arithmetic with `dps` digits, which covers the
    cross-validation range.
    """
    D, Mdom, Mcod = _raw_operator_and_metrics(model)
    if precision == "double":
        S = D @ np.linalg.solve(Mdom, D.T)
        R = np.linalg.cholesky(Mcod).T
        C = R @ S @ R.T
        w = np.linalg.eigvalsh((C + C.T) / 2.0)
        return float(w[0])
    if precision != "extended":
        raise PreconditionError(f"unknown precision mode {precision!r}")

    import mpmath as mp

    with mp.workdps(dps):
        Dm = mp.matrix(D.tolist())
        Mdomm = mp.matrix(Mdom.tolist())
        Mcodm = mp.matrix(Mcod.tolist())
        # X solves Mdom X = D^T, column by column
        X = mp.zeros(Dm.cols, Dm.rows)
        for j in range(Dm.rows):
            rhs = mp.matrix([Dm[j, k] for k in range(Dm.cols)])
            col = mp.lu_solve(Mdomm, rhs)
            for i in range(Dm.cols):
                X[i, j] = col[i]
        S = Dm * X
        R = mp.cholesky(Mcodm).T
        C = R * S * R.T
        for i in range(C.rows):           # symmetrize
            for j in range(i):
                v = (C[i, j] + C[j, i]) / 2
                C[i, j] = v
                C[j, i] = v
        eigvals = mp.eigsy(C, eigvals_only=True)
        lam = min(eigvals)
        return float(lam)
