"""Symplectic actions on surface homology: spectra, transversality, decay.

The exact checks (symplecticity, isotropy, ranks) run in integer arithmetic;
the spectral side is floating point with explicit tolerances. Subspace angles
are always computed from orthonormalized bases, so every angle reported here
is basis-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PreconditionError
from .exact import IntMatrix

HYPERBOLIC_TOL = 1e-9          # |lambda| must differ from 1 by more than this
DIAGONALIZABLE_TOL = 1e-8      # smallest singular value of the eigenvector matrix
ANGLE_TOL = 1e-8               # principal angle below this counts as intersection


def standard_symplectic_form(genus: int) -> IntMatrix:
    """Pairing matrix in a basis (a_1..a_g, b_1..b_g) with a_i . b_j = delta_ij."""
    g = genus
    rows = []
    for i in range(2 * g):
        row = [0] * (2 * g)
        if i < g:
            row[i + g] = 1
        else:
            row[i - g] = -1
        rows.append(row)
    return IntMatrix(rows)


@dataclass(frozen=True)
class SymplecticAction:
    """An integer matrix acting on H_1 of a surface, preserving a pairing J."""

    matrix: IntMatrix
    form: IntMatrix

    def __post_init__(self):
        A, J = self.matrix, self.form
        if not A.is_square() or A.rows % 2:
            raise DimensionError("action must be square of even dimension")
        if J.rows != A.rows or J.cols != A.cols:
            raise DimensionError("form and action dimensions differ")
        if J.transpose() != -J:
            raise PreconditionError("form is not antisymmetric")
        if A.det() not in (1, -1):
            raise PreconditionError("action is not invertible over the integers")
        if (A.transpose() @ J @ A) != J:
            raise PreconditionError("matrix does not preserve the symplectic form")

    @classmethod
    def standard(cls, matrix: IntMatrix) -> "SymplecticAction":
        return cls(matrix, standard_symplectic_form(matrix.rows // 2))

    @property
    def genus(self) -> int:
        return self.matrix.rows // 2

    @property
    def dim(self) -> int:
        return self.matrix.rows

    def matrix_float(self) -> np.ndarray:
        return self.matrix.to_float()

    def inverse_float(self) -> np.ndarray:
        return self.matrix.inverse().to_float()


@dataclass(frozen=True)
class LagrangianPair:
    """Bases of the two half-dimensional kill subspaces of a gluing."""

    plus_basis: IntMatrix
    minus_basis: IntMatrix

    def validate_against(self, act: SymplecticAction) -> None:
        J = act.form
        g = act.genus
        for name, B in (("plus", self.plus_basis), ("minus", self.minus_basis)):
            if B.rows != act.dim:
                raise DimensionError(f"{name} basis lives in the wrong ambient dimension")
            if B.cols != g:
                raise DimensionError(f"{name} basis must have {g} columns")
            if B.rank() != g:
                raise PreconditionError(f"{name} basis is not full rank")
            pairing = B.transpose() @ J @ B
            if pairing != IntMatrix.zeros(g, g):
                raise PreconditionError(f"{name} subspace is not isotropic")


@dataclass(frozen=True)
class EigenSplit:
    """Real expanding/contracting splitting of a linear action."""

    eigenvalues: tuple[complex, ...]
    expanding_basis: np.ndarray
    contracting_basis: np.ndarray
    hyperbolic: bool
    residual: float
    diagnostic: str | None = None

    @property
    def expanding_eigenvalues(self) -> list[complex]:
        return [w for w in self.eigenvalues if abs(w) > 1]

    @property
    def contracting_eigenvalues(self) -> list[complex]:
        return [w for w in self.eigenvalues if abs(w) < 1]


def _principal_angles_qq(qu: np.ndarray, qv: np.ndarray) -> np.ndarray:
    """Principal angles between orthonormal bases, ascending.

    Cosine-based values lose accuracy below sqrt(eps), so angles whose cosine
    is close to 1 are recomputed from the sine formulation.
    """
    if qu.shape[1] == 0 or qv.shape[1] == 0:
        return np.array([])
    cos = np.clip(np.linalg.svd(qu.T @ qv, compute_uv=False), -1.0, 1.0)
    angles = np.arccos(cos)
    if cos[0] ** 2 > 0.5:
        proj = qv - qu @ (qu.T @ qv)
        sin = np.clip(np.linalg.svd(proj, compute_uv=False), 0.0, 1.0)[::-1]
        small = cos ** 2 > 0.5
        k = min(len(sin), len(angles))
        angles[:k][small[:k]] = np.arcsin(sin[:k][small[:k]])
    return angles


def _orth(M: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(np.asarray(M, dtype=float))
    return q[:, : M.shape[1]]


def subspace_angle(U: np.ndarray, V: np.ndarray) -> float:
    """Smallest principal angle (radians) between the column spans of U and V."""
    angles = _principal_angles_qq(_orth(U), _orth(V))
    if angles.size == 0:
        return np.pi / 2
    return float(angles[0])


def principal_angles(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    return _principal_angles_qq(_orth(U), _orth(V))


def _real_invariant_basis(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Real basis of the invariant subspace spanned by the given eigenpairs.

    Complex pairs contribute the real and imaginary parts of the member with
    positive imaginary eigenvalue; its conjugate partner is skipped.
    """
    cols = []
    skip = np.zeros(len(values), dtype=bool)
    for i, w in enumerate(values):
        if skip[i]:
            continue
        v = vectors[:, i]
        if abs(w.imag) < 1e-12:
            cols.append(np.real(v))
        else:
            if w.imag < 0:
                v = np.conj(v)
            cols.append(np.real(v))
            cols.append(np.imag(v))
            for j in range(i + 1, len(values)):
                if not skip[j] and abs(values[j] - np.conj(w)) < 1e-9 * max(1.0, abs(w)):
                    skip[j] = True
                    break
    if not cols:
        return np.zeros((vectors.shape[0], 0))
    return np.column_stack(cols)


def classify_spectrum(act: SymplecticAction, tol: float = HYPERBOLIC_TOL) -> EigenSplit:
    """Eigen-decompose the action and split into expanding/contracting parts.

    hyperbolic is True only when every eigenvalue modulus differs from 1 by
    more than `tol` and the matrix is diagonalizable within tolerance; a
    defective spectrum is reported, not raised.
    """
    A = act.matrix_float()
    values, vectors = np.linalg.eig(A)
    order = np.lexsort((-values.imag, -values.real, -np.abs(values)))
    values = values[order]
    vectors = vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0)

    residual = np.linalg.norm(A @ vectors - vectors * values) / max(np.linalg.norm(A), 1.0)
    sigma_min = np.linalg.svd(vectors, compute_uv=False)[-1]

    diagnostic = None
    hyperbolic = True
    if sigma_min < DIAGONALIZABLE_TOL:
        hyperbolic = False
        diagnostic = f"not diagonalizable within tolerance (sigma_min {sigma_min:.2e})"
    if any(abs(abs(w) - 1.0) <= tol for w in values):
        hyperbolic = False
        diagnostic = diagnostic or "eigenvalue of modulus 1 within tolerance"

    exp_mask = np.abs(values) > 1.0 + tol
    con_mask = np.abs(values) < 1.0 - tol
    expanding = _real_invariant_basis(values[exp_mask], vectors[:, exp_mask])
    contracting = _real_invariant_basis(values[con_mask], vectors[:, con_mask])

    return EigenSplit(
        eigenvalues=tuple(complex(w) for w in values),
        expanding_basis=expanding,
        contracting_basis=contracting,
        hyperbolic=hyperbolic,
        residual=float(residual),
        diagnostic=diagnostic,
    )


@dataclass(frozen=True)
class ConditionReport:
    """Zero-intersection checks of a Lagrangian pair against the eigen-splitting."""

    plus_avoids_contracting: bool
    minus_avoids_expanding: bool
    complementary: bool
    angle_plus_contracting: float
    angle_plus_expanding: float
    angle_minus_expanding: float
    angle_minus_contracting: float
    threshold: float

    @property
    def all_hold(self) -> bool:
        return self.plus_avoids_contracting and self.minus_avoids_expanding


def check_conditions(act: SymplecticAction, pair: LagrangianPair,
                     threshold: float = ANGLE_TOL) -> ConditionReport:
    """Check that the plus (minus) subspace misses the contracting (expanding) side."""
    pair.validate_against(act)
    split = classify_spectrum(act)
    if not split.hyperbolic:
        raise PreconditionError(f"action is not hyperbolic: {split.diagnostic}")
    P = pair.plus_basis.to_float()
    M = pair.minus_basis.to_float()
    a_pc = subspace_angle(P, split.contracting_basis)
    a_pe = subspace_angle(P, split.expanding_basis)
    a_me = subspace_angle(M, split.expanding_basis)
    a_mc = subspace_angle(M, split.contracting_basis)
    comb = np.hstack([P, M])
    rank = int(np.linalg.matrix_rank(comb, tol=1e-10 * max(1.0, np.abs(comb).max())))
    return ConditionReport(
        plus_avoids_contracting=a_pc > threshold,
        minus_avoids_expanding=a_me > threshold,
        complementary=rank == act.dim,
        angle_plus_contracting=a_pc,
        angle_plus_expanding=a_pe,
        angle_minus_expanding=a_me,
        angle_minus_contracting=a_mc,
        threshold=threshold,
    )


@dataclass(frozen=True)
class AngleTable:
    """Grid of smallest principal angles between transported kill subspaces.

    angles[i, j] is the angle between A^i (plus) and A^-j (minus). K0 is the
    smallest s such that every pair with i + j >= s clears the angle floor
    (None when no such s exists within the scanned grid).
    """

    angles: np.ndarray
    K0: int | None
    infimum: float
    full_min: float
    limit_angle: float | None
    angle_floor: float

    def min_for_sum_at_least(self, s: int) -> float:
        k = self.angles.shape[0] - 1
        vals = [self.angles[i, j] for i in range(k + 1) for j in range(k + 1) if i + j >= s]
        return float(min(vals)) if vals else np.pi / 2


def uniform_transversality_scan(act: SymplecticAction, pair: LagrangianPair,
                                k_max: int, angle_floor: float = ANGLE_TOL) -> AngleTable:
    """Scan angles between forward-transported plus and backward-transported minus.

    The subspaces are re-orthonormalized at every step, so arbitrarily high
    powers stay well conditioned and the result depends only on the subspaces.
    """
    pair.validate_against(act)
    g = act.genus
    if pair.plus_basis.cols + pair.minus_basis.cols != act.dim:
        raise DimensionError("kill subspace dimensions must sum to the ambient dimension")
    A = act.matrix_float()
    Ainv = act.inverse_float()

    plus_orbits = [np.linalg.qr(pair.plus_basis.to_float())[0][:, :g]]
    minus_orbits = [np.linalg.qr(pair.minus_basis.to_float())[0][:, :g]]
    for _ in range(k_max):
        plus_orbits.append(np.linalg.qr(A @ plus_orbits[-1])[0][:, :g])
        minus_orbits.append(np.linalg.qr(Ainv @ minus_orbits[-1])[0][:, :g])

    angles = np.empty((k_max + 1, k_max + 1))
    for i in range(k_max + 1):
        for j in range(k_max + 1):
            angles[i, j] = _principal_angles_qq(plus_orbits[i], minus_orbits[j])[0]

    # suffix minima over anti-diagonal sums i + j >= s
    suffix = np.full(2 * k_max + 2, np.inf)
    for i in range(k_max + 1):
        for j in range(k_max + 1):
            s = i + j
            if angles[i, j] < suffix[s]:
                suffix[s] = angles[i, j]
    for s in range(2 * k_max - 1, -1, -1):
        suffix[s] = min(suffix[s], suffix[s + 1])

    K0 = next((s for s in range(2 * k_max + 1) if suffix[s] >= angle_floor), None)
    infimum = float(suffix[K0]) if K0 is not None else float(angles.min())

    split = classify_spectrum(act)
    limit = None
    if split.hyperbolic and split.expanding_basis.shape[1] and split.contracting_basis.shape[1]:
        limit = subspace_angle(split.expanding_basis, split.contracting_basis)

    return AngleTable(
        angles=angles,
        K0=K0,
        infimum=infimum,
        full_min=float(angles.min()),
        limit_angle=limit,
        angle_floor=angle_floor,
    )


@dataclass(frozen=True)
class DecayReport:
    """Measured constant for the forward-decay inequality on a plus subspace.

    c is the reciprocal of the smallest expanding eigenvalue modulus; the
    proof's inequality chain forces this minimizer (a larger modulus would
    fail for the slower expanding directions). exact_constant is the true
    supremum over the subspace, computed per (j, k) as a generalized Rayleigh
    quotient; sampled_max is the empirical value over the seeded samples.
    """

    c: float
    exact_constant: float
    sampled_max: float
    violations: int
    k_max: int
    samples: int
    seed: int


def decay_constant_check(act: SymplecticAction, plus_subspace: IntMatrix,
                         k_max: int, samples: int, seed: int = 0) -> DecayReport:
    """Measure sup over w, 0 <= j <= k <= k_max of |A^j w| / (c^(k-j) |A^k w|)."""
    split = classify_spectrum(act)
    if not split.hyperbolic:
        raise PreconditionError(f"action is not hyperbolic: {split.diagnostic}")
    W = plus_subspace.to_float()
    if subspace_angle(W, split.contracting_basis) <= ANGLE_TOL:
        raise PreconditionError("plus subspace meets the contracting subspace")

    moduli = [abs(w) for w in split.expanding_eigenvalues]
    c = 1.0 / min(moduli)
    A = act.matrix_float()

    # transported Gram matrices G_j = (A^j W)^T (A^j W) on coefficient space
    mats = [W.copy()]
    for _ in range(k_max):
        mats.append(A @ mats[-1])
    grams = [m.T @ m for m in mats]

    # exact supremum: for each j <= k the best ratio is the largest generalized
    # eigenvalue of (c^(2j) G_j, c^(2k) G_k); scaling by c^j keeps both sides
    # of the pencil at comparable magnitude
    import scipy.linalg as sla

    exact = 0.0
    scaled = [grams[j] * c ** (2 * j) for j in range(k_max + 1)]
    for k in range(k_max + 1):
        for j in range(k):
            w = sla.eigh(scaled[j], scaled[k], eigvals_only=True)
            exact = max(exact, float(np.sqrt(max(w))))
    exact = max(exact, 1.0)  # j = k gives ratio 1 identically

    rng = np.random.default_rng(seed)
    gdim = W.shape[1]
    sampled = 0.0
    violations = 0
    for _ in range(samples):
        coeff = rng.standard_normal(gdim)
        nrm = np.linalg.norm(coeff)
        if nrm < 1e-12:
            continue
        coeff /= nrm
        # s_j = c^j |A^j w|; ratio(j,k) = s_j / s_k for j <= k
        s = np.array([c ** j * np.sqrt(coeff @ grams[j] @ coeff) for j in range(k_max + 1)])
        run_max = np.maximum.accumulate(s)
        ratio = float(np.max(run_max / s))
        sampled = max(sampled, ratio)
        if ratio > exact * (1 + 1e-9):
            violations += 1

    return DecayReport(
        c=c,
        exact_constant=exact,
        sampled_max=sampled,
        violations=violations,
        k_max=k_max,
        samples=samples,
        seed=seed,
    )
