"""Torsion homology of twisted gluings and of block chains.

The first homology of a twisted Heegaard-type gluing is presented by the sum
of the two kill lattices, one of them transported by a power of the action;
everything is computed exactly through the Smith form.

Two built-in families anchor the library. `uniform_gap_family` is the genus-2
pseudo-Anosov action whose twisted gluings have torsion (Z/x_{2N})^2 with
x following the trace-6 recurrence; its slice models keep a uniform gap.
`decaying_gap_family` twists by a block-unimodular matrix, so its torsion
stays trivial while the slice gap collapses exponentially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DimensionError, PreconditionError
from .exact import FiniteAbelianGroup, IntMatrix, int_matrix_power, lattice_sum, quotient_group
from .symplectic import LagrangianPair, SymplecticAction


# -- built-in data ---------------------------------------------------------

def genus2_action() -> SymplecticAction:
    """The genus-2 action with eigenvalues 3 +- 2*sqrt(2), each of multiplicity 2."""
    return SymplecticAction.standard(IntMatrix([
        [4, 2, 3, 0],
        [2, 2, 0, 3],
        [1, 0, 2, -2],
        [0, 1, -2, 4],
    ]))


def unimodular_block_action() -> SymplecticAction:
    """diag(B, (B^T)^-1) for B = [[2,1],[1,1]]: hyperbolic, coordinate-plane invariant."""
    return SymplecticAction.standard(IntMatrix([
        [2, 1, 0, 0],
        [1, 1, 0, 0],
        [0, 0, 1, -1],
        [0, 0, -1, 2],
    ]))


def _coordinate_plane(dim: int, cols: tuple[int, ...]) -> IntMatrix:
    return IntMatrix([[1 if j == c else 0 for c in cols] for j in range(dim)])


def equal_lagrangian_pair() -> LagrangianPair:
    """Both handlebodies kill the same coordinate plane span(e1, e2).

    For the genus-2 action this is the pair whose twisted gluings realize the
    (Z/x_{2N})^2 torsion exactly, down to the rank-2 untwisted case x_0 = 0.
    """
    return LagrangianPair(_coordinate_plane(4, (0, 1)), _coordinate_plane(4, (0, 1)))


def complementary_pair() -> LagrangianPair:
    """span(e1, e2) against span(e3, e4): the untwisted gluing of a homology sphere."""
    return LagrangianPair(_coordinate_plane(4, (0, 1)), _coordinate_plane(4, (2, 3)))


def misaligned_pair() -> LagrangianPair:
    """A pair violating the zero-intersection conditions for the block action.

    The minus plane span(e1, e2) contains both an expanding and a contracting
    eigenvector of the first block; the generic plus plane transports onto the
    expanding subspace, driving the transversality angles to zero.
    """
    plus = IntMatrix([[1, 0], [0, 1], [1, 0], [0, 1]])
    return LagrangianPair(plus, _coordinate_plane(4, (0, 1)))


@dataclass(frozen=True)
class GluingFamily:
    """A twisted-gluing family: fixed action and kill pair, twist grows with N."""

    action: SymplecticAction
    pair: LagrangianPair
    twist_exponent_per_step: int = 2

    def __post_init__(self):
        self.pair.validate_against(self.action)

    def twist_power(self, N: int) -> int:
        return self.twist_exponent_per_step * N


def uniform_gap_family() -> GluingFamily:
    return GluingFamily(genus2_action(), equal_lagrangian_pair())


def decaying_gap_family() -> GluingFamily:
    """Trivial torsion for every N; the slice-model gap decays exponentially."""
    return GluingFamily(
        unimodular_block_action(),
        LagrangianPair(_coordinate_plane(4, (2, 3)), _coordinate_plane(4, (0, 1))),
    )


# -- operations ------------------------------------------------------------

def torsion_order_term(i: int) -> int:
    """i-th term of x_0 = 0, x_1 = 1, x_{i+1} = 6 x_i - x_{i-1}.

    This is the Chebyshev-type sequence attached to the eigenvalue pair
    3 +- 2*sqrt(2); for the uniform-gap family the N-times-twisted gluing has
    first homology (Z/x_{2N})^2, reading Z/0 as Z.
    """
    if i < 0:
        raise PreconditionError("index must be nonnegative")
    prev, cur = 0, 1
    if i == 0:
        return 0
    for _ in range(i - 1):
        prev, cur = cur, 6 * cur - prev
    return cur


def glued_torsion(family: GluingFamily, N: int) -> FiniteAbelianGroup:
    """First homology of the N-th twisted gluing, exactly.

    Presented in the frame of one boundary surface: the plus kill lattice
    plus the twist-transported minus kill lattice.
    """
    if N < 0:
        raise PreconditionError("N must be nonnegative")
    act = family.action
    twist = int_matrix_power(act.matrix, family.twist_power(N))
    presentation = lattice_sum(family.pair.plus_basis, twist @ family.pair.minus_basis)
    return quotient_group(presentation, act.dim)


class InfiniteTorsionError(PreconditionError):
    def __init__(self, N: int):
        self.N = N
        super().__init__(f"first homology has positive free rank at N = {N}")


@dataclass(frozen=True)
class RateReport:
    """Exact orders alongside log-growth diagnostics.

    tail_estimate is the last first-difference of log-orders, which converges
    to the true exponential rate far faster than log(order)/N does.
    """

    N_values: tuple[int, ...]
    orders: tuple[int, ...]
    log_over_n: tuple[float, ...]
    tail_estimate: float


def growth_rate(family: GluingFamily, N_max: int, N_min: int = 1) -> RateReport:
    """log-order growth of the family torsion over N in [N_min, N_max]."""
    if N_max < N_min:
        raise PreconditionError("empty N range")
    Ns, orders = [], []
    for N in range(N_min, N_max + 1):
        grp = glued_torsion(family, N)
        if not grp.is_finite:
            raise InfiniteTorsionError(N)
        Ns.append(N)
        orders.append(grp.order())
    logs = [math.log(o) for o in orders]
    log_over_n = [lg / N for lg, N in zip(logs, Ns)]
    if len(logs) >= 2:
        tail = logs[-1] - logs[-2]
    else:
        tail = log_over_n[-1]
    return RateReport(tuple(Ns), tuple(orders), tuple(log_over_n), tail)


# -- block chains ----------------------------------------------------------

@dataclass(frozen=True)
class InterfaceSpec:
    """Kill data at one gluing surface of a block chain.

    left_kill (right_kill) is the sublattice dying in the block on the left
    (right); the twist multiplies the right kill lattice, mirroring a gluing
    map inserted at this interface.
    """

    left_kill: IntMatrix
    right_kill: IntMatrix
    twist: IntMatrix | None = None

    def presentation(self) -> IntMatrix:
        right = self.right_kill if self.twist is None else self.twist @ self.right_kill
        return lattice_sum(self.left_kill, right)


@dataclass(frozen=True)
class BlockChainSpec:
    """A chain of homology-connect-sum blocks glued along interfaces in a line."""

    block_count: int
    interfaces: tuple[InterfaceSpec, ...]
    ambient_dim: int

    def __post_init__(self):
        if self.block_count < 2:
            raise PreconditionError("a chain needs at least two blocks")
        if len(self.interfaces) != self.block_count - 1:
            raise DimensionError(
                f"{self.block_count} blocks need {self.block_count - 1} interfaces, got {len(self.interfaces)}")
        for spec in self.interfaces:
            if spec.left_kill.rows != self.ambient_dim or spec.right_kill.rows != self.ambient_dim:
                raise DimensionError("interface kill lattices live in the wrong ambient dimension")


def standard_chain(block_count: int, twist: IntMatrix | None = None,
                   left_cols: tuple[int, ...] = (0, 1),
                   right_cols: tuple[int, ...] = (2, 3),
                   dim: int = 4) -> BlockChainSpec:
    """Identical complementary coordinate interfaces, optionally all twisted alike."""
    iface = InterfaceSpec(_coordinate_plane(dim, left_cols), _coordinate_plane(dim, right_cols), twist)
    return BlockChainSpec(block_count, tuple(iface for _ in range(block_count - 1)), dim)


@dataclass(frozen=True)
class ChainHomologyReport:
    group: FiniteAbelianGroup
    interface_complementary: tuple[bool, ...]
    local_killing: tuple[bool, ...]  # one verdict per interior block

    @property
    def all_killed_locally(self) -> bool:
        return all(self.local_killing)


def chain_homology(spec: BlockChainSpec) -> ChainHomologyReport:
    """First homology of the chain plus per-block local-killing verdicts.

    Each interface contributes the quotient of its lattice by the two kill
    lattices meeting there; the interfaces decouple because the two boundary
    surfaces of a connect-sum block are homologically independent. An interior
    block kills its interface classes locally exactly when both of its
    interfaces carry complementary kill data; non-complementary data is
    reported, never raised.
    """
    dim = spec.ambient_dim
    n_iface = len(spec.interfaces)
    presentations = [iface.presentation() for iface in spec.interfaces]

    # block-diagonal presentation of the direct sum over interfaces
    total_rows = dim * n_iface
    cols: list[list[int]] = []
    for idx, pres in enumerate(presentations):
        for j in range(pres.cols):
            col = [0] * total_rows
            for i in range(dim):
                col[idx * dim + i] = pres.entries[i][j]
            cols.append(col)
    if cols:
        stacked = IntMatrix([[col[i] for col in cols] for i in range(total_rows)])
        group = quotient_group(stacked, total_rows)
    else:
        group = FiniteAbelianGroup((), total_rows)

    complementary = tuple(p.rank() == dim for p in presentations)
    local = tuple(complementary[j] and complementary[j + 1] for j in range(n_iface - 1))
    return ChainHomologyReport(group, complementary, local)
