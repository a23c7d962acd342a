import math

import numpy as np
import pytest

from torgap import (
    DimensionError,
    IntMatrix,
    LagrangianPair,
    PreconditionError,
    SymplecticAction,
    check_conditions,
    classify_spectrum,
    complementary_pair,
    decay_constant_check,
    equal_lagrangian_pair,
    genus2_action,
    misaligned_pair,
    standard_symplectic_form,
    subspace_angle,
    uniform_transversality_scan,
    unimodular_block_action,
)

from oracles import (
    GENUS2_CONTRACTING_VALUE,
    GENUS2_CONTRACTING_VECTORS,
    GENUS2_EXPANDING_VALUE,
    GENUS2_EXPANDING_VECTORS,
    continued_fraction_terminates,
    random_symplectic,
)


def vec_to_subspace_angle(vec, basis):
    return subspace_angle(np.array(vec).reshape(-1, 1), basis)


def test_construction_rejects_bad_input():
    J = standard_symplectic_form(1)
    with pytest.raises(PreconditionError):
        SymplecticAction(IntMatrix([[1, 1], [1, 1]]), J)  # det 0
    with pytest.raises(PreconditionError):
        SymplecticAction(IntMatrix([[2, 0], [0, 2]]), J)  # det 4
    with pytest.raises(DimensionError):
        SymplecticAction(IntMatrix([[1]]), J)
    # any determinant-one 2x2 matrix is symplectic for the 2-dimensional form
    SymplecticAction(IntMatrix([[2, 1], [1, 1]]), J)


def test_genus2_spectrum():
    split = classify_spectrum(genus2_action())
    assert split.hyperbolic
    mods = sorted(abs(w) for w in split.eigenvalues)
    assert abs(mods[0] - GENUS2_CONTRACTING_VALUE) < 1e-9
    assert abs(mods[1] - GENUS2_CONTRACTING_VALUE) < 1e-9
    assert abs(mods[2] - GENUS2_EXPANDING_VALUE) < 1e-9
    assert abs(mods[3] - GENUS2_EXPANDING_VALUE) < 1e-9
    assert split.residual <= 1e-9
    for v in GENUS2_EXPANDING_VECTORS:
        assert vec_to_subspace_angle(v, split.expanding_basis) <= 1e-7
    for v in GENUS2_CONTRACTING_VECTORS:
        assert vec_to_subspace_angle(v, split.contracting_basis) <= 1e-7


def test_identity_not_hyperbolic():
    act = SymplecticAction(IntMatrix.identity(2), standard_symplectic_form(1))
    split = classify_spectrum(act)
    assert not split.hyperbolic


def test_block_action_spectrum():
    # characteristic polynomial of B = [[2,1],[1,1]] is x^2 - 3x + 1
    split = classify_spectrum(unimodular_block_action())
    assert split.hyperbolic
    phi = (3 + math.sqrt(5)) / 2
    mods = sorted(abs(w) for w in split.eigenvalues)
    assert abs(mods[0] - 1 / phi) < 1e-12 and abs(mods[1] - 1 / phi) < 1e-12
    assert abs(mods[2] - phi) < 1e-12 and abs(mods[3] - phi) < 1e-12


def test_invariant_subspaces_mapped_into_themselves():
    for act in (genus2_action(), unimodular_block_action()):
        split = classify_spectrum(act)
        A = act.matrix_float()
        for basis in (split.expanding_basis, split.contracting_basis):
            image = A @ basis
            coeff, *_ = np.linalg.lstsq(basis, image, rcond=None)
            resid = np.linalg.norm(basis @ coeff - image) / np.linalg.norm(image)
            assert resid <= 1e-10


def test_hyperbolic_integer_eigenvectors_are_irrational():
    # no hyperbolic element of GL(2g, Z) has a rational eigenvector: some
    # coordinate ratio must fail to unwind rationally within 20 quotients
    rng = np.random.default_rng(5)
    found = 0
    while found < 12:
        m = random_symplectic(rng, 2)
        act = SymplecticAction.standard(IntMatrix(m))
        split = classify_spectrum(act)
        if not split.hyperbolic:
            continue
        found += 1
        A = act.matrix_float()
        values, vectors = np.linalg.eig(A)
        for idx, w in enumerate(values):
            if abs(w.imag) > 1e-9:
                continue
            vec = np.real(vectors[:, idx])
            big = np.abs(vec) > 1e-8
            coords = vec[big]
            assert len(coords) >= 2
            ratios = [coords[i] / coords[0] for i in range(1, len(coords))]
            assert any(not continued_fraction_terminates(r, depth=20) for r in ratios)


def test_conditions_complementary_pair():
    rep = check_conditions(genus2_action(), complementary_pair())
    assert rep.all_hold and rep.complementary
    for ang in (rep.angle_plus_contracting, rep.angle_plus_expanding,
                rep.angle_minus_expanding, rep.angle_minus_contracting):
        assert ang > 0.1


def test_conditions_equal_pair_flagged_noncomplementary():
    rep = check_conditions(genus2_action(), equal_lagrangian_pair())
    assert rep.all_hold           # both kill subspaces avoid the bad eigenspaces
    assert not rep.complementary  # but they cannot span together


def test_conditions_misaligned_pair_fails():
    rep = check_conditions(unimodular_block_action(), misaligned_pair())
    assert not rep.minus_avoids_expanding
    assert rep.angle_minus_expanding < 1e-8


def test_conditions_require_hyperbolic():
    act = SymplecticAction(IntMatrix.identity(4), standard_symplectic_form(2))
    with pytest.raises(PreconditionError):
        check_conditions(act, complementary_pair())


def test_scan_equal_pair():
    table = uniform_transversality_scan(genus2_action(), equal_lagrangian_pair(), 14)
    assert table.K0 == 1                      # untwisted subspaces coincide
    assert table.angles[0, 0] < 1e-12
    assert table.infimum > 0.05
    # angles converge to the expanding/contracting angle
    for i in range(10, 15):
        for j in range(10, 15):
            assert abs(table.angles[i, j] - table.limit_angle) < 1e-6


def test_scan_orthogonal_at_origin():
    table = uniform_transversality_scan(genus2_action(), complementary_pair(), 2)
    assert abs(table.angles[0, 0] - math.pi / 2) < 1e-12


def test_scan_misaligned_pair_decays():
    table = uniform_transversality_scan(unimodular_block_action(), misaligned_pair(), 20)
    assert table.full_min < 1e-3
    col = table.angles[:, 0]
    assert all(col[i + 1] < col[i] for i in range(12))  # monotone along the twist


def test_scan_invariant_under_basis_change():
    act = genus2_action()
    pair = equal_lagrangian_pair()
    # replace each basis by an integer recombination of its columns
    U = IntMatrix([[2, 1], [1, 1]])
    pair2 = LagrangianPair(pair.plus_basis @ U, pair.minus_basis @ U)
    t1 = uniform_transversality_scan(act, pair, 6)
    t2 = uniform_transversality_scan(act, pair2, 6)
    assert np.allclose(t1.angles, t2.angles, atol=1e-10)


def test_scan_dimension_error():
    act = genus2_action()
    narrow = LagrangianPair(IntMatrix([[1], [0], [0], [0]]), IntMatrix([[0], [1], [0], [0]]))
    with pytest.raises(DimensionError):
        uniform_transversality_scan(act, narrow, 3)


def test_decay_constant_genus2():
    rep = decay_constant_check(genus2_action(), equal_lagrangian_pair().plus_basis,
                               k_max=15, samples=200, seed=1)
    assert abs(rep.c - GENUS2_CONTRACTING_VALUE) < 1e-12
    assert rep.violations == 0
    assert rep.sampled_max <= rep.exact_constant * (1 + 1e-9)
    assert np.isfinite(rep.exact_constant)


def test_decay_stable_under_doubling():
    act = genus2_action()
    plus = equal_lagrangian_pair().plus_basis
    r15 = decay_constant_check(act, plus, k_max=15, samples=100, seed=2)
    r30 = decay_constant_check(act, plus, k_max=30, samples=100, seed=2)
    assert abs(r30.exact_constant - r15.exact_constant) <= 0.05 * r15.exact_constant


def test_decay_fresh_seed_never_violates():
    act = genus2_action()
    plus = equal_lagrangian_pair().plus_basis
    base = decay_constant_check(act, plus, k_max=12, samples=150, seed=3)
    fresh = decay_constant_check(act, plus, k_max=12, samples=150, seed=12345)
    assert fresh.sampled_max <= base.exact_constant * (1 + 1e-9)


def test_decay_rejects_contracting_overlap():
    # the plane span(e1, e2) meets the contracting line of the first block
    with pytest.raises(PreconditionError):
        decay_constant_check(unimodular_block_action(),
                             IntMatrix([[1, 0], [0, 1], [0, 0], [0, 0]]),
                             k_max=10, samples=10)
