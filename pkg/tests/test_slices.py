import math

import numpy as np
import pytest

from torgap import (
    IntMatrix,
    LagrangianPair,
    PreconditionError,
    SurjectivityError,
    SymplecticAction,
    bass_note_scan,
    build_chain_model,
    build_slice_model,
    coexact_gap,
    cofill,
    exp_decay_check,
    pushed_primitive,
    raw_metric_gap,
    sequence_lemma_check,
    slice_norm,
    standard_chain,
    surjectivity,
    torsion_gap_audit,
    transversality_decomposition,
)
from torgap.errors import InconsistentClassError
from torgap.torsion import _coordinate_plane

from oracles import GENUS2_CONTRACTING_VALUE, GENUS2_EXPANDING_VALUE, GENUS2_EXPANDING_VECTORS, random_unimodular

LAM = GENUS2_EXPANDING_VALUE


def model_for(family, N, G0=None, convention="symmetric"):
    return build_slice_model(family.action, family.pair, N, G0, convention=convention)


# -- construction -------------------------------------------------------------


def test_untwisted_model_shape(good_family):
    m = model_for(good_family, 0)
    assert m.n_slices == 1
    assert np.allclose(m.cap_plus_raw, good_family.pair.plus_basis.to_float())
    assert np.allclose(m.cap_minus_raw, good_family.pair.minus_basis.to_float())
    # equal caps cannot span: the positive-b1 analog
    rep = surjectivity(m)
    assert not rep.surjective and rep.defect == 2
    with pytest.raises(SurjectivityError):
        coexact_gap(m)


def test_metric_spread_and_block_conditioning(good_family):
    m = model_for(good_family, 5)
    s = np.linalg.svd(m.transport(5), compute_uv=False)
    spread = math.log((s[0] / s[-1]) ** 2)  # eigenvalue spread of G_5
    assert abs(spread - 20 * math.log(LAM)) <= 0.01 * 20 * math.log(LAM)
    kA = np.linalg.cond(good_family.action.matrix_float())
    for blk in (m.block_P, m.block_Q):
        assert np.linalg.cond(blk) <= kA ** 2 * (1 + 1e-9)


def test_pullback_consistency(good_family):
    # |A^n u|_{G_n} = |u|_{G_0}; the achievable relative accuracy is limited
    # by representing A^n u in floats, whose conditioning grows like cond(A)^2n
    m = model_for(good_family, 6)
    rng = np.random.default_rng(0)
    kA = np.linalg.cond(m.A_float)
    for _ in range(30):
        u = rng.standard_normal(4)
        n = int(rng.integers(-6, 7))
        v = m.transport(-n) @ u
        err = abs(slice_norm(m, v, n) - np.linalg.norm(u))
        tol = 1e-10 if abs(n) <= 3 else 100 * np.finfo(float).eps * kA ** (2 * abs(n))
        assert err <= tol * np.linalg.norm(u)


def test_bad_metric_rejected(good_family):
    with pytest.raises(PreconditionError):
        model_for(good_family, 2, G0=np.diag([1.0, -1.0, 1.0, 1.0]))
    with pytest.raises(PreconditionError):
        model_for(good_family, -1)


# -- the gap -------------------------------------------------------------------


def test_untwisted_complementary_gap_closed_form(good_family):
    # one slice, two cap edges: the operator is the 4x4 matrix of whitened cap
    # embeddings, assembled here by hand and solved densely as the oracle
    from torgap import complementary_pair

    act = good_family.action
    pair = complementary_pair()
    m = build_slice_model(act, pair, 0)
    A = act.matrix_float()
    H0 = (np.eye(4) + np.linalg.inv(A).T @ np.linalg.inv(A)) / 2
    plus = pair.plus_basis.to_float()
    minus = A @ pair.minus_basis.to_float()   # left cap edge sits one step out
    Fp = np.linalg.cholesky(plus.T @ H0 @ plus).T
    Fm = np.linalg.cholesky(minus.T @ H0 @ minus).T
    dense = np.hstack([
        pair.plus_basis.to_float() @ np.linalg.inv(Fp),
        -pair.minus_basis.to_float() @ np.linalg.inv(Fm),
    ])
    expect = np.linalg.svd(dense, compute_uv=False)[-1] ** 2
    got = coexact_gap(m).lambda1
    assert abs(got - expect) <= 1e-12 * expect


def test_block_conditioning_nontrivial_metric(good_family):
    G0 = np.diag([1.0, 2.0, 5.0, 0.5])
    m = model_for(good_family, 3, G0=G0)
    kA = np.linalg.cond(good_family.action.matrix_float())
    kG = np.linalg.cond(G0)
    for blk in (m.block_P, m.block_Q):
        assert np.linalg.cond(blk) <= kA ** 2 * kG * (1 + 1e-9)


def test_gap_uniform_for_good_family(good_family):
    vals = [coexact_gap(model_for(good_family, N)).lambda1 for N in range(2, 13)]
    assert min(vals) / max(vals) >= 0.5


def test_gap_decays_for_bad_family(bad_family):
    vals = [coexact_gap(model_for(bad_family, N)).lambda1 for N in range(2, 9)]
    ratios = [b / a for a, b in zip(vals, vals[1:])]
    assert all(r <= 0.9 for r in ratios)
    # slope of the one-dimensional reduction: the extremal class rides the
    # slow line from the far end, paying the expanding modulus twice per step
    phi = (3 + math.sqrt(5)) / 2
    slope = (math.log(vals[-1]) - math.log(vals[0])) / (len(vals) - 1)
    assert abs(slope - (-4 * math.log(phi))) / (4 * math.log(phi)) < 0.1


def test_gap_monotone_for_bad_family(bad_family):
    vals = [coexact_gap(model_for(bad_family, N)).lambda1 for N in range(1, 8)]
    for a, b in zip(vals, vals[1:]):
        assert b <= a * (1 + 1e-9)


def test_duality_cofill_equals_inverse_sqrt_gap(good_family, bad_family):
    models = [model_for(good_family, N) for N in (1, 3, 6)]
    models += [model_for(bad_family, N) for N in (2, 4)]
    for m in models:
        gap = coexact_gap(m)
        target = gap.lambda1 ** -0.5
        assert abs(gap.cofill_constant - target) / target <= 1e-6


def test_whitened_matches_raw_double(good_family):
    for N in (1, 2):
        m = model_for(good_family, N)
        assert abs(coexact_gap(m).lambda1 - raw_metric_gap(m, "double")) <= 1e-8 * raw_metric_gap(m, "double")


def test_whitened_matches_raw_extended(good_family):
    m = model_for(good_family, 4)
    raw = raw_metric_gap(m, "extended")
    assert abs(coexact_gap(m).lambda1 - raw) <= 1e-10 * raw


def test_frame_invariance(good_family):
    rng = np.random.default_rng(9)
    base = coexact_gap(model_for(good_family, 4)).lambda1
    act = good_family.action
    for _ in range(3):
        Q = IntMatrix(random_unimodular(rng, 4))
        Qi = Q.inverse()
        conj = SymplecticAction(Qi @ act.matrix @ Q, Q.transpose() @ act.form @ Q)
        pair = LagrangianPair(Qi @ good_family.pair.plus_basis, Qi @ good_family.pair.minus_basis)
        Qf = Q.to_float()
        G0 = Qf.T @ Qf
        lam = coexact_gap(build_slice_model(conj, pair, 4, G0)).lambda1
        assert abs(lam - base) / base <= 1e-9


def test_metric_scaling_exact_invariance(good_family):
    m1 = model_for(good_family, 3)
    m4 = model_for(good_family, 3, G0=4.0 * np.eye(4))
    assert np.array_equal(m1.operator().matrix.toarray(), m4.operator().matrix.toarray())
    assert coexact_gap(m1).lambda1 == coexact_gap(m4).lambda1


def test_one_sided_convention_agrees(good_family, bad_family):
    for fam in (good_family, bad_family):
        a = coexact_gap(model_for(fam, 4)).lambda1
        b = coexact_gap(model_for(fam, 4, convention="one-sided")).lambda1
        assert abs(a - b) / a <= 1e-9


# -- cofilling ------------------------------------------------------------------


def test_cofill_zero(good_family):
    m = model_for(good_family, 3)
    out = cofill(m, np.zeros((m.n_slices, m.dim)))
    assert out.norm == 0.0


def test_cofill_feasible_and_minimal(good_family):
    m = model_for(good_family, 4)
    op = m.operator()
    rng = np.random.default_rng(4)
    gap = coexact_gap(m)
    for _ in range(25):
        bt = rng.standard_normal(op.shape[1])
        at = op.matrix @ bt
        alpha = np.empty((m.n_slices, m.dim))
        for idx, n in enumerate(m.slice_positions):
            alpha[idx] = m.unwhiten_class(at[idx * m.dim:(idx + 1) * m.dim], n)
        out = cofill(m, alpha)
        assert out.residual <= 1e-10 * max(out.class_norm, 1.0)
        assert out.norm <= np.linalg.norm(bt) * (1 + 1e-9)
        assert out.norm <= gap.cofill_constant * out.class_norm * (1 + 1e-9)


def test_cofill_extremal_attains_constant(good_family):
    m = model_for(good_family, 5)
    gap = coexact_gap(m)
    out = cofill(m, gap.witness)
    ratio = out.norm / out.class_norm
    assert abs(ratio - gap.cofill_constant) / gap.cofill_constant <= 1e-6


def test_cofill_inconsistent_class(good_family):
    m = model_for(good_family, 0)  # equal caps: not surjective
    alpha = np.zeros((1, 4))
    alpha[0] = [0.0, 0.0, 1.0, 0.0]  # outside span(e1, e2)
    with pytest.raises(InconsistentClassError):
        cofill(m, alpha)


# -- pushed primitives ------------------------------------------------------------


def test_pushed_primitive_eigenvector_geometric(good_family):
    # a float eigenvector carries eps-size contamination of the opposite
    # eigenspace, amplified by lambda^2m under transport; the first few
    # pushes stay inside the 1e-8 window
    m = model_for(good_family, 8)
    v = np.array(GENUS2_EXPANDING_VECTORS[0])
    out = pushed_primitive(m, v, 2)
    ratios = out.per_edge_norms[1:] / out.per_edge_norms[:-1]
    assert np.all(np.abs(ratios[:4] - GENUS2_CONTRACTING_VALUE) <= 1e-8)


def test_pushed_primitive_at_cap(good_family):
    m = model_for(good_family, 4)
    coeff = np.array([1.0, -2.0])
    alpha = m.cap_plus_raw @ coeff
    out = pushed_primitive(m, alpha, 4)
    assert out.edge_vectors.shape == (1, 4)
    expected = math.sqrt(alpha @ m.edge_metric(4) @ alpha)
    assert abs(out.per_edge_norms[0] - expected) <= 1e-12 * expected


def test_pushed_primitive_dominates_cofill(good_family):
    m = model_for(good_family, 5)
    rng = np.random.default_rng(8)
    for _ in range(5):
        alpha = m.cap_plus_raw @ rng.standard_normal(2)
        n = int(rng.integers(-2, 4))
        out = pushed_primitive(m, alpha, n)
        dense = np.zeros((m.n_slices, m.dim))
        dense[m.slice_positions.index(n)] = alpha
        best = cofill(m, dense)
        assert out.total_norm >= best.norm * (1 - 1e-9)


def test_pushed_primitive_rejects_outside_class(good_family):
    m = model_for(good_family, 3)
    v = m.cap_minus_raw[:, 0]  # in the minus cap, not the plus cap
    with pytest.raises(PreconditionError):
        pushed_primitive(m, v, 0)


# -- norms, splittings, decay ------------------------------------------------------


def test_slice_norm_basics(good_family):
    m = model_for(good_family, 3)
    assert slice_norm(m, np.array([1.0, 0, 0, 0]), 0) == 1.0
    v = np.array(GENUS2_EXPANDING_VECTORS[1])
    r = slice_norm(m, v, 3) / slice_norm(m, v, 2)
    assert abs(r - 1 / LAM) <= 1e-12
    with pytest.raises(PreconditionError):
        slice_norm(m, v, 9)


def test_transversality_decomposition(good_family):
    m = model_for(good_family, 10)
    gap = coexact_gap(m)
    v = m.cap_plus_raw @ np.array([0.3, -1.2])
    vp, vm, rep = transversality_decomposition(m, v, gap)
    assert np.linalg.norm(vm) <= 1e-9 * np.linalg.norm(v)
    v2 = np.array([1.0, 0.0, 1.0, 0.0])
    vp, vm, rep = transversality_decomposition(m, v2, gap)
    assert rep.residual <= 1e-10
    assert np.allclose(vp + vm, v2)


def test_transversality_constant_tracks_gap_for_bad_family(bad_family):
    v = np.array([1.0, 0.0, 1.0, 0.0])
    logc, loglam = [], []
    for N in (2, 4, 6, 8):
        m = model_for(bad_family, N)
        gap = coexact_gap(m)
        _, _, rep = transversality_decomposition(m, v, gap)
        logc.append(math.log(rep.constant))
        loglam.append(math.log(gap.lambda1))
    slope_c = (logc[-1] - logc[0]) / 6
    slope_l = (loglam[-1] - loglam[0]) / 6
    assert abs(slope_c - 0.5 * slope_l) <= 0.15 * abs(0.5 * slope_l)


def test_exp_decay_good_family(good_family):
    m = model_for(good_family, 12)
    rep = exp_decay_check(m, samples=150, seed=2)
    assert not rep.skipped and not rep.degenerate
    assert rep.delta > 0
    assert rep.violations == 0


def test_exp_decay_eigenvector_geometric(good_family):
    m = model_for(good_family, 6)
    v = np.array(GENUS2_EXPANDING_VECTORS[0])
    for n in range(0, 5):
        r = slice_norm(m, v, n + 1) / slice_norm(m, v, n)
        assert abs(r - GENUS2_CONTRACTING_VALUE) <= 1e-8


def test_exp_decay_degenerate_window(good_family):
    m = model_for(good_family, 1)
    rep = exp_decay_check(m, samples=10, seed=0)
    assert rep.degenerate and rep.delta is None


def test_exp_decay_skipped_below_gap_floor(bad_family):
    m = model_for(bad_family, 14)
    rep = exp_decay_check(m, samples=10, seed=0)
    assert rep.skipped


# -- sequence lemma ------------------------------------------------------------------


def test_sequence_lemma_geometric_extremal():
    C = 3.0
    r = 1.0 / (1.0 + 1.0 / C)
    a = [r ** n for n in range(12)]
    verdict = sequence_lemma_check(C, a)
    assert verdict.holds
    # the geometric sequence meets the bound exactly up to the factor C/(C+1) * (1+C)
    assert verdict.last_term >= verdict.bound / (C + 1) * (1 - 1e-12)


def test_sequence_lemma_base_case():
    verdict = sequence_lemma_check(2.0, [5.0, 7.0])
    assert verdict.holds and verdict.bound == 2.0 * 5.0


def test_sequence_lemma_names_offender():
    with pytest.raises(PreconditionError, match="m = 1"):
        sequence_lemma_check(0.5, [1.0, 1.0, 10.0])


def test_sequence_lemma_randomized():
    rng = np.random.default_rng(31)
    for _ in range(300):
        n = int(rng.integers(2, 22))
        a = np.exp(rng.normal(0.0, 1.5, size=n))
        tails = np.cumsum(a[::-1])[::-1]
        C = max(tails[m + 1] / a[m] for m in range(n - 1))
        verdict = sequence_lemma_check(float(C), list(a))
        assert verdict.holds


# -- audit, chains, scans ----------------------------------------------------------------


def test_audit_small_range(good_family):
    table = torsion_gap_audit(good_family, range(2, 7), samples=40, seed=0)
    assert table.all_pass
    assert table.rows[0].bound <= table.rows[0].h1_order * (1 + 1e-9)
    # decay rates stay proportional to the gap across the family: the fitted
    # ratio is uniformly positive and the rates sit in a narrow band
    ratios = [r.delta / r.lambda1 for r in table.rows]
    deltas = [r.delta for r in table.rows]
    assert min(ratios) > 0
    assert max(deltas) - min(deltas) <= 0.2


def test_audit_bad_family_contrapositive(bad_family):
    table = torsion_gap_audit(bad_family, range(2, 7), samples=20, seed=0)
    lams = [r.lambda1 for r in table.rows]
    assert all(r.h1_order == 1 for r in table.rows)
    assert lams[-1] < 1e-2 * lams[0]  # bounded torsion forces a vanishing gap


def test_chain_gap_independent_of_length():
    g3 = coexact_gap(build_chain_model(standard_chain(3))).lambda1
    g10 = coexact_gap(build_chain_model(standard_chain(10))).lambda1
    g100 = coexact_gap(build_chain_model(standard_chain(100))).lambda1
    assert abs(g10 - g3) <= 0.05 * g3
    assert abs(g100 - g10) <= 0.10 * g10


def test_chain_defect_counts_missing_rank():
    plane = _coordinate_plane(4, (0, 1))
    other = _coordinate_plane(4, (2, 3))
    from torgap import BlockChainSpec, InterfaceSpec

    spec = BlockChainSpec(3, (InterfaceSpec(plane, plane), InterfaceSpec(plane, other)), 4)
    model = build_chain_model(spec)
    assert model.interface_defects() == [2, 0]
    with pytest.raises(SurjectivityError):
        coexact_gap(model)


def test_bass_note_scan_two_regimes(good_family, bad_family):
    rows = bass_note_scan({"good": good_family, "bad": bad_family}, range(2, 9))
    values = [lam for lam, _, _ in rows]
    assert values == sorted(values)
    good_vals = [lam for lam, fid, _ in rows if fid == "good"]
    bad_vals = [lam for lam, fid, _ in rows if fid == "bad"]
    assert min(good_vals) / max(good_vals) >= 0.5
    assert min(bad_vals) < 1e-6 * max(good_vals)
