import numpy as np
import pytest

from daugavet_lab import daugavet as dg
from daugavet_lab import maps as mp
from daugavet_lab import spaces as sp
from daugavet_lab.errors import NoExposedPoint, PreconditionError, StaleWitness
from daugavet_lab.optim import Region, alt_defect

S2, S4, S8 = sp.SupNorm(2), sp.SupNorm(4), sp.SupNorm(8)
EPS = 0.05


def _ex513(sign=1.0, n=8):
    X = sp.SupNorm(n)
    sq = mp.square(X)
    mu_sq = mp.pullback(sq, np.full(n, 1.0 / n))
    return X, sq, mu_sq, sign * np.ones(n)


def test_identity_witness_matches_sign_vector_brute_force():
    I = mp.identity(S2)
    e1 = mp.linear_functional(S2, [1.0, 0.0])
    w = dg.extract_witness(I, e1, np.array([1.0, 0.0]), 0.1, budget=2000)
    assert w.found and w.omega == 1.0 and w.x[0] == 1.0 and w.attained == 2.0
    signs = np.array([[a, b] for a in (-1, 1) for b in (-1, 1)], float)
    best = max(sp.norm(S2, s + s[0] * np.array([1.0, 0.0])) for s in signs)
    assert w.attained == best


def test_witness_not_found_when_equation_fails():
    n = 4
    d = sp.DirectSumL1(sp.WeightedL1.uniform(n), sp.WeightedL1.uniform(n))
    L = sp.WeightedL1.uniform(n)
    phi = mp.summand_projection(d)
    psi_y = mp.normalized_functional(mp.averaging_rank_one(d, L), np.ones(n))
    for eps in (0.1, 0.4):
        assert not dg.extract_witness(phi, psi_y, np.ones(n), eps, budget=5000).found


@pytest.mark.parametrize("eps", [0.2, 0.1, 0.05])
def test_round_trip_on_certified_instances(eps):
    X, sq, mu_sq, y = _ex513()
    w = dg.extract_witness(sq, mu_sq, y, eps, budget=5000)
    assert w.found and np.array_equal(w.x, np.ones(8))
    cert = dg.certify_from_witness(sq, mu_sq, y, w)
    assert cert.value >= 2 - (2 + np.sqrt(2)) * eps
    assert cert.value == 2.0


def test_stale_witness_rejected():
    I = mp.identity(S2)
    e1 = mp.linear_functional(S2, [1.0, 0.0])
    w = dg.extract_witness(I, e1, np.array([1.0, 0.0]), 0.1, budget=2000)
    w.x = np.array([0.0, 0.0])
    with pytest.raises(StaleWitness):
        dg.certify_from_witness(I, e1, np.array([1.0, 0.0]), w)


def test_y_zero_rejected():
    I = mp.identity(S2)
    with pytest.raises(PreconditionError):
        dg.extract_witness(I, mp.linear_functional(S2, [1.0, 0.0]), np.zeros(2), 0.1)


def test_alt_witness_and_consistency_with_alt_defect():
    I = mp.identity(S2)
    neg = mp.linear_functional(S2, [-1.0, 0.0])
    y = np.array([1.0, 0.0])
    w = dg.extract_alt_witness(I, neg, y, 0.1, budget=2000)
    assert (w.omega1, w.omega2, w.x[0]) == (-1.0, 1.0, 1.0)
    assert w.slice_value >= 0.9 and w.modulus >= 0.9
    # the alternative defect of (I, x' (x) y) is zero at some grid point, as the witness predicts
    rep = alt_defect(I, mp.rank_one(neg, y, S2), budget=2000)
    assert rep.report.verdict == "DaugavetHolds"
    # and the plain equation fails for this pair, so the plain witness does not exist
    assert not dg.extract_witness(I, neg, y, 0.1, budget=2000).found


def test_quotient_checks():
    assert dg.quotient_check(mp.cube(S4)).status == "Surjective"
    sq = dg.quotient_check(mp.square(S4))
    assert sq.status == "NotSurjective"
    assert np.all(sq.witness < 0) or np.any(sq.witness < 0)
    # re-verify: the square map never produces negative coordinates
    assert np.min(mp.square(S4).evaluate(sp.sample_ball(S4, 0, 1000))) >= 0
    d = sp.DirectSumL1(sp.WeightedL1.uniform(3), sp.WeightedL1.uniform(3))
    assert dg.quotient_check(mp.summand_projection(d)).status == "Surjective"


def test_local_check_example_5_4_and_5_13():
    cube = mp.cube(S4)
    y = np.array([1.0, -1.0, 1.0, -1.0])
    ctx = dg.LocalContext(Region.ball(S4), [mp.constant_scalar(S4)], [y])
    table = dg.local_daugavet_check(cube, ctx, budget=5000)
    assert table.verdict == "Holds"
    assert np.allclose(table.rows[0].construction_witness, np.cbrt(y))
    X, sq, mu_sq, ym = _ex513(-1.0)
    neg = dg.local_daugavet_check(sq, dg.LocalContext(Region.ball(X), [mu_sq], [ym]), budget=5000)
    assert neg.verdict == "Fails" and neg.rows[0].upper <= 1.0 + 1e-12


def test_local_check_fourth_root_positive_part():
    root = mp.fourth_root(S4)
    W = [mp.linear_functional(S4, np.full(4, 0.25)), mp.linear_functional(S4, [0.0, 0.0, 0.5, 0.5])]
    ctx = dg.LocalContext(Region.positive(S4), W, [np.ones(4), np.array([0.0, 1.0, 0.3, 0.0])])
    table = dg.local_daugavet_check(root, ctx, budget=5000)
    assert table.verdict == "Holds"
    assert np.array_equal(table.rows[0].witness, np.ones(4))


def test_small_image_against_one_dimensional_scan():
    psi = mp.kinked_abs()
    R = sp.SupNorm(1)
    x = mp.linear_functional(R, [1.0])
    v = dg.small_image_check(psi, x, 0.1, np.array([-1.0]), 0.2, budget=4000)
    t = np.linspace(-1, 1, 20001)
    for w, dist, empty, _ in v.per_omega:
        on = w * t >= 0.9
        oracle = np.max(np.abs(psi.evaluate(t[on, None])[:, 0] - w * -1.0))
        assert dist == pytest.approx(oracle, abs=1e-3)
    assert v.status == "Violated"
    const = mp.constant(S4, S4, np.ones(4))
    assert dg.small_image_check(const, mp.constant_scalar(S4), 0.1, np.ones(4), EPS,
                                budget=2000).status == "HoldsOnGrid"


def test_small_image_rank_one_bound():
    y = np.array([1.0, -1.0, 1.0, -1.0])
    e1 = mp.linear_functional(S4, [1.0, 0.0, 0.0, 0.0])
    r = mp.rank_one(e1, y, S4)
    delta = 0.01
    v = dg.small_image_check(r, e1, delta, y, 2 * delta + 1e-9, budget=4000)
    assert v.status == "HoldsOnGrid"
    assert max(d for _, d, _, _ in v.per_omega) <= np.sqrt(2 * delta)


def test_t1_pipeline_constant_and_example_5_13():
    cube = mp.cube(S4)
    y = np.array([1.0, -1.0, 1.0, -1.0])
    ctx = dg.LocalContext(Region.ball(S4), [mp.constant_scalar(S4)], [y])
    res = dg.theorem_T1_pipeline(cube, mp.constant(S4, S4, y), ctx, EPS, budget=5000)
    assert res.status == "Certified" and res.lower_bound == 2.0
    X, sq, mu_sq, y1 = _ex513()
    res = dg.theorem_T1_pipeline(sq, mp.rank_one(mu_sq, y1, X),
                                 dg.LocalContext(Region.ball(X), [mu_sq], [y1]), EPS, budget=5000)
    assert res.status == "Certified" and res.defect.defect == pytest.approx(0.0, abs=1e-9)


def test_exposed_slice_square_and_segment():
    E = sp.LpNorm(2, 2.0)
    pts = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    ex = dg.exposed_slice(E, pts, 0.5)
    assert sp.norm(E, ex.y0) == 1.0
    assert ex.diameter_bound <= 2 * np.sqrt(2) * ex.delta + 1e-12
    assert ex.diameter_bound < 0.5
    inside = pts[ex.contains(E, pts)]
    assert np.all(sp.norm(E, inside - ex.y0) <= ex.diameter_bound)
    y = np.array([0.6, -0.8])
    seg = dg.exposed_slice(E, np.array([y, -y]), 0.1)
    assert np.allclose(np.abs(seg.y0), np.abs(y))
    assert np.sum(seg.contains(E, np.array([y, -y]))) == 1
    with pytest.raises(NoExposedPoint):
        dg.exposed_slice(E, 0.5 * pts, 0.1)


def test_exposed_slice_rank_one_hull():
    y = np.array([1.0, -1.0, 1.0, -1.0])
    r = mp.rank_one(mp.linear_functional(S4, [0.5, 0.5, 0.0, 0.0]), y, S4)
    X = np.vstack([sp.sample_ball(S4, 0, 200), np.ones((1, 4))])
    imgs = r.evaluate(X)
    ex = dg.exposed_slice(S4, imgs, 0.1)
    top = np.max(np.abs(imgs[:, 0]))
    assert np.allclose(np.abs(ex.y0), top * np.abs(y))


def test_weakly_compact_pipelines():
    cube = mp.cube(S4)
    y = np.array([1.0, -1.0, 1.0, -1.0])
    r1 = mp.rank_one(mp.linear_functional(S4, [1.0, 0.0, 0.0, 0.0]), y, S4)
    for alt in (False, True):
        res = dg.weakly_compact_pipeline(cube, r1, r1, EPS, alternative=alt, budget=5000)
        assert res.status == "Certified" and res.lower_bound >= 2 - 3 * EPS
        # re-verify the witness directly
        x, w = res.witness, res.omega
        assert sp.norm(S4, cube(x) + w * r1(x)) == pytest.approx(res.lower_bound)


def test_kyfan_examples():
    f = np.array([1.0, 0.5])
    rng = np.random.default_rng(0)
    B = rng.choice([-1, 1], size=(200, 2)) * (f + (np.sqrt(f) - f) * rng.uniform(size=(200, 2)))
    prob = dg.CertificateProblem(np.eye(2), B, mp.absolute(S2), mp.square(S2), np.ones(2), 1.0)
    assert dg.kyfan_inequality_sample(prob, 1000).max_residual <= 1e-9
    cert = dg.kyfan_certificate_search(prob)
    assert cert.found and np.array_equal(cert.xstar, [0.0, 1.0])
    # enumeration over the two point masses agrees with the LP
    vals = [np.min(1 - mp.square(S2).evaluate(B) @ v - np.max(np.abs(np.abs(B) - 1), axis=1)) for v in np.eye(2)]
    assert int(np.argmax(vals)) == 1
    assert cert.value == pytest.approx(max(vals), abs=1e-12)


def test_kyfan_trivial_and_constructed_failure():
    z = np.ones(2)
    B = sp.sample_ball(S2, 0, 50)
    const_z = mp.constant(S2, S2, z)
    ok = dg.CertificateProblem(np.eye(2), B, const_z, mp.identity(S2), z, 1.0)
    assert dg.kyfan_inequality_sample(ok, 200).max_residual <= 0
    assert dg.kyfan_certificate_search(ok).found
    # Phi is constantly 1 under x*_0 = e1 while Psi = -z is far from z
    phi = mp.constant(S2, S2, np.array([1.0, 0.0]))
    bad = dg.CertificateProblem(np.array([[1.0, 0.0]]), B, mp.constant(S2, S2, -z), phi, z, 1.0)
    assert dg.kyfan_inequality_sample(bad, 200).max_residual == pytest.approx(2 * sp.norm(S2, z))
    assert not dg.kyfan_certificate_search(bad).found


def test_hull_distance_example_5_13():
    X, sq, mu_sq, y = _ex513()
    res = dg.hull_distance_test(sq, mp.rank_one(mu_sq, y, X), y, 1.0, 1000)
    assert res.status == "HoldsOnSamples"
    assert res.certificate.found


def test_l1_witness_examples():
    L = sp.WeightedL1.uniform(64)
    integral = mp.linear_functional(L, L.w)
    w = dg.l1_small_support_witness(mp.absolute(L), integral, np.ones(64), EPS)
    z = np.zeros(64)
    z[0] = 64.0
    assert np.array_equal(w.z, z) and w.omega == 1.0
    assert w.bound == pytest.approx(63 / 64 + 65 / 64, abs=1e-12)
    assert w.bound >= w.chain_bound - 1e-12 and w.bound >= 2 - 2 * EPS
    # disjoint supports: l1 norms add exactly
    y = np.zeros(64)
    y[32:] = 2.0
    w = dg.l1_small_support_witness(mp.absolute(L), integral, y, EPS)
    assert w.bound == 2.0
    conv = dg.l1_small_support_witness(mp.convolution(L), integral, np.ones(64), EPS)
    assert conv.scalar_value == pytest.approx(1.0)


def test_l1_witness_preconditions():
    with pytest.raises(PreconditionError):
        dg.l1_small_support_witness(mp.cube(S4), mp.constant_scalar(S4), np.ones(4), EPS)
    L = sp.WeightedL1.uniform(8)
    with pytest.raises(PreconditionError):
        dg.l1_small_support_witness(mp.scale_map(mp.absolute(L), 0.5), mp.linear_functional(L, L.w),
                                    np.ones(8), EPS)


def test_tail_delta_is_fractional_knapsack():
    L = sp.WeightedL1.uniform(4)
    y = np.array([4.0, 0.0, 0.0, 0.0])
    # int_A |y| = 4 mass(A) on the first atom, so eps = 0.5 needs mass < 1/8
    assert dg.tail_delta(L, y, 0.5) == pytest.approx(0.125)


def test_admissibility():
    L = sp.WeightedL1.uniform(64)
    conv = dg.admissibility_check(mp.convolution(L))
    assert conv.status == "Admissible" and conv.growth_ratio <= 2.0
    for row in conv.per_delta:
        assert row["max_image_mass"] <= 2 * row["delta"] + 1e-12
    assert dg.admissibility_check(mp.absolute(L)).status == "Admissible"
    onto = mp.rank_one(mp.linear_functional(L, L.w), np.ones(64), L)
    assert dg.admissibility_check(onto).status == "NotAdmissible"
