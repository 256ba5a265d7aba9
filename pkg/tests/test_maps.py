import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from daugavet_lab import maps as mp
from daugavet_lab import spaces as sp
from daugavet_lab.errors import ConfigError, DegenerateFunctional

S4 = sp.SupNorm(4)
L8 = sp.WeightedL1.uniform(8)


def test_cube_inverse_and_traits():
    c = mp.cube(S4)
    y = np.array([0.5, -1.0, 0.0, 0.125])
    x = c.traits.inverse_oracle(y)
    assert np.allclose(c(x), y)
    assert c.traits.odd_symmetry and c.traits.sphere_onto
    assert np.allclose(c(-x), -c(x))


def test_square_and_fourth_root_values():
    x = np.array([0.5, -1.0, 0.0, 0.0625])
    assert np.allclose(mp.square(S4)(x), x**2)
    assert np.allclose(mp.fourth_root(S4)(x), np.abs(x) ** 0.25)


def test_convolution_mass_identity():
    # the total mass of |f| * |f| is the square of the mass of |f|
    conv = mp.convolution(L8)
    F = sp.sample_sphere(L8, 0, 32)
    assert np.allclose(sp.norm(L8, conv.evaluate(F)), 1.0)
    B = sp.sample_ball(L8, 1, 32)
    assert np.allclose(conv.evaluate(B) @ L8.w, (np.abs(B) @ L8.w) ** 2)


def test_convolution_support_growth():
    conv = mp.convolution(L8)
    f = np.zeros(8)
    f[[6, 7]] = [4.0, -4.0]
    img = conv(f)
    assert set(np.nonzero(img)[0]) == {4, 5, 6}
    assert conv.traits.support_growth(0.25) == 0.5


def test_summand_maps():
    d = sp.DirectSumL1(sp.WeightedL1.uniform(2), sp.WeightedL1.uniform(2))
    v = np.array([1.0, 2.0, 3.0, 4.0])
    assert np.allclose(mp.summand_projection(d)(v), [1.0, 2.0])
    assert np.allclose(mp.summand_shift(d)(v), [3.0, 4.0])
    assert np.allclose(mp.averaging_rank_one(d)(v), [3.5, 3.5])
    lift = mp.summand_projection(d).traits.inverse_oracle
    assert np.allclose(lift(np.array([1.0, 2.0])), [1.0, 2.0, 0.0, 0.0])


def test_augmented_projection():
    d = sp.DirectSumL1(sp.SupNorm(2), sp.SupNorm(1))
    assert np.allclose(mp.augmented_projection(d)([0.25, -0.5, 0.5]), [0.5, -0.25])


def test_kinked_abs_map():
    m = mp.kinked_abs()
    assert m([0.0])[0] == 1.0
    assert m([-0.3])[0] == pytest.approx(-0.3)
    assert m([0.3])[0] == pytest.approx(-0.3)


def test_rank_one_and_combinators():
    xp = mp.linear_functional(S4, [1.0, 0.0, 0.0, 0.0])
    y = np.array([1.0, -1.0, 0.5, 0.0])
    r = mp.rank_one(xp, y, S4)
    x = np.array([0.5, 1.0, 1.0, 1.0])
    assert np.allclose(r(x), 0.5 * y)
    assert r.matrix is not None and np.allclose(r.matrix @ x, 0.5 * y)
    s = mp.add_maps(mp.identity(S4), r)
    assert np.allclose(s(x), x + 0.5 * y)
    assert np.allclose(mp.scale_map(r, -1.0)(x), -0.5 * y)
    P = mp.linear(S4, S4, np.diag([1.0, 0.0, 2.0, 0.0]))
    assert np.allclose(mp.compose_linear(P, mp.cube(S4))(x), [0.125, 0.0, 2.0, 0.0])


def test_normalized_functional():
    psi = mp.linear(S4, S4, np.eye(4) * 0.5)
    f = mp.normalized_functional(psi, [1.0, 0.0, 0.0, 0.0])
    assert f.norm_estimate == pytest.approx(0.5)
    assert f([1.0, 0.0, 0.0, 0.0]) == pytest.approx(1.0)
    with pytest.raises(DegenerateFunctional):
        mp.normalized_functional(mp.zero(S4), [1.0, 0.0, 0.0, 0.0])


def test_make_map_registry():
    assert mp.make_map("cube", S4).name == "cube"
    with pytest.raises(ConfigError):
        mp.make_map("nonsense", S4)
    with pytest.raises(ConfigError):
        mp.make_map("cube", L8)
    with pytest.raises(ConfigError):
        mp.make_map("cube", S4, colour="red")


def test_bilinear_flattened_domain():
    T = np.zeros((1, 2, 2))
    T[0, 0, 1] = 1.0
    B = mp.bilinear(T, 2)
    assert B.domain == sp.SupNorm(4)
    assert B([0.5, 1.0, -1.0, 0.25])[0] == pytest.approx(0.125)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=4, max_size=4))
def test_interval_enclosures_contain_values(pairs):
    lo = np.array([min(a, b) for a, b in pairs])
    hi = np.array([max(a, b) for a, b in pairs])
    rng = np.random.default_rng(0)
    X = lo + (hi - lo) * rng.uniform(size=(64, 4))
    for m in (mp.cube(S4), mp.square(S4), mp.fourth_root(S4), mp.absolute(S4),
              mp.linear(S4, S4, rng.normal(size=(4, 4)))):
        a, b = m.interval(lo, hi)
        V = m.evaluate(X)
        assert np.all(V >= a - 1e-12) and np.all(V <= b + 1e-12), m.name
