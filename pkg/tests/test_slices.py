import numpy as np
import pytest

from daugavet_lab import maps as mp
from daugavet_lab import slices as sl
from daugavet_lab import spaces as sp
from daugavet_lab.errors import ConfigError, OutsideBall, PreconditionError

R = sp.SupNorm(1)


def test_slice_spec_validation_and_membership():
    xp = mp.linear_functional(R, [1.0])
    s = sl.SliceSpec(xp, 0.1)
    assert sl.membership(s, [0.95]) and not sl.membership(s, [0.5])
    weak = sl.SliceSpec(xp, 0.1, kind=sl.WEAK)
    assert sl.membership(weak, [-0.95])
    with pytest.raises(ConfigError):
        sl.SliceSpec(xp, 0.0)
    with pytest.raises(ConfigError):
        sl.SliceSpec(xp, 0.1, omega=0.5)
    with pytest.raises(OutsideBall):
        sl.membership(s, [1.5])


def test_inclusion_against_interval_oracle():
    # S(id, mu) = [1 - mu, 1] is inside S(id, eps) exactly when mu <= eps
    xp = mp.linear_functional(R, [1.0])
    ok = sl.check_inclusion(sl.SliceSpec(xp, 0.1), sl.SliceSpec(xp, 0.2), budget=2000)
    bad = sl.check_inclusion(sl.SliceSpec(xp, 0.3), sl.SliceSpec(xp, 0.2), budget=2000)
    assert ok.status == "HoldsOnGrid"
    assert bad.status == "Violated"
    assert bad.witness[0] < 0.8 and bad.witness[0] >= 0.7 - 1e-12


def test_kinked_abs_against_grid_scan():
    psi = mp.kinked_abs()
    I = mp.identity(R)
    strong = sl.check_strong_slice_continuity(
        psi, I, sl.SliceFamily(psi, [np.array([1.0])], [0.5]),
        sl.SliceFamily(I, [np.array([1.0])], [0.05, 0.1, 0.25]), budget=4000)
    row = strong.rows[0]
    assert strong.verdict == "Violated"
    # re-verify: the witness sits in the inner slice but outside the target slice
    x = row.witness
    assert row.omega * x[0] >= 1 - row.mu - 1e-12
    assert np.real(row.omega * psi(x)[0]) < 1 - 0.5
    # 1-d scan oracle: on [-1, 1] the target slice S(psi, 0.5) is {0}
    t = np.linspace(-1, 1, 2001)
    inside = psi.evaluate(t[:, None])[:, 0] >= 0.5
    assert np.array_equal(t[inside], [0.0])
    weak = sl.check_weak_slice_continuity(
        psi, I, sl.SliceFamily(psi, [np.array([1.0]), np.array([-1.0])], [0.05, 0.1, 0.25], kind=sl.WEAK),
        budget=4000)
    assert weak.verdict == "HoldsOnGrid"


def test_structural_candidates_for_composition():
    X = sp.SupNorm(2)
    P = mp.linear(X, X, np.array([[1.0, 0.0], [0.0, 0.0]]))
    cube = mp.cube(X)
    psi = mp.compose_linear(P, cube)
    cands = sl.structural_candidates(psi, cube, np.array([0.5, 0.5]))
    assert np.allclose(cands[0], [0.5, 0.0])
    # an unrelated map only gets the target functional itself
    assert len(sl.structural_candidates(psi, mp.cube(X), np.array([0.5, 0.5]))) == 1


def test_rotation_check_bilinear_only():
    T = np.zeros((1, 2, 2))
    T[0, 0, 0] = T[0, 1, 1] = 1.0
    B = mp.bilinear(T, 2)
    assert sl.multilinear_rotation_check(B, [np.array([1.0])]).status == "HoldsOnGrid"
    with pytest.raises(PreconditionError):
        sl.multilinear_rotation_check(mp.cube(sp.SupNorm(2)), [np.array([1.0, 0.0])])


@pytest.mark.parametrize("eps", [0.01, 0.1, 0.5])
def test_near_one_scalars(eps):
    c = sl.sample_slice_scalars(eps, 10_000, seed=1)
    assert np.all(np.abs(c) <= 1 + 1e-12) and np.all(c.real >= 1 - eps)
    assert sl.near_one_bound(c, eps).min() >= 0
    edge = sl.near_one_boundary(eps)
    assert abs(edge) == pytest.approx(1.0, abs=1e-12)
    assert abs(1 - edge) == pytest.approx(np.sqrt(2 * eps), abs=1e-12)


@pytest.mark.parametrize("eps", [0.1, 0.3])
def test_cube_slice_pairs(eps):
    Z, M, drawn = sl.sample_cube_slice_pairs(6, eps, 2000, seed=2)
    assert len(Z) == 2000 and drawn >= 2000
    assert np.all(np.sum(Z**3 * M, axis=1) >= 1 - eps / 2)
    assert sl.cube_slice_margin(Z, M, eps).min() >= -1e-9
