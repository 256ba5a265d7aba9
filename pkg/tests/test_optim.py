import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from daugavet_lab import maps as mp
from daugavet_lab import spaces as sp
from daugavet_lab.errors import ConfigError, EmptyRestriction, InfeasibleOnBudget
from daugavet_lab.optim import Region, alt_defect, defect, linear_norm, sup_norm, sup_on_slice
from daugavet_lab.slices import SliceSpec


def _grid(n, levels):
    return np.array(list(itertools.product(levels, repeat=n)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_linear_sup_to_sup_norm_matches_row_sums(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(3, 4))
    X = sp.SupNorm(4)
    est = sup_norm(mp.linear(X, sp.SupNorm(3), M), budget=2000)
    oracle = np.abs(M).sum(axis=1).max()
    assert est.lower_bound == pytest.approx(oracle, abs=1e-12)
    assert est.exact


def test_linear_norm_wl1_to_lp_columns():
    X = sp.WeightedL1([0.5, 0.5])
    Y = sp.LpNorm(2, 2.0)
    M = np.array([[3.0, 0.0], [4.0, 1.0]])
    val, att, exact = linear_norm(M, X, Y)
    # extreme points are +-e_i / w_i
    assert val == pytest.approx(max(np.hypot(3, 4) * 2, 2.0))
    assert exact


def test_nonlinear_lower_bound_matches_grid_oracle():
    X = sp.SupNorm(3)
    xp = mp.linear_functional(X, [0.5, 0.25, 0.25])
    y = np.array([1.0, -1.0, 0.0])
    phi = mp.add_maps(mp.cube(X), mp.rank_one(xp, y, X))
    est = sup_norm(phi, budget=20_000)
    G = _grid(3, np.linspace(-1, 1, 41))
    oracle = sp.norm(X, phi.evaluate(G)).max()
    assert est.lower_bound >= oracle - 1e-9
    assert est.upper_bound is None or est.upper_bound >= est.lower_bound


def test_determinism_and_budget_monotonicity():
    X = sp.SupNorm(6)
    phi = mp.BoundedMap(X, sp.SupNorm(1), lambda Z: np.sin(3 * Z).sum(axis=1)[:, None], mp.MapTraits())
    a = sup_norm(phi, budget=3000, seed=7)
    b = sup_norm(phi, budget=3000, seed=7)
    assert a.lower_bound == b.lower_bound and np.array_equal(a.witness, b.witness)
    prev = -np.inf
    for budget in (500, 1000, 2000, 4000, 8000):
        lb = sup_norm(phi, budget=budget, seed=7).lower_bound
        assert lb >= prev
        prev = lb


def test_restriction_and_empty_region():
    X = sp.SupNorm(2)
    pos = Region.positive(X)
    est = sup_norm(mp.linear(X, sp.SupNorm(1), [[1.0, -1.0]]), budget=2000, restriction=pos)
    assert est.lower_bound == pytest.approx(1.0)
    assert np.all(est.witness >= 0)
    nowhere = Region(lambda Z: np.zeros(len(Z), dtype=bool), name="empty")
    with pytest.raises(EmptyRestriction):
        sup_norm(mp.identity(X), budget=500, restriction=nowhere)
    with pytest.raises(ConfigError):
        sup_norm(mp.identity(X), budget=1)


def test_sup_on_slice_and_infeasible():
    X = sp.SupNorm(2)
    xp = mp.linear_functional(X, [1.0, 0.0])
    res = sup_on_slice(lambda Z: Z[:, 1], SliceSpec(xp, 0.1), budget=4000)
    assert res.value == pytest.approx(1.0)
    assert res.witness[0] >= 0.9
    half = mp.linear_functional(X, [0.5, 0.0])
    with pytest.raises(InfeasibleOnBudget):
        sup_on_slice(lambda Z: Z[:, 1], SliceSpec(half, 0.1), budget=2000)


def test_defect_verdicts():
    X = sp.SupNorm(4)
    I = mp.identity(X)
    same = defect(I, I, budget=2000)
    assert same.verdict == "DaugavetHolds" and same.defect == 0.0
    neg = defect(I, mp.scale_map(I, -1.0), budget=2000)
    assert neg.verdict == "DaugavetFails"
    assert neg.defect_interval[0] >= 2 - 1e-12
    alt = alt_defect(I, mp.scale_map(I, -1.0), budget=2000)
    assert alt.best_omega == -1.0 and alt.report.defect == 0.0


def test_example_5_13_defect_against_grid_oracle():
    n = 4
    X = sp.SupNorm(n)
    sq = mp.square(X)
    mu_sq = mp.pullback(sq, np.full(n, 1.0 / n))
    G = _grid(n, np.linspace(-1, 1, 9))
    for sign, expected in ((1.0, "DaugavetHolds"), (-1.0, "DaugavetFails")):
        psi = mp.rank_one(mu_sq, sign * np.ones(n), X)
        rep = defect(sq, psi, budget=20_000)
        oracle = sp.norm(X, sq.evaluate(G) + psi.evaluate(G)).max()
        assert rep.verdict == expected
        assert rep.norm_sum.lower_bound == pytest.approx(oracle, abs=1e-9)


def test_complex_rotation_grid():
    X = sp.SupNorm(2, field=sp.COMPLEX)
    I = mp.identity(X)
    rep = alt_defect(I, mp.scale_map(I, 1j), sp.UnitScalarGrid(sp.COMPLEX, 8), budget=2000)
    assert rep.best_omega == -1j
    assert rep.report.defect == pytest.approx(0.0, abs=1e-12)
