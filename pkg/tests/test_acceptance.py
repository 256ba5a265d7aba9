"""Acceptance suite: one printed PASS/FAIL line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines.  Each test
asserts the same condition it prints, with the tolerances pinned below.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from daugavet_lab import daugavet as dg
from daugavet_lab import maps as mp
from daugavet_lab import slices as sl
from daugavet_lab import spaces as sp
from daugavet_lab.cli import get_scenario, registry, run_scenario
from daugavet_lab.optim import alt_defect, defect, sup_norm
from daugavet_lab.slices import SliceSpec

EPS = 0.05


def report(n, ok, detail):
    print(f"\nCRITERION {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _op(rep, oid):
    return next(e for e in rep.to_dict()["ops"] if e["id"] == oid)["result"]


def test_c01_quotient_counterexample():
    t0 = time.perf_counter()
    n = 16
    d = sp.DirectSumL1(sp.WeightedL1.uniform(n), sp.WeightedL1.uniform(n))
    L = sp.WeightedL1.uniform(n)
    phi = mp.summand_projection(d)
    r = mp.rank_one(mp.normalized_functional(mp.averaging_rank_one(d, L), np.ones(n)), np.ones(n), L)
    est = sup_norm(mp.add_maps(phi, r), budget=100_000)
    dt = time.perf_counter() - t0
    ok = est.upper_bound <= 1 + 1e-9 and est.lower_bound >= 1 - 1e-9 and dt < 5.0
    report(1, ok, f"norm in [{est.lower_bound:.12g}, {est.upper_bound:.12g}], {dt:.2f}s")


def test_c02_weakly_compact_counterexample():
    res = _op(run_scenario(get_scenario("remark-3.14")), "defect")
    up, lp, ls = (res["norm_sum"]["upper_bound"], res["norm_phi"]["lower_bound"],
                  res["norm_psi"]["lower_bound"])
    ok = up <= 1 + 1e-6 and lp >= 1 - 1e-6 and ls >= 1 - 1e-6
    report(2, ok, f"||Phi+Psi|| <= {up:.9g}, ||Phi|| >= {lp:.9g}, ||Psi|| >= {ls:.9g}")


def test_c03_square_rank_one():
    n = 8
    X = sp.SupNorm(n)
    sq = mp.square(X)
    mu = mp.pullback(sq, np.full(n, 1.0 / n))
    t0 = time.perf_counter()
    pos = defect(sq, mp.rank_one(mu, np.ones(n), X))
    t_pos = time.perf_counter() - t0
    t0 = time.perf_counter()
    neg = defect(sq, mp.rank_one(mu, -np.ones(n), X))
    t_neg = time.perf_counter() - t0
    ok = (abs(pos.defect) <= 1e-6 and np.array_equal(pos.witness, np.ones(n))
          and neg.defect_interval[0] >= 1 - 1e-6 and max(t_pos, t_neg) < 5.0)
    report(3, ok, f"y=1 defect {pos.defect:.3g} witness {pos.witness.tolist()}; "
                  f"y=-1 certified defect >= {neg.defect_interval[0]:.9g}; {t_pos:.2f}s/{t_neg:.2f}s")


def test_c04_weak_not_strong():
    R = sp.SupNorm(1)
    psi, ident = mp.kinked_abs(), mp.identity(R)
    target = sl.SliceFamily(psi, [np.array([1.0])], [0.5])
    cand = sl.SliceFamily(ident, [np.array([1.0])], [0.05, 0.1, 0.25])
    strong = sl.check_strong_slice_continuity(psi, ident, target, cand)
    row = strong.rows[0]
    # re-verify: the witness lies in the identity slice but leaves the Psi slice
    re_ok = False
    if row.status == "Violated":
        inner = SliceSpec(mp.normalized_functional(ident, row.candidate), row.mu, row.omega)
        outer = SliceSpec(mp.normalized_functional(psi, row.target), row.epsilon, row.omega)
        x = row.witness[None, :]
        re_ok = bool(sp.norm(R, row.witness) <= 1 and inner.slack(x)[0] >= 0 > outer.slack(x)[0])
    weak = sl.check_weak_slice_continuity(
        psi, ident, sl.SliceFamily(psi, [np.array([1.0]), np.array([-1.0])], [0.05, 0.1, 0.25]))
    ok = strong.verdict == "Violated" and re_ok and weak.verdict == "HoldsOnGrid"
    report(4, ok, f"strong {strong.verdict} (witness {row.witness}, re-verified {re_ok}); weak {weak.verdict}")


def test_c05_near_one_scalars():
    worst, edge_err = np.inf, 0.0
    for eps in (0.01, 0.1, 0.5):
        c = sl.sample_slice_scalars(eps, 10_000, seed=0)
        assert np.all(np.abs(c) <= 1 + 1e-15) and np.all(c.real >= 1 - eps)
        worst = min(worst, float(sl.near_one_bound(c, eps).min()))
        e = sl.near_one_boundary(eps)
        edge_err = max(edge_err, abs(abs(1 - e) - np.sqrt(2 * eps)), abs(abs(e) - 1))
    ok = worst >= 0 and edge_err <= 1e-12
    report(5, ok, f"min sqrt(2eps)-|1-c| = {worst:.3g}; boundary error {edge_err:.3g}")


def _rank_one_instance(rng, n):
    f = rng.normal(size=n)
    f /= np.abs(f).sum()
    y = rng.uniform(-1, 1, size=n)
    y[0] = np.sign(f[0])
    return f, y


def test_c06_witness_round_trip():
    rng = np.random.default_rng(2024)
    target = 2 - (2 + np.sqrt(2)) * EPS
    worst, fails = np.inf, []
    for k in range(10):
        n = int(rng.integers(2, 7))
        X = sp.SupNorm(n)
        f, y = _rank_one_instance(rng, n)
        xp = mp.linear_functional(X, f)
        cube = mp.cube(X)
        rep = defect(cube, mp.rank_one(xp, y, X), budget=20_000, seed=k)
        if rep.verdict != "DaugavetHolds" or rep.defect > 1e-6:
            fails.append(f"instance {k}: defect {rep.defect}")
            continue
        w = dg.extract_witness(cube, xp, y, EPS, budget=20_000, seed=k)
        if not w.found:
            fails.append(f"instance {k}: no witness")
            continue
        worst = min(worst, dg.certify_from_witness(cube, xp, y, w).value)
    ok = not fails and worst >= target
    report(6, ok, f"10 instances, min certified {worst:.9g} >= {target:.9g}; {fails}")


def test_c07_negative_identity():
    X = sp.SupNorm(4)
    I = mp.identity(X)
    neg = mp.scale_map(I, -1.0)
    alt = alt_defect(I, neg)
    d = defect(I, neg)
    ok = (alt.best_omega == -1.0 and abs(alt.report.defect) <= 1e-9
          and d.defect_interval[0] >= 2 - 1e-9)
    report(7, ok, f"alt defect {alt.report.defect:.3g} at omega {alt.best_omega}; "
                  f"plain defect >= {d.defect_interval[0]:.12g}")


def test_c08_cube_slices():
    worst, counts = np.inf, []
    for eps in (0.1, 0.3):
        Z, M, _ = sl.sample_cube_slice_pairs(8, eps, 10_000, seed=0)
        assert np.all(np.sum(Z**3 * M, axis=1) >= 1 - eps / 2)
        assert np.all(np.abs(Z) <= 1) and np.allclose(np.abs(M).sum(axis=1), 1)
        counts.append(len(Z))
        worst = min(worst, float(sl.cube_slice_margin(Z, M, eps).min()))
    ok = worst >= -1e-9 and counts == [10_000, 10_000]
    report(8, ok, f"{counts} pairs, min <z,mu> - (1-eps) = {worst:.6g}")


def test_c09_kyfan():
    rep = run_scenario(get_scenario("example-5.11-kyfan"))
    results = [_op(rep, oid) for oid in ("kyfan8", "kyfan2", "kyfan2_thick")]
    resid = max(r["sample"]["max_residual"] for r in results)
    combos = min(r["sample"]["combos"] for r in results)
    cons = [c for r in results for c in r["certificate"]["consequences"]]
    found = all(r["certificate"]["found"] for r in results)
    holds = all(c["holds"] for c in cons)
    live = {c["epsilon"] for c in cons if not c["vacuous"] and c["holds"]}
    ok = resid <= 1e-9 and combos >= 1000 and found and holds and live >= {0.05, 0.1}
    report(9, ok, f"max residual {resid:.3g} over {combos} combinations; certificates {found}; "
                  f"consequences hold {holds}, non-vacuous at eps {sorted(live)}")


def test_c10_l1_witness_and_admissibility():
    n = 64
    L = sp.WeightedL1.uniform(n)
    w = dg.l1_small_support_witness(mp.absolute(L), mp.linear_functional(L, L.w), np.ones(n), EPS)
    # closed form: the witness is n on one atom, so the sum is n-1 atoms of 1 and one of 2
    direct = float(np.sum(L.w * np.abs(np.ones(n) + w.omega * np.abs(w.z))))
    adm = dg.admissibility_check(mp.convolution(L))
    growth = all(r["declared"] == 2 * r["delta"] and r["max_image_mass"] <= r["declared"] + 1e-15
                 for r in adm.per_delta)
    deltas = sorted(r["delta"] for r in adm.per_delta)
    ok = (w.found and w.bound >= 2 - 2 * EPS and abs(w.bound - direct) <= 1e-12
          and adm.status == "Admissible" and growth and deltas == [1 / 64, 1 / 32, 1 / 16])
    report(10, ok, f"||y + omega Phi(z)|| = {w.bound!r} (direct {direct!r}); "
                   f"convolution {adm.status}, growth 2*delta respected {growth}")


def test_c11_pipelines():
    lb = {}
    for name in ("thm-3.11-pipeline", "thm-4.11-pipeline"):
        rep = run_scenario(get_scenario(name))
        for e in rep.to_dict()["ops"]:
            r = e["result"]
            if e["op"] == "pipeline" and r.get("status") == "Certified":
                lb[f"{name}:{e['id']}"] = r["lower_bound"]
    good = {k: v for k, v in lb.items() if v >= 2 - 3 * EPS}
    distinct = {k.split(":")[1] for k in good}
    bad = _op(run_scenario(get_scenario("remark-3.14")), "pipeline")
    ok = len(distinct) >= 2 and bad["status"] == "Inconclusive" and bad["stage"] == "slice-continuity"
    report(11, ok, f"certified {good}; counterexample {bad['status']} at {bad['stage']}")


def test_c12_full_suite(tmp_path):
    outs, times, codes = [], [], []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        t0 = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "daugavet_lab.cli.main", "scenario", "run", "all",
                               "--report", str(path)], capture_output=True, text=True)
        times.append(time.perf_counter() - t0)
        codes.append(proc.returncode)
        outs.append(path.read_bytes() if path.exists() else b"")
    n = len(json.loads(outs[0])) if outs[0] else 0
    ok = codes == [0, 0] and n >= 15 and n == len(registry()) and outs[0] == outs[1] and max(times) < 120
    report(12, ok, f"{n} scenarios, exit codes {codes}, {max(times):.1f}s, "
                   f"byte-identical {outs[0] == outs[1]}")
