"""Registered scenarios: concrete constructions with their expected verdicts.

Every construction is a plain JSON-compatible tree, so each scenario can be
written out, edited and run again with ``scenario run --config``.
"""

from __future__ import annotations

import math

from ..errors import ConfigError
from .report import Scenario

EPS = 0.05


def _sup(n):
    return {"kind": "sup", "n": n}


def _wl1(n):
    return {"kind": "wl1", "n": n}


def _signs(n):
    return [1.0 if i % 2 == 0 else -1.0 for i in range(n)]


def _ge(path, v):
    return {"path": path, "ge": v}


def _le(path, v):
    return {"path": path, "le": v}


def _eq(path, v):
    return {"path": path, "equals": v}


def _approx(path, v, tol):
    return {"path": path, "approx": v, "tol": tol}


def _example_3_6():
    c = {
        "spaces": {"X": _sup(8), "K": _sup(1), "D": {"kind": "sum", "left": _sup(8), "right": _sup(1)}},
        "maps": {"phi": {"kind": "summand_projection", "domain": "D"},
                 "psi": {"kind": "augmented_projection", "domain": "D"}},
        "ops": [{"id": "strong", "op": "continuity", "kind": "strong", "psi": "psi", "phi": "phi",
                 "functionals": [{"unit": 0, "n": 8}], "epsilons": [0.4]},
                {"id": "quotient", "op": "quotient", "map": "phi"}],
    }
    e = {"strong": [_eq("verdict", "HoldsOnGrid")], "quotient": [_eq("status", "Surjective")]}
    return Scenario("example-3.6", c, e, "Example 3.6",
                    "augmented projection is slice continuous with respect to the projection")


def _remark_3_9():
    n = 16
    c = {
        "spaces": {"L": _wl1(n), "D": {"kind": "sum", "left": _wl1(n), "right": _wl1(n)}},
        "maps": {"phi": {"kind": "summand_projection", "domain": "D"},
                 "psi": {"kind": "averaging_rank_one", "domain": "D", "codomain": "L"},
                 "r": {"kind": "rank_one", "scalar": "psi_y", "y": {"ones": n}, "codomain": "L"},
                 "sum": {"kind": "sum", "left": "phi", "right": "r"}},
        "scalars": {"psi_y": {"kind": "normalized", "map": "psi", "ystar": {"ones": n}}},
        "ops": [{"id": "sum_norm", "op": "norm", "map": "sum"},
                {"id": "defect", "op": "defect", "phi": "phi", "psi": "r"},
                {"id": "quotient", "op": "quotient", "map": "phi"},
                {"id": "witness", "op": "witness", "phi": "phi", "scalar": "psi_y",
                 "y": {"ones": n}, "epsilon": 0.25}],
    }
    e = {"sum_norm": [_le("upper_bound", 1 + 1e-9), _ge("lower_bound", 1 - 1e-9)],
         "defect": [_eq("verdict", "DaugavetFails")],
         "quotient": [_eq("status", "Surjective")],
         "witness": [_eq("found", False)]}
    return Scenario("remark-3.9", c, e, "Remark 3.9",
                    "a quotient map Phi and a rank-one Psi_y* (x) y with ||Phi + Psi_y* (x) y|| = 1")


def _remark_3_14_construction(n=16):
    return {
        "spaces": {"L": _wl1(n),
                   "D": {"kind": "sum", "left": _wl1(n),
                         "right": {"kind": "lp", "n": n, "p": 2.0, "weights": [1.0 / n] * n}}},
        "maps": {"phi": {"kind": "summand_projection", "domain": "D"},
                 "psi": {"kind": "shift", "domain": "D", "codomain": "L"}},
    }


def _remark_3_14():
    c = _remark_3_14_construction()
    c["ops"] = [{"id": "defect", "op": "defect", "phi": "phi", "psi": "psi"},
                {"id": "pipeline", "op": "pipeline", "phi": "phi", "upsilon": "phi", "psi": "psi",
                 "epsilon": EPS}]
    e = {"defect": [_le("norm_sum.upper_bound", 1 + 1e-6), _ge("norm_phi.lower_bound", 1 - 1e-6),
                    _ge("norm_psi.lower_bound", 1 - 1e-6), _eq("verdict", "DaugavetFails")],
         "pipeline": [_eq("status", "Inconclusive"), _eq("stage", "slice-continuity"),
                      _eq("diagnostics.continuity.status", "Violated")]}
    return Scenario("remark-3.14", c, e, "Remark 3.14",
                    "L2-to-L1 shift: weakly compact, not slice continuous, ||Phi + Psi|| <= 1")


def _example_4_7():
    c = {
        "spaces": {"R": _sup(1)},
        "maps": {"psi": {"kind": "kinked_abs", "domain": "R"}, "id": {"kind": "identity", "domain": "R"}},
        "scalars": {"x": {"kind": "functional", "domain": "R", "f": [1.0]}},
        "ops": [{"id": "strong", "op": "continuity", "kind": "strong", "psi": "psi", "phi": "id",
                 "functionals": [[1.0]], "epsilons": [0.5], "candidates": [[1.0]], "mus": [0.05, 0.1, 0.25]},
                {"id": "weak", "op": "continuity", "kind": "weak", "psi": "psi", "phi": "id",
                 "functionals": [[1.0], [-1.0]], "epsilons": [0.05, 0.1, 0.25]},
                {"id": "small_image", "op": "small_image", "psi": "psi", "scalar": "x", "delta": 0.1,
                 "y": [-1.0], "epsilon": 0.2}],
    }
    e = {"strong": [_eq("verdict", "Violated"), {"path": "rows.0.witness", "length": 1}],
         "weak": [_eq("verdict", "HoldsOnGrid")],
         "small_image": [_eq("status", "Violated")]}
    return Scenario("example-4.7", c, e, "Example 4.7", "weakly but not strongly slice continuous")


def _remark_2_7():
    c = {
        "spaces": {"X": _sup(4)},
        "maps": {"id": {"kind": "identity", "domain": "X"},
                 "neg": {"kind": "scale", "map": "id", "omega": -1.0}},
        "scalars": {"neg_e1": {"kind": "functional", "domain": "X", "f": {"unit": 0, "n": 4, "scale": -1.0}}},
        "ops": [{"id": "alt", "op": "alt_defect", "phi": "id", "psi": "neg"},
                {"id": "defect", "op": "defect", "phi": "id", "psi": "neg"},
                {"id": "alt_witness", "op": "alt_witness", "phi": "id", "scalar": "neg_e1",
                 "y": {"unit": 0, "n": 4}, "epsilon": EPS}],
    }
    e = {"alt": [_eq("best_omega", -1.0), _approx("report.defect", 0.0, 1e-9),
                 _eq("report.verdict", "DaugavetHolds")],
         "defect": [_ge("defect_interval.0", 2 - 1e-9), _eq("verdict", "DaugavetFails")],
         "alt_witness": [_eq("found", True), _eq("omega1", -1.0), _eq("omega2", 1.0)]}
    return Scenario("remark-2.7-ade", c, e, "Remark 2.7", "-Id satisfies the alternative equation only")


def _remark_2_7_complex():
    c = {
        "spaces": {"X": {"kind": "sup", "n": 3, "field": "complex"}},
        "maps": {"id": {"kind": "identity", "domain": "X"},
                 "rot": {"kind": "scale", "map": "id", "omega": [0.0, 1.0]}},
        "ops": [{"id": "alt", "op": "alt_defect", "phi": "id", "psi": "rot", "grid_resolution": 64},
                {"id": "defect", "op": "defect", "phi": "id", "psi": "rot"}],
    }
    e = {"alt": [_eq("best_omega", [0.0, -1.0]), _approx("report.defect", 0.0, 1e-9)],
         "defect": [_eq("verdict", "DaugavetFails"),
                    _approx("norm_sum.upper_bound", math.sqrt(2.0), 1e-9)]}
    return Scenario("remark-2.7-complex", c, e, "Remark 2.7",
                    "complex rotation iId: the alternative equation picks omega = -i")


def _example_5_4():
    c = {
        "spaces": {"X": _sup(4)},
        "maps": {"cube": {"kind": "cube", "domain": "X"}},
        "scalars": {"one": {"kind": "constant", "domain": "X", "value": 1.0}},
        "contexts": {"ctx": {"W": ["one"], "codomain": "X",
                             "Delta": [_signs(4), {"ones": 4}, [0.5, 1.0, 0.0, -0.2]]}},
        "ops": [{"id": "local", "op": "local", "phi": "cube", "context": "ctx"},
                {"id": "quotient", "op": "quotient", "map": "cube"},
                {"id": "witness", "op": "witness", "phi": "cube", "scalar": "one",
                 "y": {"ones": 4}, "epsilon": EPS}],
    }
    e = {"local": [_eq("verdict", "Holds"), _eq("rows.0.construction_witness", _signs(4)),
                   _eq("rows.0.corollary_form", True)],
         "quotient": [_eq("status", "Surjective")],
         "witness": [_eq("found", True), _eq("x", [1.0] * 4), _approx("attained", 2.0, 1e-12),
                     _ge("certificate.value", 2.0 - (2 + math.sqrt(2)) * EPS)]}
    return Scenario("example-5.4", c, e, "Example 5.4", "cube map, constant x' = 1, every unit y")


def _remark_5_7_cube():
    n = 8
    c = {
        "spaces": {"X": _sup(n)},
        "maps": {"cube": {"kind": "cube", "domain": "X"}},
        "scalars": {"e1": {"kind": "functional", "domain": "X", "f": {"unit": 0, "n": n}},
                    "mix": {"kind": "functional", "domain": "X",
                            "f": [0.5, -0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0]}},
        "contexts": {"ctx": {"W": ["e1", "mix"], "codomain": "X",
                             "Delta": [_signs(n), {"ones": n}]}},
        "ops": [{"id": "cube_slices", "op": "cube_slices", "n": n, "epsilons": [0.1, 0.3], "count": 10000},
                {"id": "local", "op": "local", "phi": "cube", "context": "ctx"}],
    }
    e = {"cube_slices": [_ge("min_margin", -1e-9)], "local": [_eq("verdict", "Holds")]}
    return Scenario("remark-5.7-cube-slices", c, e, "Remark 5.7(2)",
                    "slices of x^3 under linear functionals contain slices of the identity")


def _remark_5_7_fourth_root():
    n = 4
    c = {
        "spaces": {"X": _sup(n)},
        "maps": {"root": {"kind": "fourth_root", "domain": "X"}},
        "regions": {"pos": {"kind": "positive", "space": "X"}},
        "scalars": {"uniform": {"kind": "functional", "domain": "X", "f": {"fill": 0.25, "n": n}},
                    "delta1": {"kind": "functional", "domain": "X", "f": {"unit": 0, "n": n}},
                    "half": {"kind": "functional", "domain": "X", "f": [0.5, 0.5, 0.0, 0.0]}},
        "contexts": {"ctx": {"gamma": "pos", "W": ["uniform", "delta1", "half"], "codomain": "X",
                             "Delta": [{"ones": n}, [1.0, 0.2, 0.0, 0.5], {"unit": 3, "n": n}]}},
        "ops": [{"id": "local", "op": "local", "phi": "root", "context": "ctx"},
                {"id": "gamma_norm", "op": "norm", "map": "root", "restriction": "pos"}],
    }
    e = {"local": [_eq("verdict", "Holds"), _eq("rows.0.witness", [1.0] * n)],
         "gamma_norm": [_approx("lower_bound", 1.0, 1e-12)]}
    return Scenario("remark-5.7-fourth-root", c, e, "Remark 5.7(3)",
                    "|x|^(1/4) on the positive part with probability functionals")


def _example_5_11():
    n = 8
    f8 = [1.0] + [0.5] * (n - 1)
    c = {
        "spaces": {"X": _sup(n), "X2": _sup(2)},
        "maps": {"sq": {"kind": "square", "domain": "X"}, "abs": {"kind": "abs", "domain": "X"},
                 "sq2": {"kind": "square", "domain": "X2"}, "abs2": {"kind": "abs", "domain": "X2"}},
        "ops": [
            {"id": "kyfan8", "op": "kyfan", "phi": "sq", "psi": "abs", "z": {"ones": n}, "K": 1.0,
             "V": [{"unit": i, "n": n} for i in range(n)],
             "B": {"sampler": "signed_annulus", "lo": f8, "hi": [math.sqrt(v) for v in f8], "count": 400},
             "combos": 1000},
            {"id": "kyfan2", "op": "kyfan", "phi": "sq2", "psi": "abs2", "z": {"ones": 2}, "K": 1.0,
             "V": [{"unit": 0, "n": 2}, {"unit": 1, "n": 2}],
             "B": {"sampler": "signed_annulus", "lo": [1.0, 0.5], "hi": [1.0, math.sqrt(0.5)], "count": 200},
             "combos": 1000},
            {"id": "kyfan2_thick", "op": "kyfan", "phi": "sq2", "psi": "abs2", "z": {"ones": 2}, "K": 1.0,
             "V": [{"unit": 0, "n": 2}, {"unit": 1, "n": 2}],
             "B": {"sampler": "signed_annulus", "lo": [1.0, 0.97], "hi": [1.0, math.sqrt(0.97)], "count": 200},
             "combos": 1000},
        ],
    }
    e = {"kyfan8": [_le("sample.max_residual", 1e-9), _eq("certificate.found", True),
                    _eq("consequences_hold", True)],
         "kyfan2": [_le("sample.max_residual", 1e-9), _eq("certificate.xstar", [0.0, 1.0]),
                    _eq("consequences_hold", True)],
         "kyfan2_thick": [_eq("certificate.xstar", [0.0, 1.0]), _eq("consequences_hold", True),
                          _eq("certificate.consequences.0.vacuous", False),
                          _eq("certificate.consequences.1.vacuous", False)]}
    return Scenario("example-5.11-kyfan", c, e, "Example 5.11",
                    "square and absolute value on C = {g : g^2 <= f <= |g|}")


def _example_5_13(sign: float):
    n = 8
    y = {"ones": n, "scale": sign}
    c = {
        "spaces": {"X": _sup(n)},
        "maps": {"sq": {"kind": "square", "domain": "X"},
                 "psi": {"kind": "rank_one", "scalar": "mu_sq", "y": y, "codomain": "X"}},
        "scalars": {"mu_sq": {"kind": "pullback", "map": "sq", "f": {"fill": 1.0 / n, "n": n}}},
        "contexts": {"ctx": {"W": ["mu_sq"], "codomain": "X", "Delta": [y]}},
        "ops": [{"id": "defect", "op": "defect", "phi": "sq", "psi": "psi"}],
    }
    if sign > 0:
        c["ops"] += [
            {"id": "witness", "op": "witness", "phi": "sq", "scalar": "mu_sq", "y": y, "epsilon": EPS},
            {"id": "hull", "op": "hull_distance", "phi": "sq", "psi": "psi", "z": y, "K": 1.0,
             "combos": 1000},
            {"id": "t1", "op": "t1_pipeline", "phi": "sq", "psi": "psi", "context": "ctx", "epsilon": EPS},
        ]
        e = {"defect": [_approx("defect", 0.0, 1e-6), _eq("witness", [1.0] * n),
                        _eq("verdict", "DaugavetHolds")],
             "witness": [_eq("found", True), _approx("certificate.value", 2.0, 1e-12)],
             "hull": [_eq("status", "HoldsOnSamples"), _eq("certificate.found", True)],
             "t1": [_eq("status", "Certified"), _approx("defect.defect", 0.0, 1e-6)]}
        return Scenario("example-5.13-positive", c, e, "Example 5.13", "y = 1: the equation holds")
    c["ops"] += [{"id": "local", "op": "local", "phi": "sq", "context": "ctx"}]
    e = {"defect": [_ge("defect_interval.0", 1 - 1e-6), _eq("verdict", "DaugavetFails")],
         "local": [_eq("verdict", "Fails"), _le("rows.0.upper", 1.0 + 1e-9)]}
    return Scenario("example-5.13-negative", c, e, "Example 5.13", "y = -1: the equation fails")


def _lemma_5_14():
    n = 64
    ramp = [0.5 + i / n for i in range(n)]
    s = sum(ramp) / n
    c = {
        "spaces": {"L": _wl1(n)},
        "maps": {"abs": {"kind": "abs", "domain": "L"}, "conv": {"kind": "convolution", "domain": "L"}},
        "scalars": {"int": {"kind": "functional", "domain": "L", "f": {"weights_of": "L"}}},
        "ops": [{"id": "abs_uniform", "op": "l1_witness", "phi": "abs", "scalar": "int",
                 "y": {"ones": n}, "epsilon": EPS},
                {"id": "conv_ramp", "op": "l1_witness", "phi": "conv", "scalar": "int",
                 "y": [v / s for v in ramp], "epsilon": EPS}],
    }
    chk = [_eq("found", True), _eq("meets_target", True), _eq("chain_holds", True), _ge("bound", 2 - 2 * EPS)]
    e = {"abs_uniform": chk + [_approx("bound", 2.0, 1e-12), _approx("support_mass", 1.0 / n, 1e-15)],
         "conv_ramp": list(chk)}
    return Scenario("lemma-5.14-l1", c, e, "Lemma 5.14", "small-support simple functions in L1")


def _admissibility():
    n = 64
    c = {
        "spaces": {"L": _wl1(n)},
        "maps": {"conv": {"kind": "convolution", "domain": "L"}, "abs": {"kind": "abs", "domain": "L"},
                 "onto_one": {"kind": "rank_one", "scalar": "int", "y": {"ones": n}, "codomain": "L"}},
        "scalars": {"int": {"kind": "functional", "domain": "L", "f": {"weights_of": "L"}}},
        "ops": [{"id": "conv", "op": "admissibility", "map": "conv"},
                {"id": "abs", "op": "admissibility", "map": "abs"},
                {"id": "onto_one", "op": "admissibility", "map": "onto_one"}],
    }
    e = {"conv": [_eq("status", "Admissible"), _le("growth_ratio", 2.0)],
         "abs": [_eq("status", "Admissible"), _le("growth_ratio", 1.0)],
         "onto_one": [_eq("status", "NotAdmissible")]}
    return Scenario("admissibility-phi-star", c, e, "Proposition 5.16",
                    "convolution square is admissible with support growth 2")


def _pipeline(alternative: bool):
    """Cube on SupNorm(4) (the Example 5.4 context) plus the Remark 3.14 pair."""
    n = 4
    y = _signs(n)
    shift = _remark_3_14_construction()
    c = {
        "spaces": {"X": _sup(n), **shift["spaces"]},
        "maps": {"cube": {"kind": "cube", "domain": "X"},
                 "r1": {"kind": "rank_one", "scalar": "e1", "y": y, "codomain": "X"},
                 "P": {"kind": "linear", "domain": "X", "codomain": "X",
                       "params": {"matrix": [[v if j == 0 else 0.0 for j in range(n)] for v in y]}},
                 "pu": {"kind": "compose", "outer": "P", "inner": "cube"},
                 "proj": shift["maps"]["phi"], "shift": shift["maps"]["psi"]},
        "scalars": {"e1": {"kind": "functional", "domain": "X", "f": {"unit": 0, "n": n}}},
    }
    common = {"op": "pipeline", "epsilon": EPS, "alternative": alternative}
    c["ops"] = [dict(common, id="rank_one", phi="cube", upsilon="r1", psi="r1"),
                dict(common, id="p_upsilon", phi="cube", upsilon="cube", psi="pu"),
                dict(common, id="shift", phi="proj", upsilon="proj", psi="shift")]
    good = [_eq("status", "Certified"), _ge("lower_bound", 2 - 3 * EPS)]
    e = {"rank_one": list(good), "p_upsilon": list(good),
         "shift": [_eq("status", "Inconclusive"), _eq("stage", "slice-continuity")]}
    if alternative:
        return Scenario("thm-4.11-pipeline", c, e, "Theorem 4.11",
                        "weak-slice pipeline bounding max over omega of ||Phi + omega Psi||")
    return Scenario("thm-3.11-pipeline", c, e, "Theorem 3.11", "exposed-slice pipeline for ||Phi + Psi|| = 2")


def _small_image_t1():
    n = 4
    y = _signs(n)
    c = {
        "spaces": {"X": _sup(n)},
        "maps": {"cube": {"kind": "cube", "domain": "X"},
                 "const": {"kind": "constant", "domain": "X", "codomain": "X", "params": {"value": y}},
                 "r1": {"kind": "rank_one", "scalar": "e1", "y": y, "codomain": "X"}},
        "scalars": {"one": {"kind": "constant", "domain": "X", "value": 1.0},
                    "e1": {"kind": "functional", "domain": "X", "f": {"unit": 0, "n": n}}},
        "contexts": {"const_ctx": {"W": ["one"], "codomain": "X", "Delta": [y]},
                     "e1_ctx": {"W": ["e1"], "codomain": "X", "Delta": [y]}},
        "ops": [{"id": "constant", "op": "t1_pipeline", "phi": "cube", "psi": "const",
                 "context": "const_ctx", "epsilon": EPS},
                {"id": "rank_one", "op": "t1_pipeline", "phi": "cube", "psi": "r1",
                 "context": "e1_ctx", "epsilon": EPS},
                {"id": "small_image", "op": "small_image", "psi": "r1", "scalar": "e1", "delta": 0.01,
                 "y": y, "epsilon": EPS}],
    }
    e = {"constant": [_eq("status", "Certified"), _approx("lower_bound", 2.0, 1e-12)],
         "rank_one": [_eq("status", "Certified"), _ge("lower_bound", 2 - 3 * EPS)],
         "small_image": [_eq("status", "HoldsOnGrid")]}
    return Scenario("thm-5.8-small-image", c, e, "Theorem 5.8", "small image on a slice forces norm 2")


def _lemma_2_4():
    c = {"ops": [{"id": "near_one", "op": "near_one", "epsilons": [0.01, 0.1, 0.5], "count": 10000}]}
    e = {"near_one": [_ge("min_margin", 0.0), _le("max_boundary_error", 1e-12)]}
    return Scenario("lemma-2.4-scalars", c, e, "Lemma 2.4", "Re c >= 1 - eps and |c| <= 1 give |1 - c| <= sqrt(2 eps)")


def _thm_2_5():
    c = {
        "spaces": {"X": _sup(2)},
        "maps": {"id": {"kind": "identity", "domain": "X"}},
        "scalars": {"e1": {"kind": "functional", "domain": "X", "f": [1.0, 0.0]},
                    "neg_e1": {"kind": "functional", "domain": "X", "f": [-1.0, 0.0]}},
        "ops": [{"id": "witness", "op": "witness", "phi": "id", "scalar": "e1", "y": [1.0, 0.0],
                 "epsilon": 0.1},
                {"id": "alt_witness", "op": "alt_witness", "phi": "id", "scalar": "neg_e1",
                 "y": [1.0, 0.0], "epsilon": 0.1}],
    }
    e = {"witness": [_eq("found", True), _eq("omega", 1.0), _eq("x.0", 1.0), _approx("attained", 2.0, 1e-12),
                     _approx("certificate.value", 2.0, 1e-12)],
         "alt_witness": [_eq("omega1", -1.0), _eq("omega2", 1.0), _eq("x.0", 1.0)]}
    return Scenario("thm-2.5-roundtrip", c, e, "Theorem 2.5", "rank-one characterization witnesses")


def _quotients():
    c = {
        "spaces": {"X": _sup(4), "D": {"kind": "sum", "left": _wl1(8), "right": _wl1(8)}},
        "maps": {"cube": {"kind": "cube", "domain": "X"}, "square": {"kind": "square", "domain": "X"},
                 "proj": {"kind": "summand_projection", "domain": "D"}},
        "ops": [{"id": "cube", "op": "quotient", "map": "cube"},
                {"id": "square", "op": "quotient", "map": "square"},
                {"id": "proj", "op": "quotient", "map": "proj"}],
    }
    e = {"cube": [_eq("status", "Surjective")],
         "square": [_eq("status", "NotSurjective"), _ge("detail.certified_distance", 0.5)],
         "proj": [_eq("status", "Surjective")]}
    return Scenario("definition-3.7-quotients", c, e, "Definition 3.7", "quotient-map checks")


def _remark_3_4():
    c = {
        "spaces": {},
        "maps": {"B": {"kind": "bilinear", "n1": 2,
                       "tensor": [[[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [-1.0, 0.0]]]}},
        "ops": [{"id": "rotation", "op": "rotation", "map": "B", "functionals": [[1.0, 0.0], [0.5, -0.5]]}],
    }
    e = {"rotation": [_eq("status", "HoldsOnGrid"), _le("max_value_gap", 1e-12)]}
    return Scenario("remark-3.4-bilinear", c, e, "Remark 3.4", "rotating one argument rotates bilinear slices")


def _exposed():
    c = {
        "spaces": {"E": {"kind": "lp", "n": 2, "p": 2.0}},
        "ops": [{"id": "square", "op": "exposed_slice", "space": "E", "epsilon": 0.5,
                 "points": [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]}],
    }
    e = {"square": [_le("diameter_bound", 0.5), _le("max_slice_distance", 0.25),
                    _approx("norm_y0", 1.0, 1e-12)]}
    return Scenario("thm-3.11-exposed-slice", c, e, "Theorem 3.11", "strongly exposed point of a sampled hull")


BUILDERS = [
    _example_3_6, _remark_3_9, _remark_3_14, _example_4_7, _remark_2_7, _remark_2_7_complex,
    _example_5_4, _remark_5_7_cube, _remark_5_7_fourth_root, _example_5_11,
    lambda: _example_5_13(1.0), lambda: _example_5_13(-1.0), _lemma_5_14, _admissibility,
    lambda: _pipeline(False), lambda: _pipeline(True), _small_image_t1, _lemma_2_4, _thm_2_5,
    _quotients, _remark_3_4, _exposed,
]

ALIASES = {
    "remark-3.9-counterexample": "remark-3.9",
    "example-4.7-weak-not-strong": "example-4.7",
    "remark-3.14-counterexample": "remark-3.14",
}


def registry() -> dict:
    out = {}
    for make in BUILDERS:
        s = make()
        out[s.name] = s
    return out


def get_scenario(name: str) -> Scenario:
    reg = registry()
    name = ALIASES.get(name, name)
    if name not in reg:
        raise ConfigError(f"unknown scenario {name!r}")
    return reg[name]


def list_scenarios() -> list:
    return [(s.name, s.anchor) for s in registry().values()]
