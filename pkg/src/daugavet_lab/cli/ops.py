"""Scenario operations: each turns an op record into a JSON-ready result dict."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import daugavet as dg
from .. import slices as sl
from .. import spaces as sp
from ..errors import ConfigError
from ..optim import alt_defect, defect, sup_norm, vector_to_list
from ..spaces import UnitScalarGrid
from .config import Builder, vector


@dataclass
class OpContext:
    builder: Builder
    seed: int
    budget: int
    tol: float | None


def _budget(op: dict, ctx: OpContext, default: int | None = None) -> int:
    return int(op.get("budget", default if default is not None else ctx.budget))


def _grid(op: dict, space: sp.Space):
    res = op.get("grid_resolution")
    return None if res is None else UnitScalarGrid(space.field, int(res))


def op_norm(op, ctx):
    b = ctx.builder
    target = b.scalar(op["scalar"]) if "scalar" in op else b.map(op["map"])
    return sup_norm(target, _budget(op, ctx), ctx.seed, b.region(op.get("restriction"))).to_dict()


def op_defect(op, ctx):
    b = ctx.builder
    rep = defect(b.map(op["phi"]), b.map(op["psi"]), _budget(op, ctx), ctx.seed,
                 b.region(op.get("restriction")), op.get("tol", ctx.tol))
    return rep.to_dict()


def op_alt_defect(op, ctx):
    b = ctx.builder
    phi = b.map(op["phi"])
    rep = alt_defect(phi, b.map(op["psi"]), _grid(op, phi.codomain), _budget(op, ctx), ctx.seed,
                     b.region(op.get("restriction")), op.get("tol", ctx.tol))
    return rep.to_dict()


def op_continuity(op, ctx):
    b = ctx.builder
    psi, phi = b.map(op["psi"]), b.map(op["phi"])
    kind = sl.WEAK if op.get("kind", "strong").lower() == "weak" else sl.STRONG
    target = sl.SliceFamily(psi, [vector(f, psi.codomain) for f in op["functionals"]],
                            list(op["epsilons"]), _grid(op, psi.codomain), kind)
    cand = None
    if "candidates" in op or "mus" in op:
        cand = sl.SliceFamily(phi, [vector(f, phi.codomain) for f in op.get("candidates", [])],
                              list(op.get("mus", [])), kind=kind)
    check = sl.check_weak_slice_continuity if kind == sl.WEAK else sl.check_strong_slice_continuity
    table = check(psi, phi, target, cand, b.region(op.get("restriction")),
                  _budget(op, ctx, sl.SLICE_BUDGET), ctx.seed)
    out = table.to_dict()
    out["verdict"] = table.verdict
    return out


def op_witness(op, ctx):
    b = ctx.builder
    phi, xp = b.map(op["phi"]), b.scalar(op["scalar"])
    y = vector(op["y"], phi.codomain)
    w = dg.extract_witness(phi, xp, y, float(op["epsilon"]), _budget(op, ctx), ctx.seed)
    out = w.to_dict()
    if w.found:
        out["certificate"] = dg.certify_from_witness(phi, xp, y, w).to_dict()
    return out


def op_alt_witness(op, ctx):
    b = ctx.builder
    phi = b.map(op["phi"])
    w = dg.extract_alt_witness(phi, b.scalar(op["scalar"]), vector(op["y"], phi.codomain),
                               float(op["epsilon"]), _grid(op, phi.codomain), _budget(op, ctx), ctx.seed)
    return w.to_dict()


def op_quotient(op, ctx):
    return dg.quotient_check(ctx.builder.map(op["map"]), int(op.get("samples", 1000)), ctx.seed).to_dict()


def op_local(op, ctx):
    b = ctx.builder
    table = dg.local_daugavet_check(b.map(op["phi"]), b.context(op["context"]), _budget(op, ctx),
                                    ctx.seed, float(op.get("epsilon", 0.05)))
    return table.to_dict()


def op_small_image(op, ctx):
    b = ctx.builder
    psi = b.map(op["psi"])
    v = dg.small_image_check(psi, b.scalar(op["scalar"]), float(op["delta"]),
                             vector(op["y"], psi.codomain), float(op["epsilon"]),
                             b.region(op.get("restriction")), _grid(op, psi.codomain),
                             _budget(op, ctx, 20_000), ctx.seed)
    return v.to_dict()


def op_t1(op, ctx):
    b = ctx.builder
    phi = b.map(op["phi"])
    res = dg.theorem_T1_pipeline(phi, b.map(op["psi"]), b.context(op["context"]),
                                 float(op.get("epsilon", 0.05)), tuple(op.get("deltas", (0.05, 0.01, 0.002))),
                                 _grid(op, phi.codomain), _budget(op, ctx), ctx.seed)
    return res.to_dict()


def op_pipeline(op, ctx):
    b = ctx.builder
    phi = b.map(op["phi"])
    res = dg.weakly_compact_pipeline(
        phi, b.map(op["upsilon"]), b.map(op["psi"]), float(op.get("epsilon", 0.05)),
        _grid(op, phi.codomain), [vector(c, phi.codomain) for c in op.get("candidates", [])],
        bool(op.get("alternative", False)), _budget(op, ctx), ctx.seed)
    return res.to_dict()


def op_exposed(op, ctx):
    Y = ctx.builder.space(op["space"])
    pts = np.array([vector(p, Y) for p in op["points"]])
    ex = dg.exposed_slice(Y, pts, float(op["epsilon"]), _grid(op, Y))
    out = ex.to_dict()
    inside = pts[ex.contains(Y, pts)]
    out["max_slice_distance"] = float(np.max(sp._norm(Y, inside - ex.y0[None, :]))) if len(inside) else 0.0
    return out


def _sample_points(spec: dict, space: sp.Space, seed: int) -> np.ndarray:
    kind = spec.get("sampler", "ball")
    count = int(spec.get("count", 256))
    rng = np.random.default_rng(seed)
    if kind == "ball":
        return sp.sample_ball(space, seed, count)
    if kind == "signed_annulus":
        lo, hi = vector(spec["lo"], space), vector(spec["hi"], space)
        mag = lo + (hi - lo) * rng.uniform(size=(count, space.n))
        return rng.choice([-1.0, 1.0], size=(count, space.n)) * mag
    if kind == "points":
        return np.array([vector(p, space) for p in spec["points"]])
    raise ConfigError(f"unknown sampler {kind!r}")


def _problem(op, ctx) -> dg.CertificateProblem:
    b = ctx.builder
    phi, psi = b.map(op["phi"]), b.map(op["psi"])
    if "V" in op:
        V = np.array([vector(v, phi.codomain) for v in op["V"]])
    else:
        V = sp.dual_extreme_points(phi.codomain, 4096)
        if V is None:
            raise ConfigError("V must be given for non-polyhedral codomains")
    B = _sample_points(op.get("B", {}), phi.domain, ctx.seed)
    return dg.CertificateProblem(V, B, psi, phi, vector(op["z"], psi.codomain), float(op.get("K", 1.0)))


def op_kyfan(op, ctx):
    prob = _problem(op, ctx)
    sample = dg.kyfan_inequality_sample(prob, int(op.get("combos", 1000)), ctx.seed)
    cert = dg.kyfan_certificate_search(prob, tuple(op.get("eps_list", (0.1, 0.05))))
    out = {"sample": sample.to_dict(), "certificate": cert.to_dict()}
    out["consequences_hold"] = bool(cert.found and all(c["holds"] for c in cert.consequences))
    return out


def op_hull_distance(op, ctx):
    b = ctx.builder
    psi = b.map(op["psi"])
    res = dg.hull_distance_test(b.map(op["phi"]), psi, vector(op["z"], psi.codomain),
                                float(op.get("K", 1.0)), int(op.get("combos", 1000)), ctx.seed)
    return res.to_dict()


def op_l1_witness(op, ctx):
    b = ctx.builder
    phi = b.map(op["phi"])
    w = dg.l1_small_support_witness(phi, b.scalar(op["scalar"]), vector(op["y"], phi.codomain),
                                    float(op["epsilon"]), seed=ctx.seed)
    out = w.to_dict()
    if w.found:
        eps = float(op["epsilon"])
        out["target"] = 2.0 - 2.0 * eps
        out["chain_holds"] = bool(w.bound >= w.chain_bound - 1e-9)
        out["meets_target"] = bool(w.bound >= 2.0 - 2.0 * eps - 1e-9)
    return out


def op_admissibility(op, ctx):
    res = dg.admissibility_check(ctx.builder.map(op["map"]), tuple(op.get("deltas", (1 / 64, 1 / 32, 1 / 16))),
                                 int(op.get("samples", 64)), ctx.seed)
    return res.to_dict()


def op_near_one(op, ctx):
    count = int(op.get("count", 10_000))
    rows = []
    for eps in op["epsilons"]:
        c = sl.sample_slice_scalars(float(eps), count, ctx.seed)
        margin = sl.near_one_bound(c, float(eps))
        edge = sl.near_one_boundary(float(eps))
        rows.append({"epsilon": eps, "samples": count, "min_margin": float(margin.min()),
                     "boundary_error": float(abs(abs(1 - edge) - np.sqrt(2 * eps)))})
    return {"rows": rows, "min_margin": min(r["min_margin"] for r in rows),
            "max_boundary_error": max(r["boundary_error"] for r in rows)}


def op_cube_slices(op, ctx):
    count = int(op.get("count", 10_000))
    rows = []
    for eps in op["epsilons"]:
        Z, M, drawn = sl.sample_cube_slice_pairs(int(op["n"]), float(eps), count, ctx.seed)
        m = sl.cube_slice_margin(Z, M, float(eps))
        i = int(np.argmin(m))
        rows.append({"epsilon": eps, "samples": int(len(Z)), "proposals": drawn,
                     "min_margin": float(m[i]), "worst_z": vector_to_list(Z[i]),
                     "worst_mu": vector_to_list(M[i])})
    return {"rows": rows, "min_margin": min(r["min_margin"] for r in rows)}


def op_rotation(op, ctx):
    A = ctx.builder.map(op["map"])
    res = sl.multilinear_rotation_check(A, [vector(f, A.codomain) for f in op["functionals"]],
                                        _grid(op, A.codomain), tuple(op.get("epsilons", (0.1, 0.5))),
                                        _budget(op, ctx, 1000), ctx.seed)
    return res.to_dict()


OPS = {
    "norm": op_norm,
    "defect": op_defect,
    "alt_defect": op_alt_defect,
    "continuity": op_continuity,
    "witness": op_witness,
    "alt_witness": op_alt_witness,
    "quotient": op_quotient,
    "local": op_local,
    "small_image": op_small_image,
    "t1_pipeline": op_t1,
    "pipeline": op_pipeline,
    "exposed_slice": op_exposed,
    "kyfan": op_kyfan,
    "hull_distance": op_hull_distance,
    "l1_witness": op_l1_witness,
    "admissibility": op_admissibility,
    "near_one": op_near_one,
    "cube_slices": op_cube_slices,
    "rotation": op_rotation,
}


def run_op(op: dict, ctx: OpContext) -> dict:
    try:
        fn = OPS[op["op"]]
    except KeyError:
        raise ConfigError(f"unknown op {op.get('op')!r}") from None
    return fn(op, ctx)
