"""Witness extraction, local Daugavet tests, exposed slices and certificates.

Every procedure here returns objects whose defining inequalities can be
re-checked by direct evaluation; nothing stored is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from . import spaces as sp
from .errors import (ConfigError, DegenerateFunctional, InfeasibleOnBudget, NoExposedPoint,
                     PreconditionError, StaleWitness)
from .maps import (BoundedMap, ScalarMap, add_maps, linear_functional, normalized_functional,
                   pullback, rank_one, scale_map)
from .optim import (DEFAULT_BUDGET, Region, alt_defect, defect, scalar_to_json, sup_norm,
                    sup_on_slice, upper_bound, vector_to_list)
from .slices import STRONG, WEAK, SliceSpec, _continuity_row, structural_candidates
from .spaces import Space, UnitScalarGrid

WITNESS_TOL = 1e-9
FINITE_DIM_NOTE = ("weak compactness (and the Radon-Nikodym property) of bounded sets is "
                   "automatic in finite dimensions; recorded, not tested")


def _unit_phase(c) -> complex:
    """``|c| / c``, the rotation taking ``c`` to ``|c|``."""
    c = complex(c)
    return 1.0 if c == 0 else abs(c) / c


def _as_field(space: Space, w):
    return complex(w) if space.is_complex else float(np.real(w))


def _grid(space: Space, grid: Optional[UnitScalarGrid]) -> np.ndarray:
    g = grid or UnitScalarGrid(space.field)
    return g.points if space.is_complex else np.real(g.points)


@dataclass
class NotFound:
    reason: str
    best_value: Optional[float] = None
    required: Optional[float] = None

    found = False

    def to_dict(self) -> dict:
        return {"found": False, "reason": self.reason, "best_value": self.best_value,
                "required": self.required}


# -- rank-one characterizations ---------------------------------------------


@dataclass
class CharacterizationWitness:
    x: np.ndarray
    omega: complex
    slice_value: float
    attained: float
    epsilon: float
    norm_phi: float

    found = True

    def to_dict(self) -> dict:
        return {"found": True, "x": vector_to_list(self.x), "omega": scalar_to_json(self.omega),
                "slice_value": self.slice_value, "attained": self.attained,
                "epsilon": self.epsilon, "norm_phi": self.norm_phi}


def _unit(space: Space, y) -> tuple[np.ndarray, float]:
    y = sp.check_array(space, y, "y")
    ny = float(sp.norm(space, y))
    if ny == 0:
        raise PreconditionError("y must be nonzero")
    return y / ny, ny


def _check_scalar(xp: ScalarMap):
    if xp.norm_bound is not None and xp.norm_bound > 1.0 + 1e-9:
        raise PreconditionError(f"x' must have norm at most one (declared {xp.norm_bound})")


def extract_witness(phi: BoundedMap, xp: ScalarMap, y, eps: float,
                    budget: int = DEFAULT_BUDGET, seed: int = 0):
    """Find ``x`` and ``omega`` with ``Re omega x'(x) >= 1 - eps`` and
    ``||omega Phi(x) + y/||y|| || >= ||Phi|| + 1 - eps``.

    ``x`` nearly norms ``Phi + x' (x) y/||y||`` and ``omega = |x'(x)|/x'(x)``.
    Returns :class:`NotFound` when the search cannot reach
    ``||Phi|| + 1 - eps/2``, which is what happens when the equation fails.
    """
    _check_scalar(xp)
    yu, _ = _unit(phi.codomain, y)
    n_phi = sup_norm(phi, budget, seed).lower_bound
    total = sup_norm(add_maps(phi, rank_one(xp, yu, phi.codomain)), budget, seed)
    need = n_phi + 1.0 - eps / 2.0
    if total.lower_bound < need:
        return NotFound("no near-norming point of Phi + x'(x)y", total.lower_bound, need)
    x = total.witness
    c = complex(xp(x))
    w = _as_field(phi.codomain, _unit_phase(c))
    slice_value = float(np.real(w * c))
    attained = float(sp.norm(phi.codomain, w * phi(x) + yu))
    if slice_value < 1.0 - eps or attained < n_phi + 1.0 - eps:
        return NotFound("constructed point misses the slice bounds", attained, n_phi + 1.0 - eps)
    return CharacterizationWitness(x, w, slice_value, attained, eps, n_phi)


@dataclass
class Certificate:
    value: float
    normalized_value: float
    guarantee: float

    def to_dict(self) -> dict:
        return {"value": self.value, "normalized_value": self.normalized_value,
                "guarantee": self.guarantee}


def certify_from_witness(phi: BoundedMap, xp: ScalarMap, y, w: CharacterizationWitness) -> Certificate:
    """Re-verify ``w`` and return ``||Phi(x) + x'(x) y||`` at its point.

    For unit ``y`` the near-one bound on ``x'(x)`` gives the a-priori
    guarantee ``||Phi|| + 1 - eps - sqrt(2 eps)``.
    """
    yu, _ = _unit(phi.codomain, y)
    x = w.x
    c = complex(xp(x))
    slice_value = float(np.real(w.omega * c))
    attained = float(sp.norm(phi.codomain, w.omega * phi(x) + yu))
    if slice_value < 1.0 - w.epsilon - WITNESS_TOL or attained < w.norm_phi + 1.0 - w.epsilon - WITNESS_TOL:
        raise StaleWitness("witness no longer satisfies its slice inequalities")
    cx = _as_field(phi.codomain, c)
    value = float(sp.norm(phi.codomain, phi(x) + cx * sp.check_array(phi.codomain, y)))
    normalized = float(sp.norm(phi.codomain, phi(x) + cx * yu))
    guarantee = w.norm_phi + 1.0 - w.epsilon - np.sqrt(2.0 * w.epsilon)
    return Certificate(value, normalized, float(guarantee))


@dataclass
class AltWitness:
    x: np.ndarray
    omega1: complex
    omega2: complex
    slice_value: float
    modulus: float
    attained: float
    epsilon: float
    norm_phi: float

    found = True

    def to_dict(self) -> dict:
        return {"found": True, "x": vector_to_list(self.x), "omega1": scalar_to_json(self.omega1),
                "omega2": scalar_to_json(self.omega2), "slice_value": self.slice_value,
                "modulus": self.modulus, "attained": self.attained, "epsilon": self.epsilon,
                "norm_phi": self.norm_phi}


def extract_alt_witness(phi: BoundedMap, xp: ScalarMap, y, eps: float,
                        omega_grid: Optional[UnitScalarGrid] = None,
                        budget: int = DEFAULT_BUDGET, seed: int = 0):
    """Witness ``(omega1, omega2, x)`` for the alternative equation.

    Picks the grid rotation ``omega`` maximizing ``||Phi + omega x' (x) y||``,
    extracts a witness for ``omega x'`` and sets ``omega1 = omega2 * omega``.
    """
    _check_scalar(xp)
    yu, _ = _unit(phi.codomain, y)
    n_phi = sup_norm(phi, budget, seed).lower_bound
    best = None
    for w in _grid(phi.codomain, omega_grid):
        w = _as_field(phi.codomain, w)
        est = sup_norm(add_maps(phi, scale_map(rank_one(xp, yu, phi.codomain), w)), budget, seed)
        if best is None or est.lower_bound > best[1].lower_bound:
            best = (w, est)
    w, est = best
    need = n_phi + 1.0 - eps / 2.0
    if est.lower_bound < need:
        return NotFound("no grid rotation nearly norms Phi + omega x'(x)y", est.lower_bound, need)
    x = est.witness
    c = complex(w * xp(x))
    w2 = _as_field(phi.codomain, _unit_phase(c))
    w1 = _as_field(phi.codomain, w2 * w)
    cx = complex(xp(x))
    slice_value = float(np.real(w1 * cx))
    attained = float(sp.norm(phi.codomain, w2 * phi(x) + yu))
    if slice_value < 1.0 - eps or attained < n_phi + 1.0 - eps:
        return NotFound("constructed point misses the slice bounds", attained, n_phi + 1.0 - eps)
    return AltWitness(x, w1, w2, slice_value, abs(cx), attained, eps, n_phi)


# -- quotient maps ----------------------------------------------------------


@dataclass
class QuotientVerdict:
    status: str
    witness: Optional[np.ndarray] = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"status": self.status,
                "witness": None if self.witness is None else vector_to_list(self.witness),
                "detail": self.detail}


def quotient_check(phi: BoundedMap, budget: int = 1000, seed: int = 0, tol: float = 1e-9) -> QuotientVerdict:
    """Is ``Phi`` onto the open unit ball of its codomain?

    With an inverse oracle, sampled points of the open ball are pulled back
    and the round trip is checked.  Without one, interval enclosures of
    ``Phi(B_X)`` can certify that some point of the open ball is missed.
    """
    Y = phi.codomain
    inv = phi.traits.inverse_oracle
    if inv is not None:
        T = sp.sample_ball(Y, seed, budget)
        T = T[sp._norm(Y, T) < 1.0]
        S = np.asarray(inv(T))
        back = phi.evaluate(S)
        trip = float(np.max(sp._norm(Y, back - T)))
        pre = sp._norm(phi.domain, S)
        inside = bool(np.all(pre < 1.0))
        detail = {"samples": int(len(T)), "round_trip_error": trip,
                  "max_preimage_norm": float(pre.max())}
        if phi.traits.is_linear:
            detail["non_expansive"] = bool(np.all(pre <= sp._norm(Y, T) + tol))
            inside = inside and detail["non_expansive"]
        if trip <= tol and inside:
            return QuotientVerdict("Surjective", None, detail)
        i = int(np.argmax(sp._norm(Y, back - T)))
        return QuotientVerdict("Inconclusive", T[i], detail)
    if phi.interval is not None and not phi.domain.is_complex and not Y.is_complex:
        lo, hi = phi.interval(*sp.box_hull(phi.domain))
        targets = 0.99 * sp.extreme_points(Y, 4096, seed)
        gap = np.maximum(np.maximum(lo[None, :] - targets, targets - hi[None, :]), 0.0)
        dist = sp._norm(Y, gap)
        i = int(np.argmax(dist))
        if dist[i] > tol:
            return QuotientVerdict("NotSurjective", targets[i],
                                   {"certified_distance": float(dist[i])})
    X = sp.sample_ball(phi.domain, seed, budget)
    img = phi.evaluate(X)
    T = sp.sample_sphere(Y, seed + 1, 256)
    cover = max(float(np.min(sp._norm(Y, img - t[None, :]))) for t in T)
    return QuotientVerdict("Inconclusive", None, {"covering_radius": cover})


# -- local Daugavet property ------------------------------------------------


@dataclass
class LocalContext:
    gamma: Region
    W: list
    Delta: list
    name: str = "context"

    def to_dict(self) -> dict:
        return {"name": self.name, "gamma": self.gamma.name, "W": [w.name for w in self.W],
                "Delta": [vector_to_list(d) for d in self.Delta]}


@dataclass
class LocalRow:
    scalar: str
    y: np.ndarray
    lower: float
    upper: Optional[float]
    verdict: str
    witness: np.ndarray
    omega: complex
    corollary_form: bool
    construction_witness: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        return {"scalar": self.scalar, "y": vector_to_list(self.y), "lower": self.lower,
                "upper": self.upper, "verdict": self.verdict, "witness": vector_to_list(self.witness),
                "omega": scalar_to_json(self.omega), "corollary_form": self.corollary_form,
                "construction_witness": None if self.construction_witness is None
                else vector_to_list(self.construction_witness)}


@dataclass
class LocalTable:
    rows: list
    gamma_norm: float
    ball_norm: float
    norm_determining: bool

    @property
    def verdict(self) -> str:
        v = [r.verdict for r in self.rows]
        if "Fails" in v:
            return "Fails"
        return "Holds" if all(s == "Holds" for s in v) else "Inconclusive"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "gamma_norm": self.gamma_norm, "ball_norm": self.ball_norm,
                "norm_determining": self.norm_determining, "rows": [r.to_dict() for r in self.rows]}


def local_daugavet_check(phi: BoundedMap, ctx: LocalContext, budget: int = DEFAULT_BUDGET,
                         seed: int = 0, eps: float = 0.05, tol: float = 1e-6) -> LocalTable:
    """``sup_{x in Gamma} ||Phi(x) + x'(x) y|| = 2`` for every ``x'`` in W and ``y`` in Delta."""
    g_norm = sup_norm(phi, budget, seed, ctx.gamma)
    b_norm = sup_norm(phi, budget, seed)
    if abs(g_norm.lower_bound - 1.0) > max(tol, 1e-3):
        raise PreconditionError(f"||Phi||_Gamma is {g_norm.lower_bound:.6g}, expected 1")
    determining = abs(g_norm.lower_bound - b_norm.lower_bound) <= max(tol, 1e-3)
    rows = []
    for xp in ctx.W:
        for y in ctx.Delta:
            y = sp.check_array(phi.codomain, y, "y")
            est = sup_norm(add_maps(phi, rank_one(xp, y, phi.codomain)), budget, seed, ctx.gamma)
            if est.lower_bound >= 2.0 - tol:
                verdict = "Holds"
            elif est.upper_bound is not None and est.upper_bound < 2.0 - tol:
                verdict = "Fails"
            else:
                verdict = "Inconclusive"
            x = est.witness
            w = _as_field(phi.codomain, _unit_phase(xp(x)))
            cor = bool(np.real(w * xp(x)) >= 1.0 - eps
                       and sp.norm(phi.codomain, w * phi(x) + y) >= 2.0 - 2.0 * eps)
            built = None
            inv = phi.traits.inverse_oracle
            if inv is not None and phi.traits.odd_symmetry:
                x0 = np.asarray(inv(y))
                built = x0 if np.real(xp(x0)) >= 0 else -x0
            rows.append(LocalRow(xp.name, y, est.lower_bound, est.upper_bound, verdict, x, w, cor, built))
    return LocalTable(rows, g_norm.lower_bound, b_norm.lower_bound, determining)


@dataclass
class SmallImageVerdict:
    status: str
    per_omega: list
    witness: Optional[np.ndarray] = None
    omega: complex = 1.0

    def to_dict(self) -> dict:
        return {"status": self.status,
                "per_omega": [{"omega": scalar_to_json(w), "max_distance": d, "empty": e,
                               "witness": None if x is None else vector_to_list(x)}
                              for w, d, e, x in self.per_omega],
                "witness": None if self.witness is None else vector_to_list(self.witness),
                "omega": scalar_to_json(self.omega)}


def small_image_check(psi: BoundedMap, xp: ScalarMap, delta: float, y, eps: float,
                      region: Optional[Region] = None, omega_grid: Optional[UnitScalarGrid] = None,
                      budget: int = 20_000, seed: int = 0) -> SmallImageVerdict:
    """Is ``Psi(S(omega x', delta) ∩ Gamma)`` inside the open ball ``B_eps(conj(omega) y)``?"""
    if delta <= 0 or eps <= 0:
        raise ConfigError("delta and eps must be positive")
    y = sp.check_array(psi.codomain, y, "y")
    per = []
    worst = None
    for w in _grid(psi.codomain, omega_grid):
        w = _as_field(psi.codomain, w)
        center = np.conj(w) * y
        spec = SliceSpec(xp, min(delta, 1.0), w, STRONG)

        def dist(X, center=center):
            return sp._norm(psi.codomain, psi.evaluate(X) - center[None, :])

        try:
            res = sup_on_slice(dist, spec, region, budget, seed, space=psi.domain)
        except InfeasibleOnBudget:
            per.append((w, None, True, None))
            continue
        per.append((w, res.value, False, res.witness))
        if res.value >= eps and (worst is None or res.value > worst[1]):
            worst = (w, res.value, res.witness)
    if all(e for _, _, e, _ in per):
        return SmallImageVerdict("Vacuous", per)
    if worst is not None:
        return SmallImageVerdict("Violated", per, worst[2], worst[0])
    return SmallImageVerdict("HoldsOnGrid", per)


# -- end-to-end pipelines ----------------------------------------------------


@dataclass
class PipelineResult:
    status: str
    stage: str
    lower_bound: Optional[float]
    target: float
    witness: Optional[np.ndarray] = None
    omega: Optional[complex] = None
    defect: Optional[object] = None
    diagnostics: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = self.defect.to_dict() if self.defect is not None else None
        return {"status": self.status, "stage": self.stage, "lower_bound": self.lower_bound,
                "target": self.target,
                "witness": None if self.witness is None else vector_to_list(self.witness),
                "omega": None if self.omega is None else scalar_to_json(self.omega),
                "defect": d, "diagnostics": _jsonable(self.diagnostics), "notes": list(self.notes)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return vector_to_list(obj) if obj.ndim == 1 else [vector_to_list(r) for r in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return scalar_to_json(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj


def theorem_T1_pipeline(phi: BoundedMap, psi: BoundedMap, ctx: LocalContext, eps: float = 0.05,
                        deltas=(0.05, 0.01, 0.002), omega_grid: Optional[UnitScalarGrid] = None,
                        budget: int = DEFAULT_BUDGET, seed: int = 0) -> PipelineResult:
    """Replay the small-image argument: ``||Phi + Psi||_Gamma >= 2 - 3 eps``."""
    target = 2.0 - 3.0 * eps
    local = local_daugavet_check(phi, ctx, budget, seed, eps)
    diag = {"local": local.verdict}
    found = None
    for xp in ctx.W:
        for y in ctx.Delta:
            for delta in deltas:
                v = small_image_check(psi, xp, delta, y, eps, ctx.gamma, omega_grid, budget // 5, seed)
                if v.status == "HoldsOnGrid":
                    found = (xp, sp.check_array(psi.codomain, y), delta, v)
                    break
            if found:
                break
        if found:
            break
    if found is None:
        return PipelineResult("Inconclusive", "small-image", None, target, diagnostics=diag)
    xp, y, delta, v = found
    diag.update({"scalar": xp.name, "y": y, "delta": delta})
    best = None
    for w in _grid(phi.codomain, omega_grid):
        w = _as_field(phi.codomain, w)

        def obj(X, w=w):
            return sp._norm(phi.codomain, w * phi.evaluate(X) + y[None, :])

        try:
            res = sup_on_slice(obj, SliceSpec(xp, delta, w), ctx.gamma, budget, seed,
                               space=phi.domain, target=2.0 - 1e-12)
        except InfeasibleOnBudget:
            continue
        if best is None or res.value > best[1].value:
            best = (w, res)
    if best is None or best[1].value < 2.0 - 2.0 * eps:
        return PipelineResult("Inconclusive", "local-witness", None, target, diagnostics=diag)
    w0, res = best
    x0 = res.witness
    near = float(sp.norm(psi.codomain, psi(x0) - np.conj(w0) * y))
    chain = res.value - near
    value = float(sp.norm(phi.codomain, phi(x0) + psi(x0)))
    diag.update({"local_value": res.value, "psi_distance": near, "chain_bound": chain})
    rep = defect(phi, psi, budget, seed, ctx.gamma)
    status = "Certified" if value >= target and near < eps else "Inconclusive"
    return PipelineResult(status, "complete", value, target, x0, w0, rep, diag)


@dataclass
class ExposedSlice:
    y0: np.ndarray
    y0_star: np.ndarray
    delta: float
    diameter_bound: float
    radius_bound: float
    norm_y0: float
    eta: float
    margin: float

    def contains(self, space: Space, Y: np.ndarray) -> np.ndarray:
        val = np.real(np.atleast_2d(Y) @ np.conj(self.y0_star))
        return val >= 1.0 - self.delta

    def to_dict(self) -> dict:
        return {"y0": vector_to_list(self.y0), "y0_star": vector_to_list(self.y0_star),
                "delta": self.delta, "diameter_bound": self.diameter_bound,
                "radius_bound": self.radius_bound, "norm_y0": self.norm_y0, "eta": self.eta,
                "margin": self.margin}


def _real_view(A: np.ndarray) -> np.ndarray:
    A = np.atleast_2d(A)
    return np.hstack([A.real, A.imag]) if np.iscomplexobj(A) else A


def exposed_slice(space: Space, hull_points, eps: float, omega_grid: Optional[UnitScalarGrid] = None,
                  max_tries: int = 20) -> ExposedSlice:
    """A point ``y0`` of the sampled hull, exposed by ``y0*``, whose slice is small.

    The hull is symmetrized by the rotation grid.  Candidates are tried by
    decreasing norm; for each, a linear program finds ``z`` maximizing ``t``
    subject to ``Re z(y0 - y_j) >= t ||y0 - y_j||``.  With ``R = 1/t`` every
    point of the hull slice ``{Re z(y) >= Re z(y0) - eta}`` lies within
    ``R eta`` of ``y0``; ``eta = eps / (4R)`` makes the diameter ``< eps``.
    """
    P = sp.check_array(space, hull_points, "hull point")
    P = np.atleast_2d(P)
    grid = _grid(space, omega_grid)
    P = np.vstack([w * P for w in grid])
    P = np.unique(np.round(_real_view(P), 15), axis=0, return_index=True)[1]
    P = np.vstack([w * sp.check_array(space, hull_points) for w in grid])[np.sort(P)]
    norms = sp._norm(space, P)
    if norms.max() <= 1.0 - eps:
        raise NoExposedPoint(f"largest hull point has norm {norms.max():.6g} <= 1 - eps")
    order = np.argsort(-norms, kind="stable")
    Pr = _real_view(P)
    for j in order[:max_tries]:
        if norms[j] <= 1.0 - eps:
            break
        y0 = P[j]
        d = sp._norm(space, P - y0[None, :])
        far = d > 1e-12
        D = Pr[j][None, :] - Pr[far]
        k = Pr.shape[1]
        # variables (z, t); maximize t
        c = np.zeros(k + 1)
        c[-1] = -1.0
        A = np.hstack([-D, d[far][:, None]])
        res = linprog(c, A_ub=A, b_ub=np.zeros(len(A)), bounds=[(-1, 1)] * k + [(0, None)],
                      method="highs")
        if res.status != 0 or res.x[-1] <= 1e-9:
            continue
        zr, t = res.x[:k], float(res.x[-1])
        z = zr[: space.n] + 1j * zr[space.n:] if space.is_complex else zr
        top = float(np.real(np.vdot(z, y0)))
        if top <= 0:
            continue
        R = 1.0 / t
        eta = eps / (4.0 * R)
        delta = min(eps / 2.0, eta / top)
        radius = R * delta * top
        return ExposedSlice(y0.copy(), z / top, float(delta), float(2.0 * radius), float(radius),
                            float(norms[j]), float(eta), t)
    raise NoExposedPoint("no sampled hull point of large norm is strongly exposed")


def _hull_samples(psi: BoundedMap, budget: int, seed: int) -> np.ndarray:
    X = [sp.extreme_points(psi.domain, min(budget, 1024), seed), sp.sample_ball(psi.domain, seed, 256)]
    X.append(sup_norm(psi, budget, seed).witness[None, :])
    return psi.evaluate(np.vstack(X))


def weakly_compact_pipeline(phi: BoundedMap, upsilon: BoundedMap, psi: BoundedMap, eps: float = 0.05,
                            omega_grid: Optional[UnitScalarGrid] = None, candidates=(),
                            alternative: bool = False, budget: int = DEFAULT_BUDGET, seed: int = 0,
                            slice_budget: int = 20_000) -> PipelineResult:
    """Replay the exposed-slice argument for ``||Phi + Psi|| = 2``.

    Stages: norms, exposed slice of the hull of rotated ``Psi`` images,
    slice continuity of ``Psi`` with respect to ``Upsilon`` at that slice,
    a local witness for ``Phi + Upsilon_z* (x) y0/||y0||``, and the final
    ``2 - 3 eps`` chain.  ``alternative=True`` runs the weak-slice version
    and bounds ``max_omega ||Phi + omega Psi||`` instead.
    """
    target = 2.0 - 3.0 * eps
    notes = [FINITE_DIM_NOTE]
    kind = WEAK if alternative else STRONG
    Y = phi.codomain
    grid = _grid(Y, omega_grid)
    diag = {}
    for label, m in (("phi", phi), ("upsilon", upsilon), ("psi", psi)):
        diag[f"norm_{label}"] = sup_norm(m, budget, seed).lower_bound
        if abs(diag[f"norm_{label}"] - 1.0) > 1e-6:
            return PipelineResult("Inconclusive", "norms", None, target, diagnostics=diag, notes=notes)
    try:
        ex = exposed_slice(Y, _hull_samples(psi, budget, seed), eps, omega_grid)
    except NoExposedPoint as exc:
        diag["error"] = str(exc)
        return PipelineResult("Inconclusive", "exposed-slice", None, target, diagnostics=diag, notes=notes)
    diag["exposed"] = ex
    try:
        psi_y = normalized_functional(psi, ex.y0_star, seed=seed)
    except DegenerateFunctional as exc:
        diag["error"] = str(exc)
        return PipelineResult("Inconclusive", "exposed-slice", None, target, diagnostics=diag, notes=notes)
    cands = structural_candidates(psi, upsilon, ex.y0_star) + [np.asarray(c) for c in candidates]
    mus = [ex.delta, ex.delta / 2.0, ex.delta / 4.0]
    row = _continuity_row(psi_y, upsilon, ex.y0_star, ex.delta, cands, mus,
                          grid if kind == STRONG else np.array([1.0]), kind, None, slice_budget,
                          seed, 1e-9)
    diag["continuity"] = row
    if row.status != "HoldsOnGrid":
        rep = alt_defect(phi, psi, omega_grid, budget, seed) if alternative else defect(phi, psi, budget, seed)
        return PipelineResult("Inconclusive", "slice-continuity", None, target, defect=rep,
                              diagnostics=diag, notes=notes)
    ups = normalized_functional(upsilon, row.candidate, seed=seed)
    mu = row.mu
    y0u = ex.y0 / ex.norm_y0
    best = None
    for w in grid:
        w = _as_field(Y, w)
        if alternative:
            def obj(X):
                imgs = phi.evaluate(X)
                return np.max([sp._norm(Y, v * imgs + y0u[None, :]) for v in grid], axis=0)
            spec = SliceSpec(ups, mu, 1.0, WEAK)
        else:
            def obj(X, w=w):
                return sp._norm(Y, w * phi.evaluate(X) + y0u[None, :])
            spec = SliceSpec(ups, mu, w, STRONG)
        try:
            res = sup_on_slice(obj, spec, None, budget, seed, space=phi.domain, target=2.0 - 1e-12)
        except InfeasibleOnBudget:
            continue
        if best is None or res.value > best[1].value:
            best = (w, res)
        if alternative:
            break
    if best is None or best[1].value < 2.0 - mu - 1e-12:
        diag["local_value"] = None if best is None else best[1].value
        return PipelineResult("Inconclusive", "local-witness", None, target, diagnostics=diag, notes=notes)
    x = best[1].witness
    if alternative:
        imgs = phi(x)
        vals = [sp.norm(Y, v * imgs + y0u) for v in grid]
        w1 = _as_field(Y, grid[int(np.argmax(vals))])
        w2 = _as_field(Y, _unit_phase(complex(psi_y(x))))
        near = float(sp.norm(Y, w2 * psi(x) - ex.y0))
        value = float(sp.norm(Y, w1 * phi(x) + w2 * psi(x)))
        omega = _as_field(Y, np.conj(w1) * w2)
        diag.update({"omega1": w1, "omega2": w2})
    else:
        w1 = best[0]
        near = float(sp.norm(Y, w1 * psi(x) - ex.y0))
        value = float(sp.norm(Y, phi(x) + psi(x)))
        omega = w1
    diag.update({"local_value": best[1].value, "psi_distance": near, "mu": mu})
    status = "Certified" if value >= target and near < eps else "Inconclusive"
    rep = alt_defect(phi, psi, omega_grid, budget, seed) if alternative else defect(phi, psi, budget, seed)
    return PipelineResult(status, "complete", value, target, x, omega, rep, diag, notes)


# -- Ky Fan certificates ----------------------------------------------------


@dataclass
class CertificateProblem:
    V: np.ndarray
    B: np.ndarray
    psi: BoundedMap
    phi: BoundedMap
    z: np.ndarray
    K: float

    def __post_init__(self):
        X = self.phi.domain
        self.V = np.atleast_2d(sp.check_array(self.phi.codomain, self.V, "V"))
        self.B = np.atleast_2d(sp.check_array(X, self.B, "B"))
        self.z = sp.check_array(self.psi.codomain, self.z, "z")
        if np.any(sp._dual_norm(self.phi.codomain, self.V) > 1.0 + 1e-9):
            raise ConfigError("V must lie in the dual unit ball")
        if np.any(sp._norm(X, self.B) > 1.0 + 1e-12):
            raise ConfigError("B must lie in the unit ball")
        if self.K <= 0:
            raise ConfigError("K must be positive")

    def distances(self, X=None) -> np.ndarray:
        X = self.B if X is None else X
        return sp._norm(self.psi.codomain, self.psi.evaluate(X) - self.z[None, :])

    def pairings(self, X=None) -> np.ndarray:
        """``Re <Phi(x_j), v_k>``, shape ``(len(X), len(V))``."""
        X = self.B if X is None else X
        return np.real(self.phi.evaluate(X) @ np.conj(self.V).T)


@dataclass
class KyFanSample:
    max_residual: float
    combos: int
    worst_indices: list
    worst_weights: list

    def to_dict(self) -> dict:
        return {"max_residual": self.max_residual, "combos": self.combos,
                "worst_indices": self.worst_indices, "worst_weights": self.worst_weights}


def kyfan_inequality_sample(prob: CertificateProblem, combos: int = 1000, seed: int = 0,
                            max_terms: int = 5) -> KyFanSample:
    """Largest sampled ``LHS - RHS`` of the averaged inequality over random convex combinations."""
    if combos < 1:
        raise ConfigError("combos must be at least 1")
    rng = np.random.default_rng(seed)
    dist = prob.distances()
    pair = prob.pairings()
    worst = (-np.inf, [], [])
    m = len(prob.B)
    for _ in range(combos):
        r = int(rng.integers(1, min(max_terms, m) + 1))
        idx = rng.choice(m, size=r, replace=False)
        a = rng.dirichlet(np.ones(r))
        lhs = float(a @ dist[idx])
        rhs = prob.K * float(np.max(1.0 - a @ pair[idx]))
        res = lhs - rhs
        if res > worst[0]:
            worst = (res, [int(i) for i in idx], [float(x) for x in a])
    return KyFanSample(float(worst[0]), combos, worst[1], worst[2])


@dataclass
class KyFanCertificate:
    found: bool
    xstar: Optional[np.ndarray]
    weights: Optional[np.ndarray]
    value: float
    gap: float
    consequences: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"found": self.found, "xstar": None if self.xstar is None else vector_to_list(self.xstar),
                "weights": None if self.weights is None else vector_to_list(self.weights),
                "value": self.value, "gap": self.gap, "consequences": self.consequences}


def kyfan_certificate_search(prob: CertificateProblem, eps_list=(0.1, 0.05), tol: float = 1e-9,
                             extra_points=None) -> KyFanCertificate:
    """Maximize over ``x*`` in ``conv V`` the minimum over ``x`` in B of
    ``K (1 - <Phi(x), x*>) - ||Psi(x) - z||``.

    The finite max-min is a linear program in the simplex weights.  When the
    optimum is ``>= -tol`` the maximizer is a certificate and the slice
    consequence ``Psi(S(x* o Phi, eps) ∩ B) ⊂ B_{K eps}(z)`` is checked on the
    sample (plus ``extra_points``).
    """
    pair = prob.pairings()
    dist = prob.distances()
    m, k = pair.shape
    # variables (lambda_1..k, t); maximize t
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A = np.hstack([prob.K * pair, np.ones((m, 1))])
    b = prob.K - dist
    res = linprog(c, A_ub=A, b_ub=b, A_eq=np.hstack([np.ones((1, k)), np.zeros((1, 1))]), b_eq=[1.0],
                  bounds=[(0, None)] * k + [(None, None)], method="highs")
    if res.status != 0:
        return KyFanCertificate(False, None, None, -np.inf, np.inf)
    lam = np.maximum(res.x[:k], 0.0)
    lam /= lam.sum()
    # snap to a vertex when the LP lands on one up to solver noise
    if lam.max() > 1 - 1e-9:
        lam = (lam == lam.max()).astype(float)
    xstar = lam @ prob.V
    achieved = float(np.min(prob.K * (1.0 - pair @ lam) - dist))
    gap = float(-res.fun - achieved)
    if achieved < -tol:
        return KyFanCertificate(False, None, lam, achieved, gap)
    pts = prob.B if extra_points is None else np.vstack([prob.B, sp.check_array(prob.phi.domain, extra_points)])
    vals = np.real(prob.phi.evaluate(pts) @ np.conj(xstar))
    d = prob.distances(pts)
    cons = []
    for eps in eps_list:
        inside = vals >= 1.0 - eps
        worst = float(d[inside].max()) if inside.any() else None
        ok = worst is None or worst <= prob.K * eps + tol
        cons.append({"epsilon": eps, "members": int(inside.sum()), "max_distance": worst,
                     "radius": prob.K * eps, "holds": bool(ok), "vacuous": not bool(inside.any())})
    return KyFanCertificate(True, xstar, lam, achieved, gap, cons)


@dataclass
class HullDistanceResult:
    status: str
    max_residual: float
    combos: int
    certificate: Optional[KyFanCertificate]

    def to_dict(self) -> dict:
        return {"status": self.status, "max_residual": self.max_residual, "combos": self.combos,
                "certificate": None if self.certificate is None else self.certificate.to_dict()}


def hull_distance_test(phi: BoundedMap, psi: BoundedMap, z, K: float = 1.0, combos: int = 1000,
                       seed: int = 0, samples: int = 512, tol: float = 1e-9) -> HullDistanceResult:
    """Check ``sum a_i ||Psi(x_i) - z|| <= K ||x - sum a_i Phi(x_i)||`` for some ``x`` in the ball.

    The statement is existential in ``x``, so the best ``x`` is the one
    maximizing the distance; on polyhedral balls that maximum is attained at
    an extreme point and is computed exactly by enumeration.
    """
    X = phi.domain
    if phi.codomain != X:
        raise ConfigError("hull_distance_test needs Phi: B_X -> X")
    z = sp.check_array(psi.codomain, z, "z")
    pts = np.vstack([sp.extreme_points(X, 256, seed), sp.sample_ball(X, seed, samples)])
    E = sp.extreme_points(X, 4096, seed)
    dist = sp._norm(psi.codomain, psi.evaluate(pts) - z[None, :])
    imgs = phi.evaluate(pts)
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(combos):
        r = int(rng.integers(1, 6))
        idx = rng.choice(len(pts), size=r, replace=False)
        a = rng.dirichlet(np.ones(r))
        h = a @ imgs[idx]
        rhs = K * float(np.max(sp._norm(X, E - h[None, :])))
        worst = max(worst, float(a @ dist[idx]) - rhs)
    V = sp.dual_extreme_points(X, 4096)
    cert = None
    if V is not None:
        prob = CertificateProblem(V, pts, psi, phi, z, K)
        cert = kyfan_certificate_search(prob)
    status = "HoldsOnSamples" if worst <= tol else "Violated"
    return HullDistanceResult(status, worst, combos, cert)


# -- L1 machinery -----------------------------------------------------------


def _support_mass(space: Space, v: np.ndarray) -> np.ndarray:
    return (np.abs(np.atleast_2d(v)) > 0) @ space.w


def tail_delta(space: Space, y: np.ndarray, eps: float) -> float:
    """Largest ``delta`` with ``int_A |y| < eps`` whenever ``mass(A) < delta``.

    The worst set of a given mass takes atoms by decreasing density ``|y_i|``
    (a fractional knapsack), which bounds every set of that mass.
    """
    dens = np.abs(y)
    order = np.argsort(-dens, kind="stable")
    mass, acc = 0.0, 0.0
    for i in order:
        wi, gi = space.w[i], dens[i] * space.w[i]
        if acc + gi >= eps:
            return float(mass + (eps - acc) / dens[i])
        mass += wi
        acc += gi
    return float(np.inf)


@dataclass
class L1Witness:
    z: np.ndarray
    omega: complex
    bound: float
    delta: float
    support_mass: float
    scalar_value: float
    direct_slice_value: float
    chain_bound: float

    found = True

    def to_dict(self) -> dict:
        return {"found": True, "z": vector_to_list(self.z), "omega": scalar_to_json(self.omega),
                "bound": self.bound, "delta": self.delta, "support_mass": self.support_mass,
                "scalar_value": self.scalar_value, "direct_slice_value": self.direct_slice_value,
                "chain_bound": self.chain_bound}


def _simple_candidates(space: Space) -> np.ndarray:
    """Norm-one simple functions on one atom or two adjacent atoms (both signs)."""
    n, w = space.n, space.w
    rows = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0 / w[i]
        rows += [e, -e]
    for i in range(n):
        j = (i + 1) % n
        e = np.zeros(n)
        e[i] = e[j] = 1.0 / (w[i] + w[j])
        rows += [e, -e]
    return np.array(rows)


def l1_small_support_witness(phi: BoundedMap, xp: ScalarMap, y, eps: float, budget: int = 256,
                             seed: int = 0):
    """Simple ``z`` with small ``supp Phi(z)`` and ``|x'(Phi(z))| > 1 - eps``,
    giving ``||y + omega Phi(z)|| > 2 - 2 eps``.

    ``x'`` is applied to ``Phi(z)`` and ``omega`` rotates ``x'(Phi(z))`` to its
    modulus; the value ``Re omega x'(z)`` is reported as well.
    """
    X = phi.domain
    if X.kind != "wl1" or phi.codomain.kind != "wl1":
        raise PreconditionError("the small-support witness needs WeightedL1 spaces")
    y = sp.check_array(phi.codomain, y, "y")
    S = sp.sample_sphere(X, seed, budget)
    if np.max(np.abs(sp._norm(phi.codomain, phi.evaluate(S)) - 1.0)) > 1e-9:
        raise PreconditionError("||Phi(z)|| = 1 fails on sampled sphere points")
    delta = tail_delta(phi.codomain, y, eps)
    Z = _simple_candidates(X)
    imgs = phi.evaluate(Z)
    mass = _support_mass(phi.codomain, imgs)
    vals = xp.evaluate(imgs)
    ok = mass < delta
    if not ok.any():
        return NotFound(f"no simple function with image support below delta={delta:.3g}")
    score = np.where(ok, np.abs(vals), -np.inf)
    i = int(np.argmax(score))
    if score[i] <= 1.0 - eps:
        return NotFound("no simple function reaches |x'(Phi(z))| > 1 - eps", float(score[i]), 1 - eps)
    z, img = Z[i], imgs[i]
    w = _as_field(phi.codomain, _unit_phase(vals[i]))
    bound = float(sp.norm(phi.codomain, y + w * img))
    supp = np.abs(img) > 0
    tail = float(np.abs(y[supp]) @ phi.codomain.w[supp])
    chain = float(sp.norm(phi.codomain, y) + sp.norm(phi.codomain, img) - 2.0 * tail)
    direct = float(np.real(w * xp(z)))
    return L1Witness(z, w, bound, delta, float(mass[i]), float(abs(vals[i])), direct, chain)


@dataclass
class AdmissibilityVerdict:
    status: str
    growth_ratio: float
    per_delta: list
    witness: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        return {"status": self.status, "growth_ratio": self.growth_ratio, "per_delta": self.per_delta,
                "witness": None if self.witness is None else vector_to_list(self.witness)}


def _arc_samples(space: Space, k: int, count: int, rng) -> np.ndarray:
    n = space.n
    out = np.zeros((count, n))
    starts = rng.integers(0, n, size=count)
    for r in range(count):
        idx = (starts[r] + np.arange(k)) % n
        out[r, idx] = rng.choice([-1.0, 1.0], size=k) * rng.uniform(0.1, 1.0, size=k)
    return out / sp._norm(space, out)[:, None]


def admissibility_check(phi: BoundedMap, deltas=(1 / 64, 1 / 32, 1 / 16), samples: int = 64,
                        seed: int = 0, tol: float = 1e-9) -> AdmissibilityVerdict:
    """Small supports go to small supports, and the sphere goes to the sphere.

    Test functions are arcs of ``floor(delta' n)`` adjacent atoms (mass
    ``<= delta'``) with random signs and sizes, normalized to the sphere.
    """
    X = phi.domain
    if X.kind != "wl1" or phi.codomain.kind != "wl1":
        raise PreconditionError("admissibility is defined for WeightedL1 spaces")
    rng = np.random.default_rng(seed)
    growth = phi.traits.support_growth
    per, ratio = [], 0.0
    total = float(phi.codomain.w.sum())
    witness, failed_growth, failed_norm = None, False, False
    for d in deltas:
        k = int(np.floor(d / X.w.max() + 1e-9))
        if k < 1:
            raise ConfigError(f"delta' = {d} is below one atom")
        F = _arc_samples(X, k, samples, rng)
        imgs = phi.evaluate(F)
        mass = _support_mass(phi.codomain, imgs)
        norms = sp._norm(phi.codomain, imgs)
        ratio = max(ratio, float(mass.max() / d))
        row = {"delta": d, "atoms": k, "max_image_mass": float(mass.max()),
               "max_norm_error": float(np.max(np.abs(norms - 1.0)))}
        if growth is not None:
            row["declared"] = float(growth(d))
            bad = mass > growth(d) + 1e-12
            if bad.any() and witness is None:
                witness = F[int(np.argmax(bad))]
            failed_growth |= bool(bad.any())
        if row["max_norm_error"] > tol:
            failed_norm = True
            if witness is None:
                witness = F[int(np.argmax(np.abs(norms - 1.0)))]
        per.append(row)
    S = sp.sample_sphere(X, seed, samples)
    sphere_err = float(np.max(np.abs(sp._norm(phi.codomain, phi.evaluate(S)) - 1.0)))
    if sphere_err > tol:
        failed_norm = True
    if failed_norm or failed_growth:
        return AdmissibilityVerdict("NotAdmissible", ratio, per, witness)
    if per and per[0]["max_image_mass"] >= total - 1e-12:
        return AdmissibilityVerdict("NotAdmissible", ratio, per, None)
    if growth is None:
        return AdmissibilityVerdict("Inconclusive", ratio, per)
    return AdmissibilityVerdict("Admissible", ratio, per)
