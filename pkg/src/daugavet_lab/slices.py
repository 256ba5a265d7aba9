"""Slices, weak slices, inclusion tests and slice-continuity relations.

A strong slice is ``{x in B : Re(omega p(x)) >= 1 - eps}``, a weak slice is
``{x in B : |p(x)| >= 1 - eps}``.  The relations between whole families of
slices are only ever checked on finite families and a finite grid of
rotations, so a positive answer is reported as ``HoldsOnGrid``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import spaces as sp
from .errors import ConfigError, DegenerateFunctional, InfeasibleOnBudget, OutsideBall, PreconditionError
from .maps import BoundedMap, ScalarMap, normalized_functional
from .optim import Region, sup_on_slice, vector_to_list, scalar_to_json
from .spaces import UnitScalarGrid

STRONG = "Strong"
WEAK = "Weak"
SLICE_BUDGET = 20_000
HOLD_FLOOR = 1e-12


@dataclass
class SliceSpec:
    functional: ScalarMap
    epsilon: float
    omega: complex = 1.0
    kind: str = STRONG

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ConfigError(f"slice parameter must lie in (0, 1], got {self.epsilon}")
        if self.kind not in (STRONG, WEAK):
            raise ConfigError(f"unknown slice kind {self.kind!r}")
        if abs(abs(self.omega) - 1.0) > 1e-12:
            raise ConfigError("omega must have modulus one")

    @property
    def domain(self):
        return self.functional.domain

    @property
    def vacuous(self) -> bool:
        """``eps = 1`` is only used internally; it is the whole ball for p with norm <= 1."""
        return self.epsilon >= 1.0

    def value(self, X: np.ndarray) -> np.ndarray:
        v = self.functional.evaluate(X)
        if self.kind == WEAK:
            return np.abs(v)
        return np.real(self.omega * v)

    def slack(self, X: np.ndarray) -> np.ndarray:
        return self.value(X) - (1.0 - self.epsilon)

    def to_dict(self) -> dict:
        return {"functional": self.functional.name, "epsilon": self.epsilon,
                "omega": scalar_to_json(self.omega), "kind": self.kind}


@dataclass
class SliceFamily:
    """Finite stand-in for the natural set of (weak) slices of ``base_map``."""

    base_map: BoundedMap
    functionals: list
    epsilons: list
    omega_grid: Optional[UnitScalarGrid] = None
    kind: str = STRONG

    def grid(self) -> np.ndarray:
        if self.kind == WEAK:
            return np.array([1.0])
        g = self.omega_grid or UnitScalarGrid(self.base_map.codomain.field)
        return g.points if self.base_map.codomain.is_complex else np.real(g.points)


@dataclass
class InclusionVerdict:
    status: str
    max_violation: float
    evaluations: int
    witness: Optional[np.ndarray] = None
    omega: complex = 1.0
    inner_empty: bool = False

    def to_dict(self) -> dict:
        return {"status": self.status, "max_violation": self.max_violation,
                "evaluations": self.evaluations,
                "witness": None if self.witness is None else vector_to_list(self.witness),
                "omega": scalar_to_json(self.omega), "inner_empty": self.inner_empty}


def membership(slice_spec: SliceSpec, x) -> bool:
    x = sp.check_array(slice_spec.domain, x, "x")
    if sp.norm(slice_spec.domain, x) > 1.0 + 1e-12:
        raise OutsideBall("x is outside the closed unit ball")
    return bool(slice_spec.slack(x[None, :])[0] >= 0.0)


def check_inclusion(inner: SliceSpec, outer: SliceSpec, region: Optional[Region] = None,
                    budget: int = SLICE_BUDGET, seed: int = 0, tol: float = 1e-9) -> InclusionVerdict:
    """Search ``inner`` (intersected with Gamma) for points outside ``outer``.

    The violation at ``x`` is how far ``x`` falls short of ``outer``; its
    maximum over the inner slice is estimated with the penalty search.
    """
    if inner.domain != outer.domain:
        raise ConfigError("slices live on different domains")

    def violation(X):
        return -outer.slack(X)

    try:
        res = sup_on_slice(violation, inner, region, budget, seed, space=inner.domain)
    except InfeasibleOnBudget:
        return InclusionVerdict("HoldsOnGrid", -np.inf, budget, None, outer.omega, inner_empty=True)
    w = res.witness[None, :]
    if res.value > tol and inner.slack(w)[0] >= 0 and outer.slack(w)[0] < 0:
        return InclusionVerdict("Violated", res.value, res.evaluations, res.witness, outer.omega)
    status = "HoldsOnGrid" if res.value <= HOLD_FLOOR else "Inconclusive"
    return InclusionVerdict(status, res.value, res.evaluations, res.witness, outer.omega)


# -- slice continuity -------------------------------------------------------


@dataclass
class ContinuityRow:
    target: np.ndarray
    epsilon: float
    status: str
    candidate: Optional[np.ndarray] = None
    mu: Optional[float] = None
    witness: Optional[np.ndarray] = None
    omega: complex = 1.0
    max_violation: Optional[float] = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "target": vector_to_list(self.target), "epsilon": self.epsilon, "status": self.status,
            "candidate": None if self.candidate is None else vector_to_list(self.candidate),
            "mu": self.mu, "witness": None if self.witness is None else vector_to_list(self.witness),
            "omega": scalar_to_json(self.omega), "max_violation": self.max_violation, "note": self.note,
        }


@dataclass
class ContinuityTable:
    kind: str
    rows: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        stats = [r.status for r in self.rows if r.status != "Skipped"]
        if not stats:
            return "Inconclusive"
        if "Violated" in stats:
            return "Violated"
        if all(s == "HoldsOnGrid" for s in stats):
            return "HoldsOnGrid"
        return "Inconclusive"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "verdict": self.verdict, "rows": [r.to_dict() for r in self.rows]}


def structural_candidates(psi: BoundedMap, phi: BoundedMap, zstar: np.ndarray) -> list:
    """Functionals on Phi's codomain suggested by the standard constructions.

    For ``Psi = P o Phi`` the functional ``z* P`` works; when Psi and Phi share
    a codomain the target functional itself is tried next.
    """
    out = []
    if psi.parts and psi.parts[0] == "compose" and psi.parts[2] is phi:
        P = psi.parts[1].matrix
        out.append(np.conj(P).T @ zstar)
    if psi.codomain == phi.codomain:
        out.append(np.asarray(zstar))
    return out


def _dedupe(funcs):
    seen, out = set(), []
    for f in funcs:
        key = np.asarray(f).tobytes()
        if key not in seen:
            seen.add(key)
            out.append(np.asarray(f))
    return out


def _check_continuity(psi, phi, target_family: SliceFamily, candidate_family: Optional[SliceFamily],
                      kind: str, region, budget, seed, tol) -> ContinuityTable:
    if psi.domain != phi.domain:
        raise ConfigError("Psi and Phi must share a domain")
    grid = target_family.grid() if kind == STRONG else np.array([1.0])
    table = ContinuityTable(kind)
    cand_funcs = [] if candidate_family is None else list(candidate_family.functionals)
    for zstar in target_family.functionals:
        zstar = sp.check_array(psi.codomain, zstar, "z*")
        try:
            psi_z = normalized_functional(psi, zstar, seed=seed)
        except DegenerateFunctional as exc:
            for eps in target_family.epsilons:
                table.rows.append(ContinuityRow(zstar, eps, "Skipped", note=str(exc)))
            continue
        cands = _dedupe(structural_candidates(psi, phi, zstar) + cand_funcs)
        for eps in target_family.epsilons:
            if candidate_family is not None and candidate_family.epsilons:
                mus = [m for m in candidate_family.epsilons]
            else:
                mus = [eps, eps / 2.0, eps / 4.0]
            row = _continuity_row(psi_z, phi, zstar, eps, cands, mus, grid, kind, region, budget,
                                  seed, tol)
            table.rows.append(row)
    return table


def _continuity_row(psi_z, phi, zstar, eps, cands, mus, grid, kind, region, budget, seed, tol):
    first_violation = None
    all_violated = True
    notes = []
    for ystar in cands:
        try:
            ystar = sp.check_array(phi.codomain, ystar, "y*")
            phi_y = normalized_functional(phi, ystar, seed=seed)
        except (DegenerateFunctional, sp.DimensionMismatch) as exc:
            notes.append(f"skipped candidate: {exc}")
            continue
        for mu in mus:
            holds, violated_here = True, None
            worst = -np.inf
            for w in grid:
                inner = SliceSpec(phi_y, mu, w, kind)
                outer = SliceSpec(psi_z, eps, w, kind)
                v = check_inclusion(inner, outer, region, budget, seed, tol)
                worst = max(worst, v.max_violation)
                if v.status != "HoldsOnGrid":
                    holds = False
                    if v.status == "Violated" and violated_here is None:
                        violated_here = v
                    break
            if holds:
                return ContinuityRow(zstar, eps, "HoldsOnGrid", ystar, mu, max_violation=worst,
                                     note="; ".join(notes))
            if violated_here is None:
                all_violated = False
            elif first_violation is None:
                first_violation = (ystar, mu, violated_here)
    if first_violation is not None and all_violated:
        ystar, mu, v = first_violation
        return ContinuityRow(zstar, eps, "Violated", ystar, mu, v.witness, v.omega, v.max_violation,
                             "; ".join(notes + ["every candidate slice leaves the target slice"]))
    return ContinuityRow(zstar, eps, "Inconclusive", note="; ".join(notes))


def check_strong_slice_continuity(psi: BoundedMap, phi: BoundedMap, target_family: SliceFamily,
                                  candidate_family: Optional[SliceFamily] = None,
                                  region: Optional[Region] = None, budget: int = SLICE_BUDGET,
                                  seed: int = 0, tol: float = 1e-9) -> ContinuityTable:
    """Does every target slice of Psi contain a candidate slice of Phi, for all grid rotations?"""
    return _check_continuity(psi, phi, target_family, candidate_family, STRONG, region, budget,
                             seed, tol)


def check_weak_slice_continuity(psi: BoundedMap, phi: BoundedMap, target_family: SliceFamily,
                                candidate_family: Optional[SliceFamily] = None,
                                region: Optional[Region] = None, budget: int = SLICE_BUDGET,
                                seed: int = 0, tol: float = 1e-9) -> ContinuityTable:
    return _check_continuity(psi, phi, target_family, candidate_family, WEAK, region, budget,
                             seed, tol)


# -- rotation identity for bilinear maps ------------------------------------


@dataclass
class RotationVerdict:
    status: str
    samples: int
    max_value_gap: float
    witness: Optional[np.ndarray] = None
    omega: complex = 1.0

    def to_dict(self) -> dict:
        return {"status": self.status, "samples": self.samples, "max_value_gap": self.max_value_gap,
                "witness": None if self.witness is None else vector_to_list(self.witness),
                "omega": scalar_to_json(self.omega)}


def multilinear_rotation_check(A: BoundedMap, functionals, omega_grid: Optional[UnitScalarGrid] = None,
                               epsilons=(0.1, 0.5), budget: int = 1000, seed: int = 0) -> RotationVerdict:
    """``x in S(omega A_x*, eps)`` iff ``(omega x1, x2) in S(A_x*, eps)`` on samples."""
    n1 = A.traits.bilinear_split
    if n1 is None:
        raise PreconditionError(f"{A.name} is not a bilinear map")
    grid = (omega_grid or UnitScalarGrid(A.domain.field)).points
    if not A.domain.is_complex:
        grid = np.real(grid)
    X = np.vstack([sp.extreme_points(A.domain, min(budget, 256), seed),
                   sp.sample_ball(A.domain, seed, budget)])
    gap, total = 0.0, 0
    for f in functionals:
        p = normalized_functional(A, f, seed=seed)
        for w in grid:
            rot = X.astype(np.result_type(X, w), copy=True)
            rot[:, :n1] *= w
            if not A.domain.is_complex:
                rot = rot.real
            lhs = np.real(w * p.evaluate(X))
            rhs = np.real(p.evaluate(rot))
            gap = max(gap, float(np.max(np.abs(lhs - rhs))))
            total += len(X)
            for eps in epsilons:
                a, b = lhs >= 1 - eps, rhs >= 1 - eps
                # memberships may only disagree within float noise of the boundary
                bad = (a != b) & (np.abs(lhs - (1 - eps)) > 1e-12)
                if bad.any():
                    i = int(np.nonzero(bad)[0][0])
                    return RotationVerdict("Violated", total, gap, X[i], w)
    return RotationVerdict("HoldsOnGrid", total, gap)


# -- scalar inequalities ----------------------------------------------------


def sample_slice_scalars(eps: float, count: int, seed: int = 0) -> np.ndarray:
    """Uniform-ish complex scalars with ``|c| <= 1`` and ``Re c >= 1 - eps``."""
    rng = np.random.default_rng(seed)
    re = rng.uniform(1.0 - eps, 1.0, size=count)
    h = np.sqrt(np.maximum(0.0, 1.0 - re * re))
    im = rng.uniform(-1.0, 1.0, size=count) * h
    return re + 1j * im


def near_one_bound(c: np.ndarray, eps: float) -> np.ndarray:
    """``sqrt(2 eps) - |1 - c|``; nonnegative whenever the bound holds."""
    return np.sqrt(2.0 * eps) - np.abs(1.0 - np.asarray(c))


def near_one_boundary(eps: float) -> complex:
    """The scalar attaining ``|1 - c| = sqrt(2 eps)``."""
    return complex(1.0 - eps, np.sqrt(2.0 * eps - eps * eps))


def sample_cube_slice_pairs(n: int, eps: float, count: int, seed: int = 0, batch: int = 4096):
    """Rejection-sample ``(z, mu)`` with ``z`` in the sup ball, ``||mu||_1 = 1``
    and ``<z^3, mu> >= 1 - eps/2``.

    Proposals sit near sign vectors matched to the signs of ``mu`` so that the
    acceptance rate stays reasonable; a fraction of coordinates is flipped.
    Returns arrays ``Z``, ``M`` and the number of proposals drawn.
    """
    rng = np.random.default_rng(seed)
    Zs, Ms, drawn = [], [], 0
    have = 0
    while have < count:
        sig = rng.choice([-1.0, 1.0], size=(batch, n))
        mass = rng.dirichlet(np.full(n, 0.5), size=batch)
        M = sig * mass
        r = rng.uniform(0.0, 1.0, size=(batch, 1)) ** 3 * eps
        Z = sig * (1.0 - r * rng.uniform(0.0, 1.0, size=(batch, n)))
        flip = rng.uniform(size=(batch, n)) < 0.15
        Z = np.where(flip, rng.uniform(-1.0, 1.0, size=(batch, n)), Z)
        drawn += batch
        ok = np.sum(Z**3 * M, axis=1) >= 1.0 - eps / 2.0
        Zs.append(Z[ok])
        Ms.append(M[ok])
        have += int(ok.sum())
    return np.vstack(Zs)[:count], np.vstack(Ms)[:count], drawn


def cube_slice_margin(Z: np.ndarray, M: np.ndarray, eps: float) -> np.ndarray:
    """``<z, mu> - (1 - eps)`` per pair."""
    return np.sum(Z * M, axis=1) - (1.0 - eps)
