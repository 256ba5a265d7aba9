"""Finite-dimensional normed spaces, their duals and unit-ball geometry.

Vectors are plain numpy arrays whose last axis indexes coordinates, so every
routine here accepts a single vector of shape ``(n,)`` or a batch of shape
``(m, n)``.  Dual functionals use the same representation and act through

    <f, v> = sum_i conj(f_i) v_i,

so a probability measure on a sup-norm space is a nonnegative coordinate
vector summing to one, and the integration functional of a weighted L1 space
is its weight vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DimensionMismatch

REAL = "real"
COMPLEX = "complex"

#: Fixed cap on enumerated extreme points inside the search engine.
EXTREME_CAP = 4096


@dataclass(frozen=True)
class ScalarField:
    kind: str = REAL

    def __post_init__(self):
        if self.kind not in (REAL, COMPLEX):
            raise ConfigError(f"unknown scalar field {self.kind!r}")

    @property
    def is_complex(self) -> bool:
        return self.kind == COMPLEX

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64


@dataclass(frozen=True)
class UnitScalarGrid:
    """A finite stand-in for the unit circle (or {-1, 1} over the reals)."""

    field: ScalarField = ScalarField()
    resolution: int = 64

    def __post_init__(self):
        if isinstance(self.field, str):
            object.__setattr__(self, "field", ScalarField(self.field))
        if self.resolution < 1:
            raise ConfigError("grid resolution must be positive")

    @property
    def points(self) -> np.ndarray:
        if not self.field.is_complex:
            return np.array([1.0, -1.0])
        k = self.resolution
        pts = np.exp(2j * np.pi * np.arange(k) / k)
        # snap the quarter points so 1, -1, i, -i are exact
        for exact in (1.0, -1.0, 1j, -1j):
            pts[np.abs(pts - exact) < 1e-12] = exact
        if not np.any(pts == -1.0):
            pts = np.append(pts, -1.0 + 0j)
        return pts

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class Space:
    """Descriptor of a finite-dimensional normed space.

    ``kind`` is one of ``"sup"``, ``"lp"``, ``"wl1"`` (weighted L1) or
    ``"sum"`` (1-norm direct sum of ``left`` and ``right``).  Use the factory
    functions :func:`SupNorm`, :func:`LpNorm`, :func:`WeightedL1` and
    :func:`DirectSumL1` rather than the raw constructor.
    """

    kind: str
    n: int
    p: Optional[float] = None
    weights: Optional[tuple] = None
    left: Optional["Space"] = None
    right: Optional["Space"] = None
    field: ScalarField = ScalarField()

    @property
    def dim(self) -> int:
        return self.n

    @property
    def is_complex(self) -> bool:
        return self.field.is_complex

    @property
    def dtype(self):
        return self.field.dtype

    @property
    def w(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.n)
        return np.asarray(self.weights, dtype=float)

    @property
    def split(self) -> int:
        return self.left.n if self.kind == "sum" else self.n

    def __repr__(self):
        if self.kind == "sup":
            body = f"SupNorm({self.n})"
        elif self.kind == "lp":
            body = f"LpNorm({self.n}, p={self.p})"
        elif self.kind == "wl1":
            body = f"WeightedL1(n={self.n})"
        else:
            body = f"DirectSumL1({self.left!r}, {self.right!r})"
        return body if not self.is_complex else body + "[C]"

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "sum":
            d["left"] = self.left.to_dict()
            d["right"] = self.right.to_dict()
        else:
            d["n"] = self.n
        if self.kind == "lp":
            d["p"] = self.p
        if self.weights is not None and self.kind != "sum":
            d["weights"] = [float(x) for x in self.weights]
        if self.is_complex:
            d["field"] = COMPLEX
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Space":
        try:
            kind = d["kind"]
            field = d.get("field", REAL)
            if kind == "sup":
                return SupNorm(int(d["n"]), field=field)
            if kind == "lp":
                return LpNorm(int(d["n"]), float(d["p"]), weights=d.get("weights"), field=field)
            if kind == "wl1":
                if "weights" in d:
                    return WeightedL1(d["weights"], field=field)
                return WeightedL1.uniform(int(d["n"]), field=field)
            if kind == "sum":
                return DirectSumL1(cls.from_dict(d["left"]), cls.from_dict(d["right"]))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed space descriptor {d!r}") from exc
        raise ConfigError(f"unknown space kind {kind!r}")


def _field(field) -> ScalarField:
    return field if isinstance(field, ScalarField) else ScalarField(field)


def SupNorm(n: int, field=REAL) -> Space:
    if n < 1:
        raise ConfigError("dimension must be positive")
    return Space("sup", n, field=_field(field))


def LpNorm(n: int, p: float, weights=None, field=REAL) -> Space:
    """Weighted l_p norm ``(sum w_i |x_i|^p)^(1/p)``; unit weights by default."""
    if n < 1:
        raise ConfigError("dimension must be positive")
    if not 1.0 <= p < np.inf:
        raise ConfigError("p must lie in [1, inf)")
    if weights is not None:
        weights = tuple(float(x) for x in weights)
        if len(weights) != n or min(weights) <= 0:
            raise ConfigError("Lp weights must be n positive reals")
    return Space("lp", n, p=float(p), weights=weights, field=_field(field))


def _weighted_l1(weights, field=REAL) -> Space:
    weights = tuple(float(x) for x in weights)
    if not weights:
        raise ConfigError("WeightedL1 needs at least one weight")
    if min(weights) <= 0:
        raise ConfigError("WeightedL1 weights must be strictly positive")
    return Space("wl1", len(weights), weights=weights, field=_field(field))


class _WeightedL1Factory:
    def __call__(self, weights, field=REAL) -> Space:
        return _weighted_l1(weights, field)

    @staticmethod
    def uniform(n: int, total_mass: float = 1.0, field=REAL) -> Space:
        """``n`` equal atoms of total mass ``total_mass`` (discretized L1[0,1])."""
        return _weighted_l1([total_mass / n] * n, field)


WeightedL1 = _WeightedL1Factory()


def DirectSumL1(left: Space, right: Space) -> Space:
    if left.field != right.field:
        raise ConfigError("direct sum components must share the scalar field")
    return Space("sum", left.n + right.n, left=left, right=right, field=left.field)


# -- validation -------------------------------------------------------------


def check_array(space: Space, v, name: str = "v") -> np.ndarray:
    """Coerce ``v`` to an array over the space's field and check its length."""
    arr = np.asarray(v)
    if arr.ndim == 0 or arr.shape[-1] != space.n:
        raise DimensionMismatch(
            f"{name} has trailing dimension {arr.shape[-1] if arr.ndim else 0}, "
            f"expected {space.n} for {space!r}"
        )
    if space.is_complex:
        return arr.astype(np.complex128, copy=False)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise DimensionMismatch(f"{name} is complex but {space!r} is real")
        arr = arr.real
    return arr.astype(np.float64, copy=False)


# -- norms and duality ------------------------------------------------------


def norm(space: Space, v) -> np.ndarray | float:
    """Exact norm of ``v`` (or of each row of a batch)."""
    v = check_array(space, v)
    out = _norm(space, v)
    return float(out) if np.ndim(out) == 0 else out


def _norm(space: Space, v: np.ndarray) -> np.ndarray:
    a = np.abs(v)
    if space.kind == "sup":
        return a.max(axis=-1)
    if space.kind == "wl1":
        return a @ space.w
    if space.kind == "lp":
        p = space.p
        if p == 1.0:
            return a @ space.w
        if p == 2.0:
            return np.sqrt((a * a) @ space.w)
        return ((a**p) @ space.w) ** (1.0 / p)
    k = space.split
    return _norm(space.left, v[..., :k]) + _norm(space.right, v[..., k:])


def dual_norm(space: Space, f) -> np.ndarray | float:
    f = check_array(space, f, "f")
    out = _dual_norm(space, f)
    return float(out) if np.ndim(out) == 0 else out


def _dual_norm(space: Space, f: np.ndarray) -> np.ndarray:
    a = np.abs(f)
    if space.kind == "sup":
        return a.sum(axis=-1)
    if space.kind == "wl1" or (space.kind == "lp" and space.p == 1.0):
        return (a / space.w).max(axis=-1)
    if space.kind == "lp":
        q = space.p / (space.p - 1.0)
        return ((a**q) @ (space.w ** (1.0 - q))) ** (1.0 / q)
    k = space.split
    return np.maximum(_dual_norm(space.left, f[..., :k]), _dual_norm(space.right, f[..., k:]))


def dual_pair(space: Space, f, v):
    """``<f, v>``, conjugating the functional coordinates in complex mode."""
    f = check_array(space, f, "f")
    v = check_array(space, v)
    out = np.sum(np.conj(f) * v, axis=-1) if space.is_complex else np.sum(f * v, axis=-1)
    return out.item() if np.ndim(out) == 0 else out


def project_to_ball(space: Space, v) -> np.ndarray:
    """Radial retraction onto the closed unit ball."""
    v = check_array(space, v)
    return _project(space, v)


def _project(space: Space, v: np.ndarray) -> np.ndarray:
    r = _norm(space, v)
    scale = np.where(r > 1.0, 1.0 / np.where(r > 1.0, r, 1.0), 1.0)
    return v * scale[..., None] if v.ndim > 1 else v * scale


def coordinate_scale(space: Space) -> np.ndarray:
    """Largest coordinate magnitude reachable inside the unit ball."""
    if space.kind == "sup":
        return np.ones(space.n)
    if space.kind == "wl1":
        return 1.0 / space.w
    if space.kind == "lp":
        return space.w ** (-1.0 / space.p)
    return np.concatenate([coordinate_scale(space.left), coordinate_scale(space.right)])


def box_hull(space: Space) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate box containing the (real) unit ball."""
    s = coordinate_scale(space)
    return -s, s.copy()


# -- sampling ---------------------------------------------------------------


def _gaussian(rng: np.random.Generator, shape, complex_: bool) -> np.ndarray:
    g = rng.standard_normal(shape)
    if complex_:
        g = g + 1j * rng.standard_normal(shape)
    return g


def sample_sphere(space: Space, seed: int, count: int) -> np.ndarray:
    """``count`` seeded points of the unit sphere, shape ``(count, n)``."""
    if count < 1:
        raise ConfigError("count must be at least 1")
    rng = np.random.default_rng(seed)
    g = _gaussian(rng, (count, space.n), space.is_complex)
    r = _norm(space, g)
    r[r == 0] = 1.0
    return g / r[:, None]


def sample_ball(space: Space, seed: int, count: int) -> np.ndarray:
    """Seeded points of the unit ball with radii spread over (0, 1]."""
    rng = np.random.default_rng(seed)
    dirs = sample_sphere(space, int(rng.integers(2**31)), count)
    radii = rng.uniform(0.0, 1.0, size=count) ** (1.0 / max(space.n, 1))
    return dirs * radii[:, None]


def extreme_points(space: Space, budget: int, seed: int = 0) -> np.ndarray:
    """Norming points of the unit ball.

    For polyhedral balls (sup, weighted L1 and their 1-sums) these are actual
    extreme points, so any convex function of ``x`` attains its maximum over
    the ball on them.  Lp balls with p > 1 have no finite extreme set and get
    sphere samples instead.
    """
    if budget < 1:
        raise ConfigError("budget must be at least 1")
    return _extreme_points(space, budget, seed)


_PHASES = np.array([1.0, 1j, -1.0, -1j])


def _extreme_points(space: Space, budget: int, seed: int) -> np.ndarray:
    n = space.n
    if space.kind == "sup":
        alphabet = _PHASES if space.is_complex else np.array([1.0, -1.0])
        total = len(alphabet) ** n if n <= 40 else np.inf
        if total <= budget:
            return np.array(list(itertools.product(alphabet, repeat=n)), dtype=space.dtype)
        rng = np.random.default_rng(seed)
        if space.is_complex:
            return np.exp(2j * np.pi * rng.uniform(size=(budget, n)))
        return rng.choice(alphabet, size=(budget, n))
    if space.kind == "wl1" or (space.kind == "lp" and space.p == 1.0):
        phases = _PHASES if space.is_complex else np.array([1.0, -1.0])
        pts = []
        for i in range(n):
            for ph in phases:
                e = np.zeros(n, dtype=space.dtype)
                e[i] = ph / space.w[i]
                pts.append(e)
        return np.array(pts[:budget])
    if space.kind == "lp":
        return sample_sphere(space, seed, min(budget, max(2 * n, 64)))
    k = space.split
    half = max(budget // 2, 1)
    left = _extreme_points(space.left, half, seed)
    right = _extreme_points(space.right, max(budget - len(left), 1), seed + 1)
    pad_l = np.zeros((len(left), n - k), dtype=space.dtype)
    pad_r = np.zeros((len(right), k), dtype=space.dtype)
    return np.vstack([np.hstack([left, pad_l]), np.hstack([pad_r, right])])


def is_polyhedral(space: Space) -> bool:
    if space.kind == "lp":
        return space.p == 1.0 and not space.is_complex
    if space.kind == "sum":
        return is_polyhedral(space.left) and is_polyhedral(space.right)
    return not space.is_complex


def dual_extreme_points(space: Space, budget: int) -> Optional[np.ndarray]:
    """Extreme points of the dual ball when finitely many and within budget.

    Returns ``None`` for non-polyhedral (or complex) spaces and when the
    enumeration would exceed ``budget``.  ``||v|| = max_a Re <a, v>`` over the
    returned rows.
    """
    if space.is_complex:
        return None
    n = space.n
    if space.kind == "sup":
        eye = np.eye(n)
        return np.vstack([eye, -eye])
    if space.kind == "wl1" or (space.kind == "lp" and space.p == 1.0):
        if 2**n > budget:
            return None
        signs = np.array(list(itertools.product([1.0, -1.0], repeat=n)))
        return signs * space.w
    if space.kind == "sum":
        left = dual_extreme_points(space.left, budget)
        right = dual_extreme_points(space.right, budget)
        if left is None or right is None or len(left) * len(right) > budget:
            return None
        return np.array([np.concatenate([a, b]) for a in left for b in right])
    return None


def ones(space: Space) -> np.ndarray:
    return np.ones(space.n, dtype=space.dtype)


def unit_vector(space: Space, i: int) -> np.ndarray:
    e = np.zeros(space.n, dtype=space.dtype)
    e[i] = 1.0
    return e
