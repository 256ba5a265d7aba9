"""Bounded (generally nonlinear) maps on unit balls and their constructors.

Every evaluator is batched: it receives an array of shape ``(m, n)`` and
returns ``(m, k)`` (vector maps) or ``(m,)`` (scalar maps).  Calling a map on a
single vector of shape ``(n,)`` returns a single image.

Besides the evaluator a map may carry optional machinery the optimizer uses
for certified upper bounds:

* ``matrix`` -- the map is linear, ``Phi(x) = matrix @ x``;
* ``interval`` -- ``(lo, hi) -> (lo', hi')`` enclosing the image of the
  coordinate box ``[lo, hi]`` (real spaces only);
* ``norm_bound`` -- a declared analytic bound on ``sup ||Phi(x)||``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import spaces as sp
from .errors import ConfigError, DegenerateFunctional, PreconditionError
from .spaces import Space


@dataclass(frozen=True)
class MapTraits:
    is_linear: bool = False
    inverse_oracle: Optional[Callable] = None
    support_growth: Optional[Callable] = None
    odd_symmetry: bool = False
    sphere_onto: bool = False
    # number of coordinates in the first factor of a bilinear map
    bilinear_split: Optional[int] = None


class BoundedMap:
    """A bounded map ``B_X -> Y`` with a pure, batched evaluator."""

    def __init__(
        self,
        domain: Space,
        codomain: Space,
        fn: Callable,
        traits: MapTraits = MapTraits(),
        name: str = "map",
        matrix=None,
        interval: Optional[Callable] = None,
        norm_bound: Optional[float] = None,
        parts: tuple = (),
    ):
        self.domain = domain
        self.codomain = codomain
        self._fn = fn
        self.traits = traits
        self.name = name
        self.matrix = None if matrix is None else np.asarray(matrix)
        self.interval = interval
        self.norm_bound = norm_bound
        # constituent maps of composites, used by pipelines to find the
        # structural slice-continuity candidates (e.g. P o Upsilon)
        self.parts = parts

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        return self._fn(X)

    def __call__(self, x):
        x = sp.check_array(self.domain, x, "x")
        if x.ndim == 1:
            return self._fn(x[None, :])[0]
        return self._fn(x)

    def __repr__(self):
        return f"BoundedMap({self.name}: {self.domain!r} -> {self.codomain!r})"


class ScalarMap:
    """A bounded scalar function ``x'`` on ``B_X``."""

    def __init__(
        self,
        domain: Space,
        fn: Callable,
        name: str = "scalar",
        norm_bound: Optional[float] = None,
        functional=None,
        interval: Optional[Callable] = None,
        norm_estimate: Optional[float] = None,
    ):
        self.domain = domain
        self._fn = fn
        self.name = name
        self.norm_bound = norm_bound
        self.functional = None if functional is None else np.asarray(functional)
        self.interval = interval
        self.norm_estimate = norm_estimate

    @property
    def declared_norm_le_one(self) -> bool:
        return self.norm_bound is not None and self.norm_bound <= 1.0 + 1e-12

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        return self._fn(X)

    def __call__(self, x):
        x = sp.check_array(self.domain, x, "x")
        if x.ndim == 1:
            return self._fn(x[None, :])[0]
        return self._fn(x)

    def as_map(self) -> BoundedMap:
        """View ``x'`` as a map into the one-dimensional space of scalars."""
        line = sp.SupNorm(1, field=self.domain.field)
        matrix = None if self.functional is None else np.conj(self.functional)[None, :]
        interval = None
        if self.interval is not None:
            def interval(lo, hi, _iv=self.interval):
                a, b = _iv(lo, hi)
                return np.array([a]), np.array([b])
        return BoundedMap(
            self.domain, line, lambda X: self._fn(X)[:, None], name=self.name,
            matrix=matrix, interval=interval, norm_bound=self.norm_bound,
        )

    def __repr__(self):
        return f"ScalarMap({self.name} on {self.domain!r})"


# -- interval helpers -------------------------------------------------------


def _iv_linear(M: np.ndarray):
    A = np.abs(M)

    def iv(lo, hi):
        c = (lo + hi) / 2.0
        r = (hi - lo) / 2.0
        mc = M @ c
        mr = A @ r
        return mc - mr, mc + mr

    return iv


def _iv_power(k: int):
    if k % 2:
        return lambda lo, hi: (lo**k, hi**k)

    def iv(lo, hi):
        a, b = np.abs(lo) ** k, np.abs(hi) ** k
        low = np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(a, b))
        return low, np.maximum(a, b)

    return iv


def _iv_abs_power(e: float):
    def iv(lo, hi):
        a, b = np.abs(lo) ** e, np.abs(hi) ** e
        low = np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(a, b))
        return low, np.maximum(a, b)

    return iv


def _iv_scale(lo, hi, c: float):
    return (c * lo, c * hi) if c >= 0 else (c * hi, c * lo)


def _iv_pair(f: np.ndarray, lo, hi):
    """Enclosure of ``sum_i f_i v_i`` for real ``f`` and ``v`` in a box."""
    pos, neg = np.maximum(f, 0.0), np.minimum(f, 0.0)
    return pos @ lo + neg @ hi, pos @ hi + neg @ lo


# -- constructors -----------------------------------------------------------


def _real_only(space: Space, what: str):
    if space.is_complex:
        raise ConfigError(f"{what} is only defined over the reals here")


def identity(domain: Space) -> BoundedMap:
    eye = np.eye(domain.n)
    return BoundedMap(
        domain, domain, lambda X: X.copy(),
        MapTraits(is_linear=True, inverse_oracle=lambda Y: np.array(Y, copy=True),
                  odd_symmetry=True, sphere_onto=True),
        name="identity", matrix=eye, interval=lambda lo, hi: (lo.copy(), hi.copy()),
        norm_bound=1.0,
    )


def linear(domain: Space, codomain: Space, matrix) -> BoundedMap:
    M = np.asarray(matrix, dtype=np.result_type(domain.dtype, codomain.dtype, np.asarray(matrix).dtype))
    if M.shape != (codomain.n, domain.n):
        raise ConfigError(f"matrix shape {M.shape} does not match {codomain.n}x{domain.n}")
    iv = None if np.iscomplexobj(M) else _iv_linear(M)
    return BoundedMap(
        domain, codomain, lambda X: X @ M.T, MapTraits(is_linear=True, odd_symmetry=True),
        name="linear", matrix=M, interval=iv,
    )


def _coordinatewise(domain: Space, name: str, f, iv, traits: MapTraits, norm_bound=1.0):
    return BoundedMap(domain, domain, f, traits, name=name, interval=iv, norm_bound=norm_bound)


def cube(domain: Space) -> BoundedMap:
    """``x -> x^3`` coordinatewise; onto the ball, odd, signed-cube-root inverse."""
    _real_only(domain, "cube")
    if domain.kind != "sup":
        raise ConfigError("cube is defined on sup-norm spaces")
    return _coordinatewise(
        domain, "cube", lambda X: X**3, _iv_power(3),
        MapTraits(inverse_oracle=np.cbrt, odd_symmetry=True, sphere_onto=True),
    )


def square(domain: Space) -> BoundedMap:
    _real_only(domain, "square")
    if domain.kind != "sup":
        raise ConfigError("square is defined on sup-norm spaces")
    return _coordinatewise(domain, "square", lambda X: X * X, _iv_power(2), MapTraits())


def fourth_root(domain: Space) -> BoundedMap:
    """``x -> |x|^(1/4)`` coordinatewise."""
    _real_only(domain, "fourth_root")
    if domain.kind != "sup":
        raise ConfigError("fourth_root is defined on sup-norm spaces")
    return _coordinatewise(
        domain, "fourth_root", lambda X: np.abs(X) ** 0.25, _iv_abs_power(0.25), MapTraits()
    )


def absolute(domain: Space) -> BoundedMap:
    """``f -> |f|``; preserves supports and norms on lattice norms."""
    _real_only(domain, "absolute")
    return _coordinatewise(
        domain, "abs", np.abs, _iv_abs_power(1.0),
        MapTraits(support_growth=lambda d: d, sphere_onto=False),
    )


def _require_uniform_l1(domain: Space, what: str) -> float:
    if domain.kind != "wl1":
        raise ConfigError(f"{what} needs a WeightedL1 domain")
    w = domain.w
    if not np.allclose(w, w[0], rtol=0, atol=1e-15):
        raise ConfigError(f"{what} needs equal atoms")
    return float(w[0])


def convolution(domain: Space) -> BoundedMap:
    """``f -> |f| * |f|`` with cyclic convolution over equal atoms on a circle.

    ``(u * v)_k = sum_j u_j v_{(k - j) mod n} * w``, so probability densities
    stay probability densities.  Supports add: an arc of ``k`` atoms is sent
    into an arc of ``2k - 1`` atoms.
    """
    _real_only(domain, "convolution")
    w = _require_uniform_l1(domain, "convolution")
    n = domain.n
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n

    def fn(X):
        a = np.abs(X)
        return w * np.einsum("mj,mkj->mk", a, a[:, idx])

    def iv(lo, hi):
        a_lo, a_hi = _iv_abs_power(1.0)(lo, hi)
        return w * (a_lo[idx] @ a_lo), w * (a_hi[idx] @ a_hi)

    return BoundedMap(
        domain, domain, fn, MapTraits(support_growth=lambda d: 2.0 * d),
        name="convolution", interval=iv, norm_bound=1.0,
    )


def mass_scale(domain: Space) -> BoundedMap:
    """``f -> (integral |f|) f``."""
    _real_only(domain, "mass_scale")
    if domain.kind != "wl1":
        raise ConfigError("mass_scale needs a WeightedL1 domain")
    w = domain.w
    return BoundedMap(
        domain, domain, lambda X: (np.abs(X) @ w)[:, None] * X,
        MapTraits(support_growth=lambda d: d, odd_symmetry=True),
        name="mass_scale", norm_bound=1.0,
    )


def _summand_matrix(domain: Space, which: str) -> np.ndarray:
    if domain.kind != "sum":
        raise ConfigError("summand maps need a DirectSumL1 domain")
    k, n = domain.split, domain.n
    if which == "left":
        return np.hstack([np.eye(k), np.zeros((k, n - k))])
    return np.hstack([np.zeros((n - k, k)), np.eye(n - k)])


def summand_projection(domain: Space) -> BoundedMap:
    """``(f, g) -> f``: a linear quotient map with lifting ``f -> (f, 0)``."""
    M = _summand_matrix(domain, "left")
    k, n = domain.split, domain.n

    def lift(Y):
        Y = np.asarray(Y)
        pad = np.zeros(Y.shape[:-1] + (n - k,), dtype=Y.dtype)
        return np.concatenate([Y, pad], axis=-1)

    m = linear(domain, domain.left, M)
    m.traits = MapTraits(is_linear=True, inverse_oracle=lift, odd_symmetry=True, sphere_onto=True)
    m.name = "summand_projection"
    m.norm_bound = 1.0
    return m


def summand_shift(domain: Space, codomain: Optional[Space] = None) -> BoundedMap:
    """``(f, g) -> g`` read in ``codomain`` (the shift ``g(x + 1)`` on atoms)."""
    M = _summand_matrix(domain, "right")
    codomain = codomain or domain.right
    if codomain.n != domain.right.n:
        raise ConfigError("shift codomain must match the right summand's size")
    m = linear(domain, codomain, M)
    m.name = "shift"
    return m


def augmented_projection(domain: Space) -> BoundedMap:
    """``(f, alpha) -> f + alpha^2 * 1`` on ``X (+)_1 K``."""
    if domain.kind != "sum" or domain.right.n != 1:
        raise ConfigError("augmented_projection needs DirectSumL1(X, scalars)")
    _real_only(domain, "augmented_projection")
    k = domain.split

    def fn(X):
        return X[:, :k] + (X[:, k] ** 2)[:, None]

    def iv(lo, hi):
        a_lo, a_hi = _iv_power(2)(lo[k:], hi[k:])
        return lo[:k] + a_lo[0], hi[:k] + a_hi[0]

    return BoundedMap(domain, domain.left, fn, MapTraits(), name="augmented_projection",
                      interval=iv, norm_bound=1.0)


def averaging_rank_one(domain: Space, codomain: Optional[Space] = None) -> BoundedMap:
    """``(f, g) -> (integral g) * 1``."""
    if domain.kind != "sum":
        raise ConfigError("averaging_rank_one needs a DirectSumL1 domain")
    codomain = codomain or domain.left
    k = domain.split
    row = np.concatenate([np.zeros(k), domain.right.w])
    M = np.outer(np.ones(codomain.n), row)
    m = linear(domain, codomain, M)
    m.name = "averaging_rank_one"
    return m


def kinked_abs(domain: Optional[Space] = None) -> BoundedMap:
    """The discontinuous real map ``1`` at ``0`` and ``-|x|`` elsewhere."""
    domain = domain or sp.SupNorm(1)
    if domain.n != 1 or domain.is_complex:
        raise ConfigError("kinked_abs lives on the real line")

    def fn(X):
        x = X[:, 0]
        return np.where(np.abs(x) < 1e-300, 1.0, -np.abs(x))[:, None]

    def iv(lo, hi):
        a_lo, a_hi = _iv_abs_power(1.0)(lo, hi)
        top = np.where((lo <= 0) & (hi >= 0), 1.0, -a_lo)
        return -a_hi, top

    return BoundedMap(domain, domain, fn, MapTraits(), name="kinked_abs",
                      interval=iv, norm_bound=1.0)


def constant(domain: Space, codomain: Space, value) -> BoundedMap:
    c = sp.check_array(codomain, value, "value")
    return BoundedMap(
        domain, codomain, lambda X: np.broadcast_to(c, (X.shape[0], codomain.n)).copy(),
        MapTraits(), name="constant", interval=lambda lo, hi: (c.real.copy(), c.real.copy()),
        norm_bound=float(sp.norm(codomain, c)),
    )


def zero(domain: Space, codomain: Optional[Space] = None) -> BoundedMap:
    codomain = codomain or domain
    m = linear(domain, codomain, np.zeros((codomain.n, domain.n)))
    m.name = "zero"
    m.norm_bound = 0.0
    return m


def bilinear(tensor, n1: int, field=sp.REAL) -> BoundedMap:
    """``(u, v) -> (sum_ij T[k, i, j] u_i v_j)_k`` on ``B_{l_inf^n1} x B_{l_inf^n2}``.

    The product of the two sup balls is the sup ball of the concatenated
    coordinates, so the domain is ``SupNorm(n1 + n2)``.
    """
    T = np.asarray(tensor)
    if T.ndim != 3 or T.shape[1] != n1:
        raise ConfigError("tensor must have shape (k, n1, n2)")
    k, _, n2 = T.shape
    domain = sp.SupNorm(n1 + n2, field=field)
    codomain = sp.SupNorm(k, field=field)

    def fn(X):
        return np.einsum("kij,mi,mj->mk", T, X[:, :n1], X[:, n1:])

    return BoundedMap(domain, codomain, fn, MapTraits(bilinear_split=n1), name="bilinear")


# -- scalar maps ------------------------------------------------------------


def linear_functional(domain: Space, f) -> ScalarMap:
    f = sp.check_array(domain, f, "f")
    conj = np.conj(f)
    bound = float(sp.dual_norm(domain, f))
    iv = None if domain.is_complex else (lambda lo, hi: _iv_pair(f, lo, hi))
    return ScalarMap(domain, lambda X: X @ conj, name="functional", norm_bound=bound,
                     functional=f, interval=iv)


def constant_scalar(domain: Space, value: float = 1.0) -> ScalarMap:
    return ScalarMap(domain, lambda X: np.full(X.shape[0], value, dtype=np.result_type(value, float)),
                     name="constant", norm_bound=abs(value),
                     interval=lambda lo, hi: (np.real(value), np.real(value)))


def pullback(phi: BoundedMap, f) -> ScalarMap:
    """``x -> <f, Phi(x)>`` for a functional ``f`` on the codomain."""
    f = sp.check_array(phi.codomain, f, "f")
    conj = np.conj(f)
    bound = None
    if phi.norm_bound is not None:
        bound = float(sp.dual_norm(phi.codomain, f)) * phi.norm_bound
    iv = None
    if phi.interval is not None and not np.iscomplexobj(f):
        def iv(lo, hi):
            a, b = phi.interval(lo, hi)
            return _iv_pair(f, a, b)
    functional = None
    if phi.matrix is not None:
        functional = np.conj(np.conj(f) @ phi.matrix)
    return ScalarMap(phi.domain, lambda X: phi.evaluate(X) @ conj, name=f"<f,{phi.name}>",
                     norm_bound=bound, functional=functional, interval=iv)


def scalar_from_callable(domain: Space, fn: Callable, name="scalar", norm_bound=None) -> ScalarMap:
    """Wrap a batched callable; for ad hoc members of a family W."""
    return ScalarMap(domain, fn, name=name, norm_bound=norm_bound)


# -- combinators ------------------------------------------------------------


def rank_one(xp: ScalarMap, y, codomain: Space) -> BoundedMap:
    """``x' (x) y``: the map ``x -> x'(x) y``."""
    y = sp.check_array(codomain, y, "y")
    ynorm = float(sp.norm(codomain, y))
    matrix = None
    if xp.functional is not None:
        matrix = np.outer(y, np.conj(xp.functional))
    iv = None
    if xp.interval is not None and not codomain.is_complex:
        def iv(lo, hi):
            a, b = xp.interval(lo, hi)
            cands = np.stack([a * y, b * y])
            return cands.min(axis=0), cands.max(axis=0)
    bound = None if xp.norm_bound is None else xp.norm_bound * ynorm
    return BoundedMap(
        xp.domain, codomain, lambda X: xp.evaluate(X)[:, None] * y[None, :],
        MapTraits(is_linear=matrix is not None), name=f"{xp.name}(x){_short(y)}",
        matrix=matrix, interval=iv, norm_bound=bound, parts=("rank_one", xp, y),
    )


def _short(y: np.ndarray) -> str:
    return "y" if len(y) > 4 else np.array2string(np.real_if_close(y), precision=3)


def add_maps(phi: BoundedMap, psi: BoundedMap) -> BoundedMap:
    """Pointwise sum ``x -> Phi(x) + Psi(x)``."""
    if phi.domain != psi.domain or phi.codomain != psi.codomain:
        raise ConfigError("summands must share domain and codomain")
    matrix = None
    if phi.matrix is not None and psi.matrix is not None:
        matrix = phi.matrix + psi.matrix
    iv = None
    if phi.interval is not None and psi.interval is not None:
        def iv(lo, hi):
            a1, b1 = phi.interval(lo, hi)
            a2, b2 = psi.interval(lo, hi)
            return a1 + a2, b1 + b2
    bound = None
    if phi.norm_bound is not None and psi.norm_bound is not None:
        bound = phi.norm_bound + psi.norm_bound
    return BoundedMap(
        phi.domain, phi.codomain, lambda X: phi.evaluate(X) + psi.evaluate(X),
        MapTraits(is_linear=phi.traits.is_linear and psi.traits.is_linear),
        name=f"{phi.name}+{psi.name}", matrix=matrix, interval=iv, norm_bound=bound,
        parts=("sum", phi, psi),
    )


def scale_map(phi: BoundedMap, omega) -> BoundedMap:
    """``x -> omega * Phi(x)``."""
    omega = complex(omega) if np.iscomplexobj(omega) or isinstance(omega, complex) else float(omega)
    if isinstance(omega, complex) and omega.imag == 0 and not phi.codomain.is_complex:
        omega = omega.real
    if isinstance(omega, complex) and not phi.codomain.is_complex:
        raise ConfigError("complex scalar on a real codomain")
    matrix = None if phi.matrix is None else omega * phi.matrix
    iv = None
    if phi.interval is not None and isinstance(omega, float):
        def iv(lo, hi):
            a, b = phi.interval(lo, hi)
            return _iv_scale(a, b, omega)
    bound = None if phi.norm_bound is None else abs(omega) * phi.norm_bound
    t = phi.traits
    return BoundedMap(
        phi.domain, phi.codomain, lambda X: omega * phi.evaluate(X),
        MapTraits(is_linear=t.is_linear, odd_symmetry=t.odd_symmetry),
        name=f"{_fmt_scalar(omega)}*{phi.name}", matrix=matrix, interval=iv, norm_bound=bound,
        parts=("scale", phi, omega),
    )


def _fmt_scalar(z) -> str:
    if isinstance(z, complex):
        return f"({z.real:.3g}{z.imag:+.3g}i)"
    return f"{z:g}"


def compose_linear(P: BoundedMap, phi: BoundedMap) -> BoundedMap:
    """``P o Phi`` for a linear ``P``."""
    if not P.traits.is_linear or P.matrix is None:
        raise PreconditionError("compose_linear needs a linear outer map with a matrix")
    if P.domain.n != phi.codomain.n:
        raise ConfigError("P's domain must match Phi's codomain")
    M = P.matrix
    matrix = None if phi.matrix is None else M @ phi.matrix
    iv = None
    if phi.interval is not None and not np.iscomplexobj(M):
        lin = _iv_linear(M)

        def iv(lo, hi):
            a, b = phi.interval(lo, hi)
            return lin(a, b)

    return BoundedMap(
        phi.domain, P.codomain, lambda X: phi.evaluate(X) @ M.T,
        MapTraits(is_linear=phi.traits.is_linear), name=f"P.{phi.name}",
        matrix=matrix, interval=iv, parts=("compose", P, phi),
    )


def normalized_functional(phi: BoundedMap, ystar, budget: int = 20_000, seed: int = 0,
                          tol: float = 1e-12) -> ScalarMap:
    """``Phi_{y*} = y* o Phi / ||y* o Phi||`` using a certified lower bound.

    The norm is estimated by the search engine; the estimate actually used is
    stored on the result as ``norm_estimate``.
    """
    from .optim import sup_norm

    base = pullback(phi, ystar)
    est = sup_norm(base.as_map(), budget=budget, seed=seed)
    if est.lower_bound <= tol:
        raise DegenerateFunctional(
            f"||y* o {phi.name}|| estimated as {est.lower_bound:.3g}; y* o Phi vanishes"
        )
    c = est.lower_bound
    functional = None if base.functional is None else base.functional / c
    iv = None
    if base.interval is not None:
        def iv(lo, hi):
            a, b = base.interval(lo, hi)
            return a / c, b / c
    out = ScalarMap(phi.domain, lambda X: base.evaluate(X) / c, name=f"{phi.name}_y*",
                    norm_bound=1.0, functional=functional, interval=iv, norm_estimate=c)
    out.source = (phi, sp.check_array(phi.codomain, ystar, "ystar"))
    return out


# -- registry ---------------------------------------------------------------

MAP_KINDS = {
    "identity": identity,
    "linear": linear,
    "cube": cube,
    "square": square,
    "fourth_root": fourth_root,
    "abs": absolute,
    "convolution": convolution,
    "mass_scale": mass_scale,
    "summand_projection": summand_projection,
    "shift": summand_shift,
    "augmented_projection": augmented_projection,
    "averaging_rank_one": averaging_rank_one,
    "kinked_abs": kinked_abs,
    "constant": constant,
    "zero": zero,
}


def make_map(kind: str, domain: Space, **params) -> BoundedMap:
    """Build a registered map by name, e.g. ``make_map("cube", SupNorm(4))``."""
    if kind == "bilinear":
        return bilinear(params["tensor"], int(params["n1"]), params.get("field", sp.REAL))
    try:
        ctor = MAP_KINDS[kind]
    except KeyError:
        raise ConfigError(f"unknown map kind {kind!r}") from None
    try:
        return ctor(domain, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {kind!r}: {exc}") from exc
