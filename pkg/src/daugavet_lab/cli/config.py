"""Build spaces, maps, scalars, regions and contexts from a JSON-compatible tree.

Objects refer to each other by name and are built lazily, so key order in
the document does not matter.  Maps are only created by registered
constructor names; configs never carry code.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .. import maps as mp
from .. import spaces as sp
from ..daugavet import LocalContext
from ..errors import ConfigError
from ..optim import Region

SECTIONS = ("spaces", "maps", "scalars", "regions", "contexts")


def vector(spec: Any, space: sp.Space | None = None) -> np.ndarray:
    """Decode a vector: a list, ``{"re", "im"}``, or a shortcut
    ``{"ones": n}``, ``{"fill": v, "n": n}``, ``{"unit": i, "n": n}``, each
    optionally with ``"scale"``."""
    if isinstance(spec, dict):
        scale = spec.get("scale", 1.0)
        if "re" in spec:
            v = np.asarray(spec["re"], float) + 1j * np.asarray(spec.get("im", 0.0), float)
        elif "ones" in spec:
            v = np.ones(int(spec["ones"]))
        elif "fill" in spec:
            v = np.full(int(spec["n"]), float(spec["fill"]))
        elif "unit" in spec:
            v = np.zeros(int(spec["n"]))
            v[int(spec["unit"])] = 1.0
        elif "weights_of" in spec:
            if space is None:
                raise ConfigError("weights_of needs a space")
            v = space.w.copy()
        else:
            raise ConfigError(f"unrecognized vector spec {spec!r}")
        if isinstance(scale, list):
            scale = complex(scale[0], scale[1])
        v = v * scale
    else:
        try:
            v = np.asarray(spec, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed vector {spec!r}") from exc
    if space is not None:
        v = sp.check_array(space, v, "vector")
    return v


def scalar(spec) -> complex | float:
    if isinstance(spec, list):
        return complex(spec[0], spec[1])
    return float(spec)


class Builder:
    """Resolve named objects of a construction record on demand."""

    def __init__(self, construction: dict):
        if not isinstance(construction, dict):
            raise ConfigError("construction must be an object")
        self.doc = construction
        self.cache: dict = {}
        self._stack: list = []

    def _get(self, section: str, name: str, make):
        key = (section, name)
        if key in self.cache:
            return self.cache[key]
        table = self.doc.get(section, {})
        if name not in table:
            raise ConfigError(f"unknown {section[:-1]} {name!r}")
        if key in self._stack:
            raise ConfigError(f"cyclic reference through {name!r}")
        self._stack.append(key)
        try:
            obj = make(table[name])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed {section[:-1]} {name!r}: {exc}") from exc
        finally:
            self._stack.pop()
        self.cache[key] = obj
        return obj

    def space(self, name: str) -> sp.Space:
        return self._get("spaces", name, sp.Space.from_dict)

    def map(self, name: str) -> mp.BoundedMap:
        return self._get("maps", name, self._make_map)

    def scalar(self, name: str) -> mp.ScalarMap:
        return self._get("scalars", name, self._make_scalar)

    def region(self, name):
        if name is None:
            return None
        return self._get("regions", name, self._make_region)

    def context(self, name: str) -> LocalContext:
        return self._get("contexts", name, self._make_context)

    def _make_map(self, d: dict) -> mp.BoundedMap:
        kind = d["kind"]
        if kind == "sum":
            return mp.add_maps(self.map(d["left"]), self.map(d["right"]))
        if kind == "scale":
            return mp.scale_map(self.map(d["map"]), scalar(d["omega"]))
        if kind == "compose":
            return mp.compose_linear(self.map(d["outer"]), self.map(d["inner"]))
        if kind == "rank_one":
            Y = self.space(d["codomain"])
            return mp.rank_one(self.scalar(d["scalar"]), vector(d["y"], Y), Y)
        if kind == "bilinear":
            return mp.bilinear(np.asarray(d["tensor"], float), int(d["n1"]))
        domain = self.space(d["domain"])
        params = dict(d.get("params", {}))
        if "codomain" in d:
            params["codomain"] = self.space(d["codomain"])
        if "matrix" in params:
            params["matrix"] = np.asarray(params["matrix"], float)
        if "value" in params:
            params["value"] = vector(params["value"], params.get("codomain"))
        return mp.make_map(kind, domain, **params)

    def _make_scalar(self, d: dict) -> mp.ScalarMap:
        kind = d["kind"]
        if kind == "functional":
            X = self.space(d["domain"])
            return mp.linear_functional(X, vector(d["f"], X))
        if kind == "constant":
            return mp.constant_scalar(self.space(d["domain"]), float(d.get("value", 1.0)))
        if kind == "pullback":
            phi = self.map(d["map"])
            return mp.pullback(phi, vector(d["f"], phi.codomain))
        if kind == "normalized":
            phi = self.map(d["map"])
            return mp.normalized_functional(phi, vector(d["ystar"], phi.codomain))
        raise ConfigError(f"unknown scalar kind {kind!r}")

    def _make_region(self, d: dict) -> Region:
        X = self.space(d["space"])
        kind = d["kind"]
        if kind == "ball":
            return Region.ball(X)
        if kind == "positive":
            return Region.positive(X)
        if kind == "finite":
            return Region.finite([vector(p, X) for p in d["points"]])
        raise ConfigError(f"unknown region kind {kind!r}")

    def _make_context(self, d: dict) -> LocalContext:
        first = self.scalar(d["W"][0])
        gamma = self.region(d.get("gamma")) or Region.ball(first.domain)
        W = [self.scalar(w) for w in d["W"]]
        for w, name in zip(W, d["W"]):
            w.name = name
        Y = self.space(d["codomain"])
        return LocalContext(gamma, W, [vector(y, Y) for y in d["Delta"]], d.get("name", "context"))

    def build_all(self) -> None:
        """Force every named object (used to validate configs up front)."""
        for section, fn in (("spaces", self.space), ("maps", self.map), ("scalars", self.scalar),
                            ("regions", self.region), ("contexts", self.context)):
            for name in self.doc.get(section, {}):
                fn(name)
