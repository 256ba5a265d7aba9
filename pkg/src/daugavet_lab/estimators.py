"""Estimator-style wrappers around the functional API.

``fit`` takes the map (or map pair) in place of a data matrix and stores
results in trailing-underscore attributes, so the objects compose with
``get_params`` / ``set_params`` / ``clone``.
"""

from __future__ import annotations

from typing import Optional

from sklearn.base import BaseEstimator

from .daugavet import CertificateProblem, kyfan_certificate_search, kyfan_inequality_sample
from .errors import ConfigError
from .maps import BoundedMap, ScalarMap
from .optim import DEFAULT_BUDGET, alt_defect, defect, sup_norm


def check_budget(budget) -> int:
    if int(budget) != budget or budget < 1:
        raise ConfigError(f"budget must be a positive integer, got {budget!r}")
    return int(budget)


def check_pair(phi, psi) -> None:
    for m in (phi, psi):
        if not isinstance(m, BoundedMap):
            raise ConfigError(f"expected a BoundedMap, got {type(m).__name__}")
    if phi.domain != psi.domain or phi.codomain != psi.codomain:
        raise ConfigError("maps must share domain and codomain")


class SupNormEstimator(BaseEstimator):
    """Estimate ``sup_{x in Gamma} ||Phi(x)||``."""

    def __init__(self, budget: int = DEFAULT_BUDGET, seed: int = 0, restriction=None):
        self.budget = budget
        self.seed = seed
        self.restriction = restriction

    def fit(self, phi, y=None):
        if not isinstance(phi, (BoundedMap, ScalarMap)):
            raise ConfigError(f"expected a map, got {type(phi).__name__}")
        est = sup_norm(phi, check_budget(self.budget), self.seed, self.restriction)
        self.estimate_ = est
        self.lower_bound_ = est.lower_bound
        self.upper_bound_ = est.upper_bound
        self.witness_ = est.witness
        return self


class DefectEstimator(BaseEstimator):
    """Daugavet defect ``||Phi|| + ||Psi|| - ||Phi + Psi||`` with a verdict."""

    def __init__(self, budget: int = DEFAULT_BUDGET, seed: int = 0, restriction=None,
                 tol: Optional[float] = None):
        self.budget = budget
        self.seed = seed
        self.restriction = restriction
        self.tol = tol

    def fit(self, maps, y=None):
        phi, psi = maps
        check_pair(phi, psi)
        rep = defect(phi, psi, check_budget(self.budget), self.seed, self.restriction, self.tol)
        self.report_ = rep
        self.defect_ = rep.defect
        self.verdict_ = rep.verdict
        return self


class AltDefectEstimator(BaseEstimator):
    """Alternative defect: the rotation grid minimum of the defect."""

    def __init__(self, omega_grid=None, budget: int = DEFAULT_BUDGET, seed: int = 0,
                 restriction=None, tol: Optional[float] = None):
        self.omega_grid = omega_grid
        self.budget = budget
        self.seed = seed
        self.restriction = restriction
        self.tol = tol

    def fit(self, maps, y=None):
        phi, psi = maps
        check_pair(phi, psi)
        rep = alt_defect(phi, psi, self.omega_grid, check_budget(self.budget), self.seed,
                         self.restriction, self.tol)
        self.report_ = rep
        self.best_omega_ = rep.best_omega
        self.verdict_ = rep.report.verdict
        return self


class KyFanCertifier(BaseEstimator):
    """Sample the averaged inequality and search for a certificate functional."""

    def __init__(self, combos: int = 1000, eps_list=(0.1, 0.05), seed: int = 0, tol: float = 1e-9):
        self.combos = combos
        self.eps_list = eps_list
        self.seed = seed
        self.tol = tol

    def fit(self, problem: CertificateProblem, y=None):
        if not isinstance(problem, CertificateProblem):
            raise ConfigError("expected a CertificateProblem")
        self.sample_ = kyfan_inequality_sample(problem, self.combos, self.seed)
        self.certificate_ = kyfan_certificate_search(problem, self.eps_list, self.tol)
        self.xstar_ = self.certificate_.xstar
        return self

    def score(self, problem: CertificateProblem, y=None) -> float:
        """Negated worst sampled residual (higher is better)."""
        return -kyfan_inequality_sample(problem, self.combos, self.seed).max_residual


__all__ = ["SupNormEstimator", "DefectEstimator", "AltDefectEstimator", "KyFanCertifier",
           "check_budget", "check_pair"]
