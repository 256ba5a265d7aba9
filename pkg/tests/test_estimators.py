import numpy as np
import pytest
from sklearn.base import clone

from daugavet_lab import maps as mp
from daugavet_lab import spaces as sp
from daugavet_lab.daugavet import CertificateProblem
from daugavet_lab.errors import ConfigError
from daugavet_lab.estimators import AltDefectEstimator, DefectEstimator, KyFanCertifier, SupNormEstimator

S2 = sp.SupNorm(2)


def test_params_round_trip_and_clone():
    est = DefectEstimator(budget=500, seed=3)
    assert est.get_params()["budget"] == 500
    c = clone(est).set_params(seed=7)
    assert c.seed == 7 and est.seed == 3
    assert not hasattr(c, "defect_")


def test_sup_norm_matches_row_sum():
    A = np.array([[1.0, -2.0], [0.5, 0.5]])
    est = SupNormEstimator(budget=200).fit(mp.linear(S2, S2, A))
    assert est.lower_bound_ == est.upper_bound_ == 3.0


def test_defect_and_alt_defect():
    I = mp.identity(S2)
    y = np.array([1.0, 0.0])
    e1 = mp.linear_functional(S2, [1.0, 0.0])
    assert DefectEstimator(budget=500).fit((I, mp.rank_one(e1, y, S2))).verdict_ == "DaugavetHolds"
    neg = mp.rank_one(mp.linear_functional(S2, [-1.0, 0.0]), y, S2)
    assert DefectEstimator(budget=500).fit((I, neg)).verdict_ == "DaugavetFails"
    alt = AltDefectEstimator(budget=500).fit((I, neg))
    assert alt.verdict_ == "DaugavetHolds" and alt.best_omega_ == -1.0


def test_validation():
    with pytest.raises(ConfigError):
        SupNormEstimator(budget=0).fit(mp.identity(S2))
    with pytest.raises(ConfigError):
        SupNormEstimator().fit(np.eye(2))
    with pytest.raises(ConfigError):
        DefectEstimator().fit((mp.identity(S2), mp.identity(sp.SupNorm(3))))
    with pytest.raises(ConfigError):
        KyFanCertifier().fit("not a problem")


def test_kyfan_certifier():
    z = np.ones(2)
    B = sp.sample_ball(S2, 0, 50)
    prob = CertificateProblem(np.eye(2), B, mp.constant(S2, S2, z), mp.identity(S2), z, 1.0)
    est = KyFanCertifier(combos=100).fit(prob)
    assert est.certificate_.found and est.score(prob) >= 0
