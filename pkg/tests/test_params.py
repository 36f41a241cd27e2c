import math

import pytest

from lambda_osc.params import (PhysicalParams, derive_dressed, generalized_rabi, occupancy_from_ratio,
                               thermal_occupancy, validate_regime)

FIG2 = dict(omega=50.0, omega23=0.0, Omega0=20.0, g=4.0, gamma2=1.0, gamma3=0.1, gamma=0.0,
            kappa=1e-3, nbar=1.0)


def make(**kw):
    return PhysicalParams(**{**FIG2, **kw})


def test_symmetric_drive():
    d = derive_dressed(make())
    assert d.sin_theta == 0.0
    assert d.cos_theta == pytest.approx(1.0, abs=1e-15)
    assert d.Omega == pytest.approx(20 * math.sqrt(2), rel=1e-15)
    assert d.delta_bar == pytest.approx(50 - 40 * math.sqrt(2), rel=1e-14)
    assert d.g_bar == pytest.approx(2.0, rel=1e-15)
    assert d.g_tilde == 0.0


def test_split_doublet():
    d = derive_dressed(make(omega23=30.0))
    assert d.Omega == pytest.approx(math.sqrt(1025), rel=1e-15)
    assert d.sin_theta == pytest.approx(15 / math.sqrt(1025), rel=1e-15)
    assert d.sin_theta == pytest.approx(0.46852, abs=5e-6)
    assert d.delta_tilde == pytest.approx(50 - math.sqrt(1025), rel=1e-14)
    assert d.delta_tilde == pytest.approx(17.9844, abs=5e-5)
    assert d.g_bar == pytest.approx(4 * 800 / 1025 / 2, rel=1e-14)
    assert d.g_bar == pytest.approx(1.5610, abs=5e-5)


def test_axis_one():
    d = derive_dressed(make(omega23=40.0))
    assert d.sin_theta == pytest.approx(1 / math.sqrt(3), rel=1e-15)


def test_effective_couplings():
    d = derive_dressed(make(omega23=17.0, g=3.0))
    assert d.sin_theta ** 2 + d.cos_theta ** 2 == pytest.approx(1.0, abs=1e-15)
    assert d.Omega >= math.sqrt(2) * 20.0
    assert d.g_tilde == pytest.approx(3.0 * d.sin_theta * d.cos_theta / math.sqrt(2), rel=1e-15)
    assert d.g_bar == pytest.approx(3.0 * d.cos_theta ** 2 / 2, rel=1e-15)
    assert generalized_rabi(17.0, 20.0) == d.Omega


@pytest.mark.parametrize("field,value", [("kappa", 0.0), ("Omega0", 0.0), ("gamma2", -1.0),
                                         ("nbar", -0.1), ("g", math.nan), ("omega", math.inf)])
def test_invalid_params(field, value):
    with pytest.raises(ValueError):
        make(**{field: value})


def test_replace_revalidates():
    p = make()
    assert p.replace(g=1.0).g == 1.0
    with pytest.raises(ValueError):
        p.replace(kappa=-1.0)


def test_thermal_occupancy():
    hk = 7.638232577577646e-12
    omega = 1e9
    assert thermal_occupancy(omega, hk * omega / math.log(2)) == pytest.approx(1.0, rel=1e-12)
    assert thermal_occupancy(omega, hk * omega / math.log(16 / 15)) == pytest.approx(15.0, rel=1e-12)
    assert thermal_occupancy(omega, 0.0) == 0.0
    assert thermal_occupancy(omega, 1e-30) == 0.0
    assert occupancy_from_ratio(math.log(2)) == pytest.approx(1.0, rel=1e-14)
    assert occupancy_from_ratio(math.inf) == 0.0
    with pytest.raises(ValueError):
        thermal_occupancy(omega, -1.0)


def test_regime_warnings():
    p = make()
    assert validate_regime(p, derive_dressed(p)) == []
    d = derive_dressed(p)
    w = validate_regime(make(g=d.Omega / 2), d)
    assert len(w) == 1 and "Omega/g" in w[0]
    q = make(g=0.0, gamma2=0.0, gamma3=0.0, Omega0=0.01)
    assert validate_regime(q, derive_dressed(q)) == []
    assert len(validate_regime(p, derive_dressed(p), threshold=100.0)) == 2
