import math

import numpy as np
import pytest

from lambda_osc import _kernels
from lambda_osc.generator import BlockVector
from lambda_osc.observables import (ZeroDenominator, emitter_steady_analytic, fock_moments, reduce)
from lambda_osc.rates import EmitterRates, base_rates, emitter_rates


def state_with_p0(p0, case=1):
    n_max = len(p0) - 1
    v = BlockVector(case, n_max, np.zeros((7 if case == 1 else 17) * (n_max + 1)))
    v.blocks[0] = p0
    return v


def test_three_level_distribution():
    obs = reduce(state_with_p0([0.5, 0.3, 0.2]), nbar=0.7)
    assert obs.mean_n == pytest.approx(0.7, rel=1e-15)
    assert obs.g2 == pytest.approx(0.4 / 0.49, rel=1e-14)
    assert obs.mean_n_over_nbar == pytest.approx(1.0, rel=1e-14)


def test_geometric_distribution():
    n = np.arange(61)
    mean, g2 = fock_moments(0.5 ** (n + 1))
    assert mean == pytest.approx(1.0, abs=1e-6)
    assert g2 == pytest.approx(2.0, abs=1e-5)


def test_single_quantum():
    mean, g2 = fock_moments([0.0, 1.0, 0.0])
    assert mean == 1.0 and g2 == 0.0


def test_vacuum_has_undefined_g2():
    mean, g2 = fock_moments([1.0, 0.0])
    assert mean == 0.0 and math.isnan(g2)
    assert math.isnan(reduce(state_with_p0([1.0, 0.0]), 0.0).mean_n_over_nbar)


def test_populations_from_blocks():
    v = state_with_p0([0.6, 0.4])
    v.blocks[1] = [0.3, 0.2]  # R22 + R33
    v.blocks[2] = [0.1, -0.2]  # R22 - R33
    obs = reduce(v, 1.0)
    assert obs.pop1 == pytest.approx(0.5)
    assert obs.pop2 == pytest.approx(0.2)
    assert obs.pop3 == pytest.approx(0.3)
    assert obs.Rz == pytest.approx(-0.1)


def test_kernels_agree():
    p = np.random.default_rng(0).random(300)
    np.testing.assert_allclose(_kernels.moments_numpy(p), _kernels.moments_numba(p), rtol=1e-13)


def brute_force(r: EmitterRates):
    # stationary point of the two population equations with R11 = 1 - R22 - R33
    A = np.array([[-r.g11_plus - r.g22_plus, -r.g11_plus + r.g33_plus],
                  [-r.g11_minus + r.g33_minus, -r.g11_minus - r.g22_minus]])
    x = np.linalg.solve(A, -np.array([r.g11_plus, r.g11_minus]))
    return 1 - x.sum(), x[0], x[1]


def rates_at(s, g2, g3, g):
    d = type("D", (), {"sin_theta": s, "cos_theta": math.sqrt(1 - s * s)})()
    return emitter_rates(base_rates(d, g2, g3, g), d, g)


@pytest.mark.parametrize("seed", range(100))
def test_analytic_equals_null_space(seed):
    rng = np.random.default_rng(seed)
    r = rates_at(rng.uniform(-0.95, 0.95), *rng.uniform(0.01, 2, size=3))
    np.testing.assert_allclose(emitter_steady_analytic(r), brute_force(r), atol=1e-12)


def test_dark_state_at_symmetric_drive():
    assert emitter_steady_analytic(rates_at(0.0, 1.0, 0.1, 0.0)) == pytest.approx((1.0, 0.0, 0.0), abs=1e-15)


@pytest.mark.parametrize("s", np.linspace(0.05, 0.95, 10))
def test_equal_decays_no_inversion(s):
    r = rates_at(s, 0.7, 0.7, 0.0)
    pop1, pop2, pop3 = emitter_steady_analytic(r)
    assert pop2 == pytest.approx(pop3, abs=1e-14)
    np.testing.assert_allclose(brute_force(r), (pop1, pop2, pop3), atol=1e-14)


def test_all_zero_rates():
    with pytest.raises(ZeroDenominator):
        emitter_steady_analytic(EmitterRates(0, 0, 0, 0, 0, 0))


def test_g2_nan_when_mean_square_underflows():
    from lambda_osc.observables import fock_moments
    p0 = np.zeros(4)
    p0[0], p0[1] = 1.0, 1e-200
    mean, g2 = fock_moments(p0)
    assert mean == pytest.approx(1e-200) and math.isnan(g2)
