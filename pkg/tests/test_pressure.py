import math

import numpy as np
import pytest

from mfshift.errors import AllEmpty, BracketFailure, DepthUnsupported
from mfshift.logsum import NEG_INF
from mfshift.model import PotentialTable
from mfshift.pressure import (
    SeriesCoefficients,
    bowen_root,
    pressure_exact,
    pressure_level,
    radius_estimate,
    zeta_coefficients,
)

LOG2 = math.log(2)
GOLDEN_DIM = math.log2((1 + math.sqrt(5)) / 2)


def test_pressure_level_zero_potential():
    phi = PotentialTable(np.zeros(2))
    for n in (1, 5, 20):
        assert pressure_level(phi, n) == pytest.approx(LOG2, abs=1e-13)


def test_pressure_level_depth1_is_n_independent():
    phi = PotentialTable(np.array([0.3, -1.1]))
    exact = pressure_exact(phi)
    for n in (1, 7, 40):
        assert pressure_level(phi, n) == pytest.approx(exact, rel=1e-12)


def test_pressure_exact_examples():
    lam = PotentialTable(np.log([0.5, 0.25]))
    assert pressure_exact(lam) == pytest.approx(math.log(0.75), abs=1e-14)
    assert pressure_exact(PotentialTable(np.zeros(3))) == pytest.approx(
        math.log(3)
    )
    # q Phi + beta Lam at q=1, beta=0 is log sum p_i = 0
    phi = PotentialTable(np.log([0.25, 0.75]))
    assert pressure_exact(phi) == pytest.approx(0.0, abs=1e-15)


def test_pressure_exact_rejects_depth2():
    with pytest.raises(DepthUnsupported):
        pressure_exact(PotentialTable(np.zeros((2, 2))))


def test_zeta_coefficients_zero_potential():
    coeffs = zeta_coefficients(PotentialTable(np.zeros(2)), 30)
    n = np.arange(1, 31)
    assert np.allclose(coeffs.log_a[1:], n * LOG2, atol=1e-12)
    est = radius_estimate(coeffs)
    assert est.log_radius == pytest.approx(-LOG2, abs=1e-13)


def test_zeta_coefficients_at_moran_root():
    lam = PotentialTable(np.log([0.5, 0.25]))
    coeffs = zeta_coefficients(lam.scale(GOLDEN_DIM), 40)
    assert np.max(np.abs(coeffs.log_a[1:])) < 1e-10


def test_radius_estimate_synthetic_with_log_term():
    n = np.arange(1, 401)
    log_a = np.concatenate([[np.nan], 0.3 * n + np.log(n)])
    est = radius_estimate(SeriesCoefficients(log_a))
    assert est.log_radius == pytest.approx(-0.3, abs=2e-2)


def test_radius_estimate_all_empty():
    log_a = np.concatenate([[np.nan], np.full(10, NEG_INF)])
    with pytest.raises(AllEmpty):
        radius_estimate(SeriesCoefficients(log_a))


def test_radius_estimate_skips_gaps():
    # constrained series often have empty levels; the tail max ignores them
    n = np.arange(1, 101, dtype=float)
    log_a = 0.5 * n
    log_a[::3] = NEG_INF
    est = radius_estimate(SeriesCoefficients(np.concatenate([[np.nan], log_a])))
    assert est.log_radius == pytest.approx(-0.5, abs=1e-12)


def test_bowen_root_uniform():
    lam = PotentialTable(np.log([0.5, 0.5]))
    root = bowen_root(lambda t: pressure_exact(lam.scale(t)), (0.0, 2.0), tol=1e-12)
    assert root == pytest.approx(1.0, abs=1e-11)


def test_bowen_root_golden():
    lam = PotentialTable(np.log([0.5, 0.25]))
    root = bowen_root(lambda t: pressure_exact(lam.scale(t)), (0.0, 1.0), tol=1e-12)
    assert root == pytest.approx(GOLDEN_DIM, abs=1e-11)


def test_bowen_root_ternary():
    lam = PotentialTable(np.log([1 / 3, 1 / 3, 1 / 3]))
    root = bowen_root(lambda t: pressure_exact(lam.scale(t)), (0.0, 2.0), tol=1e-12)
    assert root == pytest.approx(1.0, abs=1e-11)


def test_bowen_root_expands_bracket():
    lam = PotentialTable(np.log([0.5, 0.5]))
    root = bowen_root(lambda t: pressure_exact(lam.scale(t)), (5.0, 6.0), tol=1e-12)
    assert root == pytest.approx(1.0, abs=1e-11)


def test_bowen_root_bracket_failure():
    with pytest.raises(BracketFailure):
        bowen_root(lambda t: 1.0, (0.0, 1.0), tol=1e-10, max_expand=8)


def test_radius_equals_pressure_depth1_random():
    rng = np.random.default_rng(7)
    for _ in range(20):
        N = int(rng.integers(2, 4))
        phi = PotentialTable(rng.uniform(-2, 2, size=N))
        est = radius_estimate(zeta_coefficients(phi, 50))
        assert abs(-est.log_radius - pressure_exact(phi)) <= 1e-10


def test_radius_close_to_pressure_depth2():
    rng = np.random.default_rng(11)
    vals = rng.uniform(-1.0, 0.4, size=(2, 2))
    phi = PotentialTable(vals)
    est = radius_estimate(zeta_coefficients(phi, 18))
    assert abs(-est.log_radius - pressure_level(phi, 18)) <= 5e-3


def test_pressure_curve_decreasing_convex():
    lam = PotentialTable(np.log([0.5, 0.25]))
    ts = np.linspace(-3, 3, 61)
    vals = np.array([pressure_exact(lam.scale(t)) for t in ts])
    diffs = np.diff(vals)
    assert np.all(diffs < 0)
    second = np.diff(vals, 2)
    assert np.min(second) >= -1e-12
    assert pressure_exact(lam.scale(0.0)) == pytest.approx(LOG2)
