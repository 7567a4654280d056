import math

import numpy as np
import pytest

from mfshift.errors import ScheduleTooShort, ValidationError
from mfshift.logsum import NEG_INF
from mfshift.mfzeta import (
    constrained_coefficient,
    level_tail_lipschitz,
    mf_bowen_fixed,
    mf_bowen_shrinking,
    mf_pressure_window,
    mf_zeta_series,
    sandwich_threshold,
)
from mfshift.model import TargetBox
from mfshift.pressure import pressure_level, zeta_coefficients
from mfshift.spectrum import sup_spectrum

from conftest import scaling_potential, zero_potential

LOG2 = math.log(2)
VACUOUS = TargetBox.interval(-100.0, 100.0)


def test_canonical_binomial_count(quarter_spec):
    phi0 = zero_potential(quarter_spec)
    C = TargetBox.interval(0.8, 1.0)
    for mode in ("L", "M"):
        v = constrained_coefficient(quarter_spec, phi0, C, 10, mode)
        assert v == pytest.approx(math.log(120), abs=1e-13)


def test_uniform_target_one_keeps_every_word(uniform_spec):
    phi0 = zero_potential(uniform_spec)
    C = TargetBox.point(1.0)
    for n in (1, 3, 9):
        assert constrained_coefficient(uniform_spec, phi0, C, n) == pytest.approx(
            n * LOG2, rel=1e-14
        )


def test_unattainable_singleton_is_empty(quarter_spec):
    phi0 = zero_potential(quarter_spec)
    C = TargetBox.point(0.5)
    for n in (1, 4, 11):
        assert constrained_coefficient(quarter_spec, phi0, C, n) == NEG_INF


def test_vacuous_target_bitwise_depth1(quarter_spec):
    phi = scaling_potential(quarter_spec).scale(0.3)
    free = zeta_coefficients(phi, 15)
    constrained = mf_zeta_series(quarter_spec, phi, VACUOUS, 15)
    assert np.array_equal(free.log_a[1:], constrained.log_a[1:])


def test_vacuous_target_bitwise_depth2(quarter_spec, depth2_level):
    # a depth-2 summand keeps both sides on the enumeration route
    phi = scaling_potential(quarter_spec).scale(0.5).lift(2)
    free = zeta_coefficients(phi, 10)
    for mode in ("L", "M"):
        constrained = mf_zeta_series(
            quarter_spec, phi, VACUOUS, 10, mode=mode, level=depth2_level
        )
        assert np.array_equal(free.log_a[1:], constrained.log_a[1:])


def test_monotone_in_target(quarter_spec):
    phi = scaling_potential(quarter_spec).scale(0.4)
    inner = TargetBox.interval(0.75, 0.95)
    outer = TargetBox.interval(0.6, 1.1)
    for n in (3, 6, 10, 13):
        ci = constrained_coefficient(quarter_spec, phi, inner, n)
        co = constrained_coefficient(quarter_spec, phi, outer, n)
        assert ci <= co


def test_mode_coincidence_depth1(quarter_spec):
    phi = scaling_potential(quarter_spec).scale(0.2)
    C = TargetBox.interval(0.7, 1.2)
    for n in (2, 5, 9):
        cl = constrained_coefficient(quarter_spec, phi, C, n, "L")
        cm = constrained_coefficient(quarter_spec, phi, C, n, "M")
        assert cl == cm


def test_sandwich_inequality_depth2(quarter_spec, depth2_level):
    phi0 = zero_potential(quarter_spec)
    C = TargetBox.interval(0.8, 1.0)
    for r in (0.05, 0.1):
        n_r = sandwich_threshold(depth2_level, r)
        assert n_r <= 16
        Cd = C.dilate(r)
        for n in range(1, 17):
            cl = constrained_coefficient(
                quarter_spec, phi0, C, n, "L", level=depth2_level
            )
            cm = constrained_coefficient(
                quarter_spec, phi0, C, n, "M", level=depth2_level
            )
            cld = constrained_coefficient(
                quarter_spec, phi0, Cd, n, "L", level=depth2_level
            )
            assert cl <= cm
            if n >= n_r:
                assert cm <= cld


def test_sandwich_threshold_monotone_in_r(depth2_level):
    assert sandwich_threshold(depth2_level, 0.05) >= sandwich_threshold(
        depth2_level, 0.1
    )
    assert level_tail_lipschitz(depth2_level) > 0.0


def test_depth1_threshold_is_one(quarter_spec):
    assert sandwich_threshold(quarter_spec, 0.05) == 1


def test_window_vacuous_matches_pressure(quarter_spec):
    phi = scaling_potential(quarter_spec).scale(0.7)
    win = mf_pressure_window(quarter_spec, phi, VACUOUS, range(3, 9))
    for n, v in zip(win.n_values, win.per_n):
        assert v == pressure_level(phi, int(n))
    assert win.lower <= win.upper


def test_window_empty_constraint(quarter_spec):
    phi = scaling_potential(quarter_spec)
    win = mf_pressure_window(quarter_spec, phi, TargetBox.point(0.5), range(2, 6))
    assert win.lower == NEG_INF and win.upper == NEG_INF


def test_mf_bowen_fixed_uniform_full(uniform_spec):
    v = mf_bowen_fixed(uniform_spec, TargetBox.point(1.0), n_max=80, tol=1e-10)
    assert v == pytest.approx(1.0, abs=1e-9)


def test_mf_bowen_fixed_empty(quarter_spec):
    assert mf_bowen_fixed(quarter_spec, TargetBox.point(0.5), n_max=60) == NEG_INF


def test_mf_bowen_fixed_matches_legendre(quarter_spec):
    C = TargetBox.interval(0.7, 0.9)
    v = mf_bowen_fixed(quarter_spec, C, n_max=400, tol=1e-6)
    sup = sup_spectrum(quarter_spec, C)
    assert v == pytest.approx(sup.value, abs=5e-3)


def test_fixed_below_shrinking_with_interior_agreement(quarter_spec):
    C = TargetBox.interval(0.7, 0.9)
    fixed = mf_bowen_fixed(quarter_spec, C, n_max=400, tol=1e-6)
    shr = mf_bowen_shrinking(quarter_spec, C, n_max=400, tol=1e-6)
    assert fixed <= shr.value + 1e-3
    assert fixed == pytest.approx(shr.value, abs=5e-3)


def test_mf_bowen_shrinking_information_dimension(quarter_spec):
    res = mf_bowen_shrinking(
        quarter_spec, TargetBox.point(0.811278), n_max=400, tol=1e-6
    )
    assert res.value == pytest.approx(0.811278, abs=1e-2)
    assert np.all(np.diff(res.roots) <= 1e-9)  # roots shrink with the target


def test_mf_bowen_shrinking_boundary_point(quarter_spec):
    res = mf_bowen_shrinking(
        quarter_spec,
        TargetBox.point(2.0),
        r_schedule=0.5 ** np.arange(1, 11),
        n_max=400,
        tol=1e-6,
    )
    assert res.value == pytest.approx(0.0, abs=2e-2)


def test_mf_bowen_shrinking_uniform(uniform_spec):
    res = mf_bowen_shrinking(
        uniform_spec, TargetBox.point(1.0), n_max=80, tol=1e-9
    )
    assert np.allclose(res.roots, 1.0, atol=1e-7)
    assert res.value == pytest.approx(1.0, abs=1e-6)


def test_shrinking_schedule_validation(quarter_spec):
    C = TargetBox.point(1.0)
    with pytest.raises(ScheduleTooShort):
        mf_bowen_shrinking(quarter_spec, C, r_schedule=[0.5, 0.25])
    with pytest.raises(ValidationError):
        mf_bowen_shrinking(quarter_spec, C, r_schedule=[0.25, 0.5, 0.75])


def test_lifted_model_depth_matches_depth1(quarter_spec):
    # potential_depth=2 lifts the depth-1 tables; the level interval over
    # tails degenerates to a point, so both modes reproduce depth-1 values
    from mfshift.model import ModelSpec

    lifted = ModelSpec(
        ratios=[0.5, 0.5],
        measures=[[0.25, 0.75]],
        label="lifted",
        potential_depth=2,
    )
    phi = scaling_potential(quarter_spec).scale(0.3)
    C = TargetBox.interval(0.7, 1.0)
    for n in (2, 6, 9):
        base = constrained_coefficient(quarter_spec, phi, C, n, "L")
        for mode in ("L", "M"):
            v = constrained_coefficient(lifted, phi, C, n, mode)
            assert v == pytest.approx(base, rel=1e-12)


def test_bad_mode_rejected(quarter_spec):
    with pytest.raises(ValidationError):
        constrained_coefficient(
            quarter_spec, zero_potential(quarter_spec), VACUOUS, 3, mode="X"
        )
