import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from bangbang.bath import (
    BathSpec,
    PulseSchedule,
    QuadratureSpec,
    decoherence_exponent,
    decoherence_integral,
    filter_function,
    spectral_density,
    thermal_factor,
)
from bangbang.errors import ConvergenceError, DomainError

FIG = BathSpec(eta=0.25, omega_c=100.0, temperature=1.0)
# midpoint mode sum, 2e5 modes on [0, 20 omega_c]; stable to ~1e-10 under refinement
GAMMA_AT_001 = 0.3467357063


def reference_gamma(bath, t, pulses):
    """Direct scipy.quad of the textbook integrand, segment sum written out."""
    times = [0.0, *pulses, t]

    def integrand(w):
        s = sum((-1) ** j * (np.exp(1j * w * times[j + 1]) - np.exp(1j * w * times[j]))
                for j in range(len(times) - 1))
        return 2 * bath.eta * math.exp(-w / bath.omega_c) / math.tanh(w / (2 * bath.temperature)) * abs(s) ** 2 / w
    return quad(integrand, 0, 60 * bath.omega_c, limit=2000, epsabs=1e-14, epsrel=1e-12)[0]


# ---------------------------------------------------------------- types

@pytest.mark.parametrize("kwargs", [dict(eta=0, omega_c=1), dict(eta=1, omega_c=-1),
                                    dict(eta=1, omega_c=1, temperature=0)])
def test_bath_spec_rejects_nonpositive(kwargs):
    with pytest.raises(DomainError):
        BathSpec(**kwargs)


@pytest.mark.parametrize("times", [(0.0,), (-1.0,), (0.2, 0.1), (0.1, 0.1), (float("nan"),)])
def test_schedule_rejects_bad_times(times):
    with pytest.raises(DomainError):
        PulseSchedule(times)


def test_schedule_helpers():
    s = PulseSchedule.uniform(3, 0.1, 0.2)
    assert s.times == pytest.approx((0.3, 0.5, 0.7))
    assert PulseSchedule.filling(3, 1.0).times == pytest.approx((0.25, 0.5, 0.75))
    assert s.applied(0.5).times == pytest.approx((0.3,))
    assert len(PulseSchedule()) == 0


@pytest.mark.parametrize("kwargs", [dict(rel_tol=0), dict(abs_tol=-1), dict(omega_max_factor=5),
                                    dict(max_refinements=0)])
def test_quadrature_spec_invariants(kwargs):
    with pytest.raises(DomainError):
        QuadratureSpec(**kwargs)


# ---------------------------------------------------------------- spectral density

def test_spectral_density_values():
    assert spectral_density(FIG, 0.0) == 0.0
    assert spectral_density(FIG, 100.0) == pytest.approx(0.25 / 4 * 100 * math.exp(-1), rel=1e-15)
    assert spectral_density(FIG, 100.0) == pytest.approx(2.29925, abs=5e-6)
    assert spectral_density(FIG, 1000.0) == pytest.approx(0.25 / 4 * 1000 * math.exp(-10), rel=1e-15)


def test_spectral_density_vectorized_and_domain():
    w = np.array([0.0, 1.0, 1e4])
    assert spectral_density(FIG, w).shape == (3,)
    with pytest.raises(DomainError):
        spectral_density(FIG, -1.0)


# ---------------------------------------------------------------- thermal factor

def test_thermal_factor_values():
    assert thermal_factor(1e3, 1.0) == 1.0
    assert thermal_factor(2.0, 1.0) == pytest.approx(float(mpmath.coth(1)), rel=1e-15)
    assert thermal_factor(2.0, 1.0) == pytest.approx(1.31304, abs=5e-6)
    assert thermal_factor(1e-8, 1.0) == pytest.approx(2e8, rel=1e-15)
    assert thermal_factor(0.0, 1.0) == math.inf


def test_thermal_factor_series_branch_is_continuous():
    for x in (4.9e-7, 5.1e-7):
        w = 2 * x
        assert thermal_factor(w, 1.0) == pytest.approx(float(mpmath.coth(x)), rel=1e-14)


@given(st.floats(1e-300, 1e6), st.floats(1e-3, 1e3))
def test_thermal_factor_at_least_one(w, temp):
    assert thermal_factor(w, temp) >= 1.0


def test_thermal_factor_domain():
    with pytest.raises(DomainError):
        thermal_factor(-1.0, 1.0)
    with pytest.raises(DomainError):
        thermal_factor(1.0, 0.0)


# ---------------------------------------------------------------- filter function

@pytest.mark.parametrize("w,t", [(1.0, 0.3), (250.0, 0.01), (3e4, 0.02)])
def test_free_filter_closed_form(w, t):
    assert filter_function(t, PulseSchedule(), w) == pytest.approx(2 * (1 - math.cos(w * t)) / w**2, rel=1e-10)


def test_free_filter_short_time():
    t = 1e-6
    assert filter_function(t, PulseSchedule(), 10.0) == pytest.approx(t * t, rel=1e-9)


def test_echo_filter_small_frequency():
    # |2e^{iwt_p} - 1 - e^{2iwt_p}|^2 / w^2 at w=1e-4, t_p=0.01, evaluated with mpmath (50 digits)
    frozen = 9.9999999999983333e-17
    f = filter_function(0.02, PulseSchedule((0.01,)), 1e-4)
    assert f == pytest.approx(frozen, rel=1e-9)
    assert f == pytest.approx(1e-4**2 * 0.01**4, rel=1e-6)
    assert filter_function(0.02, PulseSchedule(), 1e-4) == pytest.approx(0.02**2, rel=1e-6)


def test_single_pulse_filter_matches_expanded_two_step_form():
    tp, t = 0.013, 0.031
    w = np.linspace(0.5, 3000.0, 97)
    a = np.exp(1j * w * tp) - 1
    b = np.exp(1j * w * tp) - np.exp(1j * w * t)
    expanded = (abs(a) ** 2 + abs(b) ** 2 + 2 * np.real(a * np.conj(b))) / w**2
    np.testing.assert_allclose(filter_function(t, PulseSchedule((tp,)), w), expanded, rtol=1e-9)


def test_zero_frequency_limit():
    assert filter_function(0.02, PulseSchedule((0.01,)), 0.0) == 0.0
    sched = PulseSchedule((0.1, 0.25))
    assert filter_function(0.4, sched, 0.0) == pytest.approx(sched.toggling_integral(0.4) ** 2, rel=1e-15)
    assert sched.toggling_integral(0.4) == pytest.approx(0.1 - 0.15 + 0.15)


def test_filter_rejects_pulses_outside_horizon():
    with pytest.raises(DomainError):
        filter_function(0.01, PulseSchedule((0.01,)), 1.0)
    with pytest.raises(DomainError):
        filter_function(0.01, PulseSchedule(), -1.0)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0.01, 0.99), min_size=0, max_size=6, unique=True),
    st.floats(0.0, 1e4),
)
def test_filter_nonnegative_and_bounded(fractions, w):
    t = 1.0
    sched = PulseSchedule(tuple(sorted(fractions)))
    f = filter_function(t, sched, w)
    assert 0.0 <= f <= t * t * (1 + 1e-12)


# ---------------------------------------------------------------- decoherence exponent

def test_gamma_zero_time_is_exactly_zero():
    assert decoherence_exponent(FIG, 0.0) == 0.0


def test_gamma_golden_value():
    assert decoherence_exponent(FIG, 0.01) == pytest.approx(GAMMA_AT_001, rel=1e-8)


def test_gamma_past_death_threshold_at_00135():
    assert decoherence_exponent(FIG, 0.0135) > math.log(1.5)


@pytest.mark.parametrize("t,pulses", [(0.004, ()), (0.03, ()), (0.02, (0.01,)), (0.05, (0.01, 0.03, 0.04))])
def test_gamma_matches_scipy_quad(t, pulses):
    got = decoherence_exponent(FIG, t, PulseSchedule(pulses))
    assert got == pytest.approx(reference_gamma(FIG, t, pulses), rel=1e-8)


def test_low_temperature_closed_forms():
    # coth -> 1: int_0^inf e^{-w/wc} (1 - cos wt) / w dw = ln(1 + wc^2 t^2) / 2
    cold = BathSpec(0.25, 100.0, 1e-9)
    t = 0.017
    assert decoherence_exponent(cold, t) == pytest.approx(2 * 0.25 * math.log1p((100 * t) ** 2), rel=1e-8)
    tp, s = 0.01, 0.007
    echo = 2 * 0.25 * (2 * math.log1p((100 * tp) ** 2) + 2 * math.log1p((100 * s) ** 2)
                       - math.log1p((100 * (tp + s)) ** 2))
    assert decoherence_exponent(cold, tp + s, PulseSchedule((tp,))) == pytest.approx(echo, rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-3, 10.0), st.floats(1e-4, 0.05))
def test_gamma_linear_in_eta(eta, t):
    g1 = decoherence_exponent(BathSpec(eta, 100.0), t)
    g2 = decoherence_exponent(BathSpec(2 * eta, 100.0), t)
    assert g2 == pytest.approx(2 * g1, rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.001, 0.099), max_size=5, unique=True), st.floats(0.1, 0.2))
def test_gamma_nonnegative(pulses, t):
    assert decoherence_exponent(FIG, t, PulseSchedule(tuple(sorted(pulses)))) >= 0.0


def test_free_gamma_nondecreasing():
    grid = np.linspace(0, 0.1, 201)
    gam = np.array([decoherence_exponent(FIG, t) for t in grid])
    assert np.all(np.diff(gam) >= -1e-10)


def test_echo_beats_free_decay():
    tp = 0.01
    assert decoherence_exponent(FIG, 2 * tp, PulseSchedule((tp,))) < decoherence_exponent(FIG, 2 * tp)


def test_dense_pulses_preserve_coherence():
    t = 0.01
    gammas = {n: decoherence_exponent(FIG, t, PulseSchedule.filling(n, t)) for n in (2, 8, 32, 128)}
    assert gammas[128] < 1e-2
    for n in (2, 8, 32):
        assert gammas[4 * n] < gammas[n]


def test_gamma_error_estimate_reported():
    res = decoherence_integral(FIG, 0.01)
    assert 0 < res.error < 1e-10 * res.value


def test_gamma_convergence_error_on_tiny_budget():
    quad_spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_refinements=1)
    with pytest.raises(ConvergenceError) as info:
        decoherence_exponent(FIG, 0.2, PulseSchedule((0.05, 0.1)), quad_spec)
    assert info.value.error_estimate > 0


def test_gamma_tail_counts_toward_error():
    # e^{-10} tail is far above a 1e-12 relative target
    with pytest.raises(ConvergenceError):
        decoherence_exponent(FIG, 0.01, quad=QuadratureSpec(rel_tol=1e-12, omega_max_factor=10))


def test_gamma_rejects_negative_time_and_late_pulses():
    with pytest.raises(DomainError):
        decoherence_exponent(FIG, -0.1)
    with pytest.raises(DomainError):
        decoherence_exponent(FIG, 0.01, PulseSchedule((0.02,)))
