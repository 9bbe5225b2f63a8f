import math

import numpy as np
import pytest

from zeno_ring import dynamics, rates
from zeno_ring.errors import OutOfBandError, ParameterError
from zeno_ring.model import SystemParams, band

FIG2 = SystemParams(N=20, J=5.0, g=1.0, phi=0.6)


def test_sinc_is_unnormalised():
    x = np.array([0.0, 1e-9, 0.5, 3.0, -7.0])
    np.testing.assert_allclose(rates.sinc(x), np.sinc(x / np.pi), rtol=1e-15)


def test_kernel_is_rotated_memory_function():
    p = SystemParams(N=4, J=1.3, g=0.7, omega_A=0.4, phi=0.2)
    t = np.linspace(0, 4, 9)
    np.testing.assert_allclose(rates.tau_kernel(p, t), np.exp(1j * p.omega_A * t) * rates.memory_function(p, -t))
    assert rates.memory_function(p, 0.0) == pytest.approx(p.g ** 2)


@pytest.mark.parametrize("tau", [0.3, 2.0, 11.0])
def test_closed_form_matches_double_time_integral(tau):
    # R = (1/tau) sum_k c |int_0^tau exp(-i Delta_k t) dt|^2, integrated on a fine grid
    p = SystemParams(N=3, J=2.0, g=0.6, omega_A=0.5, phi=0.3)
    t = np.linspace(0.0, tau, 20001)
    c = p.g ** 2 / p.sites
    amp = [np.trapezoid(np.exp(-1j * d * t), t) for d in band(p) - p.omega_A]
    reference = c / tau * float(np.sum(np.abs(amp) ** 2))
    assert rates.time_integral_closed_form(p, tau) == pytest.approx(reference, rel=1e-7)


def test_time_integral_estimate_carries_quadrature():
    est = rates.decay_rate_time_integral(FIG2, 3.0)
    assert est.method is rates.RateMethod.TIME_INTEGRAL and est.tau == 3.0
    assert est.cross_check == pytest.approx(est.value, rel=1e-10)
    assert "quadrature-mismatch" not in est.validity_notes
    assert rates.decay_rate_derived_sinc(FIG2, 3.0).value == pytest.approx(est.value, rel=1e-14)


def test_paper_sinc_literal_form():
    p = SystemParams(N=7, J=1.1, g=0.4, omega_A=0.9, phi=0.15)
    tau = 2.5
    m = np.arange(2 * p.N)
    arg = (p.J * np.cos((p.phi + m) * np.pi / p.N) - p.omega_A / 2) * tau
    literal = p.g ** 2 * tau / (4 * np.pi * p.N) * np.sum(np.sinc(arg / np.pi) ** 2)
    assert rates.decay_rate_paper_sinc(p, tau).value == pytest.approx(literal, rel=1e-13)


@pytest.mark.parametrize("tau", [0.0, -1.0, math.nan, math.inf, "2"])
def test_tau_validation(tau):
    with pytest.raises(ParameterError):
        rates.decay_rate_time_integral(FIG2, tau)


def test_golden_rule_continuum_value_and_domain():
    assert rates.golden_rule_continuum(5.0, 0.2, 0.0).value == pytest.approx(0.008)
    assert rates.golden_rule_continuum(1.0, 1.0, 1.0).value == pytest.approx(2.0 / math.sqrt(3.0))
    for omega in (10.0, -10.0, 20.0):
        with pytest.raises(OutOfBandError):
            rates.golden_rule_continuum(5.0, 1.0, omega)
    with pytest.raises(OutOfBandError):
        rates.golden_rule_continuum(0.0, 1.0, 0.0)


def test_broadened_golden_rule_is_continuum_over_four_pi():
    # printed structure lacks the 2 pi and halves the coupling weight
    p = SystemParams(N=400, J=5.0, g=0.2, omega_A=1.0)
    est = rates.golden_rule_broadened(p, eta=rates.ww_broadening(p))
    target = rates.golden_rule_continuum(5.0, 0.2, 1.0).value
    assert 4 * math.pi * est.value == pytest.approx(target, rel=0.02)
    assert est.tau is None and any(n.startswith("eta=") for n in est.validity_notes)


def test_broadened_golden_rule_small_eta_limits():
    resonant = SystemParams(N=20, J=2.5, g=1.0, omega_A=0.0, phi=0.0)
    eta = 1e-7
    hits = len(rates.resonance_check(resonant, 1e-12))
    expected = hits * resonant.g ** 2 / (4 * resonant.N * math.pi * eta)
    assert rates.golden_rule_broadened(resonant, eta).value == pytest.approx(expected, rel=1e-6)
    detuned = resonant.replace(phi=0.5)
    assert rates.golden_rule_broadened(detuned, eta).value < 1e-6


def test_broadened_golden_rule_notes():
    off = rates.golden_rule_broadened(FIG2.replace(omega_A=20.0))
    assert "off-band" in off.validity_notes
    on = rates.golden_rule_broadened(SystemParams(N=20, J=2.5, g=1.0, phi=0.0))
    assert "resonant" in on.validity_notes
    with pytest.raises(ParameterError):
        rates.golden_rule_broadened(FIG2, eta=0.0)


def test_resonance_check_finds_flux_resonance():
    p = SystemParams(N=20, J=2.5, g=1.0, omega_A=0.0)
    phi_star = (p.N * math.acos(0.0) / math.pi) % 1.0
    hits = rates.resonance_check(p.replace(phi=phi_star), 1e-9)
    assert hits and all(abs(band(p.replace(phi=phi_star))[m]) < 1e-9 for m in hits)
    assert rates.resonance_check(p.replace(phi=0.5), 1e-9) == []
    with pytest.raises(ParameterError):
        rates.resonance_check(p, 0.0)


def test_wigner_weisskopf_rabi_limit():
    est = rates.wigner_weisskopf_pole(SystemParams(N=5, J=0.0, g=1.0, omega_A=0.0))
    assert abs(est.value) < 1e-8
    assert abs(abs(est.pole.imag) - 1.0) < 1e-8


def test_wigner_weisskopf_pole_is_a_root_and_tracks_dynamics():
    p = SystemParams(N=200, J=5.0, g=0.1, omega_A=0.0)
    est = rates.wigner_weisskopf_pole(p)
    f, _ = rates.ww_function(p, est.pole, rates.ww_broadening(p))
    assert abs(f) <= 1e-10 * p.g ** 2
    t = np.array([10.0, 20.0])
    exact = -np.log(np.abs(dynamics.survival_amplitude(p, t)) ** 2) / t
    np.testing.assert_allclose(exact, est.value, rtol=0.02)
    assert est.value == pytest.approx(rates.golden_rule_continuum(5.0, 0.1, 0.0).value, rel=0.02)


def test_wigner_weisskopf_needs_coupling():
    with pytest.raises(ParameterError):
        rates.wigner_weisskopf_pole(FIG2.replace(g=0.0))
    with pytest.raises(ParameterError):
        rates.wigner_weisskopf_pole(FIG2, eta=-1.0)


@pytest.mark.parametrize("omega_A,tau", [(20.0, 10.0), (20.0, 3.0), (14.0, 6.0), (-16.0, 10.0)])
def test_flux_variation_bound_holds(omega_A, tau):
    p = SystemParams(N=20, J=5.0, g=1.0, omega_A=omega_A)
    values = [rates.time_integral_closed_form(p.replace(phi=float(phi)), tau) for phi in np.linspace(0, 2, 201)]
    variation = (max(values) - min(values)) / min(values)
    assert variation <= rates.flux_variation_bound(p, tau)


def test_flux_variation_bound_uninformative_on_resonance():
    assert math.isinf(rates.flux_variation_bound(SystemParams(N=20, J=5.0, g=1.0), 10.0))
