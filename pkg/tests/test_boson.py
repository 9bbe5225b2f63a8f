import math

import numpy as np
import pytest
from scipy import integrate

from zeno_ring import boson, dynamics, rates
from zeno_ring.dynamics import MeasurementSchedule
from zeno_ring.errors import ParameterError
from zeno_ring.model import Statistics, SystemParams

FIG5 = SystemParams(N=20, J=5.0, g=0.01, omega_A=3.0, statistics=Statistics.BOSON)


def test_flux_is_refused():
    with pytest.raises(ParameterError):
        boson.fock_rate(FIG5.replace(phi=0.2), 1, 1.0)
    with pytest.raises(ParameterError):
        boson.r_integral(FIG5.replace(phi=0.2), 1.0)


def test_fock_rate_scales_with_n():
    base = boson.fock_rate(FIG5, 1, 2.0)
    assert base.value == pytest.approx(rates.decay_rate_time_integral(FIG5, 2.0).value)
    assert boson.fock_rate(FIG5, 4, 2.0).value == pytest.approx(4 * base.value, rel=1e-14)
    assert "fock n=4" in boson.fock_rate(FIG5, 4, 2.0).validity_notes
    with pytest.raises(ParameterError):
        boson.fock_rate(FIG5, 0, 2.0)
    with pytest.raises(ParameterError):
        boson.fock_rate(FIG5, 1, 2.0, variant="other")


@pytest.mark.parametrize("omega_A,tau", [(0.1, 0.1), (3.0, 1.0), (12.0, 3.0), (0.0, 2.5)])
def test_r_integral_closed_form(omega_A, tau):
    p = FIG5.replace(omega_A=omega_A)
    r = boson.r_integral(p, tau)
    assert abs(r.value - r.closed_form) <= 1e-10 * abs(r.closed_form)
    # printed closed form is Re(r) / pi
    assert r.paper_closed_form == pytest.approx(r.value.real / math.pi, rel=1e-10)


def test_r_integral_independent_quadrature():
    p = FIG5.replace(omega_A=1.7)
    tau = 2.2
    kernel = lambda t: (1 - t / tau) * np.exp(1j * p.omega_A * t) * boson.boson_memory_function(p, -t)
    re = integrate.quad(lambda t: kernel(t).real, 0, tau, epsabs=1e-16)[0]
    im = integrate.quad(lambda t: kernel(t).imag, 0, tau, epsabs=1e-16)[0]
    assert boson.r_integral(p, tau).value == pytest.approx(complex(re, im), rel=1e-9)


def test_coherent_rate_paper_formula():
    tau, alpha = 1.3, 0.1 + 0.05j
    r = boson.r_integral(FIG5, tau).value
    eta = 1 - (r * tau).real
    a2 = abs(alpha) ** 2
    for c in (2.0, 4.0):
        expected = a2 / tau * (eta ** 2 + 3 - c * math.cos(FIG5.omega_A * tau) * eta - math.pi * r.real * tau ** 2)
        est = boson.coherent_rate_paper(FIG5, alpha, tau, c)
        assert est.value == pytest.approx(expected, rel=1e-12)
        assert est.cross_check == pytest.approx(boson.coherent_rate_oracle(FIG5, alpha, tau).value)
        assert est.method is rates.RateMethod.COHERENT_PAPER


def test_coherent_oracle_matches_dynamics():
    tau = 0.7
    oracle = boson.coherent_rate_oracle(FIG5, 0.2, tau).value
    s = dynamics.survival_amplitude(FIG5, tau)
    assert oracle == pytest.approx(2 * 0.04 * (1 - s.real) / tau, rel=1e-12)
    direct = abs(dynamics.coherent_overlap_direct(FIG5, 0.2, tau)) ** 2
    assert oracle == pytest.approx(-math.log(direct) / tau, rel=1e-9)


def test_coherent_oracle_intensity_scaling():
    for tau in (0.1, 1.0, 3.0):
        one = boson.coherent_rate_oracle(FIG5, 0.1, tau).value
        assert boson.coherent_rate_oracle(FIG5, 0.1 * math.sqrt(2) * 1j, tau).value == pytest.approx(2 * one, rel=1e-12)


def test_coherent_survival_paper_trivial_cases():
    assert boson.coherent_survival_paper(FIG5, 0.0, 1.0, 1.0) == 1.0
    value = boson.coherent_survival_paper(FIG5, 0.1, 0.5, 0.5)
    assert math.isfinite(value) and value > 0


def test_coherent_prep_validation():
    assert boson.CoherentPrep(0.3).intensity == pytest.approx(0.09)
    with pytest.raises(ParameterError):
        boson.CoherentPrep(complex(math.nan, 0))


def test_coherent_oracle_free_rotation():
    # with g = 0 the coherent amplitude only picks up exp(-i omega_A tau)
    free = FIG5.replace(g=0.0)
    for tau in (0.1, 1.0):
        expected = 2 * 0.01 * (1 - math.cos(free.omega_A * tau)) / tau
        assert boson.coherent_rate_oracle(free, 0.1, tau).value == pytest.approx(expected, rel=1e-12)
    paper = boson.coherent_rate_paper(FIG5, 0.1, 0.1, 2.0)
    assert math.isfinite(paper.value) and paper.cross_check is not None
