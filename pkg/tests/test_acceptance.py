"""Acceptance criteria, one test (or group) per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""
import json
import math

import numpy as np
import pytest
from scipy.linalg import expm

from zeno_ring import boson, dynamics, rates, verify, zeno
from zeno_ring.cli import main
from zeno_ring.dynamics import MeasurementSchedule
from zeno_ring.model import Statistics, SystemParams, band, build_momentum_space, build_real_space

FIG2 = SystemParams(N=20, J=5.0, g=1.0, omega_A=0.0)
FIG4 = SystemParams(N=20, J=2.5, g=1.0, omega_A=0.0)


@pytest.mark.criterion(1, "spectral duality")
@pytest.mark.parametrize("N", [2, 3, 5, 20])
@pytest.mark.parametrize("phi", [0.0, 0.3, 0.6])
@pytest.mark.parametrize("g", [0.0, 1.0])
@pytest.mark.parametrize("omega_A", [0.0, 20.0])
def test_spectral_duality(N, phi, g, omega_A):
    p = SystemParams(N=N, J=5.0, g=g, omega_A=omega_A, phi=phi)
    real = np.linalg.eigvalsh(build_real_space(p).matrix)
    dual = np.linalg.eigvalsh(build_momentum_space(p).matrix)
    assert np.max(np.abs(real - dual)) <= 1e-10
    if g == 0.0:
        expected = np.sort(np.append(band(p), omega_A))
        assert np.max(np.abs(real - expected)) <= 1e-10


@pytest.mark.criterion(2, "unitarity")
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_unitarity(t):
    column = dynamics.propagator_column(FIG2.replace(phi=0.6), t)
    assert abs(np.linalg.norm(column) - 1.0) <= 1e-10
    for p in (FIG2, FIG2.replace(phi=0.6)):
        u = expm(-1j * build_real_space(p).matrix * t)
        assert np.max(np.abs(np.linalg.norm(u, axis=0) - 1.0)) <= 1e-10


@pytest.mark.criterion(3, "Rabi oracle")
def test_rabi_oracle():
    p = SystemParams(N=20, J=0.0, g=1.0, omega_A=0.0)
    t = np.linspace(0.0, 10.0, 2001)
    assert np.max(np.abs(dynamics.survival_amplitude(p, t) - np.cos(t))) <= 1e-9


@pytest.mark.criterion(4, "small-tau Zeno law")
@pytest.mark.parametrize("omega_A", [0.0, 20.0])
@pytest.mark.parametrize("phi", [0.0, 0.6])
def test_small_tau_law(omega_A, phi):
    p = FIG2.replace(omega_A=omega_A, phi=phi)
    tau = 1e-3
    assert abs(rates.decay_rate_time_integral(p, tau).value / (p.g ** 2 * tau) - 1.0) <= 0.01


@pytest.mark.criterion(5, "quadrature vs closed form")
def test_quadrature_vs_closed_form():
    worst = 0.0
    for tau in np.linspace(0.5, 15.0, 10):
        for phi in np.linspace(0.0, 3.5, 10):
            p = FIG2.replace(phi=float(phi))
            closed = rates.time_integral_closed_form(p, float(tau))
            quad = rates.time_integral_quadrature(p, float(tau))
            worst = max(worst, abs(closed - quad) / abs(closed))
    assert worst <= 1e-8


@pytest.mark.criterion(6, "perturbative agreement with exact dynamics")
def test_perturbative_agreement():
    p = SystemParams(N=20, J=5.0, g=0.1, omega_A=0.0, phi=0.6)
    schedule = MeasurementSchedule(2.0, 50)
    result = dynamics.measured_survival(p, schedule)
    # independent propagator: matrix exponential instead of the eigenbasis
    q = abs(expm(-1j * build_real_space(p).matrix * 2.0)[0, 0]) ** 2
    np.testing.assert_allclose(result.probabilities, q ** np.arange(51), rtol=1e-10, atol=0)
    derived = rates.decay_rate_time_integral(p, 2.0).value
    assert abs(result.effective_rate - derived) / derived <= 0.10


@pytest.mark.criterion(7, "continuum golden rule")
def test_continuum_golden_rule():
    p = SystemParams(N=500, J=5.0, g=0.2, omega_A=0.0)
    value = rates.decay_rate_time_integral(p, 50.0).value
    assert abs(value - 0.008) / 0.008 <= 0.05
    assert rates.golden_rule_continuum(5.0, 0.2, 0.0).value == pytest.approx(0.008, rel=1e-12)


def _exact_rate(p, tau):
    return dynamics.measured_survival(p, MeasurementSchedule(tau, 1)).effective_rate


@pytest.mark.criterion(8, "flux symmetries")
@pytest.mark.parametrize("base,tau", [(FIG2, 2.0), (FIG2, 9.0), (FIG4, 10.0), (FIG4.replace(omega_A=4.0), 10.0)])
def test_flux_symmetries(base, tau):
    methods = [
        lambda p: rates.time_integral_closed_form(p, tau),
        lambda p: rates.decay_rate_paper_sinc(p, tau).value,
        lambda p: rates.golden_rule_broadened(p).value,
        lambda p: _exact_rate(p, tau),
    ]
    for phi in np.linspace(-2.0, 3.5, 45):
        p = base.replace(phi=float(phi))
        for f in methods:
            ref = f(p)
            assert abs(f(p.replace(phi=p.phi + 1.0)) - ref) <= 1e-10 * max(1.0, abs(ref))
            assert abs(f(p.replace(phi=-p.phi)) - ref) <= 1e-10 * max(1.0, abs(ref))


@pytest.mark.criterion(9, "Fock-state n-fold enhancement")
@pytest.mark.parametrize("tau", [0.5, 2.0])
def test_fock_enhancement(tau):
    p = FIG2.replace(g=0.3, statistics=Statistics.BOSON)
    schedule = MeasurementSchedule(tau, 5)
    one_formula = boson.fock_rate(p, 1, tau).value
    one_paper = boson.fock_rate(p, 1, tau, "paper").value
    one_exact = dynamics.fock_survival(p, 1, schedule).effective_rate
    for n in (1, 2, 5):
        assert boson.fock_rate(p, n, tau).value == pytest.approx(n * one_formula, rel=1e-12)
        assert boson.fock_rate(p, n, tau, "paper").value == pytest.approx(n * one_paper, rel=1e-12)
        assert dynamics.fock_survival(p, n, schedule).effective_rate == pytest.approx(n * one_exact, rel=1e-12)


@pytest.mark.criterion(10, "printed vs derived prefactor is 1/(2 pi)")
@pytest.mark.parametrize("p,tau", [
    (FIG2, 0.3), (FIG2.replace(phi=0.6), 2.0), (FIG2.replace(phi=1.7), 13.0),
    (FIG2.replace(omega_A=20.0), 4.0), (FIG4.replace(omega_A=3.3, phi=0.25), 10.0),
    (SystemParams(N=1, J=1.0, g=0.2, omega_A=0.4, phi=0.1), 1.0),
])
def test_prefactor_ratio(p, tau):
    ratio = rates.decay_rate_paper_sinc(p, tau).value / rates.decay_rate_time_integral(p, tau).value
    assert abs(ratio - 1.0 / (2.0 * math.pi)) <= 1e-10


@pytest.mark.criterion(11, "Zeno / anti-Zeno switching with flux")
def test_zeno_switching():
    tau = 10.0
    # smallest non-negative flux putting a mode on resonance with omega_A = 0
    phi_star = (FIG4.N * math.acos(0.0) / math.pi) % 1.0
    resonant = FIG4.replace(phi=phi_star)
    assert np.min(np.abs(rates.detunings(resonant))) <= 1e-9
    assert zeno.classify(resonant, tau) is zeno.ZenoClass.ZENO
    assert zeno.classify(resonant, tau, method="paper_sinc") is zeno.ZenoClass.ZENO

    anti = None
    for omega_A in np.linspace(0.0, 8.0, 41):
        for phi in np.linspace(0.0, 3.5, 36):
            p = FIG4.replace(omega_A=float(omega_A), phi=float(phi))
            a = zeno.classify(p, tau)
            assert zeno.classify(p, tau, method="paper_sinc") is a
            detuned = np.min(np.abs(rates.detunings(p))) > 5.0 / tau
            if anti is None and detuned and a is zeno.ZenoClass.ANTI_ZENO:
                anti = p
    assert anti is not None


@pytest.mark.criterion(12, "off-band anti-Zeno window and flux-variation bound")
def test_off_band_anti_zeno():
    p = FIG2.replace(omega_A=20.0)
    taus = np.linspace(0.05, 3.0, 60)
    slopes = np.array([zeno.rate_derivative(p, float(t)) for t in taus])
    negative = slopes < 0
    # a finite window: a run of negative slopes bounded on the left by positive ones
    first = int(np.argmax(negative))
    assert negative.any() and first > 0 and negative[first:first + 3].all()
    values = [rates.time_integral_closed_form(p.replace(phi=float(phi)), 10.0) for phi in np.linspace(0, 2, 401)]
    variation = (max(values) - min(values)) / min(values)
    bound = rates.flux_variation_bound(p, 10.0)
    assert math.isfinite(bound) and variation <= bound
    check = verify.off_band_anti_zeno()
    assert check.passed and check.detail["derived_bound"] == bound


@pytest.fixture(scope="module")
def verify_report(tmp_path_factory):
    path = tmp_path_factory.mktemp("verify") / "report.json"
    code = main(["verify", "-o", str(path)])
    return code, json.loads(path.read_text())


@pytest.mark.criterion(13, "coherent-state three-way report")
def test_coherent_report(verify_report):
    code, report = verify_report
    assert code == 0
    section = report["coherent"]
    assert section["columns"] == ["paper_4cos", "paper_2cos", "oracle"]
    assert len(section["rows"]) > 1
    for row in section["rows"]:
        assert all(isinstance(row[c], float) and math.isfinite(row[c]) for c in section["columns"])
        p = SystemParams(N=20, J=5.0, g=0.01, omega_A=row["omega_A"], statistics=Statistics.BOSON)
        single = boson.coherent_rate_oracle(p, 0.1, row["tau"]).value
        doubled = boson.coherent_rate_oracle(p, 0.1 * math.sqrt(2.0), row["tau"]).value
        assert single == row["oracle"]
        assert doubled == pytest.approx(2.0 * single, rel=1e-12)


@pytest.mark.criterion(14, "deterministic figure output")
def test_determinism(tmp_path, monkeypatch):
    outputs = []
    for threads in ("1", "4", "4"):
        monkeypatch.setenv("ZENO_RING_THREADS", threads)
        path = tmp_path / f"fig2_{len(outputs)}.csv"
        assert main(["figure", "fig2", "-o", str(path)]) == 0
        outputs.append((path.read_bytes(), path.with_suffix(".meta.json").read_bytes()))
    assert outputs[0] == outputs[1] == outputs[2]
