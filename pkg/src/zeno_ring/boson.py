"""Boson formulas for the flux-free ring (optical-lattice version).

The Fock-state rates reuse the fermion rates, multiplied by the atom number.
The coherent-state survival and rate are evaluated as printed, including the
coefficient that differs between the survival expression (``4 cos``) and
the rate expression (``2 cos``).  Both are exposed; neither is preferred.
The exact counterpart lives in :func:`zeno_ring.dynamics.coherent_survival_oracle`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .dynamics import MeasurementSchedule, coherent_survival_oracle
from .errors import ParameterError
from .model import Statistics, SystemParams, band
from .rates import (
    RateEstimate,
    RateMethod,
    _check_tau,
    _quad_limit,
    decay_rate_paper_sinc,
    decay_rate_time_integral,
    detunings,
    sinc,
)

__all__ = [
    "CoherentPrep",
    "RIntegral",
    "boson_memory_function",
    "fock_rate",
    "r_integral",
    "r_closed_form",
    "coherent_survival_paper",
    "coherent_rate_paper",
    "coherent_rate_oracle",
]

ETA_AT = "eta evaluated at t = tau"


@dataclass(frozen=True)
class CoherentPrep:
    alpha: complex

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
            raise ParameterError(f"alpha must be finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def intensity(self) -> float:
        return abs(self.alpha) ** 2


def _require_flux_free(params: SystemParams):
    if params.phi != 0.0:
        raise ParameterError(f"the boson ring carries no flux; got phi={params.phi}")


def _as_boson(params):
    _require_flux_free(params)
    if params.statistics is not Statistics.BOSON:
        params = params.replace(statistics=Statistics.BOSON)
    return params


def boson_memory_function(params: SystemParams, t):
    """``(g^2/2N) sum_k exp(i 2J cos(pi k/N) t)``."""
    _require_flux_free(params)
    t = np.asarray(t, dtype=float)
    c = params.g ** 2 / params.sites
    result = c * np.exp(1j * np.multiply.outer(t, band(params))).sum(axis=-1)
    return complex(result) if result.ndim == 0 else result


def fock_rate(params: SystemParams, n: int, tau: float, variant: str = "derived") -> RateEstimate:
    """Rate of ``n`` atoms on the dot: ``n`` times the single-particle rate.

    ``variant`` is ``"derived"`` (time-integral base) or ``"paper"``
    (printed sinc-sum base).
    """
    _require_flux_free(params)
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"boson number must be a positive integer, got {n!r}")
    tau = _check_tau(tau)
    if variant == "derived":
        base = decay_rate_time_integral(params, tau)
    elif variant == "paper":
        base = decay_rate_paper_sinc(params, tau)
    else:
        raise ParameterError(f"unknown variant {variant!r}")
    cross = None if base.cross_check is None else n * base.cross_check
    return RateEstimate(n * base.value, base.method, tau, base.validity_notes + (f"fock n={n}",), cross)


@dataclass(frozen=True)
class RIntegral:
    """The measurement-window integral ``r`` and the printed real closed form."""

    value: complex
    closed_form: complex
    paper_closed_form: float
    tau: float


def r_closed_form(params: SystemParams, tau: float) -> complex:
    """Per-mode evaluation of ``int_0^tau (1 - t/tau) c e^{-i Delta t} dt``."""
    c = params.g ** 2 / params.sites
    x = detunings(params) * tau
    real = 0.5 * tau * sinc(x / 2.0) ** 2
    small = np.abs(x) < 1e-3
    safe = np.where(small, 1.0, x)
    # (x - sin x) / x**2, series for small x
    ratio = np.where(small, x / 6.0 - x ** 3 / 120.0, (safe - np.sin(safe)) / safe ** 2)
    imag = -tau * ratio
    return complex(c * np.sum(real + 1j * imag))


def r_integral(params: SystemParams, tau: float, epsabs: float | None = None) -> RIntegral:
    """``r = int_0^tau (1 - t/tau) e^{i omega_A t} Psi(-t) dt`` by adaptive quadrature.

    Also returns the per-mode closed form and the printed real closed form,
    which equals ``Re(r) / pi``.
    """
    _require_flux_free(params)
    tau = _check_tau(tau)
    c = params.g ** 2 / params.sites
    delta = detunings(params)
    if epsabs is None:
        epsabs = 1e-12 * max(params.g ** 2, 1e-300) * tau

    def integrand(t):
        return (1.0 - t / tau) * c * np.sum(np.exp(-1j * delta * t))

    if c == 0.0:
        value = 0j
    else:
        value, _ = integrate.quad(integrand, 0.0, tau, complex_func=True, epsabs=epsabs,
                                  epsrel=1e-12, limit=_quad_limit(params, tau))
    m = np.arange(params.sites)
    arg = (params.J * np.cos(m * np.pi / params.N) - params.omega_A / 2.0) * tau
    paper = params.g ** 2 * tau / (4.0 * math.pi * params.N) * float(np.sum(sinc(arg) ** 2))
    return RIntegral(complex(value), r_closed_form(params, tau), paper, tau)


def coherent_survival_paper(params: SystemParams, alpha: complex, t: float, tau: float,
                            cos_coefficient: float = 4.0) -> float:
    """Printed coherent-state survival at time ``t`` for measurement interval ``tau``.

    ``eta = Re(1 - r t)`` with the complex quadrature ``r``; pass
    ``cos_coefficient=2`` for the coefficient used in the rate expression.
    """
    params = _as_boson(params)
    tau = _check_tau(tau)
    a2 = abs(complex(alpha)) ** 2
    if a2 == 0.0:
        return 1.0
    r = r_integral(params, tau).value
    eta = (1.0 - r * t).real
    first = a2 * (eta ** 2 + 3.0 - cos_coefficient * math.cos(params.omega_A * tau) * eta)
    delta = detunings(params)
    # sin^2(delta t/2)/delta^2 -> t^2/4 on resonance
    spread = (t / 2.0) ** 2 * sinc(delta * t / 2.0) ** 2
    second = a2 * params.g ** 2 / params.N * float(np.sum(spread))
    return math.exp(-first - second)


def coherent_rate_paper(params: SystemParams, alpha: complex, tau: float,
                        cos_coefficient: float = 2.0, oracle: bool = True) -> RateEstimate:
    """Printed coherent-state rate ``(|a|^2/tau)[eta^2 + 3 - C cos(w tau) eta - pi r tau^2]``.

    ``C = 2`` as in the rate expression, ``C = 4`` matches the survival
    expression.  ``r`` enters through its real part and ``eta`` is taken at
    ``t = tau``.  With ``oracle`` the exact rate is attached as ``cross_check``.
    """
    params = _as_boson(params)
    tau = _check_tau(tau)
    a2 = abs(complex(alpha)) ** 2
    r = r_integral(params, tau).value
    eta = (1.0 - r * tau).real
    bracket = eta ** 2 + 3.0 - cos_coefficient * math.cos(params.omega_A * tau) * eta - math.pi * r.real * tau ** 2
    value = a2 / tau * bracket
    notes = (f"cos coefficient {cos_coefficient:g}", ETA_AT, "r complex: real part used")
    cross = coherent_rate_oracle(params, alpha, tau).value if oracle else None
    return RateEstimate(value, RateMethod.COHERENT_PAPER, tau, notes, cross)


def coherent_rate_oracle(params: SystemParams, alpha: complex, tau: float) -> RateEstimate:
    """Exact projective rate ``2|alpha|^2 (1 - Re s(tau)) / tau``."""
    params = _as_boson(params)
    result = coherent_survival_oracle(params, alpha, MeasurementSchedule(_check_tau(tau), 1))
    return RateEstimate(result.effective_rate, RateMethod.ORACLE, tau, ("exact projective overlap",))
