"""Second-order decay rates of the dot under repeated measurement.

With all mode detunings ``Delta_k = eps_k - omega_A`` and per-mode weight
``c = g**2 / (2N)``, a measurement every ``tau`` leaves the dot with the rate

.. math:: R(\\tau) = 2\\,\\mathrm{Re}\\int_0^\\tau (1 - t/\\tau)\\, K(t)\\, dt,
          \\qquad K(t) = c \\sum_k e^{-i \\Delta_k t}

which integrates mode by mode to ``sum_k c tau sinc(Delta_k tau / 2)**2``
with ``sinc(x) = sin(x)/x``.  Besides this derived rate the module keeps the
printed closed form (a different overall prefactor), Lorentzian-broadened and
continuum golden rules, and the Wigner-Weisskopf pole.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericalFailure, OutOfBandError, ParameterError
from .model import SystemParams, band

__all__ = [
    "RateMethod",
    "RateEstimate",
    "sinc",
    "detunings",
    "memory_function",
    "tau_kernel",
    "time_integral_closed_form",
    "time_integral_quadrature",
    "decay_rate_time_integral",
    "decay_rate_derived_sinc",
    "decay_rate_paper_sinc",
    "default_broadening",
    "golden_rule_broadened",
    "golden_rule_continuum",
    "ww_broadening",
    "ww_function",
    "wigner_weisskopf_pole",
    "resonance_check",
    "flux_variation_bound",
]

QUADRATURE_REL_TOL = 1e-8


class RateMethod(str, enum.Enum):
    TIME_INTEGRAL = "time_integral"
    PAPER_SINC = "paper_sinc"
    DERIVED_SINC = "derived_sinc"
    GOLDEN_RULE_BROADENED = "golden_rule_broadened"
    GOLDEN_RULE_CONTINUUM = "golden_rule_continuum"
    WIGNER_WEISSKOPF = "wigner_weisskopf"
    COHERENT_PAPER = "coherent_paper"
    ORACLE = "oracle"


@dataclass(frozen=True)
class RateEstimate:
    """A decay rate and how it was obtained.

    ``cross_check`` holds an independent evaluation when the method has one
    (the quadrature for ``time_integral``); ``pole`` is set only by the
    Wigner-Weisskopf solver.
    """

    value: float
    method: RateMethod
    tau: float | None = None
    validity_notes: tuple[str, ...] = ()
    cross_check: float | None = None
    pole: complex | None = None


def sinc(x):
    """Unnormalised sinc, ``sin(x)/x`` with ``sinc(0) = 1``."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def detunings(params: SystemParams) -> np.ndarray:
    return band(params) - params.omega_A


def _check_tau(tau):
    if not (isinstance(tau, (int, float, np.floating, np.integer)) and math.isfinite(tau) and tau > 0):
        raise ParameterError(f"tau must be a positive finite time, got {tau!r}")
    return float(tau)


def memory_function(params: SystemParams, t):
    """Bath correlation ``(g^2/2N) sum_k exp(i eps_k t)``; ``t`` may be an array."""
    t = np.asarray(t, dtype=float)
    c = params.g ** 2 / params.sites
    result = c * np.exp(1j * np.multiply.outer(t, band(params))).sum(axis=-1)
    return complex(result) if result.ndim == 0 else result


def tau_kernel(params: SystemParams, t):
    """Rotating-frame kernel ``e^{i omega_A t} Phi(-t) = c sum_k e^{-i Delta_k t}``."""
    t = np.asarray(t, dtype=float)
    c = params.g ** 2 / params.sites
    result = c * np.exp(-1j * np.multiply.outer(t, detunings(params))).sum(axis=-1)
    return complex(result) if result.ndim == 0 else result


def time_integral_closed_form(params: SystemParams, tau: float) -> float:
    c = params.g ** 2 / params.sites
    return float(np.sum(c * tau * sinc(detunings(params) * tau / 2.0) ** 2))


def _quad_limit(params, tau):
    spread = float(np.max(np.abs(detunings(params)))) if params.sites else 0.0
    return 100 + int(10 * spread * tau / (2 * math.pi))


def time_integral_quadrature(params: SystemParams, tau: float, epsabs: float | None = None) -> float:
    """Adaptive quadrature of ``2 Re int_0^tau (1 - t/tau) K(t) dt``."""
    delta = detunings(params)
    c = params.g ** 2 / params.sites
    if c == 0.0:
        return 0.0
    if epsabs is None:
        epsabs = 1e-10 * params.g ** 2 * tau

    def integrand(t):
        return 2.0 * (1.0 - t / tau) * c * np.sum(np.cos(delta * t))

    value, _ = integrate.quad(integrand, 0.0, tau, epsabs=epsabs, epsrel=1e-12,
                              limit=_quad_limit(params, tau))
    return float(value)


def _perturbative_note(params):
    if params.J != 0 and params.g <= 0.1 * abs(params.J):
        return ("perturbative regime g<<J",)
    return ()


def decay_rate_time_integral(params: SystemParams, tau: float) -> RateEstimate:
    """Derived measurement-modified rate, closed form checked by quadrature."""
    tau = _check_tau(tau)
    closed = time_integral_closed_form(params, tau)
    quad = time_integral_quadrature(params, tau)
    notes = list(_perturbative_note(params))
    scale = max(abs(closed), abs(quad))
    if scale > 1e-14 and abs(closed - quad) > QUADRATURE_REL_TOL * scale:
        notes.append("quadrature-mismatch")
    return RateEstimate(closed, RateMethod.TIME_INTEGRAL, tau, tuple(notes), cross_check=quad)


def decay_rate_derived_sinc(params: SystemParams, tau: float) -> RateEstimate:
    """The same derived rate from the per-mode closed form alone (no quadrature)."""
    tau = _check_tau(tau)
    return RateEstimate(time_integral_closed_form(params, tau), RateMethod.DERIVED_SINC, tau,
                        _perturbative_note(params))


def decay_rate_paper_sinc(params: SystemParams, tau: float) -> RateEstimate:
    """Printed closed form, prefactor ``g^2 tau / (4 pi N)``.

    Differs from :func:`decay_rate_time_integral` by exactly ``1/(2 pi)``.
    """
    tau = _check_tau(tau)
    m = np.arange(params.sites)
    arg = (params.J * np.cos((params.phi + m) * np.pi / params.N) - params.omega_A / 2.0) * tau
    value = params.g ** 2 * tau / (4.0 * math.pi * params.N) * float(np.sum(sinc(arg) ** 2))
    return RateEstimate(value, RateMethod.PAPER_SINC, tau, _perturbative_note(params))


def default_broadening(params: SystemParams) -> float:
    """Half the mean level spacing: bandwidth ``4|J|`` over ``4N``."""
    return abs(params.J) / params.N


def _off_band(params):
    return abs(params.omega_A) > 2.0 * abs(params.J)


def resonance_check(params: SystemParams, tol: float) -> list[int]:
    """Mode indices ``m`` with ``|2J cos((phi+m) pi/N) - omega_A| <= tol``."""
    if not (math.isfinite(tol) and tol > 0):
        raise ParameterError(f"tol must be positive, got {tol!r}")
    return [int(m) for m in np.flatnonzero(np.abs(detunings(params)) <= tol)]


def golden_rule_broadened(params: SystemParams, eta: float | None = None) -> RateEstimate:
    """Printed golden rule with each delta replaced by a Lorentzian of half-width ``eta``."""
    if eta is None:
        eta = default_broadening(params)
    if not (math.isfinite(eta) and eta > 0):
        raise ParameterError(f"broadening must be positive, got {eta!r}")
    lorentz = (eta / math.pi) / (detunings(params) ** 2 + eta ** 2)
    value = params.g ** 2 / (4.0 * params.N) * float(np.sum(lorentz))
    notes = [f"eta={eta!r}"]
    if _off_band(params):
        notes.append("off-band")
    if resonance_check(params, eta):
        notes.append("resonant")
    notes.extend(_perturbative_note(params))
    return RateEstimate(value, RateMethod.GOLDEN_RULE_BROADENED, None, tuple(notes))


def golden_rule_continuum(J: float, g: float, omega_A: float) -> RateEstimate:
    """Infinite-ring golden rule ``2 g^2 / sqrt(4 J^2 - omega_A^2)``.

    Coupling ``g/sqrt(2N)`` to every mode and the Bloch density of states
    ``(2N/2pi) * 2/sqrt(4J^2 - w^2)`` make the ``N`` dependence cancel.
    """
    if J == 0 or abs(omega_A) >= 2.0 * abs(J):
        raise OutOfBandError(f"omega_A={omega_A} outside the open band (-{2 * abs(J)}, {2 * abs(J)})")
    if g < 0:
        raise ParameterError(f"g must be >= 0, got {g}")
    value = 2.0 * g ** 2 / math.sqrt(4.0 * J ** 2 - omega_A ** 2)
    return RateEstimate(value, RateMethod.GOLDEN_RULE_CONTINUUM, None, ("continuum limit",))


def ww_broadening(params: SystemParams) -> float:
    """Default retarded broadening for the pole search.

    Twice the local level spacing at ``omega_A`` inside the band (enough to
    smooth the discrete spectrum into its density of states), the golden-rule
    default outside it.
    """
    if _off_band(params) or params.J == 0:
        return default_broadening(params)
    return math.pi * math.sqrt(4.0 * params.J ** 2 - params.omega_A ** 2) / params.N


def ww_function(params: SystemParams, s, eta: float = 0.0):
    """``f(s) = s + sum_k c / (s + eta + i Delta_k)`` and its derivative."""
    c = params.g ** 2 / params.sites
    denom = s + eta + 1j * detunings(params)
    return s + np.sum(c / denom), 1.0 - np.sum(c / denom ** 2)


def _newton(params, s, eta, tol, max_iter):
    value, slope = ww_function(params, s, eta)
    for _ in range(max_iter):
        if abs(value) <= tol:
            return s, abs(value)
        if slope == 0 or not np.isfinite(slope):
            break
        step = -value / slope
        for _ in range(60):
            trial_value, trial_slope = ww_function(params, s + step, eta)
            if np.isfinite(trial_value) and abs(trial_value) <= abs(value):
                break
            step *= 0.5
        s, value, slope = s + step, trial_value, trial_slope
    if abs(value) <= tol:
        return s, abs(value)
    return None, abs(value)


def _dominant_pole(params, eta):
    # zeros of f are the eigenvalues of the damped rotating-frame generator
    n = params.sites
    coupling = -1j * params.g / math.sqrt(n)
    gen = np.zeros((n + 1, n + 1), dtype=complex)
    gen[0, 1:] = coupling
    gen[1:, 0] = coupling
    gen[np.arange(1, n + 1), np.arange(1, n + 1)] = -1j * detunings(params) - eta
    roots = np.linalg.eigvals(gen)
    with np.errstate(divide="ignore", invalid="ignore"):
        residues = np.array([abs(1.0 / ww_function(params, r, eta)[1]) for r in roots])
    residues[~np.isfinite(residues)] = 0.0
    order = np.lexsort((roots.imag, np.abs(roots), -np.round(residues, 12)))
    return complex(roots[order[0]])


def wigner_weisskopf_pole(params: SystemParams, eta: float | None = None,
                          max_iter: int = 200) -> RateEstimate:
    """Decaying zero of the Laplace-domain denominator of the dot amplitude.

    Damped Newton iteration starts from ``-R_guess`` (broadened golden rule in
    band, ``g^2`` off band).  If it fails, the dominant eigenvalue of the
    damped generator seeds a second Newton run.  The estimate's ``pole``
    carries the root and its value is ``-2 Re(pole)``.
    """
    if params.g <= 0:
        raise ParameterError("the pole search needs g > 0")
    if eta is None:
        eta = ww_broadening(params)
    if not (math.isfinite(eta) and eta >= 0):
        raise ParameterError(f"broadening must be >= 0, got {eta!r}")
    tol = 1e-10 * params.g ** 2
    if eta > 0 and not _off_band(params):
        guess = golden_rule_broadened(params, eta).value
    else:
        guess = params.g ** 2
    notes = [f"eta={eta!r}"]
    with np.errstate(divide="ignore", invalid="ignore"):
        root, residual = _newton(params, complex(-guess), eta, tol, max_iter)
        if root is None:
            notes.append("newton-reseeded")
            root, residual = _newton(params, _dominant_pole(params, eta), eta, tol, max_iter)
    if root is None:
        raise NumericalFailure("Wigner-Weisskopf pole search did not converge", residual)
    if _off_band(params):
        notes.append("off-band")
    notes.extend(_perturbative_note(params))
    return RateEstimate(float(-2.0 * root.real), RateMethod.WIGNER_WEISSKOPF, None, tuple(notes), pole=complex(root))


def flux_variation_bound(params: SystemParams, tau: float) -> float:
    """Bound on ``(max_phi R - min_phi R) / min_phi R`` for the derived rate.

    The rate samples ``F(x) = tau sinc^2((2J cos x - omega_A) tau/2)`` at the
    ``2N`` angles ``pi (phi + k)/N``, so only the Fourier harmonics of ``F``
    at multiples of ``2N`` survive the sum, each as ``e^{2 pi i l phi}``.
    With ``S`` the summed magnitude of those harmonics and ``F_0`` the mean,
    ``R`` moves by at most ``2S`` around a floor of ``F_0 - S``.
    """
    tau = _check_tau(tau)
    stride = params.sites
    needed = 8 * (2.0 * abs(params.J) * tau + 4 * stride) + 64
    samples = 1 << max(12, int(math.ceil(math.log2(needed))))
    x = 2.0 * math.pi * np.arange(samples) / samples
    f = tau * sinc((2.0 * params.J * np.cos(x) - params.omega_A) * tau / 2.0) ** 2
    coeff = np.fft.rfft(f) / samples
    mean = coeff[0].real
    aliased = 2.0 * float(np.sum(np.abs(coeff[stride::stride])))
    if aliased >= mean:
        return math.inf
    return 2.0 * aliased / (mean - aliased)
