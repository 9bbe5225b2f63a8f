"""Exact one-particle evolution and repeated projective measurements.

Everything here goes through the full eigendecomposition of the
``(2N+1) x (2N+1)`` Hamiltonian, so evolution is exact at any time and the
amplitudes carry no integrator error.

Measurement model: after each interval ``tau`` the whole system is projected
onto its initial state and the surviving branch is renormalised back to that
state exactly.  With per-step survival ``q`` the survival after ``M``
measurements is therefore ``q**M``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, ParameterError
from .model import (
    Basis,
    HamiltonianMatrix,
    Statistics,
    SystemParams,
    build_momentum_space,
    build_real_space,
)

__all__ = [
    "Spectrum",
    "MeasurementSchedule",
    "SurvivalResult",
    "eigendecompose",
    "spectrum_of",
    "survival_amplitude",
    "propagator_column",
    "measured_survival",
    "fock_survival",
    "coherent_survival_oracle",
    "coherent_overlap_direct",
]

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dot_weights(self) -> np.ndarray:
        """``|<v_n|A>|**2`` for every eigenvector."""
        return np.abs(self.eigenvectors[0, :]) ** 2

    def amplitude(self, t):
        """Survival amplitude ``sum_n w_n exp(-i lambda_n t)``; ``t`` may be an array."""
        t = np.asarray(t, dtype=float)
        phases = np.exp(-1j * np.multiply.outer(t, self.eigenvalues))
        return phases @ self.dot_weights

    def column(self, t: float, index: int = 0) -> np.ndarray:
        """Column ``U(t) e_index`` of the propagator."""
        v = self.eigenvectors
        return v @ (np.exp(-1j * self.eigenvalues * t) * np.conj(v[index, :]))


def eigendecompose(hamiltonian) -> Spectrum:
    """Diagonalise a Hermitian matrix.

    Parameters
    ----------
    hamiltonian : HamiltonianMatrix or (d, d) array_like
        Must be Hermitian to ``1e-12`` relative to its largest entry.

    Returns
    -------
    Spectrum
        Eigenvalues in ascending order.  The arrays are read-only.
    """
    h = hamiltonian.matrix if isinstance(hamiltonian, HamiltonianMatrix) else np.asarray(hamiltonian)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if h.size and np.max(np.abs(h - h.conj().T)) > HERMITIAN_TOL * scale:
        raise ContractViolation("matrix is not Hermitian")
    values, vectors = np.linalg.eigh(h)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return Spectrum(values, vectors)


@functools.lru_cache(maxsize=64)
def spectrum_of(params: SystemParams, basis: Basis = Basis.REAL_SPACE) -> Spectrum:
    """Cached spectrum of the real- or momentum-space Hamiltonian."""
    build = build_real_space if Basis(basis) is Basis.REAL_SPACE else build_momentum_space
    return eigendecompose(build(params))


def survival_amplitude(params: SystemParams, t, basis: Basis = Basis.REAL_SPACE):
    """``<A| exp(-i H t) |A>`` for the particle prepared on the dot."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ParameterError("time must be >= 0")
    s = spectrum_of(params, basis).amplitude(t_arr)
    return complex(s) if np.ndim(s) == 0 else s


def propagator_column(params: SystemParams, t: float, basis: Basis = Basis.REAL_SPACE) -> np.ndarray:
    """Amplitudes ``<j| exp(-i H t) |A>`` over the whole basis."""
    if t < 0:
        raise ParameterError("time must be >= 0")
    return spectrum_of(params, basis).column(t)


@dataclass(frozen=True)
class MeasurementSchedule:
    """``M`` projective measurements separated by ``tau``."""

    tau: float
    M: int = 1

    def __post_init__(self):
        tau = float(self.tau)
        if not (math.isfinite(tau) and tau > 0):
            raise ParameterError(f"tau must be a positive finite time, got {self.tau!r}")
        if isinstance(self.M, bool) or not isinstance(self.M, (int, np.integer)) or self.M < 1:
            raise ParameterError(f"M must be a positive integer, got {self.M!r}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "M", int(self.M))

    @property
    def times(self) -> np.ndarray:
        return self.tau * np.arange(self.M + 1)


@dataclass(frozen=True)
class SurvivalResult:
    """Survival probability after each measurement.

    ``log_step`` is ``ln q``, the log of the single-interval survival; the
    series is ``p(n tau) = exp(n ln q)`` and ``effective_rate = -ln q / tau``.
    """

    times: np.ndarray
    probabilities: np.ndarray
    effective_rate: float
    log_step: float
    tau: float


def _series(log_step: float, schedule: MeasurementSchedule) -> SurvivalResult:
    log_step = min(float(log_step), 0.0)
    steps = np.arange(schedule.M + 1)
    probabilities = np.exp(steps * log_step)
    return SurvivalResult(
        times=schedule.times,
        probabilities=probabilities,
        effective_rate=0.0 - log_step / schedule.tau,
        log_step=log_step,
        tau=schedule.tau,
    )


def measured_survival(params: SystemParams, schedule: MeasurementSchedule) -> SurvivalResult:
    """Single particle on the dot, projected back every ``tau``."""
    s = survival_amplitude(params, schedule.tau)
    return _series(2.0 * math.log(abs(s)) if s != 0 else -math.inf, schedule)


def _require_boson(params):
    if params.statistics is not Statistics.BOSON:
        raise ParameterError("this preparation needs statistics='boson'")


def fock_survival(params: SystemParams, n: int, schedule: MeasurementSchedule) -> SurvivalResult:
    """``n`` bosons on the dot.

    The evolved state is ``(n!)^{-1/2} (sum_j U_jA b_j^dag)^n |0>``, whose
    overlap with ``|n_A>`` is ``s(tau)**n``; hence ``ln q = 2 n ln|s|``.
    """
    _require_boson(params)
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"boson number must be a positive integer, got {n!r}")
    s = survival_amplitude(params, schedule.tau)
    log_single = 2.0 * math.log(abs(s)) if s != 0 else -math.inf
    return _series(n * log_single, schedule)


def coherent_survival_oracle(params: SystemParams, alpha: complex, schedule: MeasurementSchedule) -> SurvivalResult:
    """Coherent amplitude ``alpha`` on the dot, array in vacuum.

    Number-conserving quadratic dynamics keeps the state coherent with mode
    amplitudes ``alpha * U[:, A]``.  Unitarity of the propagator then gives
    the projection probability ``q = exp(-2 |alpha|^2 (1 - Re s(tau)))``.
    """
    _require_boson(params)
    alpha = complex(alpha)
    s = survival_amplitude(params, schedule.tau)
    return _series(-2.0 * abs(alpha) ** 2 * (1.0 - s.real), schedule)


def coherent_overlap_direct(params: SystemParams, alpha: complex, t: float) -> complex:
    """Multimode overlap ``<alpha_A, 0 | exp(-iHt) | alpha_A, 0>`` mode by mode.

    Uses the single-mode formula
    ``<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)`` on every basis mode with
    the evolved amplitudes, without invoking unitarity.
    """
    alpha = complex(alpha)
    beta = alpha * propagator_column(params, t)
    initial = np.zeros_like(beta)
    initial[0] = alpha
    exponent = -0.5 * np.abs(initial) ** 2 - 0.5 * np.abs(beta) ** 2 + np.conj(initial) * beta
    return complex(np.exp(np.sum(exponent)))
