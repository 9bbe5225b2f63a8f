"""System parameters and single-excitation Hamiltonians.

A dot ``A`` with on-site energy ``omega_A`` is tunnel-coupled (strength ``g``)
to site 0 of a ring of ``2N`` sites with nearest-neighbour hopping ``J``.
A flux ``phi`` threads the ring and enters every bond ``j -> j+1`` as the
Peierls phase ``exp(i*pi*phi/N)``.  Units have hbar = 1.

Both Hamiltonians act on the ``2N + 1`` dimensional one-particle space.
Basis order is fixed: index 0 is the dot, indices ``1 .. 2N`` are either the
ring sites ``0 .. 2N-1`` (real space) or the Bloch modes ``k = 0 .. 2N-1``
(momentum space).  The two are related by

.. math:: a_j = (2N)^{-1/2} \\sum_k e^{i \\pi k j / N} a_k,

which diagonalises the ring block into the band
``eps_k = 2 J cos(pi (phi + k) / N)``.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "Statistics",
    "Basis",
    "SystemParams",
    "HamiltonianMatrix",
    "dispersion",
    "band",
    "build_real_space",
    "build_momentum_space",
]


class Statistics(str, enum.Enum):
    FERMION = "fermion"
    BOSON = "boson"


class Basis(str, enum.Enum):
    REAL_SPACE = "real_space"
    MOMENTUM_SPACE = "momentum_space"


@dataclass(frozen=True)
class SystemParams:
    """Physical controls of the dot + ring system.

    Parameters
    ----------
    N : int
        Half the number of ring sites; the ring has ``2N`` sites.
    J : float
        Ring hopping amplitude.
    g : float
        Dot-to-site-0 tunnel coupling, ``g >= 0``.
    omega_A : float
        On-site energy of the dot.
    phi : float
        Flux through the ring (dimensionless).
    statistics : Statistics
        Particle statistics.  Only the boson formulas look at it.
    """

    N: int
    J: float
    g: float
    omega_A: float = 0.0
    phi: float = 0.0
    statistics: Statistics = Statistics.FERMION

    def __post_init__(self):
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)):
            raise ParameterError(f"N must be an integer, got {self.N!r}")
        if self.N < 1:
            raise ParameterError(f"N must be >= 1, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("J", "g", "omega_A", "phi"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ParameterError(f"{name} must be a real number, got {value!r}") from None
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.g < 0:
            raise ParameterError(f"g must be >= 0, got {self.g}")
        try:
            object.__setattr__(self, "statistics", Statistics(self.statistics))
        except ValueError:
            raise ParameterError(f"unknown statistics {self.statistics!r}") from None

    @property
    def sites(self) -> int:
        return 2 * self.N

    @property
    def dimension(self) -> int:
        return 2 * self.N + 1

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "J": self.J,
            "g": self.g,
            "omega_A": self.omega_A,
            "phi": self.phi,
            "statistics": self.statistics.value,
        }


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Hermitian matrix on the ``[A, 1 .. 2N]`` basis, tagged by picture."""

    matrix: np.ndarray
    basis: Basis
    params: SystemParams

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def dispersion(params: SystemParams, k: int) -> float:
    """Bloch energy ``2 J cos(pi (phi + k) / N)`` of ring mode ``k``."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise ParameterError(f"mode index must be an integer, got {k!r}")
    if not 0 <= k < params.sites:
        raise ParameterError(f"mode index {k} outside [0, {params.sites})")
    return 2.0 * params.J * math.cos(math.pi * (params.phi + k) / params.N)


def band(params: SystemParams) -> np.ndarray:
    """All ``2N`` Bloch energies, ordered by mode index."""
    k = np.arange(params.sites)
    return 2.0 * params.J * np.cos(np.pi * (params.phi + k) / params.N)


def _frozen(matrix):
    matrix.setflags(write=False)
    return matrix


def build_real_space(params: SystemParams) -> HamiltonianMatrix:
    """Site-basis Hamiltonian with the Peierls phase on each ring bond."""
    n = params.sites
    h = np.zeros((n + 1, n + 1), dtype=complex)
    h[0, 0] = params.omega_A
    bond = params.J * np.exp(1j * np.pi * params.phi / params.N)
    for j in range(n):
        a, b = 1 + j, 1 + (j + 1) % n
        # accumulate: for N = 1 both bonds join the same pair of sites
        h[a, b] += bond
        h[b, a] += np.conj(bond)
    h[1, 0] += params.g
    h[0, 1] += params.g
    return HamiltonianMatrix(_frozen(h), Basis.REAL_SPACE, params)


def build_momentum_space(params: SystemParams) -> HamiltonianMatrix:
    """Bloch-mode Hamiltonian: diagonal band, uniform coupling ``g / sqrt(2N)``."""
    n = params.sites
    h = np.zeros((n + 1, n + 1), dtype=complex)
    h[0, 0] = params.omega_A
    h[np.arange(1, n + 1), np.arange(1, n + 1)] = band(params)
    coupling = params.g / math.sqrt(n)
    h[0, 1:] = coupling
    h[1:, 0] = coupling
    return HamiltonianMatrix(_frozen(h), Basis.MOMENTUM_SPACE, params)
