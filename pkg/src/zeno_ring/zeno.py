"""Zeno / anti-Zeno classification and two-axis phase maps.

A point is Zeno when the measurement-modified rate grows with the
measurement interval (``dR/dtau > eps``: measuring more often slows the
decay) and anti-Zeno when it shrinks (``dR/dtau < -eps``).  The classifier
is pointwise, so it can alternate inside a ridge that is only roughly
descending.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import boson, dynamics, rates
from .errors import ParameterError
from .model import Statistics, SystemParams

__all__ = [
    "ZenoClass",
    "AxisName",
    "Axis",
    "ControlPoint",
    "PhaseMap",
    "RATE_METHODS",
    "rate_value",
    "rate_derivative",
    "classify",
    "phase_map",
    "flux_symmetry",
    "thread_count",
]

THREADS_ENV = "ZENO_RING_THREADS"


class ZenoClass(str, enum.Enum):
    ZENO = "zeno"
    ANTI_ZENO = "anti_zeno"
    FLAT = "flat"


class AxisName(str, enum.Enum):
    TAU = "tau"
    PHI = "phi"
    OMEGA_A = "omega_A"
    N = "n"
    ALPHA_MAG = "alpha_mag"


@dataclass(frozen=True)
class ControlPoint:
    """Everything a rate method may look at: system, interval, preparation."""

    params: SystemParams
    tau: float
    n: int = 1
    alpha: complex = 0.1

    def with_axis(self, axis: "AxisName", value) -> "ControlPoint":
        if axis is AxisName.TAU:
            return ControlPoint(self.params, float(value), self.n, self.alpha)
        if axis is AxisName.PHI:
            return ControlPoint(self.params.replace(phi=float(value)), self.tau, self.n, self.alpha)
        if axis is AxisName.OMEGA_A:
            return ControlPoint(self.params.replace(omega_A=float(value)), self.tau, self.n, self.alpha)
        if axis is AxisName.N:
            return ControlPoint(self.params, self.tau, int(value), self.alpha)
        phase = self.alpha / abs(self.alpha) if self.alpha != 0 else 1.0
        return ControlPoint(self.params, self.tau, self.n, complex(float(value) * phase))


def _boson(params):
    return params.replace(statistics=Statistics.BOSON)


def _oracle(point):
    schedule = dynamics.MeasurementSchedule(point.tau, 1)
    return dynamics.measured_survival(point.params, schedule).effective_rate


# every entry maps a ControlPoint to a rate; grid evaluation never runs the
# quadrature cross-check (time_integral's value is the closed form anyway)
RATE_METHODS = {
    "time_integral": lambda p: rates.time_integral_closed_form(p.params, p.tau),
    "paper_sinc": lambda p: rates.decay_rate_paper_sinc(p.params, p.tau).value,
    "golden_rule_broadened": lambda p: rates.golden_rule_broadened(p.params).value,
    "wigner_weisskopf": lambda p: rates.wigner_weisskopf_pole(p.params).value,
    "oracle": _oracle,
    "fock_time_integral": lambda p: p.n * rates.time_integral_closed_form(p.params, p.tau),
    "fock_paper_sinc": lambda p: p.n * rates.decay_rate_paper_sinc(p.params, p.tau).value,
    "fock_oracle": lambda p: dynamics.fock_survival(
        _boson(p.params), p.n, dynamics.MeasurementSchedule(p.tau, 1)).effective_rate,
    "coherent_paper_2cos": lambda p: boson.coherent_rate_paper(p.params, p.alpha, p.tau, 2.0, oracle=False).value,
    "coherent_paper_4cos": lambda p: boson.coherent_rate_paper(p.params, p.alpha, p.tau, 4.0, oracle=False).value,
    "coherent_oracle": lambda p: boson.coherent_rate_oracle(p.params, p.alpha, p.tau).value,
}


def _method(name):
    try:
        return RATE_METHODS[name]
    except KeyError:
        raise ParameterError(f"unknown rate method {name!r}; choose from {sorted(RATE_METHODS)}") from None


def rate_value(point: ControlPoint, method: str = "time_integral") -> float:
    return float(_method(method)(point))


def _point(params, tau, n, alpha):
    return ControlPoint(params, float(tau), n, alpha)


def rate_derivative(params: SystemParams, tau: float, h: float | None = None,
                    method: str = "time_integral", n: int = 1, alpha: complex = 0.1) -> float:
    """Central difference ``(R(tau+h) - R(tau-h)) / 2h``; ``h`` defaults to ``tau/100``."""
    if h is None:
        h = tau / 100.0
    if not (math.isfinite(h) and h > 0 and tau - h > 0):
        raise ParameterError(f"need 0 < h < tau, got h={h!r}, tau={tau!r}")
    f = _method(method)
    up = f(_point(params, tau + h, n, alpha))
    down = f(_point(params, tau - h, n, alpha))
    return float((up - down) / (2.0 * h))


# methods that are a fixed positive multiple of the derived rate get the
# same multiple on the default threshold, so swapping them never moves a class
_THRESHOLD_SCALE = {"paper_sinc": 1.0 / (2.0 * math.pi), "fock_paper_sinc": 1.0 / (2.0 * math.pi)}


def _threshold(params, eps, method="time_integral"):
    if eps is not None:
        return eps
    return 1e-6 * params.g ** 2 * _THRESHOLD_SCALE.get(method, 1.0)


def _label(derivative, eps):
    if derivative > eps:
        return ZenoClass.ZENO
    if derivative < -eps:
        return ZenoClass.ANTI_ZENO
    return ZenoClass.FLAT


def classify(params: SystemParams, tau: float, h: float | None = None, eps: float | None = None,
             method: str = "time_integral", n: int = 1, alpha: complex = 0.1) -> ZenoClass:
    """Zeno if ``dR/dtau > eps``, anti-Zeno if ``< -eps``, flat otherwise.

    ``eps`` defaults to ``1e-6 g^2`` in units of the derived rate.
    """
    return _label(rate_derivative(params, tau, h, method, n, alpha), _threshold(params, eps, method))


@dataclass(frozen=True)
class Axis:
    name: AxisName
    min: float
    max: float
    steps: int

    def __post_init__(self):
        try:
            object.__setattr__(self, "name", AxisName(self.name))
        except ValueError:
            raise ParameterError(f"unknown axis {self.name!r}") from None
        if isinstance(self.steps, bool) or not isinstance(self.steps, (int, np.integer)) or self.steps < 1:
            raise ParameterError(f"axis {self.name.value}: steps must be a positive integer")
        try:
            lo, hi = float(self.min), float(self.max)
        except (TypeError, ValueError):
            raise ParameterError(f"axis {self.name.value}: bounds must be numbers") from None
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ParameterError(f"axis {self.name.value}: bounds must be finite")
        if self.steps > 1 and not hi > lo:
            raise ParameterError(f"axis {self.name.value}: degenerate range [{lo}, {hi}]")
        if self.steps == 1 and hi != lo:
            raise ParameterError(f"axis {self.name.value}: a single step needs min == max")
        if self.name is AxisName.TAU and lo <= 0:
            raise ParameterError("tau axis must be strictly positive")
        if self.name is AxisName.N and (lo < 1 or lo != int(lo) or hi != int(hi)):
            raise ParameterError("n axis needs integer bounds >= 1")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.min])
        grid = np.linspace(self.min, self.max, self.steps)
        if self.name is AxisName.N:
            grid = np.round(grid)
        return grid

    def to_dict(self) -> dict:
        return {"axis": self.name.value, "min": self.min, "max": self.max, "steps": self.steps}


@dataclass(frozen=True)
class PhaseMap:
    """Rates and classes on a rectangular grid; ``values[i, j]`` sits at ``(x_i, y_j)``."""

    axis_x: Axis
    axis_y: Axis
    rate_method: str
    values: np.ndarray
    classes: np.ndarray
    base: ControlPoint
    extras: dict = field(default_factory=dict)

    def rows(self):
        """Long-form cells in row-major order (x outer, y inner)."""
        xs, ys = self.axis_x.values, self.axis_y.values
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                yield i, j, float(x), float(y)


def thread_count(threads: int | None = None) -> int:
    """Worker count: explicit argument, else ``ZENO_RING_THREADS``, else up to 4."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None:
            return max(1, min(4, os.cpu_count() or 1))
        try:
            threads = int(raw)
        except ValueError:
            raise ParameterError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise ParameterError(f"thread count must be >= 1, got {threads}")
    return threads


def phase_map(base: ControlPoint, axis_x: Axis, axis_y: Axis, rate_method: str = "time_integral",
              eps: float | None = None, h_fraction: float = 0.01, extra_methods=(),
              threads: int | None = None) -> PhaseMap:
    """Evaluate rates and Zeno classes over an ``(x, y)`` grid.

    Each cell is independent and the results are placed by index, so the
    output does not depend on how many workers run.
    """
    if axis_x.name is axis_y.name:
        raise ParameterError("the two axes must differ")
    f = _method(rate_method)
    extra = {name: _method(name) for name in extra_methods}
    threshold = _threshold(base.params, eps, rate_method)
    xs, ys = axis_x.values, axis_y.values

    def cell(index):
        i, j = divmod(index, len(ys))
        point = base.with_axis(axis_x.name, xs[i]).with_axis(axis_y.name, ys[j])
        value = float(f(point))
        h = h_fraction * point.tau
        up = f(ControlPoint(point.params, point.tau + h, point.n, point.alpha))
        down = f(ControlPoint(point.params, point.tau - h, point.n, point.alpha))
        label = _label((up - down) / (2.0 * h), threshold)
        return value, label, tuple(float(g(point)) for g in extra.values())

    count = len(xs) * len(ys)
    workers = thread_count(threads)
    if workers == 1:
        results = [cell(k) for k in range(count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(cell, range(count)))

    values = np.array([r[0] for r in results]).reshape(len(xs), len(ys))
    classes = np.array([r[1].value for r in results], dtype=object).reshape(len(xs), len(ys))
    extras = {
        name: np.array([r[2][k] for r in results]).reshape(len(xs), len(ys))
        for k, name in enumerate(extra)
    }
    return PhaseMap(axis_x, axis_y, rate_method, values, classes, base, extras)


def flux_symmetry(pm: PhaseMap) -> dict | None:
    """Largest cell-wise change of the rate under ``phi -> phi + 1`` and ``phi -> -phi``.

    ``None`` when neither axis is the flux.
    """
    if AxisName.PHI not in (pm.axis_x.name, pm.axis_y.name):
        return None
    f = _method(pm.rate_method)
    shift = reflect = 0.0
    for i, j, x, y in pm.rows():
        point = pm.base.with_axis(pm.axis_x.name, x).with_axis(pm.axis_y.name, y)
        phi = point.params.phi
        value = pm.values[i, j]
        shifted = f(ControlPoint(point.params.replace(phi=phi + 1.0), point.tau, point.n, point.alpha))
        mirrored = f(ControlPoint(point.params.replace(phi=-phi), point.tau, point.n, point.alpha))
        shift = max(shift, abs(shifted - value))
        reflect = max(reflect, abs(mirrored - value))
    return {"period_1_max_abs_dev": shift, "reflection_max_abs_dev": reflect}
