"""Measurement-modified tunneling from a dot into a flux-threaded ring."""
from .errors import ContractViolation, NumericalFailure, OutOfBandError, ParameterError
from .model import Basis, Statistics, SystemParams, band, build_momentum_space, build_real_space, dispersion
from .dynamics import MeasurementSchedule, eigendecompose, measured_survival, survival_amplitude
from .rates import (
    RateEstimate,
    RateMethod,
    decay_rate_paper_sinc,
    decay_rate_time_integral,
    golden_rule_broadened,
    golden_rule_continuum,
    wigner_weisskopf_pole,
)
from .zeno import Axis, ControlPoint, ZenoClass, classify, phase_map

__version__ = "0.1.0"
