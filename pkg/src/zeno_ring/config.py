"""Run configuration: one JSON document, overridden by command-line flags.

Precedence is flags > config file > defaults.  Unknown keys are rejected and
every module precondition is checked before anything runs.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass

from .dynamics import MeasurementSchedule
from .errors import ParameterError
from .model import Statistics, SystemParams
from .zeno import RATE_METHODS, Axis, ControlPoint

CLI_METHODS = (
    "time_integral",
    "paper_sinc",
    "derived_sinc",
    "golden_rule_broadened",
    "golden_rule_continuum",
    "wigner_weisskopf",
    "oracle",
    "fock_time_integral",
    "fock_paper_sinc",
    "fock_oracle",
    "coherent_paper_2cos",
    "coherent_paper_4cos",
    "coherent_oracle",
)

DEFAULTS = {
    "system": {"N": 20, "J": 5.0, "g": 1.0, "omega_A": 0.0, "phi": 0.6, "statistics": None},
    "schedule": {"tau": 2.0, "M": 50},
    "preparation": {"kind": "fermion", "n": 1, "re": 0.1, "im": 0.0},
    "sweep": None,
    "methods": ["time_integral", "paper_sinc"],
    "taus": None,
    "output": {"path": None, "format": "csv"},
}

SWEEP_DEFAULTS = {"x": None, "y": None, "rate_method": "time_integral", "eps": None, "extra_methods": []}

SCHEMA_DOC = """\
config JSON (all sections optional):
  system:      {N: int, J, g, omega_A, phi: float, statistics: fermion|boson}
  schedule:    {tau: float > 0, M: int >= 1}
  preparation: {kind: fermion|fock|coherent, n: int (fock), re, im: float (coherent)}
  sweep:       {x: AXIS, y: AXIS, rate_method: str, eps: float, extra_methods: [str]}
               AXIS = {axis: tau|phi|omega_A|n|alpha_mag, min, max, steps}
  methods:     [str]  rate methods for the `rate` command
  taus:        [float]  intervals for the `rate` command (default: schedule.tau)
  output:      {path: str, format: csv|json}
"""


def _merge(base, update, where):
    for key, value in update.items():
        if key not in base:
            raise ParameterError(f"unknown config key {where}{key!r}")
        if isinstance(base[key], dict) and isinstance(value, dict):
            _merge(base[key], value, f"{where}{key}.")
        elif key == "sweep" and value is not None:
            if not isinstance(value, dict):
                raise ParameterError("sweep must be an object")
            sweep = copy.deepcopy(SWEEP_DEFAULTS)
            _merge(sweep, value, "sweep.")
            base[key] = sweep
        else:
            base[key] = value


def load_document(text: str | None) -> dict:
    """Parse and merge a JSON config over the defaults."""
    resolved = copy.deepcopy(DEFAULTS)
    if text:
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"config is not valid JSON: {exc}") from None
        if not isinstance(document, dict):
            raise ParameterError("config must be a JSON object")
        _merge(resolved, document, "")
    return resolved


def parse_axis(text: str) -> dict:
    """``name:min:max:steps`` -> axis dict."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ParameterError(f"axis must look like name:min:max:steps, got {text!r}")
    name, lo, hi, steps = parts
    try:
        return {"axis": name, "min": float(lo), "max": float(hi), "steps": int(steps)}
    except ValueError:
        raise ParameterError(f"bad axis numbers in {text!r}") from None


def apply_overrides(resolved: dict, args) -> dict:
    """Copy any flag the user actually passed into the resolved config."""
    system = resolved["system"]
    for flag, key in (("N", "N"), ("J", "J"), ("g", "g"), ("omega_A", "omega_A"), ("phi", "phi"),
                      ("statistics", "statistics")):
        value = getattr(args, flag, None)
        if value is not None:
            system[key] = value
    for flag in ("tau", "M"):
        value = getattr(args, flag, None)
        if value is not None:
            resolved["schedule"][flag] = value
    prep = resolved["preparation"]
    for flag, key in (("prep", "kind"), ("n", "n"), ("alpha_re", "re"), ("alpha_im", "im")):
        value = getattr(args, flag, None)
        if value is not None:
            prep[key] = value
    if getattr(args, "methods", None):
        resolved["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    if getattr(args, "taus", None):
        try:
            resolved["taus"] = [float(t) for t in args.taus.split(",") if t.strip()]
        except ValueError:
            raise ParameterError(f"bad --taus list {args.taus!r}") from None
    if getattr(args, "x", None) or getattr(args, "y", None) or getattr(args, "rate_method", None):
        sweep = resolved["sweep"] or copy.deepcopy(SWEEP_DEFAULTS)
        if getattr(args, "x", None):
            sweep["x"] = parse_axis(args.x)
        if getattr(args, "y", None):
            sweep["y"] = parse_axis(args.y)
        if getattr(args, "rate_method", None):
            sweep["rate_method"] = args.rate_method
        resolved["sweep"] = sweep
    if getattr(args, "eps", None) is not None:
        sweep = resolved["sweep"] or copy.deepcopy(SWEEP_DEFAULTS)
        sweep["eps"] = args.eps
        resolved["sweep"] = sweep
    if getattr(args, "output", None):
        resolved["output"]["path"] = args.output
    if getattr(args, "format", None):
        resolved["output"]["format"] = args.format
    return resolved


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration plus the resolved document it came from."""

    params: SystemParams
    schedule: MeasurementSchedule
    preparation: str
    n: int
    alpha: complex
    methods: tuple
    taus: tuple
    sweep: dict | None
    output_path: str | None
    output_format: str
    document: dict

    @property
    def point(self) -> ControlPoint:
        return ControlPoint(self.params, self.schedule.tau, self.n, self.alpha)


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"{name} must be a number, got {value!r}")
    return value


def validate(resolved: dict) -> RunConfig:
    system = dict(resolved["system"])
    prep = resolved["preparation"]
    kind = prep["kind"]
    if kind not in ("fermion", "fock", "coherent"):
        raise ParameterError(f"preparation.kind must be fermion, fock or coherent; got {kind!r}")
    implied = Statistics.FERMION if kind == "fermion" else Statistics.BOSON
    if system["statistics"] is None:
        system["statistics"] = implied.value
    elif kind != "fermion" and system["statistics"] != Statistics.BOSON.value:
        raise ParameterError(f"a {kind} preparation needs statistics 'boson'")
    for name in ("J", "g", "omega_A", "phi"):
        _number(system[name], f"system.{name}")
    params = SystemParams(**system)
    schedule = MeasurementSchedule(_number(resolved["schedule"]["tau"], "schedule.tau"), resolved["schedule"]["M"])
    n = prep["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParameterError(f"preparation.n must be a positive integer, got {n!r}")
    alpha = complex(_number(prep["re"], "preparation.re"), _number(prep["im"], "preparation.im"))
    if kind != "fermion" and params.phi != 0.0:
        raise ParameterError("boson preparations need phi = 0")

    methods = resolved["methods"]
    if not isinstance(methods, list) or not methods:
        raise ParameterError("methods must be a non-empty list")
    for m in methods:
        if m not in CLI_METHODS:
            raise ParameterError(f"unknown method {m!r}; choose from {', '.join(CLI_METHODS)}")
    taus = resolved["taus"]
    if taus is None:
        taus = [schedule.tau]
    if not isinstance(taus, list) or not taus:
        raise ParameterError("taus must be a non-empty list")
    taus = tuple(MeasurementSchedule(_number(t, "taus[]"), 1).tau for t in taus)

    sweep = resolved["sweep"]
    if sweep is not None:
        for key in ("x", "y"):
            if not isinstance(sweep[key], dict):
                raise ParameterError(f"sweep.{key} must be an axis object")
            extra = set(sweep[key]) - {"axis", "min", "max", "steps"}
            if extra:
                raise ParameterError(f"unknown keys in sweep.{key}: {sorted(extra)}")
            Axis(sweep[key].get("axis"), sweep[key].get("min"), sweep[key].get("max"), sweep[key].get("steps"))
        for m in [sweep["rate_method"], *sweep["extra_methods"]]:
            if m not in RATE_METHODS:
                raise ParameterError(f"unknown sweep method {m!r}; choose from {', '.join(sorted(RATE_METHODS))}")
        if sweep["eps"] is not None:
            _number(sweep["eps"], "sweep.eps")

    output = resolved["output"]
    if output["format"] not in ("csv", "json"):
        raise ParameterError(f"output.format must be csv or json, got {output['format']!r}")

    document = copy.deepcopy(resolved)
    document["system"] = params.to_dict()
    return RunConfig(params, schedule, kind, n, alpha, tuple(methods), taus, sweep,
                     output["path"], output["format"], document)
