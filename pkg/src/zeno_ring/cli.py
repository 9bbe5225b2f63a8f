"""``zeno-ring`` command-line front end."""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import boson, dynamics, rates, verify
from .config import CLI_METHODS, SCHEMA_DOC, apply_overrides, load_document, validate
from .errors import ContractViolation, NumericalFailure, OutOfBandError, ParameterError
from .figures import PRESETS, render_phase_map, render_preset
from .model import HamiltonianMatrix, build_real_space
from .output import csv_text, json_text, table_json
from .zeno import Axis, phase_map, thread_count

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3

EPILOG = f"""\
precedence: command-line flags > --config file > built-in defaults.
every output file records the fully resolved configuration.
parallel grid evaluation is capped by ZENO_RING_THREADS (default: up to 4).

{SCHEMA_DOC}
exit codes: 0 success, 1 validation error, 2 I/O error, 3 verification failed.
"""


class _Parser(argparse.ArgumentParser):
    # bad flags are a validation failure, not an I/O one
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


class IOFailure(Exception):
    pass


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (see schema below)")
    system = common.add_argument_group("system")
    system.add_argument("--N", type=int, help="ring has 2N sites")
    system.add_argument("--J", type=float, help="hopping amplitude")
    system.add_argument("--g", type=float, help="dot-ring coupling")
    system.add_argument("--omega-A", dest="omega_A", type=float, help="dot level")
    system.add_argument("--phi", type=float, help="flux in flux quanta")
    system.add_argument("--statistics", choices=["fermion", "boson"])
    sched = common.add_argument_group("schedule and preparation")
    sched.add_argument("--tau", type=float, help="measurement interval")
    sched.add_argument("--M", type=int, help="number of measurements")
    sched.add_argument("--prep", choices=["fermion", "fock", "coherent"])
    sched.add_argument("--n", type=int, help="boson number for a fock preparation")
    sched.add_argument("--alpha-re", dest="alpha_re", type=float)
    sched.add_argument("--alpha-im", dest="alpha_im", type=float)
    common.add_argument("--methods", help=f"comma-separated; any of {', '.join(CLI_METHODS)}")
    common.add_argument("--taus", help="comma-separated measurement intervals for `rate`")
    common.add_argument("-o", "--output", help="output path (default: stdout; figures: <preset>.csv)")
    common.add_argument("--format", choices=["csv", "json"])
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="zeno-ring", description="Measurement-modified decay of a dot coupled to a flux-threaded ring.",
                     epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    kw = {"parents": [common], "epilog": EPILOG, "formatter_class": argparse.RawDescriptionHelpFormatter}
    sub.add_parser("evolve", help="survival series under repeated measurement", **kw)
    sub.add_parser("rate", help="rate table over methods and intervals", **kw)
    fig = sub.add_parser("figure", help="phase map for a figure preset", **kw)
    fig.add_argument("preset", help=f"one of {', '.join(PRESETS)}")
    sweep = sub.add_parser("sweep", help="phase map over two arbitrary axes", **kw)
    sweep.add_argument("--x", help="axis as name:min:max:steps")
    sweep.add_argument("--y", help="axis as name:min:max:steps")
    sweep.add_argument("--rate-method", dest="rate_method")
    sweep.add_argument("--eps", type=float, help="classification threshold on dR/dtau")
    ver = sub.add_parser("verify", help="invariant suite and discrepancy report", **kw)
    ver.add_argument("--corrupt-hamiltonian", dest="corrupt_hamiltonian", action="store_true",
                     help=argparse.SUPPRESS)
    return parser


def _read_config(path):
    if path is None:
        return None
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise IOFailure(f"cannot read config {path!r}: {exc.strerror or exc}") from None


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {path!r}: {exc.strerror or exc}") from None


def _sidecar(path):
    root, ext = os.path.splitext(path)
    return (root if ext == ".csv" else path) + ".meta.json"


def _emit_table(cfg, header, rows, comments):
    if cfg.output_format == "json":
        text = table_json(header, rows, comments)
    else:
        text = csv_text(header, rows, comments)
    _write(cfg.output_path, text)


def cmd_evolve(cfg) -> int:
    if cfg.preparation == "fock":
        result = dynamics.fock_survival(cfg.params, cfg.n, cfg.schedule)
    elif cfg.preparation == "coherent":
        result = dynamics.coherent_survival_oracle(cfg.params, cfg.alpha, cfg.schedule)
    else:
        result = dynamics.measured_survival(cfg.params, cfg.schedule)
    rows = [[k, float(t), float(p), result.effective_rate]
            for k, (t, p) in enumerate(zip(result.times, result.probabilities))]
    _emit_table(cfg, ["step", "time", "probability", "effective_rate"], rows,
                {"command": "evolve", "config": cfg.document})
    return EXIT_OK


def _rate(method, cfg, tau):
    p = cfg.params
    if method == "time_integral":
        return rates.decay_rate_time_integral(p, tau)
    if method == "paper_sinc":
        return rates.decay_rate_paper_sinc(p, tau)
    if method == "derived_sinc":
        return rates.decay_rate_derived_sinc(p, tau)
    if method == "golden_rule_broadened":
        return rates.golden_rule_broadened(p)
    if method == "golden_rule_continuum":
        return rates.golden_rule_continuum(p.J, p.g, p.omega_A)
    if method == "wigner_weisskopf":
        return rates.wigner_weisskopf_pole(p)
    if method == "oracle":
        result = dynamics.measured_survival(p, dynamics.MeasurementSchedule(tau, 1))
        return rates.RateEstimate(result.effective_rate, rates.RateMethod.ORACLE, tau, ("exact projective",))
    if method == "fock_time_integral":
        return boson.fock_rate(p, cfg.n, tau)
    if method == "fock_paper_sinc":
        return boson.fock_rate(p, cfg.n, tau, "paper")
    if method == "fock_oracle":
        result = dynamics.fock_survival(p, cfg.n, dynamics.MeasurementSchedule(tau, 1))
        return rates.RateEstimate(result.effective_rate, rates.RateMethod.ORACLE, tau, (f"exact fock n={cfg.n}",))
    if method == "coherent_paper_2cos":
        return boson.coherent_rate_paper(p, cfg.alpha, tau, 2.0, oracle=False)
    if method == "coherent_paper_4cos":
        return boson.coherent_rate_paper(p, cfg.alpha, tau, 4.0, oracle=False)
    if method == "coherent_oracle":
        return boson.coherent_rate_oracle(p, cfg.alpha, tau)
    raise ParameterError(f"unknown method {method!r}")


def rate_rows(cfg) -> list[list]:
    rows = []
    for method in cfg.methods:
        for tau in cfg.taus:
            try:
                est = _rate(method, cfg, tau)
            except OutOfBandError as exc:
                rows.append([method, tau, None, f"error; out-of-band; {exc}"])
            except (ParameterError, NumericalFailure) as exc:
                rows.append([method, tau, None, f"error; {exc}"])
            else:
                rows.append([method, tau, est.value, "; ".join(est.validity_notes)])
    return rows


def cmd_rate(cfg) -> int:
    _emit_table(cfg, ["method", "tau", "rate", "validity_notes"], rate_rows(cfg),
                {"command": "rate", "config": cfg.document})
    return EXIT_OK


def _emit_grid(path, csv_body, meta):
    _write(path, csv_body)
    if path is not None:
        _write(_sidecar(path), meta)


def cmd_figure(preset, cfg, path_given) -> int:
    if preset not in PRESETS:
        raise ParameterError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    body, meta = render_preset(preset, thread_count())
    _emit_grid(cfg.output_path if path_given else f"{preset}.csv", body, meta)
    return EXIT_OK


def cmd_sweep(cfg) -> int:
    if cfg.sweep is None or cfg.sweep["x"] is None or cfg.sweep["y"] is None:
        raise ParameterError("sweep needs both axes (--x/--y or the config's sweep section)")
    s = cfg.sweep
    x = Axis(s["x"]["axis"], s["x"]["min"], s["x"]["max"], s["x"]["steps"])
    y = Axis(s["y"]["axis"], s["y"]["min"], s["y"]["max"], s["y"]["steps"])
    pm = phase_map(cfg.point, x, y, s["rate_method"], eps=s["eps"], extra_methods=tuple(s["extra_methods"]),
                   threads=thread_count())
    body, meta = render_phase_map(pm, {"command": "sweep", "config": cfg.document}, s["eps"])
    _emit_grid(cfg.output_path, body, meta)
    return EXIT_OK


def corrupted_builder(params) -> HamiltonianMatrix:
    """Real-space Hamiltonian with one ring bond nudged (negative control)."""
    h = build_real_space(params)
    m = np.array(h.matrix)
    if params.sites > 1:
        m[1, 2] += 1e-3
        m[2, 1] = np.conj(m[1, 2])
    else:
        m[1, 1] += 1e-3
    return HamiltonianMatrix(m, h.basis, params)


def cmd_verify(cfg, corrupt=False) -> int:
    builder = corrupted_builder if corrupt else build_real_space
    report = verify.run_suite(builder, extra_points=[(cfg.params, tau) for tau in cfg.taus])
    report = {"command": "verify", "config": cfg.document, "corrupted_hamiltonian": corrupt, **report}
    _write(cfg.output_path, json_text(report))
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {check['name']}: {check['value']:.3g} (tol {check['tolerance']:.3g})", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolved = apply_overrides(load_document(_read_config(args.config)), args)
        if args.command == "verify" and resolved["output"]["format"] == "csv" and args.format is None:
            resolved["output"]["format"] = "json"
        cfg = validate(resolved)
        if args.command == "evolve":
            return cmd_evolve(cfg)
        if args.command == "rate":
            return cmd_rate(cfg)
        if args.command == "figure":
            return cmd_figure(args.preset, cfg, cfg.output_path is not None)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        return cmd_verify(cfg, corrupt=args.corrupt_hamiltonian)
    except IOFailure as exc:
        print(f"zeno-ring: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParameterError, ContractViolation) as exc:
        print(f"zeno-ring: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
