"""Command-line front end.

Examples::

    mzi-sens figure fig5 --out fig5.csv
    mzi-sens sweep --state squeezed --alpha 10 --r 2.3 --scheme diff,single
    mzi-sens sweep --config sweep.ini --points 200
    mzi-sens table1
    mzi-sens verify quick

Config files hold flat ``key = value`` lines (an optional ``[sweep]``
header is allowed); keys are the long flag names with ``-`` or ``_``.
Command-line flags win over the file.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from pathlib import Path
from typing import Any, Optional

from . import __version__, analytic, estimator
from .analytic import LossModel
from .errors import SensitivityError
from .states import InputState, coherent_squeezed, double_coherent, single_coherent
from .sweeps import (
    EDGE_OFFSET,
    FIGURES,
    AlphaAxis,
    PhaseAxis,
    SweepSpec,
    Table,
    parse_schemes,
    run_figure,
    run_sweep,
    run_table1,
)
from .verify import run_verify

EXIT_OK, EXIT_INVALID, EXIT_VERIFY_FAILED = 0, 1, 2

DEFAULTS: dict[str, Any] = {
    "state": "single",
    "alpha": 1.0,
    "beta": 0.0,
    "theta_alpha": 0.0,
    "delta_theta": 0.0,
    "r": 0.0,
    "scheme": "diff,single",
    "axis": "phase",
    "phi_from": EDGE_OFFSET,
    "phi_to": 2 * math.pi - EDGE_OFFSET,
    "points": 1000,
    "alpha_from": 1.0,
    "alpha_to": 100.0,
    "log_scale": False,
    "loss_sigma": None,
    "include_qcrb": True,
    "source": "analytic",
}

_TYPES = {
    "alpha": float, "beta": float, "theta_alpha": float, "delta_theta": float, "r": float,
    "phi_from": float, "phi_to": float, "points": int, "alpha_from": float,
    "alpha_to": float, "loss_sigma": float,
}
_FLAGS = {"log_scale", "include_qcrb"}


def read_config(path: str) -> dict[str, Any]:
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[sweep]\n" + text
    parser = configparser.ConfigParser()
    parser.read_string(text)
    values: dict[str, Any] = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ValueError(f"unknown config key {key!r}")
            if key in _FLAGS:
                values[key] = parser.getboolean(section, key)
            else:
                values[key] = _TYPES.get(key, str)(raw)
    return values


def _settings(args: argparse.Namespace) -> dict[str, Any]:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def build_state(cfg: dict[str, Any]) -> InputState:
    kind = cfg["state"]
    if kind == "single":
        return single_coherent(cfg["alpha"], cfg["theta_alpha"])
    if kind == "double":
        ta = cfg["theta_alpha"]
        return double_coherent(cfg["alpha"], cfg["beta"], ta, ta - cfg["delta_theta"])
    if kind == "squeezed":
        return coherent_squeezed(cfg["alpha"], cfg["r"], cfg["theta_alpha"])
    raise ValueError(f"unknown state {kind!r}; use single, double or squeezed")


def _loss(cfg: dict[str, Any]) -> Optional[LossModel]:
    return None if cfg["loss_sigma"] is None else LossModel(cfg["loss_sigma"])


def _emit(text: str, out: Optional[str]) -> None:
    if out in (None, "-", "stdout"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _add_state_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input state")
    g.add_argument("--state", choices=["single", "double", "squeezed"])
    g.add_argument("--alpha", type=float, help="|alpha|, coherent amplitude in port 1")
    g.add_argument("--beta", type=float, help="|beta|, second laser in port 0")
    g.add_argument("--theta-alpha", type=float, help="phase of alpha (rad)")
    g.add_argument("--delta-theta", type=float, help="theta_alpha - theta_beta (rad)")
    g.add_argument("--r", type=float, help="squeeze magnitude of port 0")
    p.add_argument("--scheme", help="comma list of diff, single, homodyne")
    p.add_argument("--loss-sigma", type=float, help="loss fraction for the lossy QCRB")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--out", help="output path, or - for stdout (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzi-sens", description="Mach-Zehnder phase sensitivity toolkit"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="sweep phase or |alpha| and write CSV")
    _add_state_flags(p)
    p.add_argument("--axis", choices=["phase", "alpha"])
    p.add_argument("--phi-from", type=float)
    p.add_argument("--phi-to", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--alpha-from", type=float)
    p.add_argument("--alpha-to", type=float)
    p.add_argument("--log-scale", action="store_true", default=None)
    p.add_argument("--no-qcrb", dest="include_qcrb", action="store_false", default=None)

    p = sub.add_parser("figure", help="reproduce the data behind a figure")
    p.add_argument("name", choices=sorted(FIGURES))
    p.add_argument("--out")

    p = sub.add_parser("table1", help="optima and best sensitivities for all inputs")
    p.add_argument("--alpha", type=float, default=1e4)
    p.add_argument("--ratio", type=float, default=0.5, help="|beta|/|alpha|")
    p.add_argument("--delta-theta", type=float, default=0.0)
    p.add_argument("--r", type=float, default=2.3)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="oracle-vs-closed-form checks")
    p.add_argument("scale", choices=["quick", "full"])

    p = sub.add_parser("optimum", help="closed-form and numerical optimal phase")
    _add_state_flags(p)
    p.add_argument("--phi-from", type=float)
    p.add_argument("--phi-to", type=float)
    p.add_argument("--source", choices=["analytic", "oracle"])

    p = sub.add_parser("qcrb", help="quantum Cramer-Rao bound of an input")
    _add_state_flags(p)
    return parser


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _settings(args)
    if cfg["axis"] == "alpha":
        axis = AlphaAxis(cfg["alpha_from"], cfg["alpha_to"], cfg["points"], cfg["log_scale"])
    else:
        axis = PhaseAxis(cfg["phi_from"], cfg["phi_to"], cfg["points"])
    spec = SweepSpec(
        build_state(cfg), parse_schemes(cfg["scheme"]), axis,
        include_qcrb=cfg["include_qcrb"], loss=_loss(cfg),
    )
    _emit(run_sweep(spec).to_csv(), args.out)
    return EXIT_OK


def cmd_optimum(args: argparse.Namespace) -> int:
    cfg = _settings(args)
    state = build_state(cfg)
    rows = []
    for scheme in parse_schemes(cfg["scheme"]):
        interval = None
        if args.phi_from is not None or args.phi_to is not None:
            lo, hi = estimator.default_interval(scheme)
            interval = (
                args.phi_from if args.phi_from is not None else lo,
                args.phi_to if args.phi_to is not None else hi,
            )
        found = estimator.find_optimum(state, scheme, interval, source=cfg["source"])
        try:
            closed = analytic.optimal_phase(state, scheme)
            best = analytic.best_sensitivity(state, scheme)
        except SensitivityError:
            closed = best = None
        rows.append([scheme.value, closed, best, found.phi_opt, found.delta_phi_opt, found.agreement_gap])
    columns = ["scheme", "phi_opt_closed", "delta_phi_opt_closed", "phi_opt_numeric",
               "delta_phi_opt_numeric", "agreement_gap"]
    _emit(Table(columns, rows, {"preset": "optimum"}).to_csv(), args.out)
    return EXIT_OK


def cmd_qcrb(args: argparse.Namespace) -> int:
    cfg = _settings(args)
    state = build_state(cfg)
    columns, row = ["qcrb"], [analytic.qcrb(state)]
    loss = _loss(cfg)
    if loss is not None:
        columns.append("qcrb_loss")
        row.append(analytic.qcrb_with_loss(state, loss))
    _emit(Table(columns, [row], {"preset": "qcrb"}).to_csv(), args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_verify(args.scale)
    for result in results:
        print(result.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return cmd_sweep(args)
        if args.command == "figure":
            _emit(run_figure(args.name).to_csv(), args.out)
            return EXIT_OK
        if args.command == "table1":
            _emit(run_table1(args.alpha, args.ratio, args.delta_theta, args.r).to_csv(), args.out)
            return EXIT_OK
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "optimum":
            return cmd_optimum(args)
        return cmd_qcrb(args)
    except (SensitivityError, ValueError, OSError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
