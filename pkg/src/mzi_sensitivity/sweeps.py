"""Parameter sweeps, figure presets and the summary table as CSV tables."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from . import __version__, analytic, estimator
from .analytic import LossModel
from .errors import SensitivityError
from .states import (
    ComplexAmplitude,
    CoherentSqueezedVacuum,
    DetectionScheme,
    DoubleCoherent,
    InputState,
    SingleCoherent,
    coherent_squeezed,
    double_coherent,
    relative_phase,
    single_coherent,
)

# keeps phase sweeps off the blind points at 0 and 2 pi
EDGE_OFFSET = 1e-2


@dataclass(frozen=True)
class PhaseAxis:
    start: float
    stop: float
    points: int
    include_optima: bool = False

    def __post_init__(self) -> None:
        if self.points < 2:
            raise ValueError("a sweep needs at least 2 points")
        if not self.start < self.stop:
            raise ValueError("sweep axis must be increasing")


@dataclass(frozen=True)
class AlphaAxis:
    """Sweep of ``|alpha|``; each scheme is evaluated at its optimal phase."""

    start: float
    stop: float
    points: int
    log_scale: bool = False

    def __post_init__(self) -> None:
        if self.points < 2:
            raise ValueError("a sweep needs at least 2 points")
        if not self.start < self.stop:
            raise ValueError("sweep axis must be increasing")
        if self.log_scale and self.start <= 0:
            raise ValueError("log-scale axis needs a positive start")


@dataclass(frozen=True)
class SweepSpec:
    state: InputState
    schemes: tuple[DetectionScheme, ...]
    axis: Union[PhaseAxis, AlphaAxis]
    include_qcrb: bool = True
    loss: Optional[LossModel] = None
    name: str = "sweep"


@dataclass
class Table:
    columns: list[str]
    rows: list[list[object]]
    meta: dict[str, str] = field(default_factory=dict)

    def column(self, name: str) -> list[object]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# mzi-sens {__version__}\n")
        for key, value in self.meta.items():
            buf.write(f"# {key}: {value}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_cell(v) for v in row) + "\n")
        return buf.getvalue()


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    text = str(value)
    if "," in text or '"' in text:
        return '"' + text.replace('"', '""') + '"'
    return text


def describe_state(state: InputState) -> str:
    if isinstance(state, SingleCoherent):
        return f"single |alpha|={state.alpha.modulus!r} theta_alpha={state.alpha.phase!r}"
    if isinstance(state, DoubleCoherent):
        return (
            f"double |alpha|={state.alpha.modulus!r} |beta|={state.beta.modulus!r} "
            f"delta_theta={relative_phase(state)!r}"
        )
    return (
        f"squeezed |alpha|={state.alpha.modulus!r} theta_alpha={state.alpha.phase!r} "
        f"r={state.xi.r!r} theta={state.xi.theta!r}"
    )


def with_alpha(state: InputState, modulus: float) -> InputState:
    """Same state with ``|alpha|`` replaced; a second laser keeps its power ratio."""
    alpha = ComplexAmplitude(modulus, state.alpha.phase)
    if isinstance(state, DoubleCoherent):
        ratio = state.beta.modulus / state.alpha.modulus if state.alpha.modulus else 0.0
        return replace(state, alpha=alpha, beta=ComplexAmplitude(modulus * ratio, state.beta.phase))
    return replace(state, alpha=alpha)


def _phase_points(spec: SweepSpec) -> np.ndarray:
    axis = spec.axis
    points = np.linspace(axis.start, axis.stop, axis.points)
    if axis.include_optima:
        extra = []
        for scheme in spec.schemes:
            try:
                base = analytic.optimal_phase(spec.state, scheme)
            except SensitivityError:
                continue
            period = math.pi if scheme is DetectionScheme.DIFFERENCE else 2 * math.pi
            k = math.ceil((axis.start - base) / period)
            phi = base + k * period
            while phi <= axis.stop:
                extra.append(phi)
                phi += period
        points = np.unique(np.concatenate([points, extra]))
    return points


def _guarded(fn, errors: list[str]):
    try:
        return fn()
    except SensitivityError as exc:
        errors.append(f"{type(exc).__name__}: {exc}")
        return None


def run_sweep(spec: SweepSpec) -> Table:
    """One row per axis point; per-row failures land in the ``error`` column."""
    schemes = [DetectionScheme(s) for s in spec.schemes]
    phase_axis = isinstance(spec.axis, PhaseAxis)
    columns = ["phi" if phase_axis else "alpha"]
    columns += [f"delta_phi_{s.value}" for s in schemes]
    if not phase_axis:
        columns += [f"phi_opt_{s.value}" for s in schemes]
    if spec.include_qcrb:
        columns.append("qcrb")
    if spec.loss is not None:
        columns.append("qcrb_loss")
    columns.append("error")

    if phase_axis:
        xs = _phase_points(spec)
    elif spec.axis.log_scale:
        xs = np.geomspace(spec.axis.start, spec.axis.stop, spec.axis.points)
    else:
        xs = np.linspace(spec.axis.start, spec.axis.stop, spec.axis.points)

    rows = []
    for x in xs:
        x = float(x)
        state = spec.state if phase_axis else with_alpha(spec.state, x)
        errors: list[str] = []
        values: list[object] = []
        phases: list[object] = []
        for scheme in schemes:
            try:
                phi = x if phase_axis else analytic.optimal_phase(state, scheme)
                values.append(analytic.delta_phi(state, scheme, phi)[0])
                phases.append(phi)
            except SensitivityError as exc:
                values.append(None)
                phases.append(None)
                errors.append(f"{scheme.value}: {type(exc).__name__}: {exc}")
        row: list[object] = [x, *values]
        if not phase_axis:
            row += phases
        if spec.include_qcrb:
            row.append(_guarded(lambda: analytic.qcrb(state), errors))
        if spec.loss is not None:
            row.append(_guarded(lambda: analytic.qcrb_with_loss(state, spec.loss), errors))
        row.append("; ".join(errors))
        rows.append(row)

    meta = {"preset": spec.name, "state": describe_state(spec.state)}
    axis = spec.axis
    if phase_axis:
        meta["axis"] = f"phi from {axis.start!r} to {axis.stop!r}, {axis.points} points"
        if axis.include_optima:
            meta["axis"] += ", closed-form optima inserted"
    else:
        scale = "log" if axis.log_scale else "linear"
        meta["axis"] = f"|alpha| from {axis.start!r} to {axis.stop!r}, {axis.points} points, {scale}"
    if spec.loss is not None:
        meta["loss_sigma"] = repr(spec.loss.sigma)
    return Table(columns, rows, meta)


def _full_phase_axis(points: int = 1000) -> PhaseAxis:
    return PhaseAxis(EDGE_OFFSET, 2 * math.pi - EDGE_OFFSET, points, include_optima=True)


BOTH = (DetectionScheme.SINGLE, DetectionScheme.DIFFERENCE)

FIGURES: dict[str, SweepSpec] = {
    "fig3": SweepSpec(single_coherent(1e4), BOTH, _full_phase_axis(), name="fig3"),
    "fig4": SweepSpec(double_coherent(1e4, 0.5e4), BOTH, _full_phase_axis(), name="fig4"),
    "fig5": SweepSpec(coherent_squeezed(10.0, 2.3), BOTH, _full_phase_axis(), name="fig5"),
    "fig6": SweepSpec(
        coherent_squeezed(1.0, 2.3), BOTH, AlphaAxis(1.0, 50.0, 500), name="fig6"
    ),
    "fig7": SweepSpec(
        coherent_squeezed(1e2, 2.3), BOTH, AlphaAxis(1e2, 1e5, 500, log_scale=True), name="fig7"
    ),
}


def run_figure(name: str) -> Table:
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    return run_sweep(FIGURES[name])


def run_table1(
    alpha: float = 1e4, ratio: float = 0.5, delta_theta: float = 0.0, r: float = 2.3
) -> Table:
    """Closed-form and numerical optima with best sensitivities per input and scheme."""
    states = [
        ("coherent", single_coherent(alpha)),
        ("double-coherent", double_coherent(alpha, ratio * alpha, delta_theta, 0.0)),
        ("coherent+squeezed", coherent_squeezed(alpha, r)),
    ]
    columns = [
        "input", "scheme", "qcrb", "phi_opt_closed", "delta_phi_opt_closed",
        "phi_opt_numeric", "delta_phi_opt_numeric", "agreement_gap",
        "phi_opt_alt", "alt_gap", "error",
    ]
    rows = []
    for label, state in states:
        for scheme in (DetectionScheme.DIFFERENCE, DetectionScheme.SINGLE):
            row: dict[str, object] = {"input": label, "scheme": scheme.value}
            errors = []
            try:
                row["qcrb"] = analytic.qcrb(state)
                row["phi_opt_closed"] = analytic.optimal_phase(state, scheme)
                row["delta_phi_opt_closed"] = analytic.best_sensitivity(state, scheme)
            except SensitivityError as exc:
                errors.append(f"{type(exc).__name__}: {exc}")
            try:
                found = estimator.find_optimum(state, scheme)
                row["phi_opt_numeric"] = found.phi_opt
                row["delta_phi_opt_numeric"] = found.delta_phi_opt
                row["agreement_gap"] = found.agreement_gap
                if isinstance(state, CoherentSqueezedVacuum) and scheme is DetectionScheme.SINGLE:
                    alt = estimator.squeezed_single_candidates(state)["sinh_r"]
                    row["phi_opt_alt"] = alt
                    row["alt_gap"] = abs(found.phi_opt - alt)
            except SensitivityError as exc:
                errors.append(f"{type(exc).__name__}: {exc}")
            row["error"] = "; ".join(errors)
            rows.append([row.get(c) for c in columns])
    meta = {
        "preset": "table1",
        "parameters": f"|alpha|={alpha!r} ratio={ratio!r} delta_theta={delta_theta!r} r={r!r}",
    }
    return Table(columns, rows, meta)


def parse_schemes(value: Union[str, Sequence[str]]) -> tuple[DetectionScheme, ...]:
    items = value.split(",") if isinstance(value, str) else list(value)
    return tuple(DetectionScheme(item.strip()) for item in items if item.strip())
