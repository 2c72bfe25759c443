"""Numerical working-point search.

A dense grid localises every basin of the sensitivity curve, which has
poles at blind points, and a golden-section search then refines each one.
The best refined minimum wins; equally deep copies go to the smallest phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import analytic, fock_oracle
from .analytic import MomentSet
from .errors import (
    IndeterminateSensitivity,
    NoInteriorMinimum,
    SensitivityError,
    UnsupportedParameter,
    UnsupportedScheme,
)
from .states import CoherentSqueezedVacuum, DetectionScheme, DoubleCoherent, InputState

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/golden ratio
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class OptimumResult:
    phi_opt: float
    delta_phi_opt: float
    method: str  # "closed-form" or "grid-refined"
    agreement_gap: Optional[float] = None
    closed_form_phi: Optional[float] = None


def sensitivity_from_moments(m: MomentSet) -> float:
    """Error-propagation sensitivity ``sqrt(Var N) / |d<N>/dphi|``."""
    if m.d_mean_d_phi == 0.0:
        if m.variance > 0.0:
            return math.inf
        raise IndeterminateSensitivity("zero variance and zero slope")
    return math.sqrt(m.variance) / abs(m.d_mean_d_phi)


def golden_section(
    f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-9
) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on [lo, hi] until the bracket is below ``xtol``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    # keep the best point actually evaluated
    return min((fx, x), (fc, c), (fd, d))[::-1]


def default_interval(scheme: DetectionScheme) -> tuple[float, float]:
    # repo convention: one period of the scheme
    if DetectionScheme(scheme) is DetectionScheme.DIFFERENCE:
        return 0.0, math.pi
    return 0.0, 2 * math.pi


def _analytic_curve(state: InputState, scheme: DetectionScheme) -> Callable[[float], float]:
    def curve(phi: float) -> float:
        return analytic.delta_phi(state, scheme, phi)[0]

    return curve


def _oracle_curve(
    state: InputState, scheme: DetectionScheme, policy: fock_oracle.TruncationPolicy | None
) -> Callable[[float], float]:
    prepared = fock_oracle.prepare(state, policy)

    def curve(phi: float) -> float:
        out = fock_oracle.apply_mzi(prepared, phi)
        try:
            return sensitivity_from_moments(fock_oracle.observable_moments(out, scheme))
        except IndeterminateSensitivity:
            return math.inf

    return curve


def _closed_form_gap(state: InputState, scheme: DetectionScheme, phi: float):
    try:
        base = analytic.optimal_phase(state, scheme)
    except (UnsupportedParameter, UnsupportedScheme):
        return None, None
    period = math.pi if scheme is DetectionScheme.DIFFERENCE else 2 * math.pi
    # the mirrored root is a true optimum only when the curve is even in phi
    roots = [base] if isinstance(state, DoubleCoherent) else [base, -base]
    gaps = []
    for root in roots:
        offset = (phi - root) % period
        gaps.append(min(offset, period - offset))
    return min(gaps), base


def find_optimum(
    state: InputState,
    scheme: DetectionScheme,
    interval: tuple[float, float] | None = None,
    source: str = "analytic",
    grid_points: int = 1024,
    xtol: float = 1e-9,
    policy: fock_oracle.TruncationPolicy | None = None,
) -> OptimumResult:
    """Grid search followed by golden-section refinement of every basin.

    ``source`` selects the curve: ``"analytic"`` (closed forms) or
    ``"oracle"`` (truncated Fock simulation, desk-scale inputs only).
    """
    scheme = DetectionScheme(scheme)
    if scheme is DetectionScheme.HOMODYNE:
        raise UnsupportedScheme("the homodyne bound has no working point to search")
    lo, hi = interval if interval is not None else default_interval(scheme)
    if not (hi > lo and hi - lo <= 2 * math.pi + 1e-12):
        raise ValueError("interval must satisfy lo < hi <= lo + 2 pi")
    if grid_points < 512:
        raise ValueError("grid needs at least 512 points")

    if source == "analytic":
        curve = _analytic_curve(state, scheme)
    elif source == "oracle":
        curve = _oracle_curve(state, scheme, policy)
    else:
        raise ValueError(f"unknown source {source!r}")

    grid = np.linspace(lo, hi, grid_points)
    values = np.array([curve(float(x)) for x in grid])
    values = np.where(np.isnan(values), np.inf, values)

    inner = values[1:-1]
    basins = np.flatnonzero(
        np.isfinite(inner) & (inner <= values[:-2]) & (inner <= values[2:])
    ) + 1
    if basins.size == 0:
        raise NoInteriorMinimum("no interior minimum on the search grid")

    candidates = []
    for i in basins:
        x, fx = golden_section(curve, float(grid[i - 1]), float(grid[i + 1]), xtol)
        candidates.append((x, fx))
    best = min(fx for _, fx in candidates)
    phi_opt, delta_opt = min(
        ((x, fx) for x, fx in candidates if fx <= best * (1 + TIE_RTOL)), key=lambda c: c[0]
    )

    edge = min(values[0], values[-1])
    if edge < delta_opt * (1 - TIE_RTOL):
        raise NoInteriorMinimum(f"minimum lies on the interval boundary ({lo}, {hi})")

    gap, closed = _closed_form_gap(state, scheme, phi_opt)
    return OptimumResult(phi_opt, delta_opt, "grid-refined", gap, closed)


def closed_form_optimum(state: InputState, scheme: DetectionScheme, k: int = 0) -> OptimumResult:
    phi = analytic.optimal_phase(state, scheme, k)
    return OptimumResult(phi, analytic.best_sensitivity(state, scheme), "closed-form", None, phi)


def squeezed_single_candidates(state: CoherentSqueezedVacuum) -> dict[str, float]:
    """Two candidate closed forms for the squeezed single-mode optimum.

    ``"sinh2r"`` is the one that minimises the sensitivity; ``"sinh_r"``
    is the variant with ``sinh r`` in the denominator.
    """
    a = state.alpha.modulus
    r = state.xi.r
    if r == 0:
        raise SensitivityError("both candidates degenerate to pi without squeezing")
    return {
        "sinh2r": 2 * math.atan(math.sqrt(math.sqrt(2) * a / math.sinh(2 * r))),
        "sinh_r": 2 * math.atan(math.sqrt(math.sqrt(2) * a / math.sinh(r))),
    }
