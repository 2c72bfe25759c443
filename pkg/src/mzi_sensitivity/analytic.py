"""Closed-form moments, phase sensitivities and Cramer-Rao bounds.

All expressions assume two balanced beam splitters and the output mode map

    a4^dag = -sin(phi/2) a0^dag + cos(phi/2) a1^dag
    a5^dag =  cos(phi/2) a0^dag + sin(phi/2) a1^dag

with the difference observable ``N_d = N4 - N5`` and the single-mode
observable ``N4``.  Squeezed-input formulas require a real squeeze
parameter (``xi.theta == 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, SingularPoint, UnsupportedParameter, UnsupportedScheme
from .states import (
    CoherentSqueezedVacuum,
    DetectionScheme,
    DoubleCoherent,
    InputState,
    SingleCoherent,
    relative_phase,
)

# Phases closer than this to a special value are treated as equal to it.
PHASE_EPS = 1e-12

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class MomentSet:
    """Mean, variance and phase slope of a photon-count observable."""

    mean: float
    variance: float
    d_mean_d_phi: float

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError(f"variance must be non-negative, got {self.variance}")


@dataclass(frozen=True)
class SensitivityReport:
    delta_phi: float
    phi: float
    scheme: DetectionScheme
    qcrb: float
    method: str

    @property
    def ratio_to_qcrb(self) -> float:
        return self.delta_phi / self.qcrb


@dataclass(frozen=True)
class LossModel:
    """Fractional photon loss ``sigma`` in [0, 1)."""

    sigma: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.sigma < 1.0):
            raise ValueError(f"loss fraction must lie in [0, 1), got {self.sigma}")


def _check_phi(phi: float) -> None:
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi!r}")


def _require_real_squeeze(state: CoherentSqueezedVacuum) -> None:
    if state.xi.theta != 0.0:
        raise UnsupportedParameter(
            "closed forms need a real squeeze parameter (theta = 0); use the Fock oracle"
        )


def _require_aligned(state: CoherentSqueezedVacuum) -> None:
    _require_real_squeeze(state)
    if abs(state.alpha.phase) > PHASE_EPS:
        raise UnsupportedParameter(
            "optimum closed forms need theta_alpha = 0; use estimator.find_optimum"
        )


def _in_phase(state: DoubleCoherent) -> bool:
    return abs(relative_phase(state)) <= PHASE_EPS


def _squeezed_terms(state: CoherentSqueezedVacuum) -> tuple[float, float, float, float]:
    """Return |alpha|^2, sinh^2 r, sinh^2(2r) and the quadrature-noise term.

    The last one is ``sinh^2 r + |alpha|^2 e^{-2r} + |alpha|^2 sinh(2r)(1 - cos 2 theta_alpha)``,
    the variance of ``a0^dag a1 + a1^dag a0`` on the input.
    """
    a2 = state.alpha.modulus**2
    r = state.xi.r
    sh2 = math.sinh(r) ** 2
    sh2_2r = math.sinh(2 * r) ** 2
    misalignment = a2 * math.sinh(2 * r) * (1.0 - math.cos(2 * state.alpha.phase))
    quad = sh2 + a2 * math.exp(-2 * r) + misalignment
    return a2, sh2, sh2_2r, quad


def moments(state: InputState, scheme: DetectionScheme, phi: float) -> MomentSet:
    """Exact mean, variance and d<N>/dphi of the detected observable at ``phi``."""
    _check_phi(phi)
    scheme = DetectionScheme(scheme)
    if scheme is DetectionScheme.HOMODYNE:
        raise UnsupportedScheme("homodyne detection only has bound formulas")

    s, c = math.sin(phi / 2), math.cos(phi / 2)
    sin_phi, cos_phi = math.sin(phi), math.cos(phi)

    if isinstance(state, SingleCoherent):
        a2 = state.alpha.modulus**2
        if scheme is DetectionScheme.DIFFERENCE:
            return MomentSet(cos_phi * a2, a2, -sin_phi * a2)
        return MomentSet(c * c * a2, c * c * a2, -0.5 * sin_phi * a2)

    if isinstance(state, DoubleCoherent):
        a, b = state.alpha.modulus, state.beta.modulus
        cross = a * b * math.cos(relative_phase(state))
        if scheme is DetectionScheme.DIFFERENCE:
            mean = cos_phi * (a * a - b * b) - 2 * sin_phi * cross
            slope = -sin_phi * (a * a - b * b) - 2 * cos_phi * cross
            return MomentSet(mean, a * a + b * b, slope)
        # port 4 carries the coherent amplitude c*alpha - s*beta; Poissonian counts
        mean = abs(c * state.alpha.value - s * state.beta.value) ** 2
        slope = 0.5 * sin_phi * (b * b - a * a) - cos_phi * cross
        return MomentSet(mean, mean, slope)

    if isinstance(state, CoherentSqueezedVacuum):
        _require_real_squeeze(state)
        a2, sh2, sh2_2r, quad = _squeezed_terms(state)
        if scheme is DetectionScheme.DIFFERENCE:
            mean = cos_phi * (a2 - sh2)
            var = cos_phi**2 * (0.5 * sh2_2r + a2) + sin_phi**2 * quad
            return MomentSet(mean, var, -sin_phi * (a2 - sh2))
        mean = s * s * sh2 + c * c * a2
        var = s**4 * 0.5 * sh2_2r + (s * c) ** 2 * quad + c**4 * a2
        return MomentSet(mean, var, 0.5 * sin_phi * (sh2 - a2))

    raise TypeError(f"not an input state: {state!r}")


def _safe_ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf
    return num / den


def delta_phi(state: InputState, scheme: DetectionScheme, phi: float) -> tuple[float, str]:
    """Closed-form sensitivity at ``phi`` and the name of the formula used.

    Removable 0/0 points (dark ports of the coherent inputs) are evaluated
    through the cancelled expressions.
    """
    _check_phi(phi)
    scheme = DetectionScheme(scheme)
    s, c = math.sin(phi / 2), math.cos(phi / 2)
    sin_phi, cos_phi = math.sin(phi), math.cos(phi)

    if isinstance(state, SingleCoherent):
        a = state.alpha.modulus
        if a == 0:
            raise DegenerateInput("vacuum input carries no phase information")
        if scheme is DetectionScheme.DIFFERENCE:
            return _safe_ratio(1.0, abs(sin_phi) * a), "single-coherent/diff"
        # homodyne bound coincides with the beta -> 0 limit of the double-coherent bound
        label = "single-coherent/single" if scheme is DetectionScheme.SINGLE else "single-coherent/homodyne-bound"
        return _safe_ratio(1.0, abs(s) * a), label

    if isinstance(state, DoubleCoherent):
        a, b = state.alpha.modulus, state.beta.modulus
        if a == 0 and b == 0:
            raise DegenerateInput("vacuum input carries no phase information")
        dtheta = relative_phase(state)
        cross = a * b * math.cos(dtheta)
        if scheme is DetectionScheme.DIFFERENCE:
            den = abs(sin_phi * (a * a - b * b) + 2 * cos_phi * cross)
            return _safe_ratio(math.sqrt(a * a + b * b), den), "double-coherent/diff"
        if scheme is DetectionScheme.HOMODYNE:
            if not _in_phase(state):
                raise UnsupportedParameter("homodyne bound is given for in-phase lasers only")
            return _safe_ratio(1.0, abs(a * s + b * c)), "double-coherent/homodyne-bound"
        if _in_phase(state):
            return _safe_ratio(1.0, abs(a * s + b * c)), "double-coherent/single/in-phase"
        if abs(abs(dtheta) - math.pi) <= PHASE_EPS:
            return _safe_ratio(1.0, abs(a * s - b * c)), "double-coherent/single/anti-phase"
        num = math.sqrt(max(s * s * b * b + c * c * a * a - sin_phi * cross, 0.0))
        den = abs(0.5 * sin_phi * (a * a - b * b) + cos_phi * cross)
        return _safe_ratio(num, den), "double-coherent/single"

    if isinstance(state, CoherentSqueezedVacuum):
        _require_real_squeeze(state)
        a2, sh2, sh2_2r, quad = _squeezed_terms(state)
        gap = abs(a2 - sh2)
        if scheme is DetectionScheme.HOMODYNE:
            if abs(state.alpha.phase) > PHASE_EPS:
                raise UnsupportedParameter("homodyne bound is given for theta_alpha = 0 only")
            if a2 == 0:
                raise DegenerateInput("homodyne bound undefined for |alpha| = 0")
            return math.exp(-state.xi.r) / state.alpha.modulus, "squeezed/homodyne-bound"
        if gap == 0.0:
            raise SingularPoint("|alpha|^2 = sinh^2 r: closed form denominator vanishes")
        if scheme is DetectionScheme.DIFFERENCE:
            if sin_phi == 0.0:
                return math.inf, "squeezed/diff"
            cot2 = (cos_phi / sin_phi) ** 2
            return math.sqrt((a2 + 0.5 * sh2_2r) * cot2 + quad) / gap, "squeezed/diff"
        if s == 0.0:
            if a2 > 0:
                return math.inf, "squeezed/single"
            return math.sqrt(quad) / gap, "squeezed/single"
        if c == 0.0:
            if sh2_2r > 0:
                return math.inf, "squeezed/single"
            return math.sqrt(quad) / gap, "squeezed/single"
        t2 = (s / c) ** 2
        num = 0.5 * t2 * sh2_2r + a2 / t2 + quad
        return math.sqrt(num) / gap, "squeezed/single"

    raise TypeError(f"not an input state: {state!r}")


def sensitivity(state: InputState, scheme: DetectionScheme, phi: float) -> SensitivityReport:
    """Phase sensitivity at ``phi`` together with the QCRB of the input."""
    value, method = delta_phi(state, scheme, phi)
    return SensitivityReport(value, phi, DetectionScheme(scheme), qcrb(state), method)


def qcrb(state: InputState) -> float:
    """Quantum Cramer-Rao bound, independent of phi and of the detection."""
    if isinstance(state, SingleCoherent):
        info = state.alpha.modulus**2
    elif isinstance(state, DoubleCoherent):
        a2, b2 = state.alpha.modulus**2, state.beta.modulus**2
        total = a2 + b2
        info = 0.0
        if total > 0:
            info = total - 4 * a2 * b2 * math.sin(relative_phase(state)) ** 2 / total
    elif isinstance(state, CoherentSqueezedVacuum):
        r = state.xi.r
        info = state.alpha.modulus**2 * math.exp(2 * r) + math.sinh(r) ** 2
    else:
        raise TypeError(f"not an input state: {state!r}")
    if info <= 0:
        raise DegenerateInput("quantum Fisher information vanishes")
    return 1.0 / math.sqrt(info)


def fisher_matrix(state: DoubleCoherent) -> np.ndarray:
    """Two-parameter Fisher matrix over the sum and difference arm phases.

    Rows/columns are ordered (+, -).  The difference-phase bound is
    ``sqrt(inv(F)[1, 1])``.
    """
    if not isinstance(state, DoubleCoherent):
        raise TypeError("fisher_matrix is defined for DoubleCoherent inputs only")
    a, b = state.alpha.modulus, state.beta.modulus
    diag = a * a + b * b
    off = -2 * a * b * math.sin(relative_phase(state))
    if diag * diag - off * off <= 0:
        raise DegenerateInput("Fisher matrix is singular")
    return np.array([[diag, off], [off, diag]])


def _period(scheme: DetectionScheme) -> float:
    return math.pi if scheme is DetectionScheme.DIFFERENCE else 2 * math.pi


def optimal_phase(
    state: InputState, scheme: DetectionScheme, k: int = 0, sign: int = 1
) -> float:
    """Closed-form optimal working point on branch ``k``.

    ``sign=+1, k=0`` gives the canonical optimum, in [0, pi) for the
    difference scheme and [0, 2 pi) for single-mode detection.  ``sign=-1``
    mirrors it (phi -> -phi); the mirror is also optimal for single-coherent
    and squeezed inputs, whose sensitivity is even in phi, but not for a
    double-coherent input with unequal powers.
    """
    scheme = DetectionScheme(scheme)
    if scheme is DetectionScheme.HOMODYNE:
        raise UnsupportedScheme("no working-point formula for the homodyne bound")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    diff = scheme is DetectionScheme.DIFFERENCE

    if isinstance(state, SingleCoherent):
        if state.alpha.modulus == 0:
            raise DegenerateInput("vacuum input carries no phase information")
        base = math.pi / 2 if diff else math.pi
    elif isinstance(state, DoubleCoherent):
        a, b = state.alpha.modulus, state.beta.modulus
        if diff:
            y = a * a - b * b
            x = 2 * a * b * math.cos(relative_phase(state))
            if x == 0 and y == 0:
                raise DegenerateInput("difference signal is independent of phi")
            base = math.atan2(y, x) % math.pi
        else:
            if not _in_phase(state):
                raise UnsupportedParameter(
                    "single-mode optimum closed form needs in-phase lasers; use estimator.find_optimum"
                )
            if a == 0 and b == 0:
                raise DegenerateInput("vacuum input carries no phase information")
            base = 2 * math.atan2(a, b)
    elif isinstance(state, CoherentSqueezedVacuum):
        _require_aligned(state)
        if diff:
            base = math.pi / 2
        else:
            sh = math.sinh(2 * state.xi.r)
            base = math.pi if sh == 0 else 2 * math.atan(math.sqrt(SQRT2 * state.alpha.modulus / sh))
    else:
        raise TypeError(f"not an input state: {state!r}")

    return sign * base + k * _period(scheme)


def best_sensitivity(state: InputState, scheme: DetectionScheme) -> float:
    """Sensitivity at the optimal working point, from its own closed form."""
    scheme = DetectionScheme(scheme)
    if isinstance(state, SingleCoherent):
        return qcrb(state)

    if isinstance(state, DoubleCoherent):
        if scheme is DetectionScheme.DIFFERENCE:
            # saturates the bound for any relative phase
            optimal_phase(state, scheme)
            return qcrb(state)
        if not _in_phase(state):
            raise UnsupportedParameter("closed form needs in-phase lasers; use estimator.find_optimum")
        return qcrb(state)

    if isinstance(state, CoherentSqueezedVacuum):
        _require_aligned(state)
        a = state.alpha.modulus
        a2, sh2, _, _ = _squeezed_terms(state)
        r = state.xi.r
        if scheme is DetectionScheme.HOMODYNE:
            if a == 0:
                raise DegenerateInput("homodyne bound undefined for |alpha| = 0")
            return math.exp(-r) / a
        gap = abs(a2 - sh2)
        if gap == 0.0:
            raise SingularPoint("|alpha|^2 = sinh^2 r: closed form denominator vanishes")
        if scheme is DetectionScheme.DIFFERENCE:
            return math.sqrt(sh2 + a2 * math.exp(-2 * r)) / gap
        return math.sqrt(sh2 + SQRT2 * a * math.sinh(2 * r) + a2 * math.exp(-2 * r)) / gap

    raise TypeError(f"not an input state: {state!r}")


def qcrb_with_loss(state: InputState, loss: LossModel) -> float:
    """Cramer-Rao bound with a fraction ``sigma`` of the light lost.

    For the squeezed input this is the high-intensity approximation; at
    ``sigma = 0`` it reduces to ``e^{-r}/|alpha|`` rather than to ``qcrb``.
    """
    sigma = loss.sigma
    if isinstance(state, SingleCoherent):
        if state.alpha.modulus == 0:
            raise DegenerateInput("vacuum input carries no phase information")
        return 1.0 / (state.alpha.modulus * math.sqrt(1.0 - sigma))
    if isinstance(state, CoherentSqueezedVacuum):
        a2 = state.alpha.modulus**2
        r = state.xi.r
        den = (1.0 - sigma) * a2 + sigma * (1.0 - sigma) * math.sinh(r) ** 2
        if den <= 0:
            raise DegenerateInput("lossy bound undefined: no coherent power and no loss")
        return math.sqrt(sigma + (1.0 - sigma) * math.exp(-2 * r)) / math.sqrt(den)
    if isinstance(state, DoubleCoherent):
        raise UnsupportedParameter("no lossy bound available for the double-coherent input")
    raise TypeError(f"not an input state: {state!r}")
