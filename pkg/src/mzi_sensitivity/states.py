"""Input states of the two-port interferometer and the detection schemes.

Port convention: the coherent amplitude ``alpha`` always feeds input port 1.
Port 0 is vacuum, a second coherent beam ``beta``, or squeezed vacuum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import DegenerateInput

TWO_PI = 2.0 * math.pi


def wrap_phase(phase: float) -> float:
    """Map an angle onto (-pi, pi]."""
    wrapped = math.remainder(phase, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def _check_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ComplexAmplitude:
    """Coherent amplitude ``modulus * exp(i * phase)``."""

    modulus: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        _check_finite(modulus=self.modulus, phase=self.phase)
        if self.modulus < 0:
            raise ValueError(f"modulus must be non-negative, got {self.modulus}")
        object.__setattr__(self, "modulus", float(self.modulus))
        object.__setattr__(self, "phase", wrap_phase(float(self.phase)))

    @classmethod
    def from_complex(cls, value: complex) -> ComplexAmplitude:
        return cls(abs(value), math.atan2(value.imag, value.real))

    @property
    def value(self) -> complex:
        return self.modulus * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class SqueezeParameter:
    """Squeezing ``xi = r * exp(i * theta)``.

    Closed forms only cover ``theta == 0``; the Fock oracle takes any value.
    """

    r: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        _check_finite(r=self.r, theta=self.theta)
        if self.r < 0:
            raise ValueError(f"squeeze magnitude must be non-negative, got {self.r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", wrap_phase(float(self.theta)))


@dataclass(frozen=True)
class SingleCoherent:
    """Coherent light in port 1, vacuum in port 0."""

    alpha: ComplexAmplitude


@dataclass(frozen=True)
class DoubleCoherent:
    """Coherent ``alpha`` in port 1 and coherent ``beta`` in port 0."""

    alpha: ComplexAmplitude
    beta: ComplexAmplitude


@dataclass(frozen=True)
class CoherentSqueezedVacuum:
    """Coherent ``alpha`` in port 1 and squeezed vacuum in port 0."""

    alpha: ComplexAmplitude
    xi: SqueezeParameter


InputState = Union[SingleCoherent, DoubleCoherent, CoherentSqueezedVacuum]


class DetectionScheme(str, Enum):
    DIFFERENCE = "diff"
    SINGLE = "single"
    HOMODYNE = "homodyne"  # bound formulas only, no moments


def single_coherent(alpha: float, theta_alpha: float = 0.0) -> SingleCoherent:
    return SingleCoherent(ComplexAmplitude(alpha, theta_alpha))


def double_coherent(
    alpha: float, beta: float, theta_alpha: float = 0.0, theta_beta: float = 0.0
) -> DoubleCoherent:
    return DoubleCoherent(
        ComplexAmplitude(alpha, theta_alpha), ComplexAmplitude(beta, theta_beta)
    )


def coherent_squeezed(
    alpha: float, r: float, theta_alpha: float = 0.0, theta: float = 0.0
) -> CoherentSqueezedVacuum:
    return CoherentSqueezedVacuum(
        ComplexAmplitude(alpha, theta_alpha), SqueezeParameter(r, theta)
    )


def power_ratio(state: DoubleCoherent) -> float:
    """Amplitude ratio ``|beta| / |alpha|``."""
    if not isinstance(state, DoubleCoherent):
        raise TypeError("power_ratio is defined for DoubleCoherent inputs only")
    if state.alpha.modulus == 0:
        raise DegenerateInput("power ratio undefined for |alpha| = 0")
    return state.beta.modulus / state.alpha.modulus


def relative_phase(state: DoubleCoherent) -> float:
    """Phase difference ``theta_alpha - theta_beta`` on (-pi, pi]."""
    if not isinstance(state, DoubleCoherent):
        raise TypeError("relative_phase is defined for DoubleCoherent inputs only")
    return wrap_phase(state.alpha.phase - state.beta.phase)


def mean_photon_number(state: InputState) -> float:
    if isinstance(state, SingleCoherent):
        return state.alpha.modulus**2
    if isinstance(state, DoubleCoherent):
        return state.alpha.modulus**2 + state.beta.modulus**2
    if isinstance(state, CoherentSqueezedVacuum):
        return state.alpha.modulus**2 + math.sinh(state.xi.r) ** 2
    raise TypeError(f"not an input state: {state!r}")
