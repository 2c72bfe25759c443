"""Brute-force reference: two-mode states in a truncated Fock basis.

Input amplitudes are indexed ``[n0, n1]`` (ports 0 and 1); interferometer
outputs are indexed ``[n4, n5]``.  The interferometer conserves the total
photon number, so it acts block-wise on each sector ``n0 + n1 = N`` through
a spin-N/2 rotation.  Each block is built from the eigenvectors of its
generator, so no series is ever truncated.

Nothing here uses the closed forms of :mod:`mzi_sensitivity.analytic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import stats

from .analytic import MomentSet
from .errors import TruncationTooSmall, UnsupportedScheme
from .states import (
    CoherentSqueezedVacuum,
    DetectionScheme,
    DoubleCoherent,
    InputState,
    SingleCoherent,
)

FIXED_DEFICIT_LIMIT = 1e-6
MAX_AMPLITUDE = 6.0
MAX_SQUEEZING = 1.2
DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class TruncationPolicy:
    """Either a fixed cutoff ``n_max`` or an adaptive norm-deficit target."""

    n_max: Optional[int] = None
    target_norm_deficit: float = 1e-10

    def __post_init__(self) -> None:
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be a positive integer")
        if not (0.0 < self.target_norm_deficit <= 1e-6):
            raise ValueError("target_norm_deficit must lie in (0, 1e-6]")

    @classmethod
    def fixed(cls, n_max: int) -> TruncationPolicy:
        return cls(n_max=n_max)

    @classmethod
    def adaptive(cls, target_norm_deficit: float = 1e-10) -> TruncationPolicy:
        return cls(target_norm_deficit=target_norm_deficit)


@dataclass(frozen=True, eq=False)
class FockState:
    """Dense amplitudes over a two-mode Fock grid.

    ``norm_deficit`` is the probability the truncation dropped.  Output
    states keep the phase they were produced at and their input state, so
    phase derivatives can be taken by re-running the interferometer.
    """

    amplitudes: np.ndarray
    norm_deficit: float
    phi: Optional[float] = None
    source: Optional["FockState"] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2:
            raise ValueError("amplitudes must be a 2-D array indexed by photon numbers")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_max(self) -> int:
        return max(self.amplitudes.shape) - 1

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def mean_photon_numbers(self) -> tuple[float, float]:
        p = self.probabilities()
        n_first = np.arange(p.shape[0])
        n_second = np.arange(p.shape[1])
        return float(n_first @ p.sum(axis=1)), float(n_second @ p.sum(axis=0))


# --- single-mode factors -------------------------------------------------


def _coherent_amplitudes(value: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    amps = np.zeros(n_max + 1, dtype=complex)
    modulus = abs(value)
    if modulus == 0:
        amps[0] = 1.0
        return amps
    log_mag = -0.5 * modulus**2 + n * math.log(modulus) - 0.5 * np.array(
        [math.lgamma(k + 1) for k in n]
    )
    return np.exp(log_mag) * np.exp(1j * n * np.angle(value))


def _squeezed_amplitudes(r: float, theta: float, n_max: int) -> np.ndarray:
    amps = np.zeros(n_max + 1, dtype=complex)
    ratio = -np.exp(1j * theta) * math.tanh(r)
    term = 1.0 / math.sqrt(math.cosh(r))
    amps[0] = term
    for m in range(1, n_max // 2 + 1):
        term = term * ratio * math.sqrt((2 * m - 1) / (2 * m))
        amps[2 * m] = term
    return amps


def _coherent_tail(modulus: float, n_max: int) -> float:
    if modulus == 0:
        return 0.0
    return float(stats.poisson.sf(n_max, modulus**2))


def _squeezed_tail(r: float, n_max: int) -> float:
    # photon pairs follow a negative binomial law with n = 1/2, p = 1/cosh^2 r
    if r == 0:
        return 0.0
    return float(stats.nbinom.sf(n_max // 2, 0.5, 1.0 / math.cosh(r) ** 2))


def _port_factors(state: InputState):
    """``(kind, parameter, phase)`` for ports 0 and 1."""
    if isinstance(state, SingleCoherent):
        port0 = ("vacuum", 0.0, 0.0)
    elif isinstance(state, DoubleCoherent):
        port0 = ("coherent", state.beta.value, 0.0)
    elif isinstance(state, CoherentSqueezedVacuum):
        port0 = ("squeezed", state.xi.r, state.xi.theta)
    else:
        raise TypeError(f"not an input state: {state!r}")
    return port0, ("coherent", state.alpha.value, 0.0)


def _factor(kind: str, param, theta: float, n_max: int) -> tuple[np.ndarray, float]:
    if kind == "vacuum":
        return _coherent_amplitudes(0.0, n_max), 0.0
    if kind == "coherent":
        return _coherent_amplitudes(param, n_max), _coherent_tail(abs(param), n_max)
    return _squeezed_amplitudes(param, theta, n_max), _squeezed_tail(param, n_max)


def _adaptive_cutoff(kind: str, p: complex, target: float) -> int:
    if kind == "vacuum" or p == 0:
        return 1
    n = 1
    tail = _coherent_tail if kind == "coherent" else _squeezed_tail
    scale = abs(p)
    while tail(scale, n) > target:
        n += 1
    return n


def _check_desk_scale(state: InputState) -> None:
    moduli = [state.alpha.modulus]
    if isinstance(state, DoubleCoherent):
        moduli.append(state.beta.modulus)
    if max(moduli) > MAX_AMPLITUDE:
        raise ValueError(f"coherent amplitudes above {MAX_AMPLITUDE} are outside oracle range")
    if isinstance(state, CoherentSqueezedVacuum) and state.xi.r > MAX_SQUEEZING:
        raise ValueError(f"squeezing above r = {MAX_SQUEEZING} is outside oracle range")


def prepare(state: InputState, policy: TruncationPolicy | None = None) -> FockState:
    """Product input state ``|port0> (x) |port1>`` on a square Fock grid."""
    policy = policy or TruncationPolicy()
    port0, port1 = _port_factors(state)
    if policy.n_max is None:
        _check_desk_scale(state)
        half = 0.5 * policy.target_norm_deficit
        n_max = max(_adaptive_cutoff(*port0[:2], half), _adaptive_cutoff(*port1[:2], half))
    else:
        n_max = policy.n_max

    f0, d0 = _factor(*port0, n_max)
    f1, d1 = _factor(*port1, n_max)
    deficit = d0 + d1 - d0 * d1
    if policy.n_max is not None and deficit > FIXED_DEFICIT_LIMIT:
        raise TruncationTooSmall(
            f"n_max = {n_max} loses {deficit:.3g} of the norm (limit {FIXED_DEFICIT_LIMIT})"
        )
    return FockState(np.outer(f0, f1), deficit)


# --- interferometer --------------------------------------------------------


@lru_cache(maxsize=None)
def _block_eigensystem(total: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors and (integer) eigenvalues of i(a1^dag a0 - a0^dag a1) on one sector.

    Basis ``|k, total - k>`` with ``k`` photons in the first mode.
    """
    k = np.arange(1, total + 1)
    hop = np.sqrt(k * (total - k + 1.0))
    gen = np.zeros((total + 1, total + 1))
    # a1^dag a0 lowers k, a0^dag a1 raises it
    gen[k - 1, k] = hop
    gen[k, k - 1] = -hop
    values, vectors = np.linalg.eigh(1j * gen)
    values = np.round(values)
    vectors.setflags(write=False)
    values.setflags(write=False)
    return vectors, values


def _rotation_angle(phi: float) -> float:
    # creation operators of ports (0, 1) map onto outputs (4, 5) through
    # [[-sin(phi/2), cos(phi/2)], [cos(phi/2), sin(phi/2)]]: a parity flip on
    # port 1 followed by a rotation by phi/2 + pi/2
    return 0.5 * phi + 0.5 * math.pi


def apply_mzi(state: FockState, phi: float) -> FockState:
    """Propagate an input state through the interferometer at phase ``phi``.

    Realises ``a4^dag = -sin(phi/2) a0^dag + cos(phi/2) a1^dag`` and
    ``a5^dag = cos(phi/2) a0^dag + sin(phi/2) a1^dag`` up to a global phase.
    """
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi!r}")
    amps = state.amplitudes
    d0, d1 = amps.shape
    out_dim = d0 + d1 - 1
    out = np.zeros((out_dim, out_dim), dtype=complex)
    theta = _rotation_angle(phi)
    for total in range(out_dim):
        lo, hi = max(0, total - (d1 - 1)), min(total, d0 - 1)
        if lo > hi:
            continue
        k = np.arange(lo, hi + 1)
        block = np.zeros(total + 1, dtype=complex)
        block[k] = amps[k, total - k] * np.where((total - k) % 2, -1.0, 1.0)
        if not block.any():
            continue
        vectors, values = _block_eigensystem(total)
        rotated = vectors @ (np.exp(-1j * theta * values) * (vectors.conj().T @ block))
        m = np.arange(total + 1)
        out[m, total - m] = rotated
    return FockState(out, state.norm_deficit, phi=phi, source=state)


def _observable(scheme: DetectionScheme, shape: tuple[int, int]) -> np.ndarray:
    n4 = np.arange(shape[0])[:, None]
    n5 = np.arange(shape[1])[None, :]
    if scheme is DetectionScheme.DIFFERENCE:
        return (n4 - n5).astype(float)
    return np.broadcast_to(n4, shape).astype(float)


def _mean_and_second(state: FockState, scheme: DetectionScheme) -> tuple[float, float]:
    p = state.probabilities()
    obs = _observable(scheme, p.shape)
    return float(np.sum(p * obs)), float(np.sum(p * obs * obs))


def observable_moments(
    state: FockState, scheme: DetectionScheme, step: float = DEFAULT_STEP
) -> MomentSet:
    """Moments of ``N4 - N5`` or ``N4`` by direct summation over the output distribution.

    The phase slope is a central difference over two extra interferometer runs.
    """
    scheme = DetectionScheme(scheme)
    if scheme is DetectionScheme.HOMODYNE:
        raise UnsupportedScheme("homodyne detection has no photon-count observable")
    if state.phi is None or state.source is None:
        raise ValueError("observable_moments expects an output state from apply_mzi")
    mean, second = _mean_and_second(state, scheme)
    plus, _ = _mean_and_second(apply_mzi(state.source, state.phi + step), scheme)
    minus, _ = _mean_and_second(apply_mzi(state.source, state.phi - step), scheme)
    return MomentSet(mean, max(second - mean * mean, 0.0), (plus - minus) / (2 * step))


# --- normally ordered input expectations ----------------------------------


def _lower(amps: np.ndarray, k0: int, k1: int) -> np.ndarray:
    """Apply ``a0^k0 a1^k1`` to a truncated state (exact, shrinks the grid)."""
    d0, d1 = amps.shape
    if k0 >= d0 or k1 >= d1:
        return np.zeros((0, 0), dtype=complex)
    n0 = np.arange(d0 - k0)
    n1 = np.arange(d1 - k1)
    w0 = np.sqrt([math.perm(n + k0, k0) for n in n0])
    w1 = np.sqrt([math.perm(n + k1, k1) for n in n1])
    return amps[k0:, k1:] * np.outer(w0, w1)


def normal_ordered(amps: np.ndarray, p0: int, p1: int, q0: int, q1: int) -> complex:
    """``<(a0^dag)^p0 (a1^dag)^p1 a0^q0 a1^q1>`` on unnormalised amplitudes."""
    left = _lower(amps, p0, p1)
    right = _lower(amps, q0, q1)
    r0 = min(left.shape[0], right.shape[0])
    r1 = min(left.shape[1], right.shape[1])
    return complex(np.vdot(left[:r0, :r1], right[:r0, :r1]))


def input_expectations(amps: np.ndarray) -> dict[str, float]:
    """Normally ordered input expectation values entering the first two moments.

    Hermitian-conjugate pairs are summed, so every entry is real.
    """

    def ev(p0, p1, q0, q1):
        return normal_ordered(amps, p0, p1, q0, q1)

    return {
        "n0": ev(1, 0, 1, 0).real,
        "n1": ev(0, 1, 0, 1).real,
        "hop": (ev(0, 1, 1, 0) + ev(1, 0, 0, 1)).real,  # <a0 a1^dag> + <a0^dag a1>
        "pairs0": ev(2, 0, 2, 0).real,
        "pairs1": ev(0, 2, 0, 2).real,
        "n0n1": ev(1, 1, 1, 1).real,
        "swap2": (ev(0, 2, 2, 0) + ev(2, 0, 0, 2)).real,
        "mixed0": (ev(1, 1, 2, 0) + ev(2, 0, 1, 1)).real,
        "mixed1": (ev(0, 2, 1, 1) + ev(1, 1, 0, 2)).real,
    }


def normal_ordered_moments(
    state: InputState | FockState,
    phi: float,
    scheme: DetectionScheme,
    policy: TruncationPolicy | None = None,
    expectations: dict[str, float] | None = None,
) -> MomentSet:
    """Moments assembled from normally ordered input expectation values.

    The trigonometric coefficients come from expanding ``N_d^2`` and
    ``N4^2`` through the output mode map; the expectation values are
    evaluated numerically on the truncated input state.  Pass
    ``expectations`` to reuse them across phases.
    """
    scheme = DetectionScheme(scheme)
    if scheme is DetectionScheme.HOMODYNE:
        raise UnsupportedScheme("homodyne detection has no photon-count observable")
    if expectations is None:
        prepared = state if isinstance(state, FockState) else prepare(state, policy)
        expectations = input_expectations(prepared.amplitudes)
    e = expectations
    n0, n1, hop = e["n0"], e["n1"], e["hop"]

    sin_phi, cos_phi = math.sin(phi), math.cos(phi)
    s2, c2 = math.sin(phi / 2) ** 2, math.cos(phi / 2) ** 2

    if scheme is DetectionScheme.DIFFERENCE:
        mean = cos_phi * (n1 - n0) - sin_phi * hop
        slope = -sin_phi * (n1 - n0) - cos_phi * hop
        second = (
            cos_phi**2 * (e["pairs0"] + e["pairs1"])
            - 2 * math.cos(2 * phi) * e["n0n1"]
            + n0
            + n1
            + sin_phi**2 * e["swap2"]
            + math.sin(2 * phi) * (e["mixed0"] - e["mixed1"])
        )
    else:
        mean = s2 * n0 + c2 * n1 - 0.5 * sin_phi * hop
        slope = 0.5 * sin_phi * (n0 - n1) - 0.5 * cos_phi * hop
        second = (
            s2 * s2 * e["pairs0"]
            + c2 * c2 * e["pairs1"]
            + sin_phi**2 * e["n0n1"]
            + s2 * n0
            + c2 * n1
            + 0.25 * sin_phi**2 * e["swap2"]
            - s2 * sin_phi * e["mixed0"]
            - c2 * sin_phi * e["mixed1"]
            - 0.5 * sin_phi * hop
        )
    return MomentSet(mean, max(second - mean * mean, 0.0), slope)


def oracle_moments(
    state: InputState,
    scheme: DetectionScheme,
    phi: float,
    policy: TruncationPolicy | None = None,
    step: float = DEFAULT_STEP,
) -> MomentSet:
    """Prepare, propagate and count in one call."""
    return observable_moments(apply_mzi(prepare(state, policy), phi), scheme, step)
