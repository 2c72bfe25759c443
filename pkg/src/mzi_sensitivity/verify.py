"""Cross-checks between the closed forms and the Fock-space oracle."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import analytic, fock_oracle
from .analytic import MomentSet
from .errors import SensitivityError
from .states import (
    DetectionScheme,
    DoubleCoherent,
    InputState,
    coherent_squeezed,
    double_coherent,
    single_coherent,
)

MOMENT_RTOL = 1e-6
DEFICIT_LIMIT = 1e-10
CONSERVATION_TOL = 1e-10
REDUCTION_RTOL = 1e-12
DOMINANCE_RTOL = 1e-9

INTENSITY_SCHEMES = (DetectionScheme.DIFFERENCE, DetectionScheme.SINGLE)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    samples: int

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.name:<22} max error {self.max_error:.3e} "
            f"(tolerance {self.tolerance:.0e}, {self.samples} samples)"
        )


def relative_error(a: float, b: float, floor: float = 1.0) -> float:
    """``|a - b|`` scaled by the larger magnitude, never by less than ``floor``."""
    return abs(a - b) / max(abs(a), abs(b), floor)


def moment_error(a: MomentSet, b: MomentSet) -> float:
    return max(
        relative_error(a.mean, b.mean),
        relative_error(a.variance, b.variance),
        relative_error(a.d_mean_d_phi, b.d_mean_d_phi),
    )


def oracle_grid(scale: str) -> tuple[list[InputState], list[float]]:
    """Small-amplitude states and phases for the three-way moment comparison."""
    if scale == "full":
        alphas, ratios, squeezes = (0.0, 0.5, 1.0, 2.0), (0.0, 0.5, 1.0), (0.0, 0.3, 0.8)
        dthetas, theta_alphas = (0.0, math.pi / 4, math.pi / 2), (0.0, math.pi / 3)
        phis = [2 * math.pi * j / 18 for j in range(1, 18)]
    elif scale == "quick":
        alphas, ratios, squeezes = (0.5, 2.0), (0.0, 1.0), (0.3, 0.8)
        dthetas, theta_alphas = (0.0, math.pi / 4), (0.0, math.pi / 3)
        phis = [2 * math.pi * j / 6 for j in range(1, 6)]
    else:
        raise ValueError(f"unknown scale {scale!r}; use 'quick' or 'full'")

    states: list[InputState] = []
    for a, ta in itertools.product(alphas, theta_alphas):
        states.append(single_coherent(a, ta))
    for a, w, dt, ta in itertools.product(alphas, ratios, dthetas, theta_alphas):
        states.append(double_coherent(a, w * a, ta, ta - dt))
    for a, r, ta in itertools.product(alphas, squeezes, theta_alphas):
        states.append(coherent_squeezed(a, r, ta))
    return states, phis


def _check(name, errors, tol, strict=False) -> CheckResult:
    worst = max(errors) if errors else 0.0
    passed = worst < tol if strict else worst <= tol
    return CheckResult(name, passed, worst, tol, len(errors))


def oracle_checks(scale: str) -> list[CheckResult]:
    states, phis = oracle_grid(scale)
    moment_errs, deficits, conservation, unitarity, coherent_out = [], [], [], [], []
    for state in states:
        prepared = fock_oracle.prepare(state)
        deficits.append(prepared.norm_deficit)
        expectations = fock_oracle.input_expectations(prepared.amplitudes)
        n_in = sum(prepared.mean_photon_numbers())
        for phi in phis:
            out = fock_oracle.apply_mzi(prepared, phi)
            n4, n5 = out.mean_photon_numbers()
            conservation.append(abs(n4 + n5 - n_in) / max(1.0, n_in))
            unitarity.append(abs(out.norm - prepared.norm) / (10 * prepared.norm_deficit + 1e-13))
            for scheme in INTENSITY_SCHEMES:
                direct = fock_oracle.observable_moments(out, scheme)
                assembled = fock_oracle.normal_ordered_moments(
                    prepared, phi, scheme, expectations=expectations
                )
                errs = [moment_error(direct, assembled)]
                try:
                    errs.append(moment_error(analytic.moments(state, scheme, phi), direct))
                    errs.append(moment_error(analytic.moments(state, scheme, phi), assembled))
                except SensitivityError:
                    pass
                moment_errs.append(max(errs))
                if isinstance(state, DoubleCoherent) and scheme is DetectionScheme.SINGLE:
                    coherent_out.append(relative_error(direct.variance, direct.mean))
    return [
        _check("moment_equivalence", moment_errs, MOMENT_RTOL),
        _check("norm_deficit", deficits, DEFICIT_LIMIT, strict=True),
        _check("photon_conservation", conservation, CONSERVATION_TOL),
        # errors here are already divided by the allowed drift
        _check("unitarity", unitarity, 1.0, strict=True),
        _check("coherent_output", coherent_out, MOMENT_RTOL),
    ]


def reduction_checks(samples: int, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    errs_r, errs_w = [], []
    for _ in range(samples):
        a = float(rng.uniform(0.1, 1e3))
        phi = float(rng.uniform(0.0, 2 * math.pi))
        for scheme in INTENSITY_SCHEMES:
            ref = analytic.delta_phi(single_coherent(a), scheme, phi)[0]
            squeezed = analytic.delta_phi(coherent_squeezed(a, 0.0), scheme, phi)[0]
            double = analytic.delta_phi(double_coherent(a, 0.0), scheme, phi)[0]
            errs_r.append(relative_error(squeezed, ref, floor=0.0))
            errs_w.append(relative_error(double, ref, floor=0.0))
    return [
        _check("reduction_r0", errs_r, REDUCTION_RTOL),
        _check("reduction_ratio0", errs_w, REDUCTION_RTOL),
    ]


def random_state(rng: np.random.Generator) -> InputState:
    kind = rng.integers(3)
    a = float(10 ** rng.uniform(-1, 4))
    ta = float(rng.uniform(-math.pi, math.pi))
    if kind == 0:
        return single_coherent(a, ta)
    if kind == 1:
        w = float(rng.uniform(0, 3))
        return double_coherent(a, w * a, ta, float(rng.uniform(-math.pi, math.pi)))
    return coherent_squeezed(a, float(rng.uniform(0, 2.5)), ta)


def dominance_check(samples: int, seed: int = 1) -> CheckResult:
    """Count samples where a sensitivity beats the QCRB by more than the tolerance."""
    rng = np.random.default_rng(seed)
    violations = []
    taken = 0
    while taken < samples:
        state = random_state(rng)
        scheme = INTENSITY_SCHEMES[rng.integers(2)]
        phi = float(rng.uniform(0.0, 2 * math.pi))
        try:
            value = analytic.delta_phi(state, scheme, phi)[0]
            bound = analytic.qcrb(state)
        except SensitivityError:
            continue
        if not math.isfinite(value):
            continue
        taken += 1
        violations.append(max(0.0, (bound - value) / bound))
    return _check("qcrb_dominance", violations, DOMINANCE_RTOL)


def run_verify(scale: str = "quick") -> list[CheckResult]:
    samples = 200 if scale == "quick" else 2000
    return [*oracle_checks(scale), *reduction_checks(samples // 2), dominance_check(samples * 5)]
