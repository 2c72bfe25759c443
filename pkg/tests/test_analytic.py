import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DIFF, HOMODYNE, SINGLE, rel
from mzi_sensitivity import analytic
from mzi_sensitivity.analytic import LossModel, MomentSet
from mzi_sensitivity.errors import (
    DegenerateInput,
    SingularPoint,
    UnsupportedParameter,
    UnsupportedScheme,
)
from mzi_sensitivity.estimator import sensitivity_from_moments
from mzi_sensitivity.states import coherent_squeezed, double_coherent, single_coherent

phases = st.floats(0.05, 2 * math.pi - 0.05)
amplitudes = st.floats(0.1, 1e3)
angles = st.floats(-math.pi, math.pi)


def test_single_coherent_diff_moments():
    m = analytic.moments(single_coherent(3.0), DIFF, 0.4)
    assert m.mean == pytest.approx(math.cos(0.4) * 9)
    assert m.variance == pytest.approx(9)
    assert m.d_mean_d_phi == pytest.approx(-math.sin(0.4) * 9)


def test_single_coherent_dark_port():
    assert analytic.moments(single_coherent(5.0), SINGLE, math.pi).mean == pytest.approx(0, abs=1e-28)


def test_moments_reject_homodyne_and_complex_squeeze():
    with pytest.raises(UnsupportedScheme):
        analytic.moments(single_coherent(1.0), HOMODYNE, 0.3)
    with pytest.raises(UnsupportedParameter):
        analytic.moments(coherent_squeezed(1.0, 0.3, 0.0, 0.2), DIFF, 0.3)


def test_moment_set_rejects_negative_variance():
    with pytest.raises(ValueError):
        MomentSet(0.0, -1.0, 0.0)


def test_sensitivity_examples():
    assert analytic.delta_phi(single_coherent(1e4), DIFF, math.pi / 2)[0] == pytest.approx(1e-4, rel=1e-14)
    assert analytic.delta_phi(single_coherent(1.0), SINGLE, math.pi)[0] == pytest.approx(1.0, rel=1e-15)
    report = analytic.sensitivity(single_coherent(1e4), SINGLE, math.pi)
    assert report.ratio_to_qcrb == pytest.approx(1.0, rel=1e-12)


def test_blind_point_is_infinite():
    assert analytic.delta_phi(single_coherent(2.0), DIFF, 0.0)[0] == math.inf
    assert analytic.delta_phi(coherent_squeezed(2.0, 0.3), DIFF, 0.0)[0] == math.inf


def test_squeezed_singular_point():
    state = coherent_squeezed(math.sinh(0.7), 0.7)  # |alpha| = sinh r exactly
    with pytest.raises(SingularPoint):
        analytic.delta_phi(state, DIFF, 1.0)
    with pytest.raises(SingularPoint):
        analytic.best_sensitivity(state, SINGLE)


def test_qcrb_examples():
    assert analytic.qcrb(single_coherent(1e4)) == pytest.approx(1e-4, rel=1e-15)
    for w in (0.0, 0.3, 1.0, 2.5):
        expected = 1 / (7.0 * math.sqrt(1 + w * w))
        assert analytic.qcrb(double_coherent(7.0, 7.0 * w)) == pytest.approx(expected, rel=1e-14)
    expected = 1 / math.sqrt(100 * math.exp(4.6) + math.sinh(2.3) ** 2)
    assert analytic.qcrb(coherent_squeezed(10.0, 2.3)) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(DegenerateInput):
        analytic.qcrb(coherent_squeezed(0.0, 0.0))


def test_fisher_matrix_examples():
    np.testing.assert_allclose(analytic.fisher_matrix(double_coherent(1, 1)), [[2, 0], [0, 2]])
    np.testing.assert_allclose(analytic.fisher_matrix(double_coherent(1, 0)), [[1, 0], [0, 1]])
    f = analytic.fisher_matrix(double_coherent(2, 1, math.pi / 2, 0.0))
    np.testing.assert_allclose(f, [[5, -4], [-4, 5]], atol=1e-14)
    assert math.sqrt(np.linalg.inv(f)[1, 1]) == pytest.approx(math.sqrt(5 / 9), rel=1e-14)
    with pytest.raises(DegenerateInput):
        analytic.fisher_matrix(double_coherent(1, 1, math.pi / 2, 0.0))


def test_optimal_phase_examples():
    assert analytic.optimal_phase(single_coherent(1.0), DIFF) == pytest.approx(math.pi / 2)
    assert analytic.optimal_phase(single_coherent(1.0), DIFF, k=1) == pytest.approx(3 * math.pi / 2)
    assert analytic.optimal_phase(double_coherent(2.0, 2.0), DIFF) == pytest.approx(0.0, abs=1e-15)
    assert analytic.optimal_phase(double_coherent(2.0, 2.0), SINGLE) == pytest.approx(math.pi / 2)
    with pytest.raises(UnsupportedScheme):
        analytic.optimal_phase(single_coherent(1.0), HOMODYNE)
    with pytest.raises(UnsupportedParameter):
        analytic.optimal_phase(coherent_squeezed(1.0, 0.2, 0.4), DIFF)


def test_balanced_diff_optimum_is_numerically_minimal():
    state = double_coherent(2.0, 2.0)
    best = analytic.delta_phi(state, DIFF, 0.0)[0]
    grid = np.linspace(0.01, math.pi - 0.01, 500)
    assert all(analytic.delta_phi(state, DIFF, float(x))[0] >= best for x in grid)


def test_best_sensitivity_examples():
    assert analytic.best_sensitivity(single_coherent(5.0), DIFF) == pytest.approx(0.2)
    assert analytic.best_sensitivity(single_coherent(5.0), SINGLE) == pytest.approx(0.2)
    sh2 = math.sinh(2.3) ** 2
    expected = math.sqrt(sh2 + 100 * math.exp(-4.6)) / abs(100 - sh2)
    got = analytic.best_sensitivity(coherent_squeezed(10.0, 2.3), DIFF)
    assert got == pytest.approx(expected, rel=1e-13)


def test_homodyne_bounds():
    assert analytic.delta_phi(coherent_squeezed(10.0, 2.3), HOMODYNE, 0.3)[0] == pytest.approx(
        math.exp(-2.3) / 10
    )
    s, c = math.sin(0.35), math.cos(0.35)
    got = analytic.delta_phi(double_coherent(3.0, 1.0), HOMODYNE, 0.7)[0]
    assert got == pytest.approx(1 / (3 * s + c))
    with pytest.raises(UnsupportedParameter):
        analytic.delta_phi(double_coherent(3.0, 1.0, 0.5, 0.0), HOMODYNE, 0.7)


def test_loss_examples():
    assert analytic.qcrb_with_loss(single_coherent(10.0), LossModel(0.0)) == pytest.approx(0.1)
    state = coherent_squeezed(10.0, 2.3)
    assert analytic.qcrb_with_loss(state, LossModel(0.01)) > analytic.qcrb_with_loss(state, LossModel(0.0))
    big = coherent_squeezed(1e4, 2.3)
    assert analytic.qcrb_with_loss(big, LossModel(0.0)) == pytest.approx(math.exp(-2.3) / 1e4, rel=1e-10)
    with pytest.raises(UnsupportedParameter):
        analytic.qcrb_with_loss(double_coherent(1.0, 1.0), LossModel(0.1))
    with pytest.raises(ValueError):
        LossModel(1.0)


# --- properties ----------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(a=amplitudes, w=st.floats(0, 3), dt=angles, ta=angles, phi=phases)
def test_double_coherent_delta_phi_matches_moments(a, w, dt, ta, phi):
    state = double_coherent(a, w * a, ta, ta - dt)
    for scheme in (DIFF, SINGLE):
        m = analytic.moments(state, scheme, phi)
        if abs(m.d_mean_d_phi) < 1e-6 * max(m.variance, 1.0):
            continue
        assert rel(analytic.delta_phi(state, scheme, phi)[0], sensitivity_from_moments(m)) < 1e-7


@settings(max_examples=300, deadline=None)
@given(a=amplitudes, r=st.floats(0, 2.5), ta=angles, phi=phases)
def test_squeezed_delta_phi_matches_moments(a, r, ta, phi):
    state = coherent_squeezed(a, r, ta)
    if abs(a * a - math.sinh(r) ** 2) < 1e-3 * a * a:
        return
    for scheme in (DIFF, SINGLE):
        m = analytic.moments(state, scheme, phi)
        if abs(m.d_mean_d_phi) < 1e-6 * max(math.sqrt(m.variance), 1.0):
            continue
        assert rel(analytic.delta_phi(state, scheme, phi)[0], sensitivity_from_moments(m)) < 1e-7


@settings(max_examples=300, deadline=None)
@given(a=amplitudes, w=st.floats(0, 3), dt=angles, phi=phases)
def test_qcrb_never_beaten(a, w, dt, phi):
    state = double_coherent(a, w * a, dt, 0.0)
    try:
        bound = analytic.qcrb(state)
    except DegenerateInput:
        return
    for scheme in (DIFF, SINGLE):
        assert analytic.delta_phi(state, scheme, phi)[0] >= bound * (1 - 1e-9)


@settings(max_examples=200, deadline=None)
@given(a=amplitudes, w=st.floats(0, 3))
def test_in_phase_optima_saturate_qcrb(a, w):
    state = double_coherent(a, w * a)
    for scheme in (DIFF, SINGLE):
        phi = analytic.optimal_phase(state, scheme)
        assert rel(analytic.delta_phi(state, scheme, phi)[0], analytic.qcrb(state)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(a=amplitudes, w=st.floats(0.01, 3), dt=angles)
def test_diff_optimum_saturates_qcrb_any_relative_phase(a, w, dt):
    state = double_coherent(a, w * a, dt, 0.0)
    try:
        bound = analytic.qcrb(state)
    except DegenerateInput:
        return
    phi = analytic.optimal_phase(state, DIFF)
    assert rel(analytic.delta_phi(state, DIFF, phi)[0], bound) < 1e-9


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0.5, 1e3), r=st.floats(0.05, 2.5))
def test_squeezed_best_matches_curve_at_optimum(a, r):
    state = coherent_squeezed(a, r)
    if abs(a * a - math.sinh(r) ** 2) < 1e-2 * a * a:
        return
    for scheme in (DIFF, SINGLE):
        phi = analytic.optimal_phase(state, scheme)
        assert rel(analytic.delta_phi(state, scheme, phi)[0], analytic.best_sensitivity(state, scheme)) < 1e-9


@settings(max_examples=200, deadline=None)
@given(a=amplitudes, w=st.floats(0, 3), dt=angles, phi=phases)
def test_slope_matches_finite_difference(a, w, dt, phi):
    state = double_coherent(a, w * a, dt, 0.0)
    h = 1e-6
    for scheme in (DIFF, SINGLE):
        m = analytic.moments(state, scheme, phi)
        fd = (analytic.moments(state, scheme, phi + h).mean - analytic.moments(state, scheme, phi - h).mean) / (2 * h)
        assert abs(fd - m.d_mean_d_phi) <= 1e-6 * max(abs(m.d_mean_d_phi), m.mean, 1.0)


@settings(max_examples=100, deadline=None)
@given(a=st.floats(0.5, 1e3), r=st.floats(0, 2.5))
def test_loss_increases_bound(a, r):
    # below |alpha| ~ 0.5 the squeezed formula can dip as sigma grows
    state = coherent_squeezed(a, r)
    values = [analytic.qcrb_with_loss(state, LossModel(s)) for s in (0.0, 0.1, 0.3, 0.6)]
    assert all(x < y for x, y in zip(values, values[1:]))
