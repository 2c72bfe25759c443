import math

import pytest

from mzi_sensitivity.errors import DegenerateInput
from mzi_sensitivity.states import (
    ComplexAmplitude,
    DetectionScheme,
    SqueezeParameter,
    coherent_squeezed,
    double_coherent,
    mean_photon_number,
    power_ratio,
    relative_phase,
    single_coherent,
    wrap_phase,
)


@pytest.mark.parametrize(
    "alpha, beta, expected", [(1e4, 5e3, 0.5), (1.0, 0.0, 0.0), (3.0, 3.0, 1.0)]
)
def test_power_ratio(alpha, beta, expected):
    assert power_ratio(double_coherent(alpha, beta)) == expected


def test_power_ratio_needs_alpha():
    state = double_coherent(0.0, 2.0)  # legal state
    with pytest.raises(DegenerateInput):
        power_ratio(state)


def test_mean_photon_number():
    assert mean_photon_number(single_coherent(1e4)) == pytest.approx(1e8, rel=1e-15)
    assert mean_photon_number(coherent_squeezed(0.0, 0.0)) == 0.0
    expected = 100 + math.sinh(2.3) ** 2
    assert mean_photon_number(coherent_squeezed(10.0, 2.3)) == pytest.approx(expected, rel=1e-14)
    assert mean_photon_number(double_coherent(3.0, 4.0)) == pytest.approx(25.0)


def test_relative_phase():
    assert relative_phase(double_coherent(1, 1, 0.3, 0.1)) == pytest.approx(0.2, abs=1e-15)
    assert relative_phase(double_coherent(1, 1)) == 0.0
    assert relative_phase(double_coherent(1, 1, -3.0, 3.0)) == pytest.approx(2 * math.pi - 6, abs=1e-14)


@pytest.mark.parametrize("phase", [-7.0, -math.pi, 0.0, math.pi, 3 * math.pi, 10.0])
def test_wrap_phase_range(phase):
    wrapped = wrap_phase(phase)
    assert -math.pi < wrapped <= math.pi
    assert math.cos(wrapped) == pytest.approx(math.cos(phase), abs=1e-12)
    assert math.sin(wrapped) == pytest.approx(math.sin(phase), abs=1e-12)


def test_complex_amplitude_roundtrip():
    amp = ComplexAmplitude.from_complex(complex(-1.0, 2.0))
    assert amp.value == pytest.approx(complex(-1.0, 2.0))


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_invalid_amplitude(bad):
    with pytest.raises(ValueError):
        ComplexAmplitude(bad)


def test_invalid_squeeze():
    with pytest.raises(ValueError):
        SqueezeParameter(-0.1)


def test_states_are_frozen():
    state = single_coherent(1.0)
    with pytest.raises(AttributeError):
        state.alpha = ComplexAmplitude(2.0)


def test_scheme_from_string():
    assert DetectionScheme("diff") is DetectionScheme.DIFFERENCE
    assert DetectionScheme("single") is DetectionScheme.SINGLE
