import math
import warnings

import numpy as np
import pytest

from sptfermi import (HarmonicPair, NonInteracting, SquareWellContinued, compute_scattering_length,
                      evaluate_pair_potential, pair_potential_derivatives, tune_unitarity,
                      unitary_well)
from sptfermi.interaction import pair_potential_delta_derivative

MODELS = [HarmonicPair(0.3), SquareWellContinued(0.05, 7.0), unitary_well(0.01)]


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("delta", [0.0, 0.05, 0.1])
def test_radial_derivatives_match_finite_differences(model, delta):
    r = np.linspace(0.2, 2.5, 9)
    h = 1e-5
    v, d1, d2 = pair_potential_derivatives(model, r, delta)
    vp = evaluate_pair_potential(model, r + h, delta)
    vm = evaluate_pair_potential(model, r - h, delta)
    np.testing.assert_allclose(d1, (vp - vm) / (2 * h), rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(d2, (vp - 2 * v + vm) / h**2, rtol=1e-4, atol=1e-5)


@pytest.mark.parametrize("model", [SquareWellContinued(0.05, 7.0), HarmonicPair(0.2)])
def test_delta_derivative_matches_finite_difference(model):
    r = np.linspace(0.3, 2.0, 7)
    h = 1e-6
    fd = (evaluate_pair_potential(model, r, 0.02 + h)
          - evaluate_pair_potential(model, r, 0.02 - h)) / (2 * h)
    np.testing.assert_allclose(pair_potential_delta_derivative(model, r, 0.02), fd,
                               rtol=1e-6, atol=1e-9)


def test_ideal_gas_potential_vanishes():
    v, d1, d2 = pair_potential_derivatives(NonInteracting(), np.array([0.5, 1.0]))
    assert not v.any() and not d1.any() and not d2.any()


def test_harmonic_pair_is_quadratic():
    assert evaluate_pair_potential(HarmonicPair(0.4), 2.0) == pytest.approx(0.8)


def test_well_becomes_step_at_three_dimensions():
    well = SquareWellContinued(0.3, 6.0)
    rb = well.scaled_radius
    v = evaluate_pair_potential(well, np.array([0.5 * rb, 2 * rb]), 1 / 3)
    depth = 1.0 / (1.0 - well.b)
    np.testing.assert_allclose(v, [2 * depth, 0.0])
    # scaled depth 2/(b-1) times 3/2 is the laboratory depth
    assert -2 * depth * 1.5 == pytest.approx(well.depth)


def test_well_large_d_limit_independent_of_parameters():
    r = np.linspace(0.1, 3, 5)
    a = evaluate_pair_potential(SquareWellContinued(0.01, 3.0), r, 0.0)
    b = evaluate_pair_potential(SquareWellContinued(0.2, 900.0), r, 0.0)
    np.testing.assert_allclose(a, b)
    np.testing.assert_allclose(a, 1 - np.tanh(r))


def test_well_rejects_delta_beyond_three_dimensions():
    with pytest.raises(ValueError):
        evaluate_pair_potential(SquareWellContinued(0.1, 5.0), 1.0, 0.4)


def test_well_parameter_validation():
    with pytest.raises(ValueError):
        SquareWellContinued(-0.1, 5.0)
    with pytest.raises(ValueError):
        SquareWellContinued(0.1, 0.0)
    with pytest.raises(ValueError):
        SquareWellContinued.from_b(0.1, 0.5)
    with pytest.warns(UserWarning):
        SquareWellContinued(1.5, 5.0)


def test_from_b_round_trip():
    w = SquareWellContinued.from_b(0.02, 1.25)
    assert w.b == pytest.approx(1.25)
    assert w.depth == pytest.approx(12.0)


def test_scattering_length_weak_well_is_born_limit():
    # Born approximation: a_s ~ -(2 mu / hbar^2) V0 R^3 / 3 with mu = 1/2
    r, v = 0.01, 10.0
    s = compute_scattering_length(v, r)
    assert s.scattering_length == pytest.approx(-v * r**3 / 3, rel=1e-3)


@pytest.mark.parametrize("x", [0.3, 1.0, 1.5, 1.6, 2.5, 4.0])
def test_closed_form_matches_integration(x):
    r = 0.02
    s = compute_scattering_length((x / r) ** 2, r)
    assert s.numerical_inverse == pytest.approx(s.closed_form_inverse, rel=1e-8, abs=1e-8)


def test_scattering_length_sign_changes_through_resonance():
    r = 0.01
    below = compute_scattering_length((1.5 / r) ** 2, r)
    above = compute_scattering_length((1.65 / r) ** 2, r)
    assert below.scattering_length < 0 < above.scattering_length


@pytest.mark.parametrize("radius", [0.001, 0.01, 0.1])
def test_tuning_reaches_resonance(radius):
    t = tune_unitarity(radius)
    assert abs(t.inverse_scattering_length) < 1e-10
    assert t.k0_radius == pytest.approx(math.pi / 2, abs=1e-9)
    assert t.v_depth == pytest.approx(math.pi**2 / (4 * radius**2), rel=1e-9)
    s = compute_scattering_length(t.v_depth, radius)
    assert s.near_resonance and s.scattering_length is None


def test_tuning_warns_for_wide_well():
    with pytest.warns(UserWarning):
        tune_unitarity(1.2)


def test_unitary_well_fingerprint_is_stable():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert unitary_well(0.01).fingerprint() == unitary_well(0.01).fingerprint()
