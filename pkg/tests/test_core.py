import math

import pytest

from sptfermi import (EnergyResult, HarmonicPair, SquareWellContinued, SystemSpec,
                      build_scaling_frame, scale_energy, unscale_energy)


def test_balanced_split_puts_extra_particle_up():
    spec = SystemSpec.balanced(7)
    assert (spec.n_up, spec.n_down) == (4, 3)
    assert spec.n_particles == 7
    assert spec.n_pairs == 21


@pytest.mark.parametrize("kwargs", [
    dict(n_up=0, n_down=1),
    dict(n_up=2, n_down=-1),
    dict(n_up=2, n_down=2, trap_frequency=0.0),
    dict(n_up=2, n_down=2, dimension_target=1),
])
def test_invalid_specs_rejected(kwargs):
    with pytest.raises(ValueError):
        SystemSpec(**kwargs)


def test_pair_weight_unlike_only_for_square_well():
    well = SquareWellContinued(0.01, 100.0)
    assert SystemSpec(3, 3, well).pair_weight() == pytest.approx(9 / 15)
    assert SystemSpec(3, 3, HarmonicPair(0.1)).pair_weight() == 1.0
    assert SystemSpec(1, 0, well).pair_weight() == 0.0


def test_frame_at_three_dimensions():
    f = build_scaling_frame(3)
    assert f.delta == pytest.approx(1 / 3)
    assert f.kappa == pytest.approx(2 / 3)
    assert f.energy_unit == pytest.approx(1.5)
    assert f.energy_unit == pytest.approx(1 / f.kappa)
    assert f.length_unit == pytest.approx(math.sqrt(1.5))


def test_frame_rejects_low_dimension():
    with pytest.raises(ValueError):
        build_scaling_frame(1)


@pytest.mark.parametrize("d", [2, 3, 7, 50])
def test_scale_round_trip(d):
    f = build_scaling_frame(d, trap_frequency=1.7)
    assert scale_energy(unscale_energy(3.25, f), f) == pytest.approx(3.25)


def test_unscale_rejects_non_finite():
    with pytest.raises(ValueError):
        unscale_energy(float("nan"), build_scaling_frame(3))


def test_energy_result_round_trip():
    r = EnergyResult(n_particles=4, dimension=3, e_infinity_scaled=4.0, harmonic_term_scaled=1.0,
                     total_unscaled=7.5, breakdown={"0+": 0.1, "v0": -1.0},
                     occupancy=(1, 0, 0, 0, 0), radial_sum=0, angular_sum=2)
    assert EnergyResult.from_dict(r.as_dict()) == r
    assert r.total_scaled == pytest.approx(5.0)


def test_harmonic_coupling_must_bind():
    SystemSpec(2, 2, HarmonicPair(-0.2))
    with pytest.raises(ValueError):
        SystemSpec(2, 2, HarmonicPair(-0.25))
