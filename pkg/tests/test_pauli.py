import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

from sptfermi import (HarmonicPair, NonInteracting, SystemSpec, constraint_sums,  # noqa: E402
                      enumerate_spectrum, fill_shells, ground_configurations, partition_function,
                      run_pipeline, select_ground_occupancy, unitary_well)
from sptfermi.assembler import building_blocks  # noqa: E402
from sptfermi.pauli import (HOConfiguration, OccupancyState, SpectrumLevel, admissible_occupancies,  # noqa: E402
                            minimal_shell_energy, mode_energy)


@pytest.mark.parametrize("k", range(0, 41))
def test_minimal_shell_energy_matches_oracle(k):
    assert minimal_shell_energy(k) == oracles.lowest_shell_quanta(k)


@pytest.mark.parametrize("n_up,n_down,expected", [
    (1, 1, [(0, 0)]),
    (3, 3, [(0, 4)]),
    (4, 4, [(0, 6)]),
    (10, 10, [(4, 26)]),
    (8, 8, [(0, 22), (2, 20), (4, 18)]),
])
def test_fill_shells_sums(n_up, n_down, expected):
    assert [constraint_sums(c) for c in fill_shells(n_up, n_down)] == expected


def test_odd_angular_sum_promotes_one_quantum():
    lowest = fill_shells(4, 3)
    assert all(not c.admissible for c in lowest)
    ground = ground_configurations(4, 3)
    assert {constraint_sums(c) for c in ground} == {(0, 6), (2, 4)}
    assert all(c.shell_energy == lowest[0].shell_energy + 1 for c in ground)


@pytest.mark.parametrize("n", range(2, 13))
def test_ground_shell_energy_matches_brute_force(n):
    spec = SystemSpec.balanced(n)
    cfg = ground_configurations(spec.n_up, spec.n_down)[0]
    assert cfg.shell_energy + 1.5 * n == oracles.admissible_shell_energy(spec.n_up, spec.n_down)


def test_configuration_rejects_overfilled_subshell():
    with pytest.raises(ValueError):
        HOConfiguration(((0, 0, "up"), (0, 0, "up")))


def test_occupancy_validation_and_mapping():
    with pytest.raises(ValueError):
        OccupancyState((1, 0, 0, 0))
    with pytest.raises(ValueError):
        OccupancyState((1, 0, -1, 0, 0))
    occ = OccupancyState.from_mapping({"2": 3, "0-": 1})
    assert occ["2"] == 3 and occ.radial_quanta == 1 and occ.angular_quanta == 3


@pytest.mark.parametrize("counts", [(1, 0, 0, 0, 0), (0, 0, 2, 0, 1), (1, 1, 1, 0, 0), (0, 0, 0, 3, 0)])
def test_degeneracy_matches_explicit_count(counts):
    mult = {"0+": 1, "0-": 1, "1+": 3, "1-": 3, "2": 2}
    occ = OccupancyState(counts)
    assert occ.degeneracy(mult) == oracles.explicit_degeneracy(occ.as_dict(), mult)


def test_degeneracy_zero_for_absent_mode():
    assert OccupancyState((0, 0, 1, 0, 0)).degeneracy({"0+": 1, "0-": 1, "1+": 0, "1-": 1, "2": 0}) == 0


@pytest.mark.parametrize("model", [NonInteracting(), HarmonicPair(0.1), unitary_well(0.01)])
@pytest.mark.parametrize("n", range(2, 9))
def test_selected_ground_matches_brute_force(model, n):
    spec = SystemSpec.balanced(n, model)
    _, sp = building_blocks(spec)
    occ, cfg = select_ground_occupancy(ground_configurations(spec.n_up, spec.n_down), sp)
    assert occ.satisfies(cfg)
    ref = oracles.brute_force_ground_energy(spec.n_up, spec.n_down, sp.omega, sp.multiplicity, sp.v0)
    assert mode_energy(occ, sp) == pytest.approx(ref, abs=1e-9)


def test_every_admissible_occupancy_satisfies_constraints():
    spec = SystemSpec.balanced(6, unitary_well(0.01))
    _, sp = building_blocks(spec)
    for cfg in ground_configurations(3, 3, 4):
        for occ in admissible_occupancies(cfg, sp):
            assert occ.satisfies(cfg)


def test_selection_requires_admissible_configuration():
    spec = SystemSpec.balanced(7)
    _, sp = building_blocks(spec)
    with pytest.raises(ValueError):
        select_ground_occupancy(fill_shells(4, 3), sp)
    with pytest.raises(ValueError):
        select_ground_occupancy([], sp)


def test_spectrum_starts_at_ground_energy():
    spec = SystemSpec.balanced(5, unitary_well(0.01))
    minimum, sp = building_blocks(spec)
    e0 = run_pipeline(spec).total_unscaled
    levels = enumerate_spectrum(sp, spec, e0 + 4, minimum.e_infinity)
    assert levels[0].energy == pytest.approx(e0)
    assert all(a.energy <= b.energy for a, b in zip(levels, levels[1:]))
    assert all(lv.occupancy.satisfies(lv.configuration) for lv in levels)


def test_spectrum_below_ground_rejected():
    spec = SystemSpec.balanced(4)
    minimum, sp = building_blocks(spec)
    with pytest.raises(ValueError):
        enumerate_spectrum(sp, spec, 1.0, minimum.e_infinity)


def test_ideal_gas_spectrum_is_evenly_spaced():
    spec = SystemSpec.balanced(4)
    minimum, sp = building_blocks(spec)
    levels = enumerate_spectrum(sp, spec, 12.0, minimum.e_infinity)
    assert sorted({round(lv.energy, 9) for lv in levels}) == [8.0, 10.0, 12.0]


def test_partition_function_limits():
    spec = SystemSpec.balanced(4)
    minimum, sp = building_blocks(spec)
    levels = enumerate_spectrum(sp, spec, 14.0, minimum.e_infinity)
    g0 = sum(lv.degeneracy for lv in levels if lv.energy == pytest.approx(8.0))
    assert partition_function(levels, 50.0).z == pytest.approx(g0, rel=1e-12)
    with pytest.warns(UserWarning):
        partition_function(levels, 0.1)
    with pytest.raises(ValueError):
        partition_function(levels, 0.0)


def _level(energy, g):
    cfg = HOConfiguration(((0, 0, "up"),))
    return SpectrumLevel(energy, g, OccupancyState((0,) * 5), cfg)


def test_partition_single_and_two_levels():
    assert partition_function([_level(3.0, 1)], 2.0).z == 1.0
    for beta in (0.3, 1.0, 4.0):
        z = partition_function([_level(0.0, 1), _level(0.7, 35)], beta, warn_tol=1e9).z
        assert z == pytest.approx(1 + 35 * math.exp(-beta * 0.7))


def test_degeneracy_stars_and_bars_examples():
    mult10 = {"0+": 1, "0-": 1, "1+": 9, "1-": 9, "2": 35}
    assert OccupancyState((0, 0, 0, 0, 1)).degeneracy(mult10) == 35
    mult5 = {"0+": 1, "0-": 1, "1+": 4, "1-": 4, "2": 5}
    assert OccupancyState((0, 0, 2, 0, 0)).degeneracy(mult5) == 10
    assert OccupancyState((0,) * 5).degeneracy(mult5) == 1
