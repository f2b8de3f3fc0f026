"""Pauli restrictions on normal-mode occupancies.

Antisymmetry is imposed through the three-dimensional oscillator
configurations: for a set of orbitals (nu_i, l_i) the admissible normal-mode
states satisfy

    2 (n_0- + n_1-) = sum_i 2 nu_i,
    2 (n_0+ + n_1+ + n_2) = sum_i l_i.

Only the two sums matter, so configurations are enumerated per spin species
by a small dynamic program over (nu, l) subshells and deduplicated by
(radial_sum, angular_sum).
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

from .core import build_scaling_frame
from .spectrum import ANGULAR_MODES, MODE_LABELS, RADIAL_MODES

logger = logging.getLogger(__name__)

TIE_TOL = 1e-9


def subshells(max_shell: int) -> list[tuple[int, int]]:
    """(nu, l) subshells of the 3D oscillator up to shell 2 nu + l = max_shell."""
    out = []
    for n in range(max_shell + 1):
        for l in range(n % 2, n + 1, 2):
            out.append(((n - l) // 2, l))
    return out


def minimal_shell_energy(k: int) -> int:
    """Lowest sum of (2 nu + l) for k identical fermions."""
    energy, n = 0, 0
    while k > 0:
        take = min(k, (n + 1) * (n + 2) // 2)
        energy += take * n
        k -= take
        n += 1
    return energy


def _fermi_shell(k: int) -> int:
    n, filled = 0, 0
    while filled + (n + 1) * (n + 2) // 2 < k:
        filled += (n + 1) * (n + 2) // 2
        n += 1
    return n


@lru_cache(maxsize=256)
def _spin_fillings(k: int, excitation: int) -> dict:
    """Reachable (shell_energy, angular_sum) for k fermions of one spin.

    Only fillings with shell energy <= minimum + ``excitation`` are kept;
    the value is one representative occupation, a tuple of
    ((nu, l), count) entries.
    """
    budget = minimal_shell_energy(k) + excitation
    shells = subshells(_fermi_shell(k) + excitation + 1) if k else []
    states = {(0, 0, 0): ()}
    for nu, l in shells:
        e_unit = 2 * nu + l
        new = {}
        for (cnt, e, ls), occ in states.items():
            for c in range(0, 2 * l + 2):
                if cnt + c > k or e + c * e_unit > budget:
                    break
                key = (cnt + c, e + c * e_unit, ls + c * l)
                if key not in new:
                    new[key] = occ + (((nu, l), c),) if c else occ
        states = new
    return {(e, ls): occ for (cnt, e, ls), occ in states.items() if cnt == k}


@dataclass(frozen=True)
class HOConfiguration:
    """Oscillator orbitals occupied by both spin species.

    ``orbitals`` is a sorted multiset of (nu, l, spin) with spin "up"/"down".
    """

    orbitals: tuple[tuple[int, int, str], ...]

    def __post_init__(self):
        counts = {}
        for nu, l, spin in self.orbitals:
            if nu < 0 or l < 0 or spin not in ("up", "down"):
                raise ValueError(f"invalid orbital {(nu, l, spin)}")
            counts[(nu, l, spin)] = counts.get((nu, l, spin), 0) + 1
        for (nu, l, spin), c in counts.items():
            if c > 2 * l + 1:
                raise ValueError(f"subshell (nu={nu}, l={l}) of spin {spin} holds {c} > {2 * l + 1}")
        object.__setattr__(self, "orbitals", tuple(sorted(self.orbitals)))

    @classmethod
    def from_occupations(cls, up, down) -> "HOConfiguration":
        orbs = []
        for spin, occ in (("up", up), ("down", down)):
            for (nu, l), c in occ:
                orbs.extend([(nu, l, spin)] * c)
        return cls(tuple(orbs))

    @property
    def radial_sum(self) -> int:
        return sum(2 * nu for nu, _, _ in self.orbitals)

    @property
    def angular_sum(self) -> int:
        return sum(l for _, l, _ in self.orbitals)

    @property
    def shell_energy(self) -> int:
        return self.radial_sum + self.angular_sum

    @property
    def admissible(self) -> bool:
        """Whether some integer occupancy satisfies both constraint equations."""
        return self.angular_sum % 2 == 0

    def summary(self) -> str:
        parts = []
        for spin in ("up", "down"):
            occ = {}
            for nu, l, s in self.orbitals:
                if s == spin:
                    occ[(nu, l)] = occ.get((nu, l), 0) + 1
            parts.append(spin + ":" + " ".join(f"{nu}{'spdfghi'[l] if l < 7 else l}{c}"
                                               for (nu, l), c in sorted(occ.items())))
        return "; ".join(parts)


def configurations(n_up: int, n_down: int, excitation: int = 0) -> list[HOConfiguration]:
    """Configurations exactly ``excitation`` shell quanta above the lowest filling.

    One representative per distinct (radial_sum, angular_sum), sorted by those sums.
    """
    if n_up < 0 or n_down < 0 or n_up + n_down < 1:
        raise ValueError("need non-negative counts with at least one particle")
    if excitation < 0:
        raise ValueError("excitation must be non-negative")
    target = minimal_shell_energy(n_up) + minimal_shell_energy(n_down) + excitation
    ups = _spin_fillings(n_up, excitation)
    downs = _spin_fillings(n_down, excitation)
    found = {}
    for (eu, lu), occ_u in ups.items():
        for (ed, ld), occ_d in downs.items():
            if eu + ed != target:
                continue
            key = (eu + ed - lu - ld, lu + ld)
            if key not in found:
                found[key] = HOConfiguration.from_occupations(occ_u, occ_d)
    return [found[k] for k in sorted(found)]


def fill_shells(n_up: int, n_down: int) -> list[HOConfiguration]:
    """All distinct lowest-energy fillings, including ones with odd angular_sum."""
    return configurations(n_up, n_down, 0)


def ground_configurations(n_up: int, n_down: int, max_excitation: int = 8) -> list[HOConfiguration]:
    """Admissible configurations of the lowest shell energy that has any.

    Open-shell fillings with odd angular_sum cannot satisfy the angular
    constraint; in that case the search moves up one shell quantum at a time.
    """
    for x in range(max_excitation + 1):
        ok = [c for c in configurations(n_up, n_down, x) if c.admissible]
        if ok:
            if x:
                logger.info("N=(%d,%d): no admissible lowest filling, using excitation %d",
                            n_up, n_down, x)
            return ok
    raise ValueError(f"no admissible configuration within {max_excitation} shell quanta")


def constraint_sums(config: HOConfiguration) -> tuple[int, int]:
    """(sum 2 nu_i, sum l_i) that the radial and angular quanta must match."""
    return config.radial_sum, config.angular_sum


@dataclass(frozen=True)
class OccupancyState:
    """Normal-mode quanta in the order 0+, 0-, 1+, 1-, 2."""

    counts: tuple[int, int, int, int, int]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != 5 or min(counts) < 0:
            raise ValueError(f"need five non-negative counts, got {self.counts}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_mapping(cls, n: dict) -> "OccupancyState":
        return cls(tuple(int(n.get(m, 0)) for m in MODE_LABELS))

    def __getitem__(self, mode: str) -> int:
        return self.counts[MODE_LABELS.index(mode)]

    def as_dict(self) -> dict:
        return dict(zip(MODE_LABELS, self.counts))

    @property
    def radial_quanta(self) -> int:
        return sum(self[m] for m in RADIAL_MODES)

    @property
    def angular_quanta(self) -> int:
        return sum(self[m] for m in ANGULAR_MODES)

    def satisfies(self, config: HOConfiguration) -> bool:
        radial, angular = constraint_sums(config)
        return 2 * self.radial_quanta == radial and 2 * self.angular_quanta == angular

    def degeneracy(self, multiplicity: dict) -> int:
        """prod_mu C(n_mu + d_mu - 1, n_mu)."""
        g = 1
        for m, n in zip(MODE_LABELS, self.counts):
            d = multiplicity[m]
            if n and d == 0:
                return 0
            g *= math.comb(n + d - 1, n) if n else 1
        return g


def _compositions(total: int, modes: tuple[str, ...]):
    """All ways of distributing ``total`` quanta over ``modes``."""
    if not modes:
        if total == 0:
            yield {}
        return
    if len(modes) == 1:
        yield {modes[0]: total}
        return
    for k in range(total + 1):
        for rest in _compositions(total - k, modes[1:]):
            yield {modes[0]: k, **rest}


def admissible_occupancies(config: HOConfiguration, spectrum) -> list[OccupancyState]:
    """Every occupancy of the spectrum's active modes consistent with ``config``."""
    if not config.admissible:
        return []
    radial = tuple(m for m in RADIAL_MODES if spectrum.multiplicity[m] > 0)
    angular = tuple(m for m in ANGULAR_MODES if spectrum.multiplicity[m] > 0)
    out = []
    for r in _compositions(config.radial_sum // 2, radial):
        for a in _compositions(config.angular_sum // 2, angular):
            out.append(OccupancyState.from_mapping({**r, **a}))
    return out


def _cheapest(modes, spectrum):
    active = [m for m in modes if spectrum.multiplicity[m] > 0]
    low = min(spectrum.omega[m] for m in active)
    tied = [m for m in active if spectrum.omega[m] - low <= TIE_TOL * max(1.0, abs(low))]
    return low, tied


def select_ground_occupancy(configs, spectrum) -> tuple[OccupancyState, HOConfiguration]:
    """Admissible occupancy minimizing sum_mu n_mu omega_mu over ``configs``.

    Within a configuration all radial quanta go to the lower radial root and
    all angular quanta to the lowest angular root.  Degenerate roots are
    resolved by enumerating every split; the energy is the same for all of
    them and the first in mode order is returned.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("no configurations given")
    w_rad, tied_rad = _cheapest(RADIAL_MODES, spectrum)
    w_ang, tied_ang = _cheapest(ANGULAR_MODES, spectrum)
    best = None
    for cfg in configs:
        if not cfg.admissible:
            continue
        nr, na = cfg.radial_sum // 2, cfg.angular_sum // 2
        splits = [OccupancyState.from_mapping({**r, **a})
                  for r in _compositions(nr, tuple(tied_rad))
                  for a in _compositions(na, tuple(tied_ang))]
        occ = max(splits, key=lambda s: s.counts)
        energy = nr * w_rad + na * w_ang
        if best is None or energy < best[0] - TIE_TOL * max(1.0, abs(energy)):
            best = (energy, occ, cfg)
    if best is None:
        raise ValueError(
            "every configuration has odd angular_sum; the angular constraint has no "
            "integer solution")
    return best[1], best[2]


def mode_energy(occupancy: OccupancyState, spectrum) -> float:
    """sum_mu (n_mu + d_mu/2) omega_mu + v0, in scaled units."""
    total = spectrum.v0
    for m in spectrum.active_modes:
        total += (occupancy[m] + 0.5 * spectrum.multiplicity[m]) * spectrum.omega[m]
    return total


@dataclass(frozen=True)
class SpectrumLevel:
    energy: float
    degeneracy: int
    occupancy: OccupancyState
    configuration: HOConfiguration

    def as_row(self) -> dict:
        return {"energy": self.energy, "degeneracy": self.degeneracy,
                **{f"n_{m}": c for m, c in zip(MODE_LABELS, self.occupancy.counts)},
                "radial_sum": self.configuration.radial_sum,
                "angular_sum": self.configuration.angular_sum,
                "configuration": self.configuration.summary()}


def enumerate_spectrum(spectrum, spec, e_max: float, e_infinity: float) -> list[SpectrumLevel]:
    """Harmonic-order levels with energy <= ``e_max`` (units of hbar*omega_ho).

    Every admissible configuration up to the shell energy that ``e_max``
    allows is paired with every consistent occupancy.
    """
    frame = build_scaling_frame(spec.dimension_target, spec.trap_frequency)

    def energy(occ):
        return frame.energy_unit * (e_infinity + frame.delta * mode_energy(occ, spectrum))

    zero = energy(OccupancyState((0, 0, 0, 0, 0)))
    quantum = frame.energy_unit * frame.delta * min(spectrum.omega[m] for m in spectrum.active_modes)
    base = minimal_shell_energy(spec.n_up) + minimal_shell_energy(spec.n_down)
    max_quanta = math.floor((e_max - zero) / quantum + 1e-9)
    if max_quanta * 2 < base:
        raise ValueError(f"e_max = {e_max} lies below every admissible level")
    levels = []
    for x in range(2 * max_quanta - base + 1):
        for cfg in configurations(spec.n_up, spec.n_down, x):
            for occ in admissible_occupancies(cfg, spectrum):
                e = energy(occ)
                if e <= e_max + 1e-12 * max(1.0, abs(e_max)):
                    levels.append(SpectrumLevel(e, occ.degeneracy(spectrum.multiplicity), occ, cfg))
    if not levels:
        raise ValueError(f"no level below e_max = {e_max}")
    levels.sort(key=lambda lv: (lv.energy, lv.occupancy.counts, lv.configuration.radial_sum))
    boundary = sum(1 for lv in levels if lv.energy > e_max - quantum)
    logger.info("spectrum truncated at %.6g: %d levels within one quantum of the cutoff",
                e_max, boundary)
    return levels


@dataclass(frozen=True)
class PartitionResult:
    beta: float
    z: float
    ground_energy: float
    tail_estimate: float


def partition_function(levels, beta: float, warn_tol: float = 1e-6) -> PartitionResult:
    """Ground-referenced Z(beta) = sum_k g_k exp(-beta (E_k - E_0)).

    ``tail_estimate`` is the Boltzmann weight of the highest included level(s),
    a proxy for what truncation leaves out.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    levels = list(levels)
    if not levels:
        raise ValueError("no levels given")
    e0 = min(lv.energy for lv in levels)
    e_top = max(lv.energy for lv in levels)
    z = 0.0
    tail = 0.0
    for lv in levels:
        w = lv.degeneracy * math.exp(-beta * (lv.energy - e0))
        z += w
        if lv.energy >= e_top - 1e-12 * max(1.0, abs(e_top)) and len(levels) > 1:
            tail += w
    if tail > warn_tol * z:
        warnings.warn(f"partition function tail estimate {tail:.3e} exceeds {warn_tol:g} Z",
                      stacklevel=2)
    return PartitionResult(beta, z, e0, tail)

