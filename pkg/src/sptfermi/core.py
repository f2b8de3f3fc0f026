"""Shared value types and the dimensional-scaling convention.

Units are oscillator units, hbar = m = omega_ho = 1 unless a trap frequency
is given.  Scaled ("barred") quantities are defined by

    r_i = L(D) * rbar_i,        L(D) = sqrt(D / (2 omega)),
    E   = Ebar / kappa(D),      kappa(D) = D**2 / omegabar,
    omegabar = D**3 * omega / 2,

so that kappa(D) = 2 / (D omega).  With these choices the scaled
Hamiltonian reads

    Hbar = -2 delta**2 sum_ab d_a g^ab d_b + Vbar_eff,

where the leading centrifugal term of Vbar_eff is sum_i (Gamma^-1)_ii / (2 rbar_i**2)
and the trap is sum_i rbar_i**2 / 2.  For the ideal gas the minimum sits at
rbar = 1 with Ebar_inf = N, and a single normal-mode quantum is worth
2 hbar omega at every D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

MODE_LABELS = ("0+", "0-", "1+", "1-", "2")

# Bumped whenever a convention that changes cached numbers is altered.
CONVENTIONS_VERSION = "spt-harmonic-1"


@dataclass(frozen=True)
class SystemSpec:
    """Full problem statement for one trapped two-component Fermi system.

    Parameters
    ----------
    n_up, n_down : int
        Particle numbers of the two spin species.
    interaction : InteractionModel
        Pair interaction; defaults to the non-interacting gas.
    trap_frequency : float
        Oscillator frequency; energies are returned in units of hbar*omega_ho
        multiplied by this value.
    dimension_target : int
        Physical dimension at which the series is summed (3 by default).
    """

    n_up: int
    n_down: int
    interaction: Any = None
    trap_frequency: float = 1.0
    dimension_target: int = 3

    def __post_init__(self):
        if self.interaction is None:
            from .interaction import NonInteracting

            object.__setattr__(self, "interaction", NonInteracting())
        if self.n_up < 1:
            raise ValueError(f"n_up must be >= 1, got {self.n_up}")
        if self.n_down < 0:
            raise ValueError(f"n_down must be >= 0, got {self.n_down}")
        if not self.trap_frequency > 0:
            raise ValueError("trap_frequency must be positive")
        if self.dimension_target < 2:
            raise ValueError("dimension_target must be >= 2")
        coupling = getattr(self.interaction, "coupling", None)
        if coupling is not None and self.n_particles > 1 and coupling <= -1.0 / self.n_particles:
            raise ValueError(f"coupling {coupling} <= -1/N leaves the relative motion unbound")

    @classmethod
    def balanced(cls, n_particles: int, interaction=None, **kwargs) -> "SystemSpec":
        """Equal-as-possible spin split, the extra particle going to spin up."""
        n_up = (n_particles + 1) // 2
        return cls(n_up, n_particles - n_up, interaction, **kwargs)

    @property
    def n_particles(self) -> int:
        return self.n_up + self.n_down

    @property
    def n_pairs(self) -> int:
        n = self.n_particles
        return n * (n - 1) // 2

    @property
    def unlike_pair_weight(self) -> float:
        """Fraction of all pairs that are unlike-spin pairs, N1*N2 / (N(N-1)/2)."""
        if self.n_pairs == 0:
            return 0.0
        return self.n_up * self.n_down / self.n_pairs

    def pair_weight(self) -> float:
        """Uniform weight applied to every pair term of the effective potential."""
        if getattr(self.interaction, "unlike_pairs_only", False):
            return self.unlike_pair_weight
        return 1.0


@dataclass(frozen=True)
class ScalingFrame:
    dimension: int
    delta: float
    kappa: float
    omega_bar: float
    length_unit: float
    energy_unit: float
    trap_frequency: float = 1.0


def build_scaling_frame(dimension: int, trap_frequency: float = 1.0) -> ScalingFrame:
    """Scaling factors between barred and laboratory oscillator units.

    ``energy_unit`` multiplies a scaled energy to give hbar*omega_ho units and
    equals ``1/kappa``; ``length_unit`` multiplies a scaled radius.
    """
    if dimension < 2:
        raise ValueError(f"dimension must be >= 2, got {dimension}")
    if not trap_frequency > 0:
        raise ValueError("trap_frequency must be positive")
    d = float(dimension)
    omega_bar = d**3 * trap_frequency / 2.0
    kappa = d**2 / omega_bar
    return ScalingFrame(
        dimension=int(dimension),
        delta=1.0 / d,
        kappa=kappa,
        omega_bar=omega_bar,
        length_unit=math.sqrt(d / (2.0 * trap_frequency)),
        energy_unit=d * trap_frequency / 2.0,
        trap_frequency=trap_frequency,
    )


def unscale_energy(scaled_energy: float, frame: ScalingFrame) -> float:
    if not math.isfinite(scaled_energy):
        raise ValueError(f"non-finite scaled energy {scaled_energy!r}")
    return scaled_energy * frame.energy_unit


def scale_energy(energy: float, frame: ScalingFrame) -> float:
    if not math.isfinite(energy):
        raise ValueError(f"non-finite energy {energy!r}")
    return energy / frame.energy_unit


@dataclass(frozen=True)
class EnergyResult:
    """Harmonic-order energy, scaled and in laboratory units.

    ``breakdown`` maps each mode label to its scaled contribution
    delta*(n + d/2)*omega, plus the key ``"v0"`` for delta*v0; the values sum
    to ``harmonic_term_scaled``.
    """

    n_particles: int
    dimension: int
    e_infinity_scaled: float
    harmonic_term_scaled: float
    total_unscaled: float
    breakdown: Mapping[str, float] = field(default_factory=dict)
    occupancy: tuple[int, ...] = (0, 0, 0, 0, 0)
    radial_sum: int = 0
    angular_sum: int = 0

    @property
    def total_scaled(self) -> float:
        return self.e_infinity_scaled + self.harmonic_term_scaled

    def as_dict(self) -> dict:
        return {
            "n_particles": self.n_particles,
            "dimension": self.dimension,
            "e_infinity_scaled": self.e_infinity_scaled,
            "harmonic_term_scaled": self.harmonic_term_scaled,
            "total_unscaled": self.total_unscaled,
            "breakdown": dict(self.breakdown),
            "occupancy": list(self.occupancy),
            "radial_sum": self.radial_sum,
            "angular_sum": self.angular_sum,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "EnergyResult":
        return cls(
            n_particles=int(data["n_particles"]),
            dimension=int(data["dimension"]),
            e_infinity_scaled=float(data["e_infinity_scaled"]),
            harmonic_term_scaled=float(data["harmonic_term_scaled"]),
            total_unscaled=float(data["total_unscaled"]),
            breakdown={k: float(v) for k, v in data["breakdown"].items()},
            occupancy=tuple(int(x) for x in data["occupancy"]),
            radial_sum=int(data["radial_sum"]),
            angular_sum=int(data["angular_sum"]),
        )
