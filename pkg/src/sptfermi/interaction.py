"""Pair interactions in scaled units and s-wave scattering for the square well.

Three models are provided.  ``NonInteracting`` is the ideal gas.
``HarmonicPair`` couples every pair by (lambda/2) r_ij**2; in scaled units
this form is independent of D, which is what makes the model exactly
solvable at harmonic order.  ``SquareWellContinued`` is the dimensionally
continued well

    vbar(r; delta) = V0(delta) * [1 - tanh((r - 3 delta Rbar) / (1 - 3 delta))],
    V0(delta) = 1 / (1 - 3 b delta),

written in scaled energy and length units.  At delta = 1/3 the bracket
becomes 2 inside Rbar and 0 outside, so the D = 3 well has scaled depth
2 / (b - 1), i.e. a laboratory depth of 3 / (b - 1) hbar*omega_ho.  The
square well only acts between unlike spins.

Scattering lengths are computed in laboratory oscillator units with unit
particle mass, so the reduced mass is 1/2 and k0 = sqrt(depth).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

# D = 3 scaled length unit is sqrt(3/2) a_ho, energy unit 3/2 hbar*omega_ho.
_LENGTH_UNIT_D3 = math.sqrt(1.5)
_ENERGY_UNIT_D3 = 1.5

REDUCED_MASS = 0.5


@dataclass(frozen=True)
class NonInteracting:
    unlike_pairs_only: bool = False

    def fingerprint(self) -> dict:
        return {"model": "ideal"}


@dataclass(frozen=True)
class HarmonicPair:
    """(coupling/2) * r_ij**2 between every pair of particles."""

    coupling: float
    unlike_pairs_only: bool = False

    def __post_init__(self):
        if not math.isfinite(self.coupling):
            raise ValueError("coupling must be finite")

    def fingerprint(self) -> dict:
        return {"model": "harmonic", "coupling": self.coupling,
                "unlike_pairs_only": self.unlike_pairs_only}


@dataclass(frozen=True)
class SquareWellContinued:
    """Continued square well of laboratory radius ``radius`` (units of a_ho).

    ``depth`` is the laboratory D = 3 well depth in hbar*omega_ho; the
    continuation parameter b follows from it as b = 1 + 3/depth.
    """

    radius: float
    depth: float
    unlike_pairs_only: bool = True

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"well radius must be positive, got {self.radius}")
        if not self.depth > 0:
            raise ValueError(f"well depth must be positive, got {self.depth}")
        if self.radius >= 1.0:
            warnings.warn(
                f"well radius {self.radius} a_ho is not small compared with the "
                "oscillator length", stacklevel=2)

    @classmethod
    def from_b(cls, radius: float, b: float, **kwargs) -> "SquareWellContinued":
        if not b > 1:
            raise ValueError("b must exceed 1 for an attractive D = 3 well")
        return cls(radius, 3.0 / (b - 1.0), **kwargs)

    @property
    def b(self) -> float:
        return 1.0 + 3.0 / self.depth

    @property
    def scaled_radius(self) -> float:
        return self.radius / _LENGTH_UNIT_D3

    @property
    def scaled_depth(self) -> float:
        return self.depth / _ENERGY_UNIT_D3

    def fingerprint(self) -> dict:
        return {"model": "square_well", "radius": self.radius, "depth": self.depth,
                "unlike_pairs_only": self.unlike_pairs_only}


def _check_delta(model, delta: float) -> None:
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if isinstance(model, SquareWellContinued) and delta > 1.0 / 3.0 + 1e-15:
        raise ValueError("the continued well is only defined for delta <= 1/3")


def evaluate_pair_potential(model, r, delta: float = 0.0):
    """Scaled pair potential vbar(r; delta); ``r`` may be an array."""
    return pair_potential_derivatives(model, r, delta)[0]


def pair_potential_derivatives(model, r, delta: float = 0.0):
    """Return ``(v, dv/dr, d2v/dr2)`` of the scaled pair potential."""
    _check_delta(model, delta)
    r = np.asarray(r, dtype=float)
    if isinstance(model, NonInteracting):
        zero = np.zeros_like(r)
        return zero, zero.copy(), zero.copy()
    if isinstance(model, HarmonicPair):
        lam = model.coupling
        return 0.5 * lam * r**2, lam * r, np.full_like(r, lam)
    if isinstance(model, SquareWellContinued):
        rb = model.scaled_radius
        v0 = 1.0 / (1.0 - 3.0 * model.b * delta)
        s = 1.0 - 3.0 * delta
        if s <= 0.0:
            # D = 3 limit: sharp step, derivatives undefined except away from Rbar.
            inside = np.where(r < rb, 2.0, np.where(r > rb, 0.0, 1.0))
            zero = np.zeros_like(r)
            return v0 * inside, zero, zero.copy()
        x = (r - 3.0 * delta * rb) / s
        t = np.tanh(x)
        sech2 = 1.0 - t * t
        return (v0 * (1.0 - t), -v0 * sech2 / s, 2.0 * v0 * t * sech2 / s**2)
    raise TypeError(f"unknown interaction model {model!r}")


def pair_potential_delta_derivative(model, r, delta: float = 0.0):
    """Partial derivative of vbar(r; delta) with respect to delta at fixed r."""
    _check_delta(model, delta)
    r = np.asarray(r, dtype=float)
    if isinstance(model, (NonInteracting, HarmonicPair)):
        return np.zeros_like(r)
    if isinstance(model, SquareWellContinued):
        b = model.b
        rb = model.scaled_radius
        s = 1.0 - 3.0 * delta
        if s <= 0.0:
            raise ValueError("delta derivative undefined at delta = 1/3")
        q = 1.0 - 3.0 * b * delta
        x = (r - 3.0 * delta * rb) / s
        t = np.tanh(x)
        dv0 = 3.0 * b / q**2
        dx = 3.0 * (r - rb) / s**2
        return dv0 * (1.0 - t) - (1.0 / q) * (1.0 - t * t) * dx
    raise TypeError(f"unknown interaction model {model!r}")


# --------------------------------------------------------------------------
# zero-energy s-wave scattering


@dataclass(frozen=True)
class ScatteringResult:
    """Zero-energy s-wave scattering data for an attractive square well.

    ``scattering_length`` is ``None`` when the well sits on a resonance
    (|1/a_s| below ``resonance_tol``); ``inverse_scattering_length`` is always
    finite.
    """

    inverse_scattering_length: float
    scattering_length: float | None
    method: str
    closed_form_inverse: float
    numerical_inverse: float
    near_resonance: bool


def _closed_form_inverse(k0: float, radius: float) -> float:
    x = k0 * radius
    c, s = math.cos(x), math.sin(x)
    return x * c / (radius * (x * c - s))


def _rk4_inverse(k0: float, radius: float, steps: int = 2000) -> float:
    """Integrate u'' = -k0^2 u through the well, then free to 2R."""
    h = radius / steps
    k2 = k0 * k0
    u, du = 0.0, 1.0
    for _ in range(steps):
        a1, b1 = du, -k2 * u
        a2, b2 = du + 0.5 * h * b1, -k2 * (u + 0.5 * h * a1)
        a3, b3 = du + 0.5 * h * b2, -k2 * (u + 0.5 * h * a2)
        a4, b4 = du + h * b3, -k2 * (u + h * a3)
        u += h * (a1 + 2 * a2 + 2 * a3 + a4) / 6.0
        du += h * (b1 + 2 * b2 + 2 * b3 + b4) / 6.0
    # Outside the well u is linear, u(r) = C (r - a_s); match at r = 2R.
    r_match = 2.0 * radius
    u_match = u + du * (r_match - radius)
    return du / (r_match * du - u_match)


def compute_scattering_length(v_depth: float, radius: float,
                              resonance_tol: float = 1e-9) -> ScatteringResult:
    """s-wave scattering length of a square well of depth ``v_depth``.

    Both the closed form a_s = R (1 - tan(k0 R)/(k0 R)) and a fixed-step RK4
    integration of the zero-energy radial equation are evaluated.
    """
    if not v_depth > 0:
        raise ValueError("v_depth must be positive")
    if not radius > 0:
        raise ValueError("radius must be positive")
    k0 = math.sqrt(2.0 * REDUCED_MASS * v_depth)
    closed = _closed_form_inverse(k0, radius)
    numeric = _rk4_inverse(k0, radius)
    near = abs(closed) < resonance_tol
    return ScatteringResult(
        inverse_scattering_length=closed,
        scattering_length=None if near else 1.0 / closed,
        method="closed-form",
        closed_form_inverse=closed,
        numerical_inverse=numeric,
        near_resonance=near,
    )


@dataclass(frozen=True)
class UnitarityTuning:
    radius: float
    v_depth: float
    b: float
    k0_radius: float
    inverse_scattering_length: float


def tune_unitarity(radius: float, tol: float = 1e-10, max_iter: int = 200) -> UnitarityTuning:
    """Depth (and continuation parameter b) placing the well on its first resonance.

    Bisection on k0*R over [pi/4, 3pi/4], where 1/a_s changes sign exactly
    once, until |1/a_s| < ``tol`` in units of 1/a_ho.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    if radius >= 1.0:
        warnings.warn(f"well radius {radius} a_ho is not small compared with a_ho",
                      stacklevel=2)

    def inv_a(x):
        return _closed_form_inverse(x / radius, radius)

    lo, hi = 0.25 * math.pi, 0.75 * math.pi
    f_lo, f_hi = inv_a(lo), inv_a(hi)
    if f_lo * f_hi > 0:
        raise RuntimeError(
            f"no sign change of 1/a_s for k0 R in [{lo}, {hi}]: {f_lo}, {f_hi}")
    x = 0.5 * (lo + hi)
    f = inv_a(x)
    for _ in range(max_iter):
        x = 0.5 * (lo + hi)
        f = inv_a(x)
        if abs(f) < tol and hi - lo < 1e-14:
            break
        if f * f_lo > 0:
            lo, f_lo = x, f
        else:
            hi = x
    if abs(f) >= tol:
        raise RuntimeError(f"bisection stalled with |1/a_s| = {abs(f)}")
    v_depth = (x / radius) ** 2 / (2.0 * REDUCED_MASS)
    return UnitarityTuning(radius, v_depth, 1.0 + 3.0 / v_depth, x, f)


def unitary_well(radius: float = 0.01, **kwargs) -> SquareWellContinued:
    """Continued square well tuned to infinite scattering length at D = 3."""
    tuned = tune_unitarity(radius)
    return SquareWellContinued(radius, tuned.v_depth, **kwargs)
