"""Harmonic-order normal modes at the symmetric minimum (FG method).

Displacements y from the minimum scale as delta^(1/2); to first order in
delta the scaled Hamiltonian is

    Ebar_inf + delta * [ (1/2) p^T G p + (1/2) y^T F y + v0 ],

with F the Hessian of the delta -> 0 effective potential and G = 4 g, g the
internal-coordinate metric.  The roots lambda = omegabar^2 are the
eigenvalues of G F.

Both matrices are invariant under particle permutations, so each is fixed
by a handful of scalars: radial diagonal/off-diagonal, three pair-pair
classes (same pair, one shared index, disjoint) and two radial-pair classes
(index in pair, index not in pair).  Projecting onto the [N], [N-1,1] and
[N-2,2] sectors gives 2x2, 2x2 and 1x1 problems, i.e. five distinct roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .geometry import (
    effective_potential_delta_slope,
    effective_potential_derivatives,
    kinetic_metric,
    pair_index,
    pair_indices,
)

MODE_LABELS = ("0+", "0-", "1+", "1-", "2")
MODE_CHARACTER = {
    "0+": "center-of-mass/breathing",
    "0-": "center-of-mass/breathing",
    "1+": "single-particle",
    "1-": "single-particle",
    "2": "phonon",
}
RADIAL_MODES = ("0-", "1-")
ANGULAR_MODES = ("0+", "1+", "2")


class SaddlePointError(RuntimeError):
    pass


class PatternError(RuntimeError):
    pass


class OracleMismatch(PatternError):
    """Reduced and dense eigenvalues disagree."""


@dataclass(frozen=True)
class BlockPattern:
    """Scalars fixing one permutation-invariant (N + P) x (N + P) matrix."""

    radial_diag: float
    radial_off: float
    same_pair: float
    shared_index: float
    disjoint: float
    in_pair: float
    not_in_pair: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.radial_diag, self.radial_off, self.same_pair, self.shared_index,
                self.disjoint, self.in_pair, self.not_in_pair)

    def dense(self, n: int) -> np.ndarray:
        i, j = pair_indices(n)
        npair = i.shape[0]
        out = np.zeros((n + npair, n + npair))
        out[:n, :n] = self.radial_off
        np.fill_diagonal(out[:n, :n], self.radial_diag)
        if npair:
            pi_, pj = i[:, None], j[:, None]
            qi, qj = i[None, :], j[None, :]
            common = ((pi_ == qi).astype(int) + (pi_ == qj) + (pj == qi) + (pj == qj))
            out[n:, n:] = np.choose(common, [self.disjoint, self.shared_index, self.same_pair])
            member = (np.arange(n)[:, None] == i[None, :]) | (np.arange(n)[:, None] == j[None, :])
            coupling = np.where(member, self.in_pair, self.not_in_pair)
            out[:n, n:] = coupling
            out[n:, :n] = coupling.T
        return out


@dataclass(frozen=True)
class FGPatterns:
    n_particles: int
    f: BlockPattern
    g: BlockPattern
    residual: float = 0.0

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        return self.f.dense(self.n_particles), self.g.dense(self.n_particles)


def _extract(mat: np.ndarray, n: int, perm) -> BlockPattern:
    p0, p1, p2, p3 = (list(perm) + [None] * 4)[:4]

    def pidx(a, b):
        return n + pair_index(a, b, n)

    return BlockPattern(
        radial_diag=float(mat[p0, p0]),
        radial_off=float(mat[p0, p1]),
        same_pair=float(mat[pidx(p0, p1), pidx(p0, p1)]),
        shared_index=float(mat[pidx(p0, p1), pidx(p0, p2)]) if n >= 3 else 0.0,
        disjoint=float(mat[pidx(p0, p1), pidx(p2, p3)]) if n >= 4 else 0.0,
        in_pair=float(mat[p0, pidx(p0, p1)]),
        not_in_pair=float(mat[p2, pidx(p0, p1)]) if n >= 3 else 0.0,
    )


def build_fg_patterns(minimum, model, spec, *, permutation=None,
                      tol: float = 1e-8) -> FGPatterns:
    """Pattern scalars of F and G at the symmetric minimum.

    ``permutation`` relabels the particles used as class representatives;
    at a symmetric point the result must not depend on it.
    """
    n = minimum.n_particles
    coords = minimum.coordinates()
    _, _, f_dense = effective_potential_derivatives(coords, model, spec)
    g_dense = 4.0 * kinetic_metric(coords)
    perm = list(range(n)) if permutation is None else [int(x) for x in permutation]
    f_pat = _extract(f_dense, n, perm)
    g_pat = _extract(g_dense, n, perm)
    scale = max(1.0, float(np.max(np.abs(f_dense))), float(np.max(np.abs(g_dense))))
    residual = max(float(np.max(np.abs(f_dense - f_pat.dense(n)))),
                   float(np.max(np.abs(g_dense - g_pat.dense(n))))) / scale
    if residual > tol:
        raise PatternError(
            f"F/G matrices deviate from the permutation-invariant pattern by {residual:.3e}")
    return FGPatterns(n, f_pat, g_pat, residual)


def johnson_eigenvalues(c1: float, c2: float, c3: float, n: int):
    """Eigenvalues of the pair-indexed matrix with entries c1 / c2 / c3.

    Returns ``((e_N, 1), (e_N-1_1, N-1), (e_N-2_2, N(N-3)/2))`` for the
    same-pair / shared-index / disjoint classes.
    """
    e_sym = c1 + 2 * (n - 2) * c2 + (n - 2) * (n - 3) / 2 * c3
    e_std = c1 + (n - 4) * c2 - (n - 3) * c3
    e_two = c1 - 2 * c2 + c3
    return ((e_sym, 1), (e_std, n - 1), (e_two, n * (n - 3) // 2))


def _sector_matrices(pat: BlockPattern, n: int):
    npair = n * (n - 1) // 2
    (j_sym, _), (j_std, _), (j_two, _) = johnson_eigenvalues(
        pat.same_pair, pat.shared_index, pat.disjoint, n)
    sym_cross = math.sqrt(n / npair) * ((n - 1) * pat.in_pair
                                        + (n - 1) * (n - 2) / 2 * pat.not_in_pair)
    sym = np.array([[pat.radial_diag + (n - 1) * pat.radial_off, sym_cross],
                    [sym_cross, j_sym]])
    rad_std = pat.radial_diag - pat.radial_off
    if n >= 3:
        std_cross = (pat.in_pair - pat.not_in_pair) * math.sqrt(n - 2)
        std = np.array([[rad_std, std_cross], [std_cross, j_std]])
    else:
        std = np.array([[rad_std]])
    two = np.array([[j_two]]) if n >= 4 else None
    return sym, std, two


def _sector_roots(f: np.ndarray, g: np.ndarray):
    """Roots of G F for one sector, ordered (radial-like, angular-like)."""
    try:
        gl = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise PatternError("kinetic matrix is not positive definite") from exc
    sym = gl.T @ f @ gl
    vals, vecs = np.linalg.eigh(sym)
    if vals.shape[0] == 1:
        return [float(vals[0])], [1.0]
    if abs(vals[1] - vals[0]) <= 1e-12 * max(1.0, abs(vals[1])):
        # degenerate: any basis is a normal basis; keep coordinate order
        return [float(sym[0, 0]), float(sym[1, 1])], [1.0, 0.0]
    radial_weight = vecs[0, :] ** 2
    order = np.argsort(-radial_weight, kind="stable")
    return [float(vals[k]) for k in order], [float(radial_weight[k]) for k in order]


@dataclass(frozen=True)
class NormalModeSpectrum:
    """Five normal-mode roots with multiplicities and the constant v0.

    Modes absent for small N (1+ for N = 2, 2 for N < 4) carry multiplicity
    zero and a NaN frequency.
    """

    n_particles: int
    omega: dict
    multiplicity: dict
    v0: float = 0.0
    character: dict = field(default_factory=lambda: dict(MODE_CHARACTER))
    radial_weight: dict = field(default_factory=dict)

    @property
    def active_modes(self) -> tuple[str, ...]:
        return tuple(m for m in MODE_LABELS if self.multiplicity[m] > 0)

    @property
    def lambdas(self) -> dict:
        return {m: self.omega[m] ** 2 for m in self.active_modes}

    def zero_point(self) -> float:
        """sum_mu d_mu omega_mu / 2."""
        return sum(0.5 * self.multiplicity[m] * self.omega[m] for m in self.active_modes)

    def as_dict(self) -> dict:
        return {"n_particles": self.n_particles,
                "omega": {m: self.omega[m] for m in MODE_LABELS},
                "multiplicity": dict(self.multiplicity), "v0": self.v0,
                "radial_weight": dict(self.radial_weight)}

    @classmethod
    def from_dict(cls, data) -> "NormalModeSpectrum":
        return cls(int(data["n_particles"]),
                   {m: float(v) for m, v in data["omega"].items()},
                   {m: int(v) for m, v in data["multiplicity"].items()},
                   float(data["v0"]),
                   radial_weight={m: float(v) for m, v in data.get("radial_weight", {}).items()})


def mode_multiplicities(n: int) -> dict:
    if n == 2:
        return {"0+": 1, "0-": 1, "1+": 0, "1-": 1, "2": 0}
    return {"0+": 1, "0-": 1, "1+": n - 1, "1-": n - 1, "2": max(0, n * (n - 3) // 2)}


def reduced_eigensolve(patterns: FGPatterns, v0: float = 0.0) -> NormalModeSpectrum:
    """Five distinct roots from the sector-reduced GF problems."""
    n = patterns.n_particles
    f_sym, f_std, f_two = _sector_matrices(patterns.f, n)
    g_sym, g_std, g_two = _sector_matrices(patterns.g, n)

    lam = {}
    weight = {}
    (lam["0-"], lam["0+"]), (weight["0-"], weight["0+"]) = _sector_roots(f_sym, g_sym)
    roots, w = _sector_roots(f_std, g_std)
    if n >= 3:
        (lam["1-"], lam["1+"]), (weight["1-"], weight["1+"]) = roots, w
    else:
        lam["1-"], weight["1-"] = roots[0], w[0]
        lam["1+"], weight["1+"] = math.nan, 0.0
    if f_two is not None:
        lam["2"] = float(g_two[0, 0] * f_two[0, 0])
        weight["2"] = 0.0
    else:
        lam["2"], weight["2"] = math.nan, 0.0

    mult = mode_multiplicities(n)
    omega = {}
    for m in MODE_LABELS:
        if mult[m] == 0:
            omega[m] = math.nan
            continue
        if lam[m] <= 0:
            raise SaddlePointError(
                f"mode {m} has non-positive root {lam[m]:.6g}: not a minimum")
        omega[m] = math.sqrt(lam[m])
    return NormalModeSpectrum(n, omega, mult, v0, radial_weight=weight)


def full_eigensolve(patterns: FGPatterns) -> np.ndarray:
    """All N(N+1)/2 roots of G F from the dense pattern matrices, ascending."""
    n = patterns.n_particles
    if n > 60:
        raise ValueError("dense oracle limited to N <= 60")
    f, g = patterns.dense()
    return scipy.linalg.eigh(f, np.linalg.inv(g), eigvals_only=True)


def cluster_eigenvalues(values, tol: float = 1e-9) -> list[tuple[float, int]]:
    """Group sorted eigenvalues closer than ``tol``; returns (mean, count) pairs."""
    values = np.sort(np.asarray(values, dtype=float))
    groups = [[values[0]]]
    for v in values[1:]:
        if v - groups[-1][-1] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(float(np.mean(g)), len(g)) for g in groups]


def compute_v0(minimum, model, spec) -> float:
    """Constant term v0 of the harmonic-order energy.

    It is the delta-linear part of the scaled effective potential at the
    delta -> 0 minimum: four times the D-linear centrifugal coefficient plus
    the delta derivative of the pair interaction.
    """
    return effective_potential_delta_slope(minimum.coordinates(), model, spec)


def solve_normal_modes(minimum, model, spec, *, oracle_check: bool = False,
                       oracle_tol: float = 1e-10) -> tuple[FGPatterns, NormalModeSpectrum]:
    patterns = build_fg_patterns(minimum, model, spec)
    spectrum = reduced_eigensolve(patterns)
    spectrum = replace(spectrum, v0=compute_v0(minimum, model, spec))
    if oracle_check:
        check_against_dense(patterns, spectrum, tol=oracle_tol)
    return patterns, spectrum


def expanded_roots(spectrum: NormalModeSpectrum) -> np.ndarray:
    """Reduced roots repeated by multiplicity, ascending."""
    vals = []
    for m in spectrum.active_modes:
        vals.extend([spectrum.omega[m] ** 2] * spectrum.multiplicity[m])
    return np.sort(np.array(vals))


def check_against_dense(patterns: FGPatterns, spectrum: NormalModeSpectrum,
                        tol: float = 1e-10) -> float:
    """Relative max deviation between reduced and dense roots; raises above ``tol``."""
    dense = full_eigensolve(patterns)
    reduced = expanded_roots(spectrum)
    dev = float(np.max(np.abs(dense - reduced) / np.maximum(1.0, np.abs(dense))))
    if dev > tol:
        raise OracleMismatch(f"reduced and dense GF roots differ by {dev:.3e}")
    return dev
