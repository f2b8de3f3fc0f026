"""Large-dimension effective potential over radii and pair angle cosines.

Internal coordinates are ordered as ``(r_1, ..., r_N, gamma_p for p in pairs)``
with pairs in lexicographic order (0,1), (0,2), ..., (N-2,N-1).

For L = 0 states the Laplacian in these coordinates is

    sum_i lap_i = (1/J) d_a (J g^ab d_b),   J = prod r_i^(D-1) * det(Gamma)^((D-N-1)/2),

with g^{r_i r_i} = 1, g^{g_ij g_ij} = (1 - g_ij^2)(1/r_i^2 + 1/r_j^2) and
g^{g_ij g_ik} = (g_jk - g_ij g_ik)/r_i^2.  Removing first derivatives with
Psi = J^(-1/2) Phi leaves the centrifugal potential

    U = (1/2) [ g^ab d_a d_b ln s + g^ab d_a ln s d_b ln s + (d_a g^ab) d_b ln s ],
    s = J^(1/2),

which is a quadratic polynomial in D: U = D^2 U2 + D U1 + U0.  In scaled
units the leading term 4 U2 = sum_i (Gamma^-1)_ii / (2 r_i^2) enters the
delta -> 0 potential, and 4 U1 is the delta-linear remainder collected in v0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .interaction import (
    pair_potential_delta_derivative,
    pair_potential_derivatives,
)


@lru_cache(maxsize=None)
def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(n, k=1)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def pair_index(i: int, j: int, n: int) -> int:
    """Position of pair (i, j) in the lexicographic pair list."""
    if i > j:
        i, j = j, i
    if i == j:
        raise ValueError("a pair needs two distinct particles")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class InternalCoordinates:
    radii: np.ndarray
    gammas: np.ndarray

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        gammas = np.asarray(self.gammas, dtype=float)
        n = radii.shape[0]
        if gammas.shape != (n, n):
            raise ValueError(f"gammas must be {n}x{n}, got {gammas.shape}")
        if np.any(radii <= 0):
            raise ValueError("radii must be positive")
        if not np.allclose(gammas, gammas.T, atol=1e-14):
            raise ValueError("angle-cosine matrix must be symmetric")
        if not np.allclose(np.diag(gammas), 1.0, atol=1e-14):
            raise ValueError("angle-cosine matrix must have unit diagonal")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "gammas", gammas)

    @property
    def n_particles(self) -> int:
        return self.radii.shape[0]

    @classmethod
    def symmetric(cls, n: int, r: float, gamma: float) -> "InternalCoordinates":
        g = np.full((n, n), gamma, dtype=float)
        np.fill_diagonal(g, 1.0)
        return cls(np.full(n, r, dtype=float), g)

    @classmethod
    def from_vector(cls, q, n: int) -> "InternalCoordinates":
        q = np.asarray(q, dtype=float)
        i, j = pair_indices(n)
        g = np.eye(n)
        g[i, j] = q[n:]
        g[j, i] = q[n:]
        return cls(q[:n].copy(), g)

    def to_vector(self) -> np.ndarray:
        i, j = pair_indices(self.n_particles)
        return np.concatenate([self.radii, self.gammas[i, j]])

    def pair_distances(self) -> np.ndarray:
        i, j = pair_indices(self.n_particles)
        r = self.radii
        return np.sqrt(r[i] ** 2 + r[j] ** 2 - 2.0 * r[i] * r[j] * self.gammas[i, j])


class GramianError(ValueError):
    def __init__(self, minor: int):
        super().__init__(f"Gramian is not positive definite (leading minor {minor})")
        self.minor = minor


def _inverse_gramian(gammas: np.ndarray) -> np.ndarray:
    try:
        chol = np.linalg.cholesky(gammas)
    except np.linalg.LinAlgError:
        n = gammas.shape[0]
        for k in range(1, n + 1):
            if np.linalg.det(gammas[:k, :k]) <= 0:
                raise GramianError(k) from None
        raise GramianError(n) from None
    inv_chol = np.linalg.inv(chol)
    return inv_chol.T @ inv_chol


def gramian_inverse_diagonal(gammas) -> np.ndarray:
    """Diagonal of the inverse Gramian of pair angle cosines.

    Raises
    ------
    GramianError
        If the matrix is not positive definite; ``.minor`` is the first
        non-positive leading principal minor (1-based).
    """
    return np.diag(_inverse_gramian(np.asarray(gammas, dtype=float))).copy()


def symmetric_gramian_factor(n: int, gamma: float) -> float:
    """(Gamma^-1)_ii for the configuration with all cosines equal to gamma."""
    return (1.0 + (n - 2) * gamma) / ((1.0 - gamma) * (1.0 + (n - 1) * gamma))


def effective_potential(coords: InternalCoordinates, model, spec) -> float:
    """delta -> 0 scaled effective potential.

    sum_i [(Gamma^-1)_ii / (2 r_i^2) + r_i^2 / 2] + w sum_{i<j} vbar(r_ij; 0)
    """
    r = coords.radii
    diag = gramian_inverse_diagonal(coords.gammas)
    value = float(np.sum(diag / (2.0 * r**2) + 0.5 * r**2))
    if coords.n_particles > 1:
        v = pair_potential_derivatives(model, coords.pair_distances(), 0.0)[0]
        value += spec.pair_weight() * float(np.sum(v))
    return value


def _pair_terms(coords, model, weight):
    """Gradient and Hessian of the weighted pair sum in full coordinates."""
    n = coords.n_particles
    i, j = pair_indices(n)
    npair = i.shape[0]
    dim = n + npair
    grad = np.zeros(dim)
    hess = np.zeros((dim, dim))
    if npair == 0:
        return 0.0, grad, hess
    r = coords.radii
    g = coords.gammas[i, j]
    rho = coords.pair_distances()
    v, dv, d2v = pair_potential_derivatives(model, rho, 0.0)
    # f(rho) = h(s) with s = rho^2
    h1 = dv / (2.0 * rho)
    h2 = (d2v - dv / rho) / (4.0 * rho**2)
    ri, rj = r[i], r[j]
    ds = np.stack([2 * ri - 2 * rj * g, 2 * rj - 2 * ri * g, -2 * ri * rj])
    d2s = np.array([[np.full_like(g, 2.0), -2 * g, -2 * rj],
                    [-2 * g, np.full_like(g, 2.0), -2 * ri],
                    [-2 * rj, -2 * ri, np.zeros_like(g)]])
    local_grad = weight * h1 * ds
    local_hess = weight * (h2 * ds[:, None, :] * ds[None, :, :] + h1 * d2s)
    idx = np.stack([i, j, n + np.arange(npair)])
    for a in range(3):
        np.add.at(grad, idx[a], local_grad[a])
        for b in range(3):
            np.add.at(hess, (idx[a], idx[b]), local_hess[a, b])
    return weight * float(np.sum(v)), grad, hess


def effective_potential_derivatives(coords: InternalCoordinates, model, spec):
    """Value, gradient and Hessian of the delta -> 0 effective potential.

    All derivatives are analytic and taken in the full set of
    N + N(N-1)/2 internal coordinates.
    """
    n = coords.n_particles
    r = coords.radii
    m = _inverse_gramian(coords.gammas)
    i, j = pair_indices(n)
    npair = i.shape[0]
    dim = n + npair
    s = 1.0 / r**2
    k = m @ (s[:, None] * m)

    value = float(np.sum(np.diag(m) * s / 2.0 + 0.5 * r**2))
    grad = np.zeros(dim)
    hess = np.zeros((dim, dim))

    grad[:n] = -np.diag(m) / r**3 + r
    hess[:n, :n] = np.diag(3.0 * np.diag(m) / r**4 + 1.0)
    if npair:
        grad[n:] = -k[i, j]
        cross = 2.0 * m[:, i] * m[:, j] / (r**3)[:, None]
        hess[:n, n:] = cross
        hess[n:, :n] = cross.T
        jj, kk = i[:, None], j[:, None]
        ll, mm = i[None, :], j[None, :]
        hess[n:, n:] = (m[jj, ll] * k[mm, kk] + m[jj, mm] * k[ll, kk]
                        + k[jj, ll] * m[mm, kk] + k[jj, mm] * m[ll, kk])

    pv, pg, ph = _pair_terms(coords, model, spec.pair_weight())
    return value + pv, grad + pg, hess + ph


def kinetic_metric(coords: InternalCoordinates) -> np.ndarray:
    """Contravariant metric g^ab of the internal-coordinate Laplacian."""
    n = coords.n_particles
    r = coords.radii
    gam = coords.gammas
    i, j = pair_indices(n)
    npair = i.shape[0]
    g = np.zeros((n + npair, n + npair))
    g[:n, :n] = np.eye(n)
    if npair == 0:
        return g
    inv_r2 = 1.0 / r**2
    pi_, pj = i[:, None], j[:, None]
    qi, qj = i[None, :], j[None, :]
    shape = (npair, npair)
    share = np.zeros(shape)
    # (shared index c, other index of p, other index of q, condition)
    for c, o1, o2, mask in (
        (pi_, pj, qj, (pi_ == qi) & (pj != qj)),
        (pi_, pj, qi, (pi_ == qj) & (pj != qi)),
        (pj, pi_, qj, (pj == qi) & (pi_ != qj)),
        (pj, pi_, qi, (pj == qj) & (pi_ != qi)),
    ):
        c, o1, o2 = (np.broadcast_to(x, shape) for x in (c, o1, o2))
        val = (gam[o1, o2] - gam[c, o1] * gam[c, o2]) * inv_r2[c]
        share = np.where(mask, val, share)
    diag = (1.0 - gam[i, j] ** 2) * (inv_r2[i] + inv_r2[j])
    share[np.arange(npair), np.arange(npair)] = diag
    g[n:, n:] = share
    return g


def centrifugal_coefficients(coords: InternalCoordinates) -> tuple[float, float, float]:
    """Coefficients (U2, U1, U0) of U = D^2 U2 + D U1 + U0 at ``coords``."""
    n = coords.n_particles
    r = coords.radii
    m = _inverse_gramian(coords.gammas)
    i, j = pair_indices(n)
    g = kinetic_metric(coords)
    mp = m[i, j]

    # ln s = D * A + B with A = (1/2) sum ln r + (1/4) ln det,
    # B = -(1/2) sum ln r - ((N+1)/4) ln det.
    d_a = np.concatenate([0.5 / r, 0.5 * mp])
    d_b = np.concatenate([-0.5 / r, -0.5 * (n + 1) * mp])
    hl = -2.0 * (m[i[:, None], i[None, :]] * m[j[:, None], j[None, :]]
                 + m[i[:, None], j[None, :]] * m[j[:, None], i[None, :]])
    dim = g.shape[0]
    h_a = np.zeros((dim, dim))
    h_b = np.zeros((dim, dim))
    h_a[:n, :n] = np.diag(-0.5 / r**2)
    h_b[:n, :n] = np.diag(0.5 / r**2)
    h_a[n:, n:] = 0.25 * hl
    h_b[n:, n:] = -0.25 * (n + 1) * hl
    div = np.concatenate([np.zeros(n), -n * coords.gammas[i, j] * (1 / r[i] ** 2 + 1 / r[j] ** 2)])

    u2 = 0.5 * d_a @ g @ d_a
    u1 = 0.5 * (np.sum(g * h_a) + 2.0 * d_a @ g @ d_b + div @ d_a)
    u0 = 0.5 * (np.sum(g * h_b) + d_b @ g @ d_b + div @ d_b)
    return float(u2), float(u1), float(u0)


def effective_potential_delta_slope(coords: InternalCoordinates, model, spec) -> float:
    """d Vbar_eff / d delta at delta = 0, evaluated at ``coords``."""
    u1 = centrifugal_coefficients(coords)[1]
    slope = 4.0 * u1
    if coords.n_particles > 1:
        dv = pair_potential_delta_derivative(model, coords.pair_distances(), 0.0)
        slope += spec.pair_weight() * float(np.sum(dv))
    return slope


# --------------------------------------------------------------------------
# symmetric restriction


@dataclass(frozen=True)
class SymmetricMinimum:
    n_particles: int
    r_infinity: float
    gamma_infinity: float
    e_infinity: float
    reduced_hessian: tuple[tuple[float, float], tuple[float, float]]
    pair_weight: float
    gradient_norm: float
    iterations: int = 0

    def coordinates(self) -> InternalCoordinates:
        return InternalCoordinates.symmetric(self.n_particles, self.r_infinity,
                                             self.gamma_infinity)

    def as_dict(self) -> dict:
        return {
            "n_particles": self.n_particles,
            "r_infinity": self.r_infinity,
            "gamma_infinity": self.gamma_infinity,
            "e_infinity": self.e_infinity,
            "reduced_hessian": [list(row) for row in self.reduced_hessian],
            "pair_weight": self.pair_weight,
            "gradient_norm": self.gradient_norm,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, data) -> "SymmetricMinimum":
        h = data["reduced_hessian"]
        return cls(int(data["n_particles"]), float(data["r_infinity"]),
                   float(data["gamma_infinity"]), float(data["e_infinity"]),
                   ((float(h[0][0]), float(h[0][1])), (float(h[1][0]), float(h[1][1]))),
                   float(data["pair_weight"]), float(data["gradient_norm"]),
                   int(data.get("iterations", 0)))


class MinimizationError(RuntimeError):
    pass


def restricted_potential(r: float, gamma: float, n: int, model, weight: float):
    """Value, gradient and Hessian of Vbar_eff on the symmetric slice (r, gamma)."""
    a = (n - 1) / n
    u = 1.0 - gamma
    w = 1.0 + (n - 1) * gamma
    c = a / u + (1.0 / n) / w
    c1 = a / u**2 - a / w**2
    c2 = 2 * a / u**3 + 2 * a * (n - 1) / w**3

    value = n * (c / (2 * r**2) + 0.5 * r**2)
    g_r = n * (-c / r**3 + r)
    g_g = n * c1 / (2 * r**2)
    h_rr = n * (3 * c / r**4 + 1.0)
    h_rg = -n * c1 / r**3
    h_gg = n * c2 / (2 * r**2)

    npair = n * (n - 1) // 2
    if npair and weight != 0.0:
        rho = r * np.sqrt(2.0 * u)
        f, f1, f2 = (float(x) for x in pair_potential_derivatives(model, rho, 0.0))
        rho_r = rho / r
        rho_g = -r**2 / rho
        rho_rg = -r / rho
        rho_gg = -r * (2.0 * u) ** -1.5
        k = weight * npair
        value += k * f
        g_r += k * f1 * rho_r
        g_g += k * f1 * rho_g
        h_rr += k * f2 * rho_r**2
        h_rg += k * (f2 * rho_r * rho_g + f1 * rho_rg)
        h_gg += k * (f2 * rho_g**2 + f1 * rho_gg)
    return value, np.array([g_r, g_g]), np.array([[h_rr, h_rg], [h_rg, h_gg]])


def find_symmetric_minimum(model, spec, *, grad_tol: float = 1e-10,
                           step_tol: float = 1e-12, max_iter: int = 200) -> SymmetricMinimum:
    """Damped Newton minimization of the symmetric slice, started at (1, 0)."""
    n = spec.n_particles
    if n < 2:
        raise ValueError("at least two particles are required")
    weight = spec.pair_weight()
    gamma_lo = -1.0 / (n - 1)

    def inside(x):
        return x[0] > 0 and gamma_lo < x[1] < 1.0

    def f(x):
        return restricted_potential(x[0], x[1], n, model, weight)

    x = np.array([1.0, 0.0])
    val, grad, hess = f(x)
    it = 0
    for it in range(1, max_iter + 1):
        if np.linalg.norm(grad) < grad_tol:
            break
        try:
            eig = np.linalg.eigvalsh(hess)
            step = -np.linalg.solve(hess, grad) if eig[0] > 0 else -grad
        except np.linalg.LinAlgError:
            step = -grad
        t = 1.0
        while t > 1e-12:
            trial = x + t * step
            if inside(trial):
                tv, tg, _ = f(trial)
                # Near the minimum V stops resolving the decrease; fall back to |grad|.
                if (tv <= val + 1e-4 * t * float(grad @ step)
                        or np.linalg.norm(tg) < 0.5 * np.linalg.norm(grad)
                        or np.linalg.norm(t * step) < step_tol):
                    break
            t *= 0.5
        else:
            raise MinimizationError("line search failed to leave the starting point")
        x = x + t * step
        val, grad, hess = f(x)
        if np.linalg.norm(t * step) < step_tol and np.linalg.norm(grad) < 1e3 * grad_tol:
            break
    gnorm = float(np.linalg.norm(grad))
    if gnorm >= grad_tol:
        raise MinimizationError(
            f"Newton iteration did not converge: |grad| = {gnorm:.3e} after {it} steps")
    if np.linalg.eigvalsh(hess)[0] <= 0:
        raise MinimizationError(
            f"stationary point at r={x[0]:.6g}, gamma={x[1]:.6g} is not a minimum")
    return SymmetricMinimum(
        n_particles=n,
        r_infinity=float(x[0]),
        gamma_infinity=float(x[1]),
        e_infinity=float(val),
        reduced_hessian=((float(hess[0, 0]), float(hess[0, 1])),
                         (float(hess[1, 0]), float(hess[1, 1]))),
        pair_weight=weight,
        gradient_norm=gnorm,
        iterations=it,
    )
