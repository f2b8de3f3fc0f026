"""Independent reference values used by the tests.

Nothing here calls into the package except for plain data types, so a bug
in the package cannot also hide in its oracle.
"""

import itertools
import math

import numpy as np


def shell_capacity(e: int) -> int:
    """Orbitals of one spin in oscillator shell e."""
    return (e + 1) * (e + 2) // 2


def lowest_shell_quanta(k: int) -> int:
    """Sum of 2 nu + l over the k lowest orbitals of one spin species."""
    total, e = 0, 0
    while k > 0:
        take = min(k, shell_capacity(e))
        total += take * e
        k -= take
        e += 1
    return total


def shell_model_energy(n_up: int, n_down: int) -> float:
    """sum_i (2 nu_i + l_i + 3/2) for the lowest filling, in hbar*omega."""
    return lowest_shell_quanta(n_up) + lowest_shell_quanta(n_down) + 1.5 * (n_up + n_down)


def admissible_shell_energy(n_up: int, n_down: int) -> float:
    """Lowest oscillator energy over fillings whose sum of l is even.

    Brute force over explicit (nu, l) occupations of both spins.
    """
    best = math.inf
    base = lowest_shell_quanta(n_up) + lowest_shell_quanta(n_down)
    for up in spin_fillings(n_up, 6, lowest_shell_quanta(n_up) + 4):
        for dn in spin_fillings(n_down, 6, lowest_shell_quanta(n_down) + 4):
            q = sum((2 * nu + l) * c for (nu, l), c in up + dn)
            if q > base + 4:
                continue
            if sum(l * c for (nu, l), c in up + dn) % 2 == 0:
                best = min(best, q + 1.5 * (n_up + n_down))
    return best


def harmonic_pair_energy(n: int, coupling: float) -> float:
    """Exact ground energy of N oscillators coupled by (coupling/2) r_ij^2 (boson reference)."""
    return 1.5 + (n - 1) * 1.5 * math.sqrt(1.0 + n * coupling)


def orbitals(max_shell: int):
    return [((e - l) // 2, l) for e in range(max_shell + 1) for l in range(e % 2, e + 1, 2)]


def spin_fillings(k: int, max_shell: int, budget: int | None = None):
    """All ways to put k same-spin fermions into (nu, l) subshells up to max_shell.

    With ``budget`` only fillings whose sum of 2 nu + l stays within it are kept.
    """
    orbs = orbitals(max_shell)
    budget = 10**9 if budget is None else budget
    out = []

    def rec(i, left, used, acc):
        if used > budget:
            return
        if left == 0:
            out.append(tuple(acc))
            return
        if i == len(orbs):
            return
        nu, l = orbs[i]
        for c in range(min(left, 2 * l + 1), -1, -1):
            rec(i + 1, left - c, used + c * (2 * nu + l), acc + [((nu, l), c)] if c else acc)

    rec(0, k, 0, [])
    return out


def brute_force_ground_energy(n_up: int, n_down: int, omega: dict, multiplicity: dict,
                              v0: float, extra: int = 4) -> float:
    """Minimum of sum (n + d/2) omega + v0 over every explicit filling up to
    ``extra`` shell quanta above the lowest and every occupancy satisfying
    2 (n_0- + n_1-) = sum 2 nu and 2 (n_0+ + n_1+ + n_2) = sum l."""
    labels = ("0+", "0-", "1+", "1-", "2")
    active = [m for m in labels if multiplicity[m] > 0]
    radial_modes = [m for m in ("0-", "1-") if m in active]
    angular_modes = [m for m in ("0+", "1+", "2") if m in active]
    zero_point = sum(0.5 * multiplicity[m] * omega[m] for m in active) + v0
    sums = set()
    for up in spin_fillings(n_up, 6, lowest_shell_quanta(n_up) + extra):
        for dn in spin_fillings(n_down, 6, lowest_shell_quanta(n_down) + extra):
            occ = up + dn
            sums.add((sum(2 * nu * c for (nu, l), c in occ), sum(l * c for (nu, l), c in occ)))
    best = math.inf
    for radial, angular in sums:
        if angular % 2:
            continue
        for nr in _splits(radial // 2, len(radial_modes)):
            for na in _splits(angular // 2, len(angular_modes)):
                e = sum(k * omega[m] for k, m in zip(nr, radial_modes))
                e += sum(k * omega[m] for k, m in zip(na, angular_modes))
                best = min(best, zero_point + e)
    return best


def _splits(total, parts):
    """Every tuple of ``parts`` non-negative integers summing to ``total``."""
    return [t for t in itertools.product(range(total + 1), repeat=parts) if sum(t) == total]


def explicit_degeneracy(counts: dict, multiplicity: dict) -> int:
    """Count the ways to spread n_mu quanta over d_mu individual modes, by listing them."""
    g = 1
    for m, n in counts.items():
        d = multiplicity[m]
        if n == 0:
            continue
        if d == 0:
            return 0
        g *= sum(1 for t in itertools.product(range(n + 1), repeat=d) if sum(t) == n)
    return g


def johnson_dense(c1: float, c2: float, c3: float, n: int) -> np.ndarray:
    """Pair-indexed matrix with c1 on the diagonal, c2 for pairs sharing an index, c3 otherwise."""
    pairs = list(itertools.combinations(range(n), 2))
    m = np.empty((len(pairs), len(pairs)))
    for a, p in enumerate(pairs):
        for b, q in enumerate(pairs):
            shared = len(set(p) & set(q))
            m[a, b] = c1 if shared == 2 else (c2 if shared == 1 else c3)
    return m
