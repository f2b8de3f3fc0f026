"""
Exact limits of the harmonic-order energy
=========================================

Two systems are solved exactly at first order in 1/D: the ideal Fermi gas
in the trap, and particles coupled pairwise by springs.  Both make good
sanity checks before trusting numbers for the unitary gas.
"""

import numpy as np

from sptfermi import HarmonicPair, NonInteracting, SystemSpec, run_pipeline

# The ideal gas: energies are sums of single-particle oscillator levels.
# Odd particle numbers whose lowest filling has an odd total l cannot satisfy
# the angular occupation rule and move up one oscillator quantum.
for n in range(2, 13):
    r = run_pipeline(SystemSpec.balanced(n, NonInteracting()))
    print(f"N={n:2d}  E={r.total_unscaled:6.2f}  occupancy={r.occupancy}")

# Harmonically coupled particles, with every normal mode empty.  The exact
# ground energy is 3/2 + (N-1)(3/2) sqrt(1 + N lambda).
lam = 0.1
for n in (3, 5, 10, 30):
    e = run_pipeline(SystemSpec.balanced(n, HarmonicPair(lam)), reference="boson").total_unscaled
    exact = 1.5 + (n - 1) * 1.5 * np.sqrt(1 + n * lam)
    print(f"N={n:2d}  E={e:.12f}  exact={exact:.12f}  diff={e - exact:+.1e}")
