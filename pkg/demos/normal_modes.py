"""
Five normal-mode frequencies at the symmetric minimum
=====================================================

The (N + N(N-1)/2)-dimensional vibrational problem about the symmetric
large-D configuration collapses to five distinct frequencies.  Here the
reduced solution is compared with brute-force diagonalisation of the full
matrices, and the frequencies are followed as N grows.
"""

import numpy as np

from sptfermi import SystemSpec, build_fg_patterns, find_symmetric_minimum, unitary_well
from sptfermi.spectrum import cluster_eigenvalues, expanded_roots, full_eigensolve, reduced_eigensolve

model = unitary_well(0.01)

n = 10
spec = SystemSpec.balanced(n, model)
minimum = find_symmetric_minimum(model, spec)
print(f"N={n}: rbar = {minimum.r_infinity:.6f}, gamma = {minimum.gamma_infinity:.6f}")

patterns = build_fg_patterns(minimum, model, spec)
reduced = reduced_eigensolve(patterns)
dense = full_eigensolve(patterns)
print("dense clusters (lambda, count):", [(round(v, 6), c) for v, c in cluster_eigenvalues(dense)])
print("max |dense - reduced| =", np.max(np.abs(dense - expanded_roots(reduced))))

print("\n N    w0+     w0-     w1+     w1-     w2")
for n in (4, 6, 10, 16, 24, 30):
    spec = SystemSpec.balanced(n, model)
    m = find_symmetric_minimum(model, spec)
    sp = reduced_eigensolve(build_fg_patterns(m, model, spec))
    print(f"{n:2d} " + " ".join(f"{sp.omega[k]:7.4f}" for k in ("0+", "0-", "1+", "1-", "2")))
