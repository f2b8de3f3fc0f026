"""
Finite-range extrapolation and a low-temperature partition function
===================================================================

The unitary energy depends weakly on the well radius.  Three radii are
fitted linearly to R -> 0.  The excited harmonic-order levels are then
enumerated for N = 6 and summed into Z(beta).
"""

import warnings

import numpy as np

from sptfermi import SystemSpec, enumerate_spectrum, extrapolate_zero_range, partition_function, unitary_well
from sptfermi.assembler import building_blocks, run_pipeline

res = extrapolate_zero_range(SystemSpec.balanced(6, unitary_well(0.01)), [0.08, 0.04, 0.02])
for r, e in zip(res.ranges, res.energies):
    print(f"R={r:.3f}  E={e:.6f}")
print(f"E(R -> 0) = {res.e_zero_range:.6f}, slope {res.slope:.4f}, residual {res.residual:.1e}")

spec = SystemSpec.balanced(6, unitary_well(0.01))
minimum, spectrum = building_blocks(spec)
e0 = run_pipeline(spec).total_unscaled
levels = enumerate_spectrum(spectrum, spec, e0 + 6.0, minimum.e_infinity)
print(f"\n{len(levels)} levels within 6 hbar*omega of the ground state")
for lv in levels[:8]:
    print(f"  E={lv.energy:.4f}  g={lv.degeneracy:3d}  quanta={lv.occupancy.counts}")

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    for beta in np.geomspace(0.5, 50, 5):
        p = partition_function(levels, beta)
        print(f"beta={beta:6.2f}  Z={p.z:12.4f}  truncation weight={p.tail_estimate:.1e}")
