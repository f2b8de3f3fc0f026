"""
Ground-state energies of the trapped unitary gas
================================================

A square well of radius R = 0.01 oscillator lengths is tuned to its first
zero-energy resonance, continued to arbitrary dimension, and the
harmonic-order energy is computed for N = 6 ... 30.  The first
differences E(N) - E(N-1) alternate with particle parity.

Writes ``unitary_energy.dat`` and ``unitary_diff.dat`` (two columns each)
for any external plotter.
"""

import time

from sptfermi import SystemSpec, tune_unitarity, unitary_well, sweep

tuning = tune_unitarity(0.01)
print(f"well depth {tuning.v_depth:.4f} hbar*omega, k0 R = {tuning.k0_radius:.12f}, "
      f"1/a_s = {tuning.inverse_scattering_length:.1e}")

t0 = time.perf_counter()
table = sweep(SystemSpec.balanced(6, unitary_well(0.01)), range(6, 31))
print(f"sweep took {time.perf_counter() - t0:.2f} s")

diffs = dict(table.first_differences())
for n, r in table.rows:
    d = diffs.get(n)
    print(f"N={n:2d}  E={r.total_unscaled:8.4f}  " + (f"dE={d:6.3f}" if d else ""))

print("staggering:", table.staggering())

with open("unitary_energy.dat", "w") as fh:
    for n, e in zip(table.n_values, table.energies):
        fh.write(f"{n} {e!r}\n")
with open("unitary_diff.dat", "w") as fh:
    for n, d in table.first_differences():
        fh.write(f"{n} {d!r}\n")
