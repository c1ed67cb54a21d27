"""Closed-form levels against the finite-difference oracle.

For a handful of channels this prints the analytic energy of every
solvability mode next to the Richardson-extrapolated oracle value, so the
reason one mode is the validated one is visible at a glance.

    python demos/spectrum_vs_oracle.py
"""

from curved_mie import PhysicalParams, SolvabilityMode, enumerate_levels
from curved_mie.oracle import curved_spectrum

p = PhysicalParams(hbar=1.0, mu=1.0, R=2.0, a=1.0, V0=1.0)
for m in (0, 1):
    oracle = curved_spectrum(p, m, 4, 8192).eigenvalues
    print(f"channel m = {m}")
    print(f"  {'n':>2} {'oracle':>14} " + " ".join(f"{mode.value:>14}" for mode in SolvabilityMode))
    levels = {mode: enumerate_levels(4, m, p, mode) for mode in SolvabilityMode}
    for i, ref in enumerate(oracle):
        cells = " ".join(f"{levels[mode][i].energy:14.8f}" for mode in SolvabilityMode)
        print(f"  {i + 1:>2} {ref:14.8f} {cells}")
