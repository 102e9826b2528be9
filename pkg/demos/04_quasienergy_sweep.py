"""
Quasienergy versus drive strength
=================================

The peak shifts of the numerical spectrum give the dressed splitting,
which follows ``eps J0(a)`` and changes sign at the zeros of ``J0``.  The
sweep here is coarse to keep the run short; ``dqs fig2`` runs the full grid
in parallel.
"""

import numpy as np

from dqs import DriveParams, RelaxRates, numeric_quasienergy, quasienergy

relax = RelaxRates(gamma=0.03)
print(f"{'a':>5} {'numeric':>10} {'eps J0(a)':>10}")
for a in np.arange(1.5, 12.01, 1.5):
    drive = DriveParams.from_strength(a, epsilon=0.1)
    eq, peaks = numeric_quasienergy(drive, relax)
    print(f"{a:5.2f} {eq:10.5f} {quasienergy(drive):10.5f}")
