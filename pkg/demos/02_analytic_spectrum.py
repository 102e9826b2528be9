"""
Analytic emission spectrum
==========================

The averaged model predicts delta lines at odd multiples of the drive
frequency and Lorentzians of common half-width ``Gamma_perp`` at ``eps_q``
and ``2n omega + eps_q``.  A negative Bessel factor turns a Lorentzian
upside down.
"""

import numpy as np

from dqs import DriveParams, RelaxRates, coherent_lines, derive, incoherent_spectrum

drive = DriveParams.from_strength(6.0, epsilon=0.1)
relax = RelaxRates(gamma=0.03)
d = derive(drive, relax)
print(f"a = 6: sigma0 = {d.sigma0:.4f}, eps_q = {d.eps_q:.5f}, Gamma_perp = {d.gamma_perp_dressed:.6f}")

# Coherent part: weights sigma0^2 J_{2n-1}(a)^2 at (2n-1) omega
print()
print("coherent lines")
for line in coherent_lines(drive, relax, n_max=5):
    print(f"  omega = {line.frequency:4.1f}   weight = {line.weight:.3e}")

# Incoherent part on a grid one tenth of a width apart
omega = np.arange(-0.5, 6.5, d.gamma_perp_dressed / 10)
grid, peaks = incoherent_spectrum(omega, drive, relax)
print()
print("incoherent peaks (n, center, amplitude)")
for p in peaks[:5]:
    print(f"  {p.harmonic}  {p.center:8.5f}  {p.amplitude:+.5f}", "(inverted)" if p.amplitude < 0 else "")

# The n = 1 line sits below zero because J_2(6) < 0
i = np.argmin(np.abs(omega - (2 + d.eps_q)))
print()
print(f"S at 2 omega + eps_q: {grid.values[i]:+.4f}")
