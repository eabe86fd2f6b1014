"""Bulk-surface Cahn-Hilliard solver with kinetic-rate boundary coupling.

The package simulates a conserved phase field on a periodic strip coupled to
dynamic boundary conditions on the two boundary lines, with a kinetic-rate
parameter L interpolating between trace-coupled (L = 0), Robin-coupled
(0 < L < inf), and decoupled (L = inf) chemical potentials.  Non-smooth
potentials enter through their Yosida regularizations, and the package ships
rate studies verifying the regularization, kinetic-limit, and surface-diffusion
asymptotics together with conservation and dissipation checks.
"""

__version__ = "0.1.0"
