"""Surfaces in E^4 and E^4_1 with parallel normalized mean curvature vector.

Modules
-------
pseudo_euclidean  signature-aware vector algebra
surface           parametrized surfaces, derivative jets, first fundamental form
frame_invariants  geometric frame, the eight geometric functions, PNMC test
canonical         canonical parameters (E = G = 1/|mu|, F = 0)
pde               residuals of the PDE systems for (lambda, mu, nu)
meridian          the Euclidean and lightlike-axis meridian surface families
reconstruct       surface reconstruction from (lambda, mu, nu)
cli               command-line front end (``pnmc-lab``)
"""

__version__ = "0.1.0"
