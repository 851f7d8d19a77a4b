"""Residuals of the PDE systems on the meridian-family solutions, and their convergence.

Run: python demos/03_pde_residuals.py
"""

import numpy as np

from pnmc_lab.meridian import EUCLIDEAN_FAMILY, PARABOLIC_FAMILY, sine_kappa
from pnmc_lab.pde import (default_canonical_box, family_fields, family_solution, residual_convergence,
                          residual_minkowski)
from pnmc_lab.surface import ParamDomain

hs = (4e-2, 2e-2, 1e-2)
for family, eps in ((EUCLIDEAN_FAMILY, None), (PARABOLIC_FAMILY, 1)):
    study = residual_convergence(family_fields(family, sine_kappa()), default_canonical_box(family), hs, eps)
    print(family)
    for h, sup in zip(hs, study.sup):
        print(f"  h = {h:.0e}: r1 {sup[0]:.2e}  r2 {sup[1]:.2e}  r3 {sup[2]:.2e}")
    print("  observed orders", ", ".join(f"{o:.3f}" for o in study.orders))

# With the wrong sign of epsilon the third equation misses by exactly 2 mu^2.
lam, mu, nu = family_solution(PARABOLIC_FAMILY, None, ParamDomain(1.5, 2.5, -1.0, 0.0, 51, 51))
r = residual_minkowski(lam, mu, nu, -1)
print(f"epsilon = -1: r3 = {r.r3:.5f}, 2 max mu^2 = {2 * np.max(mu.values[1:-1, 1:-1] ** 2):.5f}")
