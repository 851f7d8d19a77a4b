"""Canonical parameters for the meridian surfaces, by closed form and by quadrature.

Run: python demos/02_canonical_parameters.py
"""

from pnmc_lab.canonical import (canonicity_residual, compose, meridian_canonical_chart,
                                reparametrize_integral, separable_factors)
from pnmc_lab.meridian import (EUCLIDEAN_FAMILY, PARABOLIC_FAMILY, constant_kappa, meridian_surface,
                               paraboloid_curve, spherical_curve)
from pnmc_lab.surface import ParamDomain

k = constant_kappa(1.0)
surfaces = {
    EUCLIDEAN_FAMILY: meridian_surface(EUCLIDEAN_FAMILY, spherical_curve(k, (-1.5, 2.5), 1e-3, 0.0)),
    PARABOLIC_FAMILY: meridian_surface(PARABOLIC_FAMILY, paraboloid_curve(k, (-0.5, 3.0), 1e-3, 0.0)),
}
original = ParamDomain(0.0, 2.0, 0.0, 2.0, 25, 25)
box = ParamDomain(1.5, 2.5, -1.0, 0.0, 25, 25)

for family, m in surfaces.items():
    chart = meridian_canonical_chart(family)
    print(family)
    print(f"  original (u, v):        residual {canonicity_residual(m, original):.2e}")
    print(f"  {chart.description}: residual {canonicity_residual(compose(m, chart), box):.2e}")

    # Axis-aligned route: (u, v) are orthogonal with E|mu| = phi(u), G|mu| = psi(v).
    factors = separable_factors(m, original)
    mi, rep = reparametrize_integral(m, factors)
    (a, b), (c, d) = rep.u_range, rep.v_range
    inner = ParamDomain(a + 0.01, b - 0.01, c + 0.01, d - 0.01, 25, 25)
    print(f"  integral chart:         residual {canonicity_residual(mi, inner):.2e}")
