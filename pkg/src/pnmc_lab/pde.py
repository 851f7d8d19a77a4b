"""Residuals of the PDE systems satisfied by (lambda, mu, nu) in canonical parameters.

Euclidean 4-space::

    nu_u = lam_v - lam (ln|mu|)_v
    nu_v = lam_u - lam (ln|mu|)_u
    nu^2 - (lam^2 + mu^2) = 1/2 |mu| Lap ln|mu|

Minkowski 4-space replaces the last line by
``eps (nu^2 - lam^2 + mu^2) = 1/2 |mu| Lap ln|mu|`` where ``eps = +1`` when the
mean curvature vector is spacelike.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._numerics import central_diff, observed_order
from .canonical import meridian_canonical_chart
from .errors import DomainViolation, GridTooSmall, MuVanishes, ValidationError
from .meridian import EUCLIDEAN_FAMILY, FAMILIES, PARABOLIC_FAMILY, CurvatureProfile, constant_kappa
from .surface import ParamDomain

MU_FLOOR = 1e-12


@dataclass
class GridField:
    """Scalar samples on a uniform grid; ``values[i, j]`` sits at (u0 + i h_u, v0 + j h_v)."""

    values: np.ndarray
    spacing: tuple
    origin: tuple = (0.0, 0.0)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValidationError("grid field values must be a 2-D array")
        if len(self.spacing) != 2 or min(self.spacing) <= 0:
            raise ValidationError("grid spacing must be two positive numbers")
        self.spacing = (float(self.spacing[0]), float(self.spacing[1]))
        self.origin = (float(self.origin[0]), float(self.origin[1]))

    @property
    def shape(self):
        return self.values.shape

    @property
    def domain(self) -> ParamDomain:
        n_u, n_v = self.shape
        return ParamDomain(self.origin[0], self.origin[0] + (n_u - 1) * self.spacing[0],
                           self.origin[1], self.origin[1] + (n_v - 1) * self.spacing[1], n_u, n_v)

    @classmethod
    def sample(cls, func, d: ParamDomain):
        U, V = d.mesh()
        return cls(func(U, V), (d.h_u, d.h_v), (d.u_min, d.v_min))

    def with_values(self, values):
        return GridField(values, self.spacing, self.origin)

    def same_geometry(self, other):
        return (self.shape == other.shape
                and np.allclose(self.spacing, other.spacing, rtol=1e-12, atol=0)
                and np.allclose(self.origin, other.origin, rtol=1e-12, atol=1e-14))


def laplacian(f: GridField) -> GridField:
    """Five-point Laplacian; the boundary ring is NaN."""
    n_u, n_v = f.shape
    if n_u < 3 or n_v < 3:
        raise GridTooSmall(f"laplacian needs at least 3x3 nodes, got {n_u}x{n_v}")
    a = f.values
    hu, hv = f.spacing
    out = np.full(a.shape, np.nan)
    out[1:-1, 1:-1] = ((a[2:, 1:-1] - 2 * a[1:-1, 1:-1] + a[:-2, 1:-1]) / hu ** 2
                       + (a[1:-1, 2:] - 2 * a[1:-1, 1:-1] + a[1:-1, :-2]) / hv ** 2)
    return f.with_values(out)


@dataclass
class ResidualReport:
    """Sup and RMS norms of the three residuals over the valid interior."""

    r1: float
    r2: float
    r3: float
    r1_rms: float
    r2_rms: float
    r3_rms: float
    epsilon: Optional[int]
    excluded: int
    valid: int

    @property
    def sup(self):
        return (self.r1, self.r2, self.r3)

    def as_dict(self):
        return {"r1": {"sup": self.r1, "rms": self.r1_rms},
                "r2": {"sup": self.r2, "rms": self.r2_rms},
                "r3": {"sup": self.r3, "rms": self.r3_rms},
                "epsilon": self.epsilon, "excluded_small_mu": self.excluded,
                "valid_nodes": self.valid}


def _check(lam, mu, nu):
    for f in (mu, nu):
        if not lam.same_geometry(f):
            raise ValidationError("lambda, mu and nu must share grid geometry")
    n_u, n_v = lam.shape
    if n_u < 3 or n_v < 3:
        raise GridTooSmall(f"residuals need at least 3x3 nodes, got {n_u}x{n_v}")


def residual_fields(lam: GridField, mu: GridField, nu: GridField, eps=None):
    """Pointwise residuals, shape (3, n_u, n_v); NaN where not computable.

    ``eps=None`` selects the Euclidean system; ``eps=+1/-1`` the Minkowski one.
    Returns the residual stack and the count of nodes dropped for |mu| < 1e-12.
    """
    _check(lam, mu, nu)
    if eps not in (None, 1, -1):
        raise ValidationError(f"epsilon must be +1, -1 or None, got {eps!r}")
    hu, hv = lam.spacing
    L, M, N = lam.values, mu.values, nu.values
    small = np.abs(M) < MU_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mu = np.where(small, np.nan, np.log(np.abs(M)))
    lap = laplacian(mu.with_values(log_mu)).values
    r1 = central_diff(N, hu, 0) - central_diff(L, hv, 1) + L * central_diff(log_mu, hv, 1)
    r2 = central_diff(N, hv, 1) - central_diff(L, hu, 0) + L * central_diff(log_mu, hu, 0)
    if eps is None:
        lhs = N ** 2 - L ** 2 - M ** 2
    else:
        lhs = eps * (N ** 2 - L ** 2 + M ** 2)
    r3 = lhs - 0.5 * np.abs(M) * lap
    return np.stack([r1, r2, r3]), int(small.sum())


def _report(res, excluded, eps):
    ok = np.all(np.isfinite(res), axis=0)
    if not ok.any():
        raise MuVanishes("no grid node has |mu| above the floor with a complete stencil")
    vals = np.abs(res[:, ok])
    sup = vals.max(axis=1)
    rms = np.sqrt(np.mean(vals ** 2, axis=1))
    return ResidualReport(*map(float, sup), *map(float, rms), epsilon=eps,
                          excluded=excluded, valid=int(ok.sum()))


def residual_euclidean(lam: GridField, mu: GridField, nu: GridField) -> ResidualReport:
    res, excluded = residual_fields(lam, mu, nu, None)
    return _report(res, excluded, None)


def residual_minkowski(lam: GridField, mu: GridField, nu: GridField, eps) -> ResidualReport:
    if eps not in (1, -1):
        raise ValidationError(f"epsilon must be +1 or -1, got {eps!r}")
    res, excluded = residual_fields(lam, mu, nu, eps)
    return _report(res, excluded, eps)


@dataclass
class CanonicalFields:
    """Closed-form (lambda, mu, nu) as functions of canonical parameters."""

    family: str
    kappa: CurvatureProfile
    evaluate: Callable
    epsilon: Optional[int]

    def __call__(self, ub, vb):
        return self.evaluate(ub, vb)


def family_fields(family, kappa=None) -> CanonicalFields:
    """Meridian-family fields expressed through the closed-form canonical chart."""
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}")
    kappa = constant_kappa(1.0) if kappa is None else kappa
    k = kappa.kappa if isinstance(kappa, CurvatureProfile) else kappa
    chart = meridian_canonical_chart(family)

    if family == EUCLIDEAN_FAMILY:
        def evaluate(ub, vb):
            u, v = chart.inverse(ub, vb)
            q = u ** 2 + 2 * u + 5
            lam = k(v) / (2 * np.sqrt(q))
            return lam, 2 / q, lam.copy()
        eps = None
    else:
        def evaluate(ub, vb):
            ub = np.asarray(ub, dtype=float)
            if np.any(ub - vb <= 0):
                raise DomainViolation("these fields need ubar > vbar")
            u, v = chart.inverse(ub, vb)
            lam = k(v) / (2 * np.sqrt(u + 1))
            return lam, -1 / (2 * (u + 1)), lam.copy()
        eps = 1
    if not isinstance(kappa, CurvatureProfile):
        kappa = CurvatureProfile(k, None, "custom")
    return CanonicalFields(family, kappa, evaluate, eps)


def family_solution(family, kappa, grid: ParamDomain):
    """Sample the meridian-family fields on a canonical-parameter grid."""
    f = family_fields(family, kappa)
    U, V = grid.mesh()
    lam, mu, nu = f(U, V)
    spacing, origin = (grid.h_u, grid.h_v), (grid.u_min, grid.v_min)
    return GridField(lam, spacing, origin), GridField(mu, spacing, origin), GridField(nu, spacing, origin)


def default_canonical_box(family):
    """A canonical-parameter rectangle covering the acceptance domain u, v in [0, 2]."""
    if family == EUCLIDEAN_FAMILY:
        return (1.5, 2.5, -1.0, 0.0)
    if family == PARABOLIC_FAMILY:
        return (1.5, 2.5, -1.0, 0.0)
    raise ValidationError(f"unknown family {family!r}")


@dataclass
class ConvergenceStudy:
    hs: tuple
    sup: np.ndarray
    orders: tuple


def residual_convergence(fields: CanonicalFields, box, hs, eps=None) -> ConvergenceStudy:
    """Sup residuals on nested grids, measured at the nodes shared by all grids.

    ``hs`` must be coarse-to-fine with integer ratios and ``box`` a multiple of
    the coarsest step. Residual components that are already below 1e-12 on the
    coarsest grid are reported with order ``inf`` (identically satisfied).
    """
    hs = tuple(float(h) for h in hs)
    u0, u1, v0, v1 = box
    coarse = hs[0]
    sups = []
    for h in hs:
        n_u = int(round((u1 - u0) / h)) + 1
        n_v = int(round((v1 - v0) / h)) + 1
        d = ParamDomain(u0, u0 + (n_u - 1) * h, v0, v0 + (n_v - 1) * h, n_u, n_v)
        lam, mu, nu = family_solution(fields.family, fields.kappa, d)
        res, _ = residual_fields(lam, mu, nu, eps)
        stride = int(round(coarse / h))
        pick = res[:, stride::stride, stride::stride][:, :-1, :-1]
        sups.append(np.nanmax(np.abs(pick), axis=(1, 2)))
    sups = np.array(sups)
    orders = []
    for c in range(3):
        if sups[0, c] < 1e-12:
            orders.append(float("inf"))
        else:
            orders.append(observed_order(hs, sups[:, c]))
    return ConvergenceStudy(hs, sups, tuple(orders))
