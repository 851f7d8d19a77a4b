"""Second fundamental form, mean curvature vector, the geometric frame
{x, y, b, l} and the eight geometric functions of a surface in 4-space.

All routines broadcast over leading array axes, so a whole (n_u, n_v) grid
is processed in one call. Geometric functions follow the inner-product
convention: nu1 = <D_x x, b>, mu = <D_x y, l>, beta1 = <D_x b, l>, etc.
In E^4_1 this means coefficients along b and l carry the factors
1/<b, b> and 1/<l, l>.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._numerics import central_diff, map_rows, thread_cap
from .errors import FrameDegenerate, FrameFlip, MinimalPoint, NotNormal
from .pseudo_euclidean import as_signature, inner
from .surface import (DEFAULT_JET_STEP, FundamentalForm1, GridSurface, ParamDomain, SurfaceJet,
                      SurfaceMap, eval_jet, first_form, inverse_metric)

DEFAULT_TOL = 1e-10
ALIGN_MIN_COS = 0.9
_TIE = 1e-9


@dataclass
class SecondForm:
    """sigma on the orthonormal tangent basis (e1 = z_u/|z_u|, e2), normal parts only."""

    sigma_xx: np.ndarray
    sigma_xy: np.ndarray
    sigma_yy: np.ndarray


@dataclass
class _Local:
    first: FundamentalForm1
    ginv: tuple
    e1: np.ndarray
    e2: np.ndarray
    zv_e: tuple  # components of z_v in (e1, e2)
    sigma: SecondForm
    H: np.ndarray


@dataclass
class GeometricFrame:
    x: np.ndarray
    y: np.ndarray
    b: np.ndarray
    l: np.ndarray
    sign_b: np.ndarray
    sign_l: np.ndarray

    def matrix(self):
        """Columns x, y, b, l; shape (..., 4, 4)."""
        return np.stack([self.x, self.y, self.b, self.l], axis=-1)

    def take(self, index):
        return GeometricFrame(self.x[index], self.y[index], self.b[index], self.l[index],
                              np.asarray(self.sign_b)[index], np.asarray(self.sign_l)[index])


@dataclass
class GeometricFunctions:
    gamma1: np.ndarray
    gamma2: np.ndarray
    nu1: np.ndarray
    nu2: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray

    @property
    def nu(self):
        return (self.nu1 + self.nu2) / 2

    @property
    def nu_gap(self):
        return np.abs(self.nu1 - self.nu2)

    def as_dict(self):
        return {"gamma1": self.gamma1, "gamma2": self.gamma2, "nu1": self.nu1, "nu2": self.nu2,
                "lambda": self.lam, "mu": self.mu, "beta1": self.beta1, "beta2": self.beta2}


class PnmcTag(str, Enum):
    MINIMAL_POINT = "minimal_point"
    GENERIC = "generic"
    PNMC_NONPARALLEL_H = "pnmc_nonparallel_H"
    PARALLEL_H = "parallel_H"


@dataclass
class PnmcClassification:
    tag: PnmcTag
    sup_beta: float
    nu_sum_variation: float


# -- pointwise geometry ------------------------------------------------------

def _local(j: SurfaceJet, s) -> _Local:
    s = as_signature(s)
    ff = first_form(j, s)
    guu, guv, gvv = inverse_metric(ff)

    def perp(w):
        a = inner(w, j.z_u, s)
        c = inner(w, j.z_v, s)
        alpha = guu * a + guv * c
        beta = guv * a + gvv * c
        return w - alpha[..., None] * j.z_u - beta[..., None] * j.z_v

    s_uu, s_uv, s_vv = perp(j.z_uu), perp(j.z_uv), perp(j.z_vv)
    root_e = np.sqrt(ff.E)
    c = np.sqrt(ff.det / ff.E)
    t11 = 1 / root_e
    t21 = -ff.F / (ff.E * c)
    t22 = 1 / c
    e1 = j.z_u * t11[..., None]
    e2 = j.z_u * t21[..., None] + j.z_v * t22[..., None]
    sigma = SecondForm(
        sigma_xx=s_uu * (t11 ** 2)[..., None],
        sigma_xy=(s_uu * t21[..., None] + s_uv * t22[..., None]) * t11[..., None],
        sigma_yy=(s_uu * (t21 ** 2)[..., None] + s_uv * (2 * t21 * t22)[..., None]
                  + s_vv * (t22 ** 2)[..., None]),
    )
    H = 0.5 * (s_uu * guu[..., None] + 2 * s_uv * guv[..., None] + s_vv * gvv[..., None])
    return _Local(ff, (guu, guv, gvv), e1, e2, (ff.F / root_e, c), sigma, H)


def second_form(j: SurfaceJet, s) -> SecondForm:
    return _local(j, s).sigma


def mean_curvature(j: SurfaceJet, s):
    """Mean curvature vector H = (1/2) trace of sigma w.r.t. the induced metric."""
    return _local(j, s).H


def shape_operator(j: SurfaceJet, xi, s, tol=1e-8):
    """Matrix of A_xi on the orthonormal tangent basis (e1, e2).

    Entries are <sigma(e_i, e_j), xi>, i.e. <A_xi X, Y> = <sigma(X, Y), xi>.
    """
    loc = _local(j, s)
    xi = np.asarray(xi, dtype=float)
    for e in (loc.e1, loc.e2):
        scale = np.linalg.norm(xi, axis=-1) * np.linalg.norm(e, axis=-1)
        if np.any(np.abs(inner(xi, e, s)) > tol * np.maximum(scale, 1.0)):
            raise NotNormal("xi is not normal to the tangent plane")
    a11 = inner(loc.sigma.sigma_xx, xi, s)
    a12 = inner(loc.sigma.sigma_xy, xi, s)
    a22 = inner(loc.sigma.sigma_yy, xi, s)
    return np.stack([np.stack([a11, a12], -1), np.stack([a12, a22], -1)], -2)


def _normal_basis(j: SurfaceJet, s):
    d = as_signature(s).diag
    M = np.stack([j.z_u * d, j.z_v * d], axis=-2)
    _, _, vh = np.linalg.svd(M)
    return vh[..., 2, :], vh[..., 3, :]


def _frame_from_local(j: SurfaceJet, loc: _Local, s, tol):
    s = as_signature(s)
    H = loc.H
    if np.any(np.max(np.abs(H), axis=-1) <= tol):
        raise MinimalPoint("mean curvature vector vanishes")
    hh = inner(H, H, s)
    if np.any(np.abs(hh) <= tol * np.sum(H * H, axis=-1)):
        raise FrameDegenerate("mean curvature vector is lightlike")
    sign_b = np.sign(hh)
    b = H / np.sqrt(np.abs(hh))[..., None]

    n1, n2 = _normal_basis(j, s)
    cands = []
    for n in (n1, n2):
        w = n - (inner(n, b, s) * sign_b)[..., None] * b
        cands.append((w, inner(w, w, s)))
    pick = np.abs(cands[0][1]) >= np.abs(cands[1][1])
    w = np.where(pick[..., None], cands[0][0], cands[1][0])
    q = np.where(pick, cands[0][1], cands[1][1])
    sign_l = np.sign(q)
    l = w / np.sqrt(np.abs(q))[..., None]

    sg = loc.sigma
    s11 = inner(sg.sigma_xx, l, s)
    s12 = inner(sg.sigma_xy, l, s)
    s22 = inner(sg.sigma_yy, l, s)
    half = (s11 - s22) / 2
    r = np.hypot(half, s12)
    if np.any(r <= tol):
        raise FrameDegenerate("A_l vanishes (umbilic direction): |mu| below tolerance")
    theta0 = 0.5 * np.arctan2(-half, s12)
    # x . z_u maximal <=> theta in (-pi/4, pi/4]; ties at pi/4 go to y . z_v
    theta = np.pi / 4 + _TIE - np.mod(np.pi / 4 + _TIE - theta0, np.pi / 2)
    zv1, zv2 = loc.zv_e
    near = np.abs(theta - np.pi / 4) <= _TIE
    prefer_b = near & (zv1 > _TIE * zv2)
    theta = np.where(prefer_b, theta - np.pi / 2, theta)
    c, sn = np.cos(theta)[..., None], np.sin(theta)[..., None]
    x = c * loc.e1 + sn * loc.e2
    y = -sn * loc.e1 + c * loc.e2
    det = np.linalg.det(np.stack([x, y, b, l], axis=-1))
    l = np.where((det < 0)[..., None], -l, l)
    return GeometricFrame(x, y, b, l, sign_b, sign_l)


def geometric_frame(j: SurfaceJet, s, tol=DEFAULT_TOL) -> GeometricFrame:
    """Frame {x, y, b, l} at the jet's point(s).

    b = H/|H|; l spans the rest of the normal plane with det[x, y, b, l] > 0;
    {x, y} is the positively oriented tangent pair with
    <sigma(x, x), l> = <sigma(y, y), l> = 0, chosen with x . z_u maximal.
    """
    return _frame_from_local(j, _local(j, s), s, tol)


def align_frame(frame: GeometricFrame, ref: GeometricFrame, s, check=True):
    """Rotate (x, y) by a multiple of 90 degrees to best match ``ref``.

    The admissible frames at a point differ by such rotations only; b and l
    are fixed by H and orientation. Raises FrameFlip if no rotation matches.
    """
    xs = np.stack([frame.x, frame.y, -frame.x, -frame.y])
    ys = np.stack([frame.y, -frame.x, -frame.y, frame.x])
    scores = inner(xs, ref.x[None], s)
    k = np.argmax(scores, axis=0)
    best = np.take_along_axis(scores, k[None], 0)[0]
    x = np.take_along_axis(xs, k[None, ..., None], 0)[0]
    y = np.take_along_axis(ys, k[None, ..., None], 0)[0]
    if check:
        cb = inner(frame.b, ref.b, s) * frame.sign_b
        cl = inner(frame.l, ref.l, s) * frame.sign_l
        if np.any(best < ALIGN_MIN_COS) or np.any(cb < ALIGN_MIN_COS) or np.any(cl < ALIGN_MIN_COS):
            raise FrameFlip("frame field is discontinuous across the stencil")
    return GeometricFrame(x, y, frame.b, frame.l, frame.sign_b, frame.sign_l)


def _tangent_coefficients(vec, j: SurfaceJet, loc: _Local, s):
    """(X^u, X^v) with vec = X^u z_u + X^v z_v."""
    guu, guv, gvv = loc.ginv
    a = inner(vec, j.z_u, s)
    c = inner(vec, j.z_v, s)
    return guu * a + guv * c, guv * a + gvv * c


def _frame_step(m: SurfaceMap):
    if isinstance(m, GridSurface):
        return m.domain.h_u
    if m.jet is not None and m.jet_order >= 2:
        return 1e-4
    return DEFAULT_JET_STEP


@dataclass
class _Point:
    jet: SurfaceJet
    loc: _Local
    frame: GeometricFrame


def _points(m, U, V, s, tol, jet_h):
    def job(Ur, Vr):
        jet = eval_jet(m, Ur, Vr, order=2, h=jet_h)
        loc = _local(jet, s)
        return jet, loc, _frame_from_local(jet, loc, s, tol)

    jet, loc, frame = map_rows(job, U, V, thread_cap())
    return _Point(jet, loc, frame)


def _functions(m, center: _Point, U, V, s, h, tol, jet_h):
    s = as_signature(s)
    fr = center.frame
    shifted = {}
    for key, du, dv in (("p", h, 0.0), ("q", -h, 0.0), ("r", 0.0, h), ("t", 0.0, -h)):
        pt = _points(m, U + du, V + dv, s, tol, jet_h)
        shifted[key] = align_frame(pt.frame, fr, s)

    def d_u(attr):
        return (getattr(shifted["p"], attr) - getattr(shifted["q"], attr)) / (2 * h)

    def d_v(attr):
        return (getattr(shifted["r"], attr) - getattr(shifted["t"], attr)) / (2 * h)

    xu, xv = _tangent_coefficients(fr.x, center.jet, center.loc, s)
    yu, yv = _tangent_coefficients(fr.y, center.jet, center.loc, s)

    def along_x(attr):
        return xu[..., None] * d_u(attr) + xv[..., None] * d_v(attr)

    def along_y(attr):
        return yu[..., None] * d_u(attr) + yv[..., None] * d_v(attr)

    sg = center.loc.sigma
    e1, e2 = center.loc.e1, center.loc.e2
    # components of x, y on (e1, e2)
    cx1, cx2 = inner(fr.x, e1, s), inner(fr.x, e2, s)
    cy1, cy2 = inner(fr.y, e1, s), inner(fr.y, e2, s)

    def sigma(a1, a2, b1, b2):
        return (sg.sigma_xx * (a1 * b1)[..., None] + sg.sigma_xy * (a1 * b2 + a2 * b1)[..., None]
                + sg.sigma_yy * (a2 * b2)[..., None])

    sxx = sigma(cx1, cx2, cx1, cx2)
    sxy = sigma(cx1, cx2, cy1, cy2)
    syy = sigma(cy1, cy2, cy1, cy2)
    return GeometricFunctions(
        gamma1=inner(along_x("x"), fr.y, s),
        gamma2=inner(along_y("y"), fr.x, s),
        nu1=inner(sxx, fr.b, s),
        nu2=inner(syy, fr.b, s),
        lam=inner(sxy, fr.b, s),
        mu=inner(sxy, fr.l, s),
        beta1=inner(along_x("b"), fr.l, s),
        beta2=inner(along_y("b"), fr.l, s),
    ), (xu, xv, yu, yv)


def geometric_functions(m: SurfaceMap, u, v, s=None, h=None, tol=DEFAULT_TOL, jet_h=None):
    """The eight geometric functions at (u, v).

    Frame derivatives are central differences with step ``h`` of frames
    evaluated at the four neighbours, each rotated to match the centre
    frame first. nu1, nu2, lambda, mu come straight from the 2-jet.
    """
    s = m.signature if s is None else as_signature(s)
    h = _frame_step(m) if h is None else float(h)
    U, V = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    center = _points(m, U, V, s, tol, jet_h)
    gf, _ = _functions(m, center, U, V, s, h, tol, jet_h)
    return gf


@dataclass
class InvariantGrid:
    """Geometric data on every node of a ParamDomain."""

    domain: ParamDomain
    signature: object
    functions: GeometricFunctions
    frame: GeometricFrame
    first: FundamentalForm1
    H: np.ndarray
    x_coeffs: tuple
    y_coeffs: tuple

    @property
    def h_norm(self):
        return np.sqrt(np.abs(inner(self.H, self.H, self.signature)))


def propagate_alignment(frame: GeometricFrame, s):
    """Make a grid of frames continuous: first down the u-axis at j = 0,
    then along v for every row."""
    f = GeometricFrame(frame.x.copy(), frame.y.copy(), frame.b, frame.l,
                       np.asarray(frame.sign_b), np.asarray(frame.sign_l))
    n_u, n_v = f.x.shape[:2]
    for i in range(1, n_u):
        a = align_frame(f.take((slice(i, i + 1), slice(0, 1))),
                        f.take((slice(i - 1, i), slice(0, 1))), s)
        f.x[i, 0], f.y[i, 0] = a.x[0, 0], a.y[0, 0]
    for jj in range(1, n_v):
        a = align_frame(f.take((slice(None), jj)), f.take((slice(None), jj - 1)), s)
        f.x[:, jj], f.y[:, jj] = a.x, a.y
    return f


def invariant_grid(m: SurfaceMap, d: ParamDomain, s=None, h=None, tol=DEFAULT_TOL, jet_h=None):
    s = m.signature if s is None else as_signature(s)
    h = _frame_step(m) if h is None else float(h)
    U, V = d.mesh()
    center = _points(m, U, V, s, tol, jet_h)
    center.frame = propagate_alignment(center.frame, s)
    gf, (xu, xv, yu, yv) = _functions(m, center, U, V, s, h, tol, jet_h)
    return InvariantGrid(d, s, gf, center.frame, center.loc.first, center.loc.H, (xu, xv), (yu, yv))


def mean_curvature_from_functions(gf: GeometricFunctions, frame: GeometricFrame):
    """H rebuilt as ((nu1 + nu2)/2) b, with the 1/<b, b> factor in E^4_1."""
    return (gf.nu * frame.sign_b)[..., None] * frame.b


def classify_pnmc(m: SurfaceMap, d: ParamDomain, s=None, tol_beta=1e-6, tol_const=1e-6,
                  tol=DEFAULT_TOL, h=None) -> PnmcClassification:
    """Sort a surface patch into minimal / generic / PNMC / parallel-H."""
    s = m.signature if s is None else as_signature(s)
    U, V = d.mesh()
    jet = eval_jet(m, U, V, order=2, h=h)
    H = _local(jet, s).H
    if np.any(np.max(np.abs(H), axis=-1) <= tol):
        return PnmcClassification(PnmcTag.MINIMAL_POINT, float("nan"), float("nan"))
    grid = invariant_grid(m, d, s, h=h, tol=tol)
    gf = grid.functions
    sup_beta = float(np.max(np.maximum(np.abs(gf.beta1), np.abs(gf.beta2))))
    nu_sum = gf.nu1 + gf.nu2
    variation = float(np.max(nu_sum) - np.min(nu_sum))
    if sup_beta < tol_beta:
        tag = PnmcTag.PARALLEL_H if variation < tol_const else PnmcTag.PNMC_NONPARALLEL_H
    else:
        tag = PnmcTag.GENERIC
    return PnmcClassification(tag, sup_beta, variation)


INTEGRABILITY_LABELS = (
    "2 mu gamma2 + nu1 beta2 - lambda beta1 = x(mu)",
    "2 mu gamma1 - lambda beta2 + nu2 beta1 = y(mu)",
    "2 lambda gamma2 + mu beta1 - (nu1 - nu2) gamma1 = x(lambda) - y(nu1)",
    "2 lambda gamma1 + mu beta2 + (nu1 - nu2) gamma2 = -x(nu2) + y(lambda)",
    "gamma1 beta1 - gamma2 beta2 + (nu1 - nu2) mu = -x(beta2) + y(beta1)",
    "nu1 nu2 - (lambda^2 + mu^2) = x(gamma2) + y(gamma1) - gamma1^2 - gamma2^2",
)


def integrability_residual_fields(grid: InvariantGrid, reduced=False):
    """Pointwise left-minus-right sides of the six Gauss-Codazzi-Ricci
    conditions, shape (6, n_u, n_v); the boundary ring is NaN.

    In E^4_1 the terms contracted through b or l pick up 1/<b, b> or
    1/<l, l>. With ``reduced=True`` beta1 = beta2 = 0 is imposed first.
    """
    d = grid.domain
    gf = grid.functions
    xu, xv = grid.x_coeffs
    yu, yv = grid.y_coeffs
    sb = 1.0 / grid.frame.sign_b
    sl = 1.0 / grid.frame.sign_l
    g1, g2, n1, n2, lam, mu = gf.gamma1, gf.gamma2, gf.nu1, gf.nu2, gf.lam, gf.mu
    if reduced:
        b1 = b2 = np.zeros_like(mu)
    else:
        b1, b2 = gf.beta1, gf.beta2

    def dx(f):
        return xu * central_diff(f, d.h_u, 0) + xv * central_diff(f, d.h_v, 1)

    def dy(f):
        return yu * central_diff(f, d.h_u, 0) + yv * central_diff(f, d.h_v, 1)

    return np.stack([
        2 * mu * g2 + sb * (n1 * b2 - lam * b1) - dx(mu),
        2 * mu * g1 + sb * (n2 * b1 - lam * b2) - dy(mu),
        2 * lam * g2 + sl * mu * b1 - (n1 - n2) * g1 - dx(lam) + dy(n1),
        2 * lam * g1 + sl * mu * b2 + (n1 - n2) * g2 + dx(n2) - dy(lam),
        g1 * b1 - g2 * b2 + (n1 - n2) * mu + dx(b2) - dy(b1),
        sb * (n1 * n2 - lam ** 2) - sl * mu ** 2 - dx(g2) - dy(g1) + g1 ** 2 + g2 ** 2,
    ])


def integrability_residual(m: SurfaceMap, d: ParamDomain, s=None, h=None, reduced=False,
                           tol=DEFAULT_TOL):
    """Sup-norm of each of the six integrability residuals over the grid interior."""
    grid = invariant_grid(m, d, s, h=h, tol=tol)
    return np.nanmax(np.abs(integrability_residual_fields(grid, reduced)), axis=(1, 2))
