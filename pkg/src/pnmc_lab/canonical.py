"""Canonical parameters: E = G = 1/|mu|, F = 0.

Two ways to reach them are provided. ``reparametrize_integral`` follows the
existence argument for orthogonal parameters with separable E|mu| = phi(u),
G|mu| = psi(v): integrate sqrt(phi) and sqrt(psi) along the axes.
``meridian_canonical_chart`` returns the closed-form charts of the two
meridian families, which mix u and v and so cannot come from the axis-aligned
recipe. Canonical parameters are not unique; both kinds pass
``canonicity_residual``.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (DomainViolation, NonMonotone, NotOrthogonal, NotSeparable, QuadratureFailure,
                     ValidationError)
from .frame_invariants import DEFAULT_TOL, _frame_from_local, _local
from .meridian import EUCLIDEAN_FAMILY, PARABOLIC_FAMILY
from .pseudo_euclidean import inner
from .surface import ParamDomain, SurfaceJet, SurfaceMap, eval_jet

QUAD_TOL = 1e-10


def abs_mu(j: SurfaceJet, s, tol=DEFAULT_TOL):
    """|mu| at the jet's points; needs only the 2-jet."""
    loc = _local(j, s)
    fr = _frame_from_local(j, loc, s, tol)
    sg = loc.sigma
    half = (inner(sg.sigma_xx, fr.l, s) - inner(sg.sigma_yy, fr.l, s)) / 2
    return np.hypot(half, inner(sg.sigma_xy, fr.l, s)), loc.first


def canonicity_residual_at(m: SurfaceMap, U, V, s=None, jet_h=None):
    """Pointwise max(|E - 1/|mu||, |F|, |G - 1/|mu||) * |mu| at arbitrary parameter points."""
    s = m.signature if s is None else s
    j = eval_jet(m, U, V, order=2, h=jet_h)
    mu, ff = abs_mu(j, s)
    target = 1 / mu
    dev = np.maximum.reduce([np.abs(ff.E - target), np.abs(ff.F), np.abs(ff.G - target)])
    return dev / target


def canonicity_residual(m: SurfaceMap, d: ParamDomain, s=None, jet_h=None):
    """sup over the grid of max(|E - 1/|mu||, |F|, |G - 1/|mu||) * |mu|."""
    U, V = d.mesh()
    return float(np.max(canonicity_residual_at(m, U, V, s, jet_h)))


@dataclass
class SeparableFactors:
    u: np.ndarray
    phi: np.ndarray
    v: np.ndarray
    psi: np.ndarray
    separability_error: float
    phi_fn: Optional[Callable] = None
    psi_fn: Optional[Callable] = None


def separable_factors(m: SurfaceMap, d: ParamDomain, s=None, tol_f=1e-8, tol_sep=1e-6,
                      jet_h=None) -> SeparableFactors:
    """phi(u) = E|mu| averaged over v, psi(v) = G|mu| averaged over u.

    Raises NotOrthogonal if |F| exceeds ``tol_f`` (relative to sqrt(EG)) and
    NotSeparable if the relative spread around the averages exceeds ``tol_sep``.
    """
    s = m.signature if s is None else s
    U, V = d.mesh()
    j = eval_jet(m, U, V, order=2, h=jet_h)
    mu, ff = abs_mu(j, s)
    if np.max(np.abs(ff.F) / np.sqrt(ff.E * ff.G)) > tol_f:
        raise NotOrthogonal("parameters are not orthogonal (F != 0)")
    e_mu = ff.E * mu
    g_mu = ff.G * mu
    phi = e_mu.mean(axis=1)
    psi = g_mu.mean(axis=0)
    err = max(np.max(np.abs(e_mu / phi[:, None] - 1)), np.max(np.abs(g_mu / psi[None, :] - 1)))
    if err > tol_sep:
        raise NotSeparable(f"E|mu| or G|mu| is not separable (relative spread {err:.2e})")
    u_ref = d.u[d.n_u // 2]
    v_ref = d.v[d.n_v // 2]

    def phi_fn(u):
        u = np.asarray(u, dtype=float)
        jj = eval_jet(m, u, np.full(u.shape, v_ref), order=2, h=jet_h)
        a, f1 = abs_mu(jj, s)
        return f1.E * a

    def psi_fn(v):
        v = np.asarray(v, dtype=float)
        jj = eval_jet(m, np.full(v.shape, u_ref), v, order=2, h=jet_h)
        a, f1 = abs_mu(jj, s)
        return f1.G * a

    return SeparableFactors(d.u, phi, d.v, psi, float(err), phi_fn, psi_fn)


def adaptive_simpson(f, a, b, tol=QUAD_TOL, max_depth=50):
    """Adaptive Simpson with Richardson correction; ``f`` must accept arrays."""
    fa, fm, fb = f(np.array([a, (a + b) / 2, b]))
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = (lo + hi) / 2
        fl, fr = f(np.array([(lo + mid) / 2, (mid + hi) / 2]))
        left = (mid - lo) / 6 * (flo + 4 * fl + fmid)
        right = (hi - mid) / 6 * (fmid + 4 * fr + fhi)
        delta = left + right - est
        if abs(delta) <= 15 * eps:
            total += left + right + delta / 15
        elif depth >= max_depth:
            raise QuadratureFailure(f"adaptive Simpson did not converge on [{lo}, {hi}]")
        else:
            stack.append((mid, hi, fmid, fr, fhi, right, eps / 2, depth + 1))
            stack.append((lo, mid, flo, fl, fmid, left, eps / 2, depth + 1))
    return total


def _composite_simpson(f, a, b, panels=8):
    """Vectorized fixed composite Simpson over many intervals [a_i, b_i]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t = np.linspace(0.0, 1.0, 2 * panels + 1)
    w = np.ones_like(t)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    x = a[..., None] + (b - a)[..., None] * t
    return (b - a) / (6 * panels) * np.sum(w * f(x), axis=-1)


class _AxisIntegral:
    """Monotone map s(x) = s0 + int_{x0}^x sqrt(w) and its inverse."""

    def __init__(self, weight, lo, hi, x0, s0, nodes=257):
        self.weight = weight
        self.root = lambda x: np.sqrt(weight(x))
        xs = np.linspace(lo, hi, nodes)
        if np.any(weight(xs) <= 0):
            raise NonMonotone("integrand weight must be strictly positive")
        seg = np.array([adaptive_simpson(self.root, xs[k], xs[k + 1], QUAD_TOL / nodes)
                        for k in range(nodes - 1)])
        table = np.concatenate([[0.0], np.cumsum(seg)])
        self.xs = xs
        self.lo, self.hi = lo, hi
        self.offset = s0 - self._raw(np.array(x0), table)
        self.table = table + self.offset
        if np.any(np.diff(self.table) <= 0):
            raise NonMonotone("reparametrization is not strictly increasing")

    def _raw(self, x, table):
        k = np.clip(np.rint((x - self.lo) / (self.xs[1] - self.xs[0])).astype(int), 0, len(self.xs) - 1)
        return table[k] + _composite_simpson(self.root, self.xs[k], x)

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.lo - 1e-12) or np.any(x > self.hi + 1e-12):
            raise DomainViolation(f"argument outside the tabulated range [{self.lo}, {self.hi}]")
        return self._raw(x, self.table - self.offset) + self.offset

    def inverse(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < self.table[0] - 1e-12) or np.any(s > self.table[-1] + 1e-12):
            raise DomainViolation("value outside the range of the reparametrization")
        x = np.interp(s, self.table, self.xs)
        k = np.clip(np.searchsorted(self.table, s) - 1, 0, len(self.xs) - 2)
        lo, hi = self.xs[k], self.xs[k + 1]
        for _ in range(60):
            step = (self.forward(x) - s) / self.root(x)
            x = np.clip(x - step, lo, hi)
            if np.all(np.abs(step) < 1e-14 * (1 + np.abs(x))):
                break
        return x

    def d1(self, x):
        """dx/ds at x."""
        return 1 / self.root(x)

    def d2(self, x, h=1e-5):
        """d^2x/ds^2 = -w'(x) / (2 w(x)^2)."""
        dw = (self.weight(x + h) - self.weight(x - h)) / (2 * h)
        return -dw / (2 * self.weight(x) ** 2)


@dataclass
class Reparametrization:
    """Chart change (u, v) <-> (ubar, vbar).

    ``inverse_jet(ub, vb)`` returns (u, v, du, dv, ddu, ddv) where ``du`` is
    (u_ub, u_vb), ``ddu`` is (u_ubub, u_ubvb, u_vbvb), likewise for v.
    """

    forward: Callable
    inverse: Callable
    inverse_jet: Callable
    kind: str
    description: str = ""


def compose(m: SurfaceMap, rep: Reparametrization, name=None) -> SurfaceMap:
    """Surface zbar(ub, vb) = z(u(ub, vb), v(ub, vb)) with a chain-rule 2-jet."""

    def evaluate(ub, vb):
        u, v = rep.inverse(ub, vb)
        return m(u, v)

    def jet(ub, vb, order):
        u, v, du, dv, ddu, ddv = rep.inverse_jet(ub, vb)
        j = eval_jet(m, u, v, order=2)

        def first(k):
            return j.z_u * du[k][..., None] + j.z_v * dv[k][..., None]

        def second(a, b, k):
            return (j.z_uu * (du[a] * du[b])[..., None]
                    + j.z_uv * (du[a] * dv[b] + dv[a] * du[b])[..., None]
                    + j.z_vv * (dv[a] * dv[b])[..., None]
                    + j.z_u * ddu[k][..., None] + j.z_v * ddv[k][..., None])

        return SurfaceJet(z=j.z, z_u=first(0), z_v=first(1),
                          z_uu=second(0, 0, 0), z_uv=second(0, 1, 1), z_vv=second(1, 1, 2))

    return SurfaceMap(evaluate, m.signature, jet=jet, jet_order=2,
                      name=name or f"{m.name} in {rep.kind} chart")


def reparametrize_integral(m: SurfaceMap, f: SeparableFactors, origin=None, bar_origin=(0.0, 0.0)):
    """Axis-aligned canonical chart ub = int sqrt(phi) du, vb = int sqrt(psi) dv.

    Returns the composed SurfaceMap and the Reparametrization; the forward
    map is tabulated over the sampled range of the factors.
    """
    if f.phi_fn is None or f.psi_fn is None:
        raise ValidationError("separable factors need evaluable phi/psi functions")
    if np.any(f.phi <= 0) or np.any(f.psi <= 0):
        raise NonMonotone("phi and psi must be strictly positive")
    u0, v0 = (f.u[0], f.v[0]) if origin is None else origin
    ax_u = _AxisIntegral(f.phi_fn, f.u[0], f.u[-1], u0, bar_origin[0])
    ax_v = _AxisIntegral(f.psi_fn, f.v[0], f.v[-1], v0, bar_origin[1])

    def forward(u, v):
        return ax_u.forward(u), ax_v.forward(v)

    def inverse(ub, vb):
        return ax_u.inverse(ub), ax_v.inverse(vb)

    def inverse_jet(ub, vb):
        u, v = inverse(ub, vb)
        zero = np.zeros_like(u)
        return (u, v, (ax_u.d1(u), zero), (zero, ax_v.d1(v)),
                (ax_u.d2(u), zero, zero), (zero, zero, ax_v.d2(v)))

    rep = Reparametrization(forward, inverse, inverse_jet, "axis_aligned_integral",
                            "ub = int sqrt(phi(u)) du, vb = int sqrt(psi(v)) dv")
    rep.u_range = (ax_u.table[0], ax_u.table[-1])
    rep.v_range = (ax_v.table[0], ax_v.table[-1])
    return compose(m, rep), rep


def _euclidean_chart():
    def forward(u, v):
        u = np.asarray(u, dtype=float)
        big_l = np.log(u + 1 + np.sqrt(u ** 2 + 2 * u + 5))
        return big_l + v, -big_l + v

    def inverse(ub, vb):
        s = (np.asarray(ub, dtype=float) - vb) / 2
        return (np.exp(s) - 4 * np.exp(-s)) / 2 - 1, (np.asarray(ub, dtype=float) + vb) / 2

    def inverse_jet(ub, vb):
        u, v = inverse(ub, vb)
        s = (np.asarray(ub, dtype=float) - vb) / 2
        us = (np.exp(s) + 4 * np.exp(-s)) / 2
        uss = (np.exp(s) - 4 * np.exp(-s)) / 2
        half = np.full_like(u, 0.5)
        zero = np.zeros_like(u)
        return (u, v, (us / 2, -us / 2), (half, half), (uss / 4, -uss / 4, uss / 4), (zero, zero, zero))

    return Reparametrization(forward, inverse, inverse_jet, "closed_form_rotated",
                             "ub = ln(u+1+f) + v, vb = -ln(u+1+f) + v")


def _parabolic_chart():
    def forward(u, v):
        u = np.asarray(u, dtype=float)
        if np.any(u <= -1):
            raise DomainViolation("the parabolic chart needs u > -1")
        r = np.sqrt(u + 1)
        return r + np.asarray(v) / 2, -r + np.asarray(v) / 2

    def inverse(ub, vb):
        p = (np.asarray(ub, dtype=float) - vb) / 2
        if np.any(p <= 0):
            raise DomainViolation("the parabolic chart needs ubar > vbar")
        return p ** 2 - 1, np.asarray(ub, dtype=float) + vb

    def inverse_jet(ub, vb):
        u, v = inverse(ub, vb)
        p = (np.asarray(ub, dtype=float) - vb) / 2
        one = np.ones_like(u)
        zero = np.zeros_like(u)
        return (u, v, (p, -p), (one, one), (0.5 * one, -0.5 * one, 0.5 * one), (zero, zero, zero))

    return Reparametrization(forward, inverse, inverse_jet, "closed_form_rotated",
                             "ub = sqrt(u+1) + v/2, vb = -sqrt(u+1) + v/2")


def meridian_canonical_chart(family) -> Reparametrization:
    if family == EUCLIDEAN_FAMILY:
        return _euclidean_chart()
    if family == PARABOLIC_FAMILY:
        return _parabolic_chart()
    raise ValidationError(f"unknown family {family!r}")
