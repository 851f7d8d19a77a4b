"""Meridian surfaces z(u, v) = f(u) l(v) + g(u) a built from a directrix
curve l(v) and a fixed meridian profile (f, g).

Two families are provided:

``euclidean``  l on the unit sphere of E^3 = span(e1, e2, e3) in E^4, axis e4,
               f = sqrt(u^2 + 2u + 5), g = 2 ln(u + 1 + f).
``parabolic``  l on the flat paraboloid of the light cone in E^4_1,
               axis xi1 = (e3 + e4)/sqrt(2),
               f = sqrt(u + 1), g = -(2/3)(u + 1)^(3/2), u > -1.

Curves are parametrized by arc length and driven by a curvature function
kappa(v); the v-derivatives of the surface come from the curve's Frenet
state and ODE rather than from differencing sampled positions.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._numerics import rk4_step
from .errors import DomainViolation, DriftExceeded, ValidationError
from .pseudo_euclidean import E1, E2, E3, E4, EUCLIDEAN, MINKOWSKI, inner
from .surface import SurfaceJet, SurfaceMap

XI1 = (E3 + E4) / np.sqrt(2)
XI2 = (-E3 + E4) / np.sqrt(2)

EUCLIDEAN_FAMILY = "euclidean_5_1"
PARABOLIC_FAMILY = "parabolic_5_2"
FAMILIES = (EUCLIDEAN_FAMILY, PARABOLIC_FAMILY)

DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class CurvatureProfile:
    kappa: Callable
    dkappa: Optional[Callable] = None
    description: str = ""

    def __call__(self, v):
        return self.kappa(v)

    def derivative(self, v, h=1e-5):
        if self.dkappa is not None:
            return self.dkappa(v)
        return (self.kappa(v + h) - self.kappa(v - h)) / (2 * h)


def constant_kappa(c):
    c = float(c)
    return CurvatureProfile(lambda v: np.full(np.shape(v), c), lambda v: np.zeros(np.shape(v)),
                            f"constant {c!r}")


def sine_kappa(mean=1.0, amplitude=0.3, frequency=1.0):
    return CurvatureProfile(lambda v: mean + amplitude * np.sin(frequency * v),
                            lambda v: amplitude * frequency * np.cos(frequency * v),
                            f"{mean!r} + {amplitude!r} sin({frequency!r} v)")


def polynomial_kappa(coeffs):
    """kappa(v) = c0 + c1 v + c2 v^2 + ..."""
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise ValidationError("empty coefficient list for kappa")
    p = np.polynomial.Polynomial(coeffs)
    dp = p.deriv()
    return CurvatureProfile(lambda v: p(np.asarray(v, dtype=float)),
                            lambda v: dp(np.asarray(v, dtype=float)),
                            "polynomial " + ",".join(repr(c) for c in coeffs))


@dataclass(frozen=True)
class MeridianProfile:
    """Meridian curve (f(u), g(u)) with closed-form derivatives up to order 3."""

    family: str
    derivs: Callable  # u -> (f, f', f'', f''', g, g', g'', g''')
    u_lower: float = -np.inf

    def check(self, u):
        if np.any(np.asarray(u) <= self.u_lower):
            raise DomainViolation(f"u must exceed {self.u_lower} for the {self.family} profile")


def _euclidean_profile(u):
    w = np.asarray(u, dtype=float) + 1
    f = np.sqrt(w ** 2 + 4)
    return (f, w / f, 4 / f ** 3, -12 * w / f ** 5,
            2 * np.log(w + f), 2 / f, -2 * w / f ** 3, (4 * w ** 2 - 8) / f ** 5)


def _parabolic_profile(u):
    s = np.sqrt(np.asarray(u, dtype=float) + 1)
    return (s, 0.5 / s, -0.25 / s ** 3, 0.375 / s ** 5,
            -2 / 3 * s ** 3, -s, -0.5 / s, 0.25 / s ** 3)


def meridian_profile(family):
    if family == EUCLIDEAN_FAMILY:
        return MeridianProfile(family, _euclidean_profile)
    if family == PARABOLIC_FAMILY:
        return MeridianProfile(family, _parabolic_profile, u_lower=-1.0)
    raise ValidationError(f"unknown family {family!r}; expected one of {FAMILIES}")


class DirectrixCurve:
    """Arc-length curve l(v) stored as RK4 samples of its Frenet state.

    Off-node values are produced by one RK4 sub-step from the nearest node,
    so evaluation anywhere in the sampled range keeps the integrator's
    accuracy. ``derivatives`` returns l, l', l'', l''' with the higher
    derivatives taken from the ODE itself.
    """

    def __init__(self, kind, kappa: CurvatureProfile, v, states):
        self.kind = kind
        self.kappa = kappa
        self.v = np.asarray(v, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.step = self.v[1] - self.v[0]
        self.signature = EUCLIDEAN if kind == "sphere" else MINKOWSKI

    def _rhs(self, v, y):
        k = self.kappa(v)
        if self.kind == "sphere":
            l, t = y[..., :3], y[..., 3:]
            return np.concatenate([t, -l + np.asarray(k)[..., None] * np.cross(l, t)], axis=-1)
        phi = y[..., 2]
        return np.stack([np.cos(phi), np.sin(phi), np.broadcast_to(k, np.shape(phi))], axis=-1)

    def state(self, v):
        v = np.asarray(v, dtype=float)
        lo, hi = self.v[0], self.v[-1]
        if np.any(v < lo - 1e-12) or np.any(v > hi + 1e-12):
            raise DomainViolation(f"v outside the integrated range [{lo}, {hi}]")
        k = np.clip(np.rint((v - lo) / self.step).astype(int), 0, len(self.v) - 1)
        dv = v - self.v[k]
        return rk4_step(self._rhs, self.v[k], self.states[k], dv)

    def derivatives(self, v):
        v = np.asarray(v, dtype=float)
        y = self.state(v)
        k = np.asarray(self.kappa(v), dtype=float)[..., None]
        dk = np.asarray(self.kappa.derivative(v), dtype=float)[..., None]
        if self.kind == "sphere":
            l, t = y[..., :3], y[..., 3:]
            n = np.cross(l, t)
            d2 = -l + k * n
            d3 = -t + dk * n - k ** 2 * t
            pad = np.zeros(v.shape + (1,))
            return tuple(np.concatenate([w, pad], axis=-1) for w in (l, t, d2, d3))
        a, b, phi = y[..., 0:1], y[..., 1:2], y[..., 2:3]
        c, s = np.cos(phi), np.sin(phi)
        a1, b1 = c, s
        a2, b2 = -k * s, k * c
        a3, b3 = -dk * s - k ** 2 * c, dk * c - k ** 2 * s
        r0 = (a ** 2 + b ** 2) / 2
        r1 = a * a1 + b * b1
        r2 = a1 ** 2 + b1 ** 2 + a * a2 + b * b2
        r3 = 3 * (a1 * a2 + b1 * b2) + a * a3 + b * b3

        def lift(x, y_, r, shift):
            return x * E1 + y_ * E2 + r * XI1 + shift * XI2

        return (lift(a, b, r0, 1.0), lift(a1, b1, r1, 0.0),
                lift(a2, b2, r2, 0.0), lift(a3, b3, r3, 0.0))

    def position(self, v):
        return self.derivatives(v)[0]

    @property
    def l(self):
        return self.derivatives(self.v)[0]

    @property
    def dl(self):
        return self.derivatives(self.v)[1]

    def chart(self, v):
        """(w1, w2): latitude/longitude on the sphere, polar radius/angle on the paraboloid."""
        if self.kind == "sphere":
            l = self.position(v)
            return np.arcsin(np.clip(l[..., 2], -1, 1)), np.arctan2(l[..., 1], l[..., 0])
        y = self.state(v)
        return np.hypot(y[..., 0], y[..., 1]), np.arctan2(y[..., 1], y[..., 0])

    def drift(self):
        """Max deviation of the curve's defining identities over the samples."""
        l, dl = self.l, self.dl
        s = self.signature
        if self.kind == "sphere":
            return max(np.max(np.abs(inner(l, l, s) - 1)), np.max(np.abs(inner(dl, dl, s) - 1)),
                       np.max(np.abs(inner(l, dl, s))))
        return max(np.max(np.abs(inner(l, l, s))), np.max(np.abs(inner(l, XI1, s) + 1)),
                   np.max(np.abs(inner(dl, dl, s) - 1)))


def _integrate(curve_rhs, y0, v_range, step):
    v0, v1 = map(float, v_range)
    if not v1 > v0 or step <= 0:
        raise ValidationError("curve range must be increasing and step positive")
    n = int(np.ceil((v1 - v0) / step - 1e-9))
    v = v0 + step * np.arange(n + 1)
    ys = np.empty((n + 1, len(y0)))
    ys[0] = y0
    for i in range(n):
        ys[i + 1] = rk4_step(curve_rhs, v[i], ys[i], step)
    return v, ys


def _curve(kind, k, v_range, step, y0, origin):
    # integrate forward and backward from ``origin`` so that l(origin) is fixed
    lo, hi = map(float, v_range)
    origin = lo if origin is None else float(origin)
    probe = DirectrixCurve(kind, k, [0.0, 1.0], np.zeros((2, len(y0))))
    parts_v, parts_y = [np.array([origin])], [np.array([y0])]
    if hi > origin:
        v, ys = _integrate(probe._rhs, y0, (origin, hi), step)
        parts_v.append(v[1:])
        parts_y.append(ys[1:])
    if lo < origin:
        v, ys = _integrate(lambda t, y: -probe._rhs(-t, y), y0, (-origin, -lo), step)
        parts_v.insert(0, -v[1:][::-1])
        parts_y.insert(0, ys[1:][::-1])
    curve = DirectrixCurve(kind, k, np.concatenate(parts_v), np.concatenate(parts_y))
    drift = curve.drift()
    if drift > DRIFT_TOL:
        raise DriftExceeded(f"curve invariants drifted by {drift:.3e}")
    return curve


def spherical_curve(k: CurvatureProfile, v_range, step=1e-3, origin=None):
    """Unit-speed curve on S^2(1) with spherical curvature ``k``.

    Integrates l'' = -l + kappa (l x l') from l = e1, l' = e2 at ``origin``
    (default: start of the range).
    """
    return _curve("sphere", k, v_range, step, np.array([1.0, 0, 0, 0, 1.0, 0]), origin)


def paraboloid_curve(k: CurvatureProfile, v_range, step=1e-3, origin=None):
    """Unit-speed curve on the paraboloid a e1 + b e2 + (a^2 + b^2)/2 xi1 + xi2.

    The paraboloid is flat in the (a, b) chart, so the curve is the planar
    curve with curvature ``k`` starting at (0, 0) with heading (1, 0), lifted.
    """
    return _curve("paraboloid", k, v_range, step, np.zeros(3), origin)


def meridian_surface(family, curve: DirectrixCurve, profile: Optional[MeridianProfile] = None):
    """SurfaceMap of z(u, v) = f(u) l(v) + g(u) axis with a closed-form jet."""
    profile = meridian_profile(family) if profile is None else profile
    if family == EUCLIDEAN_FAMILY:
        axis, signature, kind = E4, EUCLIDEAN, "sphere"
    elif family == PARABOLIC_FAMILY:
        axis, signature, kind = XI1, MINKOWSKI, "paraboloid"
    else:
        raise ValidationError(f"unknown family {family!r}")
    if curve.kind != kind:
        raise ValidationError(f"the {family} family needs a {kind} curve")

    def evaluate(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        profile.check(u)
        d = profile.derivs(u)
        f, g = d[0], d[4]
        return f[..., None] * curve.position(v) + g[..., None] * axis

    def jet(u, v, order):
        profile.check(u)
        f0, f1, f2, f3, g0, g1, g2, g3 = (w[..., None] for w in profile.derivs(u))
        l0, l1, l2, l3 = curve.derivatives(v)
        out = SurfaceJet(
            z=f0 * l0 + g0 * axis,
            z_u=f1 * l0 + g1 * axis,
            z_v=f0 * l1,
            z_uu=f2 * l0 + g2 * axis,
            z_uv=f1 * l1,
            z_vv=f0 * l2,
        )
        if order >= 3:
            out.z_uuu = f3 * l0 + g3 * axis
            out.z_uuv = f2 * l1
            out.z_uvv = f1 * l2
            out.z_vvv = f0 * l3
        return out

    bounds = (profile.u_lower, np.inf, curve.v[0], curve.v[-1])
    return SurfaceMap(evaluate, signature, jet=jet, jet_order=3, bounds=bounds,
                      name=f"meridian {family}, kappa {curve.kappa.description}")
