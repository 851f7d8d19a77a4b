"""Rebuild a surface from (lambda, mu, nu) given in canonical parameters.

With E = G = 1/|mu| =: a^2 the frame (x, y, b, l) and the position z obey a
linear system ``dS/du = S B_u``, ``dS/dv = S B_v`` for the 4x5 matrix
S = [z | x y b l]. The frame blocks of B are a times the connection
coefficients; they are skew-adjoint for diag(1, 1, e_b, e_l), so exact
solutions stay orthonormal and the measured drift is pure integrator error.
The system is integrable exactly when the fields solve the PDE system, which
``compatibility_defect`` measures by integrating along two different paths.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import RectBivariateSpline

from ._numerics import rk4_step, thread_cap
from .errors import DriftExceeded, MuVanishes, ValidationError
from .frame_invariants import invariant_grid
from .pde import MU_FLOOR, GridField
from .pseudo_euclidean import EUCLIDEAN, MINKOWSKI
from .surface import GridSurface, ParamDomain

DRIFT_BOUND = 1e-6
GAMMA_STEP = 1e-5
ROUNDTRIP_TOL = 1e-3


def frame_signs(eps):
    """(e_b, e_l): causal signs of b and l. ``eps=None`` means Euclidean."""
    if eps is None:
        return 1, 1
    if eps not in (1, -1):
        raise ValidationError(f"epsilon must be +1, -1 or None, got {eps!r}")
    return eps, -eps


def ambient_signature(eps):
    return EUCLIDEAN if eps is None else MINKOWSKI


@dataclass
class FrameState:
    z: np.ndarray
    x: np.ndarray
    y: np.ndarray
    b: np.ndarray
    l: np.ndarray

    def matrix(self):
        """4x5 array [z | x y b l] (columns)."""
        return np.stack([self.z, self.x, self.y, self.b, self.l], axis=-1).astype(float)

    @classmethod
    def from_matrix(cls, S):
        return cls(*(S[..., :, k] for k in range(5)))

    @classmethod
    def standard(cls, eps=None):
        """Origin with the coordinate frame; b is e4 only when it must be timelike."""
        e = np.eye(4)
        if eps == -1:
            return cls(np.zeros(4), e[0], e[1], e[3], e[2])
        return cls(np.zeros(4), e[0], e[1], e[2], e[3])

    def transformed(self, A, t=None):
        """Image under the ambient motion p -> A p + t."""
        t = np.zeros(4) if t is None else np.asarray(t, dtype=float)
        return FrameState(A @ self.z + t, A @ self.x, A @ self.y, A @ self.b, A @ self.l)


@dataclass
class ConnectionMatrices:
    """Coefficients of d/du, d/dv on (x, y, b, l): d(frame)/du = frame @ A_u."""

    A_u: np.ndarray
    A_v: np.ndarray
    a: np.ndarray
    signs: tuple

    def skew_defect(self):
        G = np.diag([1.0, 1.0, *self.signs])
        return float(max(np.max(np.abs(np.swapaxes(A, -1, -2) @ G + G @ A)) for A in (self.A_u, self.A_v)))


def _blocks(lam, mu, nu, g1, g2, signs):
    """Per-point connection matrices, shape (..., 4, 4)."""
    e_b, e_l = signs
    am = np.abs(mu)
    if np.any(am < MU_FLOOR):
        raise MuVanishes("|mu| vanishes; canonical parameters are undefined there")
    a = 1 / np.sqrt(am)
    shape = np.shape(lam) + (4, 4)
    Cx = np.zeros(shape)
    Cy = np.zeros(shape)
    # column j holds the derivative of the j-th frame vector
    Cx[..., 1, 0], Cx[..., 2, 0] = g1, e_b * nu
    Cx[..., 0, 1], Cx[..., 2, 1], Cx[..., 3, 1] = -g1, e_b * lam, e_l * mu
    Cx[..., 0, 2], Cx[..., 1, 2] = -nu, -lam
    Cx[..., 1, 3] = -mu
    Cy[..., 1, 0], Cy[..., 2, 0], Cy[..., 3, 0] = -g2, e_b * lam, e_l * mu
    Cy[..., 0, 1], Cy[..., 2, 1] = g2, e_b * nu
    Cy[..., 0, 2], Cy[..., 1, 2] = -lam, -nu
    Cy[..., 0, 3] = -mu
    return a[..., None, None] * Cx, a[..., None, None] * Cy, a


def connection_matrices(lam: GridField, mu: GridField, nu: GridField, eps=None) -> ConnectionMatrices:
    """Connection matrices at the grid nodes; gamma1 = (sqrt|mu|)_v, gamma2 = (sqrt|mu|)_u."""
    for f in (mu, nu):
        if not lam.same_geometry(f):
            raise ValidationError("lambda, mu and nu must share grid geometry")
    if np.any(np.abs(mu.values) < MU_FLOOR):
        raise MuVanishes("|mu| vanishes on the grid")
    root = np.sqrt(np.abs(mu.values))
    g2, g1 = np.gradient(root, *mu.spacing, edge_order=2)
    signs = frame_signs(eps)
    A_u, A_v, a = _blocks(lam.values, mu.values, nu.values, g1, g2, signs)
    return ConnectionMatrices(A_u, A_v, a, signs)


class FieldSampler:
    """Evaluate (lambda, mu, nu, gamma1, gamma2) anywhere in a rectangle.

    Callable inputs ``(u, v) -> (lam, mu, nu)`` are used directly, with gamma
    from central differences of sqrt|mu| at a fixed small step. A triple of
    GridFields is turned into bicubic splines first.
    """

    def __init__(self, fields):
        if callable(fields):
            self._call = fields
            self._splines = None
        else:
            lam, mu, nu = fields
            for f in (mu, nu):
                if not lam.same_geometry(f):
                    raise ValidationError("lambda, mu and nu must share grid geometry")
            d = lam.domain
            if min(d.n_u, d.n_v) < 4:
                raise ValidationError("spline interpolation needs at least 4x4 nodes")
            self._splines = [RectBivariateSpline(d.u, d.v, f.values, kx=3, ky=3)
                             for f in (lam, mu, nu)]
            self._call = None

    def fields(self, u, v):
        if self._call is not None:
            return tuple(np.asarray(x, dtype=float) for x in self._call(u, v))
        return tuple(s(u, v, grid=False) for s in self._splines)

    def __call__(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        lam, mu, nu = self.fields(u, v)
        if self._splines is not None:
            mu_spline = self._splines[1]
            mu_u = mu_spline(u, v, dx=1, grid=False)
            mu_v = mu_spline(u, v, dy=1, grid=False)
            sgn = np.sign(mu)
            am = np.abs(mu)
            g2 = sgn * mu_u / (2 * np.sqrt(am))
            g1 = sgn * mu_v / (2 * np.sqrt(am))
        else:
            d = GAMMA_STEP

            def root(uu, vv):
                return np.sqrt(np.abs(self.fields(uu, vv)[1]))

            g2 = (root(u + d, v) - root(u - d, v)) / (2 * d)
            g1 = (root(u, v + d) - root(u, v - d)) / (2 * d)
        return lam, mu, nu, g1, g2


def _augmented(sampler, signs, u, v, direction):
    lam, mu, nu, g1, g2 = sampler(u, v)
    A_u, A_v, a = _blocks(lam, mu, nu, g1, g2, signs)
    B = np.zeros(np.shape(lam) + (5, 5))
    if direction == 0:
        B[..., 1:, 1:] = A_u
        B[..., 1, 0] = a
    else:
        B[..., 1:, 1:] = A_v
        B[..., 2, 0] = a
    return B


def _project(S, signs, metric):
    """Re-orthonormalize the frame columns (Gram-Schmidt in the ambient metric)."""
    s = np.asarray(metric, dtype=float)
    F = S[..., 1:].copy()
    g = np.array([1.0, 1.0, *signs])
    for k in range(4):
        v = F[..., k]
        for i in range(k):
            v = v - (g[i] * np.sum(s * v * F[..., i], axis=-1))[..., None] * F[..., i]
        F[..., k] = v / np.sqrt(np.abs(np.sum(s * v * v, axis=-1)))[..., None]
    out = S.copy()
    out[..., 1:] = F
    return out


def _line(sampler, signs, S0, fixed, t0, h, n_steps, direction, project=False):
    """Integrate along u (direction 0) or v (direction 1); returns (n_steps+1, ...)."""
    fixed = np.asarray(fixed, dtype=float)

    def rhs(t, S):
        if direction == 0:
            B = _augmented(sampler, signs, t, fixed, 0)
        else:
            B = _augmented(sampler, signs, fixed, t, 1)
        return S @ B

    out = [S0]
    S = S0
    for k in range(n_steps):
        t = t0 + k * h
        S = rk4_step(rhs, np.full(fixed.shape, t) if fixed.ndim else t, S, h)
        if project:
            S = _project(S, signs, ambient_signature(None if signs == (1, 1) else signs[0]).diag)
        out.append(S)
    return np.stack(out)


def frame_drift(S, eps):
    """max |F^T G F - diag(1, 1, e_b, e_l)| per node."""
    sig = ambient_signature(eps)
    F = S[..., 1:]
    G = np.diag(sig.diag)
    target = np.diag([1.0, 1.0, *frame_signs(eps)])
    gram = np.swapaxes(F, -1, -2) @ G @ F
    return np.max(np.abs(gram - target), axis=(-1, -2))


@dataclass
class ReconstructedSurface:
    domain: ParamDomain
    eps: Optional[int]
    states: np.ndarray  # (n_u, n_v, 4, 5)
    drift: np.ndarray

    @property
    def z(self):
        return self.states[..., 0]

    @property
    def frame(self):
        return FrameState.from_matrix(self.states)

    @property
    def max_drift(self):
        return float(np.max(self.drift))

    @property
    def signature(self):
        return ambient_signature(self.eps)

    def surface(self, name="reconstructed"):
        return GridSurface(self.z, self.domain, self.signature, name=name)


def _check_initial(initial: FrameState, eps, bound):
    d = float(frame_drift(initial.matrix(), eps))
    if d > bound:
        raise ValidationError(f"initial frame is not orthonormal (defect {d:.2e})")


def integrate_surface(fields, eps, initial: Optional[FrameState], grid: ParamDomain,
                      drift_bound=DRIFT_BOUND, project=False) -> ReconstructedSurface:
    """Integrate the frame system over ``grid``: the v = v_min line first, then every u = const line.

    ``fields`` is a callable ``(u, v) -> (lam, mu, nu)`` or a triple of
    GridFields. Raises DriftExceeded when the frame drifts more than
    ``drift_bound`` from orthonormality anywhere.
    """
    signs = frame_signs(eps)
    initial = FrameState.standard(eps) if initial is None else initial
    _check_initial(initial, eps, drift_bound)
    sampler = fields if isinstance(fields, FieldSampler) else FieldSampler(fields)
    d = grid
    spine = _line(sampler, signs, initial.matrix(), d.v_min, d.u_min, d.h_u, d.n_u - 1, 0, project)
    u = d.u
    threads = thread_cap()
    blocks = np.array_split(np.arange(d.n_u), min(threads, d.n_u))

    def job(idx):
        return _line(sampler, signs, spine[idx], u[idx], d.v_min, d.h_v, d.n_v - 1, 1, project)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, blocks))
    else:
        parts = [job(idx) for idx in blocks]
    states = np.concatenate(parts, axis=1).swapaxes(0, 1)  # (n_u, n_v, 4, 5)
    drift = frame_drift(states, eps)
    if np.max(drift) > drift_bound:
        raise DriftExceeded(f"frame orthonormality drift {np.max(drift):.2e} exceeds {drift_bound:.1e}")
    return ReconstructedSurface(d, eps, states, drift)


def compatibility_defect(fields, eps, initial: Optional[FrameState], grid: ParamDomain) -> float:
    """Far-corner discrepancy between u-then-v and v-then-u integration."""
    signs = frame_signs(eps)
    initial = FrameState.standard(eps) if initial is None else initial
    sampler = fields if isinstance(fields, FieldSampler) else FieldSampler(fields)
    d = grid
    S0 = initial.matrix()
    a = _line(sampler, signs, S0, d.v_min, d.u_min, d.h_u, d.n_u - 1, 0)[-1]
    a = _line(sampler, signs, a, d.u_max, d.v_min, d.h_v, d.n_v - 1, 1)[-1]
    b = _line(sampler, signs, S0, d.u_min, d.v_min, d.h_v, d.n_v - 1, 1)[-1]
    b = _line(sampler, signs, b, d.v_max, d.u_min, d.h_u, d.n_u - 1, 0)[-1]
    return float(np.max(np.abs(a - b)))


@dataclass
class RoundtripReport:
    discrepancy: dict
    max_drift: float
    tolerance: float
    interior: ParamDomain
    reconstruction: ReconstructedSurface

    @property
    def worst(self):
        return max(self.discrepancy.values())

    @property
    def flagged(self):
        return self.worst > self.tolerance

    def as_dict(self):
        return {"discrepancy": dict(self.discrepancy), "max_drift": self.max_drift,
                "tolerance": self.tolerance, "flagged": self.flagged}


def roundtrip(fields, eps, grid: ParamDomain, initial: Optional[FrameState] = None, margin=2,
              tol=ROUNDTRIP_TOL, drift_bound=DRIFT_BOUND) -> RoundtripReport:
    """Reconstruct, re-extract (|lambda|, |mu|, |nu|) with grid stencils, compare.

    The comparison runs on the grid shrunk by ``margin`` nodes (the frame
    derivatives need two layers of neighbours).
    """
    if margin < 2:
        raise ValidationError("roundtrip needs a margin of at least 2 nodes")
    sampler = fields if isinstance(fields, FieldSampler) else FieldSampler(fields)
    rec = integrate_surface(sampler, eps, initial, grid, drift_bound)
    inner_d = grid.shrink(margin)
    g = invariant_grid(rec.surface(), inner_d, rec.signature)
    U, V = inner_d.mesh()
    lam, mu, nu = sampler.fields(U, V)
    gf = g.functions
    disc = {
        "lambda": float(np.max(np.abs(np.abs(gf.lam) - np.abs(lam)))),
        "mu": float(np.max(np.abs(np.abs(gf.mu) - np.abs(mu)))),
        "nu": float(np.max(np.abs(np.abs(gf.nu) - np.abs(nu)))),
    }
    return RoundtripReport(disc, rec.max_drift, tol, inner_d, rec)
