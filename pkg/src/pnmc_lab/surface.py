"""Parametrized surfaces z(u, v) in 4-space and their derivative jets."""

from dataclasses import dataclass, fields
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateMetric, NotSpacelike, OutOfDomain, ValidationError
from .pseudo_euclidean import EUCLIDEAN, Signature, as_signature, inner

DEFAULT_JET_STEP = 1e-3


@dataclass(frozen=True)
class ParamDomain:
    u_min: float
    u_max: float
    v_min: float
    v_max: float
    n_u: int
    n_v: int

    def __post_init__(self):
        if not (np.isfinite([self.u_min, self.u_max, self.v_min, self.v_max]).all()):
            raise ValidationError("domain bounds must be finite")
        if not self.u_min < self.u_max or not self.v_min < self.v_max:
            raise ValidationError("domain bounds must satisfy min < max")
        if int(self.n_u) != self.n_u or int(self.n_v) != self.n_v:
            raise ValidationError("grid counts must be integers")
        if self.n_u < 3 or self.n_v < 3:
            raise ValidationError(f"grid counts must be >= 3, got {self.n_u}x{self.n_v}")

    @property
    def u(self):
        return np.linspace(self.u_min, self.u_max, self.n_u)

    @property
    def v(self):
        return np.linspace(self.v_min, self.v_max, self.n_v)

    @property
    def h_u(self):
        return (self.u_max - self.u_min) / (self.n_u - 1)

    @property
    def h_v(self):
        return (self.v_max - self.v_min) / (self.n_v - 1)

    @property
    def shape(self):
        return (self.n_u, self.n_v)

    def mesh(self):
        return np.meshgrid(self.u, self.v, indexing="ij")

    def default_step(self):
        """Finite-difference step: width / (8 n), the smaller of the two axes."""
        return min((self.u_max - self.u_min) / (8 * self.n_u),
                   (self.v_max - self.v_min) / (8 * self.n_v))

    def shrink(self, k_u, k_v=None):
        """Drop ``k`` boundary nodes on each side."""
        k_v = k_u if k_v is None else k_v
        return ParamDomain(self.u_min + k_u * self.h_u, self.u_max - k_u * self.h_u,
                           self.v_min + k_v * self.h_v, self.v_max - k_v * self.h_v,
                           self.n_u - 2 * k_u, self.n_v - 2 * k_v)

    @classmethod
    def from_spacing(cls, u_min, v_min, h, n_u, n_v):
        return cls(u_min, u_min + (n_u - 1) * h, v_min, v_min + (n_v - 1) * h, n_u, n_v)


@dataclass
class SurfaceJet:
    """Point value and partial derivatives; arrays of shape (..., 4)."""

    z: np.ndarray
    z_u: np.ndarray
    z_v: np.ndarray
    z_uu: np.ndarray
    z_uv: np.ndarray
    z_vv: np.ndarray
    z_uuu: Optional[np.ndarray] = None
    z_uuv: Optional[np.ndarray] = None
    z_uvv: Optional[np.ndarray] = None
    z_vvv: Optional[np.ndarray] = None

    @property
    def order(self):
        return 3 if self.z_uuu is not None else 2

    def transposed(self):
        """Jet of the same surface with the roles of u and v swapped."""
        return SurfaceJet(self.z, self.z_v, self.z_u, self.z_vv, self.z_uv, self.z_uu,
                          self.z_vvv, self.z_uvv, self.z_uuv, self.z_uuu)

    def take(self, index):
        kw = {f.name: (None if getattr(self, f.name) is None else getattr(self, f.name)[index])
              for f in fields(self)}
        return SurfaceJet(**kw)


@dataclass
class FundamentalForm1:
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray

    @property
    def det(self):
        return self.E * self.G - self.F ** 2


class SurfaceMap:
    """A surface z(u, v) with an optional closed-form jet.

    Parameters
    ----------
    evaluator : callable
        ``(u, v) -> array (..., 4)``, vectorized over broadcast ``u, v``.
    signature : Signature
        Ambient space the surface lives in.
    jet : callable, optional
        ``(u, v, order) -> SurfaceJet`` returning analytic partials.
    jet_order : int
        Highest order the analytic jet supports (0 when ``jet`` is None).
    bounds : tuple, optional
        ``(u_lo, u_hi, v_lo, v_hi)`` outside which the evaluator is invalid.
    """

    def __init__(self, evaluator: Callable, signature: Signature = EUCLIDEAN,
                 jet: Optional[Callable] = None, jet_order: int = 0,
                 bounds=None, name: str = ""):
        self.evaluator = evaluator
        self.signature = as_signature(signature)
        self.jet = jet
        self.jet_order = jet_order if jet is not None else 0
        self.bounds = bounds
        self.name = name

    def __call__(self, u, v):
        return self.evaluator(u, v)

    def __repr__(self):
        return f"SurfaceMap({self.name or 'anonymous'}, {self.signature.name})"

    def check_inside(self, u, v, margin=0.0):
        if self.bounds is None:
            return
        u_lo, u_hi, v_lo, v_hi = self.bounds
        u = np.asarray(u)
        v = np.asarray(v)
        if (np.any(u - margin < u_lo) or np.any(u + margin > u_hi)
                or np.any(v - margin < v_lo) or np.any(v + margin > v_hi)):
            raise OutOfDomain(f"stencil leaves the domain {self.bounds} of {self!r}")


def _fd_jet(m, u, v, order, h):
    z = m.evaluator
    p, q = u + h, u - h
    r, t = v + h, v - h
    z0 = z(u, v)
    zp, zq, zr, zt = z(p, v), z(q, v), z(u, r), z(u, t)
    zpr, zpt, zqr, zqt = z(p, r), z(p, t), z(q, r), z(q, t)
    jet = SurfaceJet(
        z=z0,
        z_u=(zp - zq) / (2 * h),
        z_v=(zr - zt) / (2 * h),
        z_uu=(zp - 2 * z0 + zq) / h ** 2,
        z_uv=(zpr - zpt - zqr + zqt) / (4 * h ** 2),
        z_vv=(zr - 2 * z0 + zt) / h ** 2,
    )
    if order >= 3:
        jet.z_uuu = (z(u + 2 * h, v) - 2 * zp + 2 * zq - z(u - 2 * h, v)) / (2 * h ** 3)
        jet.z_vvv = (z(u, v + 2 * h) - 2 * zr + 2 * zt - z(u, v - 2 * h)) / (2 * h ** 3)
        jet.z_uuv = ((zpr - 2 * zr + zqr) - (zpt - 2 * zt + zqt)) / (2 * h ** 3)
        jet.z_uvv = ((zpr - 2 * zp + zpt) - (zqr - 2 * zq + zqt)) / (2 * h ** 3)
    return jet


def eval_jet(m: SurfaceMap, u, v, order=2, h=None):
    """Jet of ``m`` at ``(u, v)`` (scalars or broadcastable arrays).

    Closed-form partials are used when the map supplies them up to ``order``;
    otherwise second-order central differences with step ``h``.
    """
    if order not in (2, 3):
        raise ValidationError("jet order must be 2 or 3")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    if m.jet is not None and m.jet_order >= order:
        m.check_inside(u, v)
        return m.jet(u, v, order)
    h = DEFAULT_JET_STEP if h is None else float(h)
    m.check_inside(u, v, margin=(2 if order == 2 else 3) * h)
    return _fd_jet(m, u, v, order, h)


def first_form(j: SurfaceJet, s) -> FundamentalForm1:
    """Coefficients E, F, G of the induced metric.

    Raises NotSpacelike when the induced metric is not positive definite.
    """
    ff = FundamentalForm1(inner(j.z_u, j.z_u, s), inner(j.z_u, j.z_v, s), inner(j.z_v, j.z_v, s))
    if np.any(ff.E <= 0) or np.any(ff.det <= 0):
        raise NotSpacelike("induced metric is not positive definite")
    return ff


def inverse_metric(ff: FundamentalForm1):
    det = ff.det
    scale = np.maximum(np.abs(ff.E), np.abs(ff.G)) ** 2
    if np.any(det <= 1e-14 * scale):
        raise DegenerateMetric("first fundamental form is degenerate")
    return ff.G / det, -ff.F / det, ff.E / det


class GridSurface(SurfaceMap):
    """Surface known only through samples on a ParamDomain grid.

    Jets are available at grid nodes (second-order central stencils with the
    grid spacing); requests elsewhere raise OutOfDomain.
    """

    def __init__(self, z_grid, domain: ParamDomain, signature=EUCLIDEAN, name="grid"):
        z_grid = np.asarray(z_grid, dtype=float)
        if z_grid.shape != (domain.n_u, domain.n_v, 4):
            raise ValidationError(f"grid shape {z_grid.shape} does not match {domain.shape}")
        self.z_grid = z_grid
        self.domain = domain
        super().__init__(self._lookup, signature, jet=self._grid_jet, jet_order=3,
                         bounds=(domain.u_min, domain.u_max, domain.v_min, domain.v_max), name=name)

    def _indices(self, u, v):
        d = self.domain
        fi = (np.asarray(u, dtype=float) - d.u_min) / d.h_u
        fj = (np.asarray(v, dtype=float) - d.v_min) / d.h_v
        i = np.rint(fi).astype(int)
        j = np.rint(fj).astype(int)
        if np.any(np.abs(fi - i) > 1e-6) or np.any(np.abs(fj - j) > 1e-6):
            raise OutOfDomain("grid surfaces can only be evaluated at grid nodes")
        if np.any(i < 0) or np.any(i >= d.n_u) or np.any(j < 0) or np.any(j >= d.n_v):
            raise OutOfDomain("point outside the sampled grid")
        return i, j

    def _lookup(self, u, v):
        i, j = self._indices(u, v)
        return self.z_grid[i, j]

    def _grid_jet(self, u, v, order):
        d = self.domain
        i, j = self._indices(u, v)
        k = 1 if order == 2 else 2
        if np.any(i < k) or np.any(i >= d.n_u - k) or np.any(j < k) or np.any(j >= d.n_v - k):
            raise OutOfDomain(f"order-{order} grid stencil needs {k} nodes of margin")
        Z = self.z_grid
        hu, hv = d.h_u, d.h_v

        def at(di, dj):
            return Z[i + di, j + dj]

        z0 = at(0, 0)
        jet = SurfaceJet(
            z=z0,
            z_u=(at(1, 0) - at(-1, 0)) / (2 * hu),
            z_v=(at(0, 1) - at(0, -1)) / (2 * hv),
            z_uu=(at(1, 0) - 2 * z0 + at(-1, 0)) / hu ** 2,
            z_uv=(at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * hu * hv),
            z_vv=(at(0, 1) - 2 * z0 + at(0, -1)) / hv ** 2,
        )
        if order == 3:
            jet.z_uuu = (at(2, 0) - 2 * at(1, 0) + 2 * at(-1, 0) - at(-2, 0)) / (2 * hu ** 3)
            jet.z_vvv = (at(0, 2) - 2 * at(0, 1) + 2 * at(0, -1) - at(0, -2)) / (2 * hv ** 3)
            jet.z_uuv = ((at(1, 1) - 2 * at(0, 1) + at(-1, 1))
                         - (at(1, -1) - 2 * at(0, -1) + at(-1, -1))) / (2 * hu ** 2 * hv)
            jet.z_uvv = ((at(1, 1) - 2 * at(1, 0) + at(1, -1))
                         - (at(-1, 1) - 2 * at(-1, 0) + at(-1, -1))) / (2 * hu * hv ** 2)
        return jet
