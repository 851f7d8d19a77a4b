import numpy as np
import pytest

from pnmc_lab.errors import FrameDegenerate, MinimalPoint, NotNormal
from pnmc_lab.frame_invariants import (PnmcTag, classify_pnmc, geometric_frame, geometric_functions,
                                       integrability_residual, invariant_grid, mean_curvature,
                                       mean_curvature_from_functions, shape_operator)
from pnmc_lab.meridian import (EUCLIDEAN_FAMILY, constant_kappa, meridian_surface, sine_kappa,
                               spherical_curve)
from pnmc_lab.pseudo_euclidean import EUCLIDEAN, gram, inner
from pnmc_lab.surface import ParamDomain, SurfaceMap, eval_jet


def torus(u, v):
    return np.stack([np.cos(u), np.sin(u), np.cos(v), np.sin(v)], axis=-1)


def sphere(r):
    def z(u, v):
        return r * np.stack([np.cos(u) * np.cos(v), np.cos(u) * np.sin(v), np.sin(u), 0 * u], axis=-1)
    return SurfaceMap(z, name=f"sphere {r}")


@pytest.fixture(scope="module")
def meridian():
    return meridian_surface(EUCLIDEAN_FAMILY, spherical_curve(sine_kappa(), (-0.5, 1.5), 1e-3, 0.0))


def test_sphere_mean_curvature_and_degenerate_frame():
    for r in (0.5, 2.0):
        j = eval_jet(sphere(r), 0.3, 0.4)
        H = mean_curvature(j, EUCLIDEAN)
        assert np.linalg.norm(H) == pytest.approx(1 / r, rel=1e-5)
        # H points to the centre
        assert inner(H, j.z, EUCLIDEAN) < 0
        with pytest.raises(FrameDegenerate):
            geometric_frame(j, EUCLIDEAN)


def test_shape_operator_of_sphere_is_umbilic():
    j = eval_jet(sphere(2.0), 0.3, 0.4)
    n = j.z / np.linalg.norm(j.z)
    A = shape_operator(j, n, EUCLIDEAN)
    assert np.allclose(A, -0.5 * np.eye(2), atol=1e-5)
    with pytest.raises(NotNormal):
        shape_operator(j, j.z_u, EUCLIDEAN)


def test_plane_is_minimal():
    plane = SurfaceMap(lambda u, v: np.stack([u, v, 0 * u, 0 * u], -1))
    with pytest.raises(MinimalPoint):
        geometric_frame(eval_jet(plane, 0.1, 0.2), EUCLIDEAN)
    tag = classify_pnmc(plane, ParamDomain(0, 1, 0, 1, 5, 5)).tag
    assert tag is PnmcTag.MINIMAL_POINT


def test_frame_is_orthonormal_and_oriented(meridian):
    j = eval_jet(meridian, np.array([0.2, 1.0]), np.array([0.3, 0.9]))
    fr = geometric_frame(j, EUCLIDEAN)
    F = fr.matrix()
    assert np.allclose(gram(F, EUCLIDEAN), np.eye(4), atol=1e-12)
    assert np.all(np.linalg.det(F) > 0)
    # A_l is trace-free and has zero diagonal in the (x, y) basis
    A = shape_operator(j, fr.l, EUCLIDEAN)
    assert np.allclose(np.trace(A, axis1=-2, axis2=-1), 0, atol=1e-12)


def test_meridian_functions_match_closed_form(meridian):
    u = np.linspace(0, 2, 7)
    v = np.full_like(u, 0.4)
    gf = geometric_functions(meridian, u, v)
    q = u ** 2 + 2 * u + 5
    k = 1 + 0.3 * np.sin(v)
    assert np.allclose(np.abs(gf.mu), 2 / q, atol=1e-8)
    assert np.allclose(np.abs(gf.lam), k / (2 * np.sqrt(q)), atol=1e-8)
    assert np.allclose(gf.nu1, gf.nu2, atol=1e-8)
    assert np.max(np.abs([gf.beta1, gf.beta2])) < 1e-6
    # a 10% perturbation of mu is far outside the agreement
    assert np.max(np.abs(np.abs(gf.mu) - 1.1 * 2 / q)) > 1e-2


def test_mean_curvature_rebuilt_from_functions(meridian):
    g = invariant_grid(meridian, ParamDomain(0, 1, 0, 1, 6, 6))
    assert np.allclose(mean_curvature_from_functions(g.functions, g.frame), g.H, atol=1e-10)


def test_classification():
    torus_map = SurfaceMap(torus, name="clifford torus")
    d = ParamDomain(0, 1, 0, 1, 6, 6)
    assert classify_pnmc(torus_map, d).tag is PnmcTag.PARALLEL_H
    m = meridian_surface(EUCLIDEAN_FAMILY, spherical_curve(constant_kappa(1.0), (-0.5, 1.5)))
    assert classify_pnmc(m, d).tag is PnmcTag.PNMC_NONPARALLEL_H


def test_generic_surface_has_nonzero_beta():
    def z(u, v):
        return np.stack([u, v, u ** 2 + 0.5 * v ** 2, u * v + 0.3 * u ** 3], axis=-1)
    m = SurfaceMap(z)
    c = classify_pnmc(m, ParamDomain(0.2, 0.6, 0.2, 0.6, 5, 5))
    assert c.tag is PnmcTag.GENERIC and c.sup_beta > 1e-3


def test_torus_integrability_small():
    res = integrability_residual(SurfaceMap(torus), ParamDomain(0, 1, 0, 1, 11, 11))
    assert np.max(res) < 1e-5
