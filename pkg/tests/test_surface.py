import numpy as np
import pytest

from pnmc_lab._numerics import observed_order
from pnmc_lab.errors import NotSpacelike, OutOfDomain, ValidationError
from pnmc_lab.meridian import EUCLIDEAN_FAMILY, constant_kappa, meridian_surface, spherical_curve
from pnmc_lab.pseudo_euclidean import EUCLIDEAN, MINKOWSKI
from pnmc_lab.surface import GridSurface, ParamDomain, SurfaceMap, eval_jet, first_form


def torus(u, v):
    return np.stack([np.cos(u), np.sin(u), np.cos(v), np.sin(v)], axis=-1)


def test_domain_validation():
    with pytest.raises(ValidationError):
        ParamDomain(0, 1, 0, 1, 2, 10)
    with pytest.raises(ValidationError):
        ParamDomain(1, 0, 0, 1, 5, 5)
    d = ParamDomain(0, 1, 0, 2, 11, 21)
    assert d.h_u == pytest.approx(0.1) and d.h_v == pytest.approx(0.1)
    assert d.shrink(2).shape == (7, 17)


def test_plane_first_form():
    m = SurfaceMap(lambda u, v: np.stack([u, v, 0 * u, 0 * u], -1))
    ff = first_form(eval_jet(m, 0.3, 0.4), EUCLIDEAN)
    assert np.allclose([ff.E, ff.F, ff.G], [1, 0, 1])


def test_timelike_plane_rejected():
    m = SurfaceMap(lambda u, v: np.stack([u, 0 * u, 0 * u, v], -1), MINKOWSKI)
    with pytest.raises(NotSpacelike):
        first_form(eval_jet(m, 0.0, 0.0), MINKOWSKI)


def test_meridian_jet_matches_hand_derivative():
    m = meridian_surface(EUCLIDEAN_FAMILY, spherical_curve(constant_kappa(1.0), (-0.5, 1.5)))
    u = np.linspace(0, 2, 5)
    j = eval_jet(m, u, 0.5 + 0 * u)
    root = np.sqrt(u ** 2 + 2 * u + 5)
    assert np.allclose(j.z_u[:, 3], 2 / root)
    # the l-component has length f'(u) since |l| = 1
    assert np.allclose(np.linalg.norm(j.z_u[:, :3], axis=-1), (u + 1) / root)


def test_fd_jet_second_order():
    m = SurfaceMap(torus)
    errs = []
    hs = (1e-1, 5e-2, 2.5e-2)
    for h in hs:
        j = eval_jet(m, 0.3, 0.7, order=3, h=h)
        errs.append(max(abs(j.z_uu[0] + np.cos(0.3)), abs(j.z_vvv[3] + np.cos(0.7)),
                        abs(j.z_u[1] - np.cos(0.3))))
    assert observed_order(hs, errs) == pytest.approx(2, abs=0.1)


def test_grid_surface_nodes_only():
    d = ParamDomain(0, 1, 0, 1, 11, 11)
    U, V = d.mesh()
    g = GridSurface(torus(U, V), d)
    j = eval_jet(g, 0.5, 0.5)
    assert np.allclose(j.z_u, [-np.sin(0.5), np.cos(0.5), 0, 0], atol=5e-3)
    with pytest.raises(OutOfDomain):
        eval_jet(g, 0.55, 0.5)
    with pytest.raises(OutOfDomain):
        eval_jet(g, 0.0, 0.5)
    with pytest.raises(OutOfDomain):
        eval_jet(g, 0.1, 0.5, order=3)
