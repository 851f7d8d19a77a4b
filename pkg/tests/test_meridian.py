import numpy as np
import pytest

from pnmc_lab.errors import DomainViolation, ValidationError
from pnmc_lab.meridian import (EUCLIDEAN_FAMILY, PARABOLIC_FAMILY, XI1, XI2, constant_kappa,
                               meridian_profile, meridian_surface, paraboloid_curve, polynomial_kappa,
                               sine_kappa, spherical_curve)
from pnmc_lab.pseudo_euclidean import EUCLIDEAN, MINKOWSKI, inner
from pnmc_lab.surface import eval_jet, first_form


def test_axis_vectors_are_null_pair():
    assert inner(XI1, XI1, MINKOWSKI) == pytest.approx(0)
    assert inner(XI2, XI2, MINKOWSKI) == pytest.approx(0)
    assert inner(XI1, XI2, MINKOWSKI) == pytest.approx(-1)


def test_great_circle():
    c = spherical_curve(constant_kappa(0.0), (0, 3), 1e-2)
    expected = np.stack([np.cos(c.v), np.sin(c.v), 0 * c.v], -1)
    assert np.allclose(c.l[:, :3], expected, atol=1e-9)


def test_constant_kappa_is_small_circle():
    k = 0.8
    c = spherical_curve(constant_kappa(k), (0, 6), 1e-3)
    centre = (k / np.sqrt(1 + k * k)) * (k * np.array([1, 0, 0]) + np.array([0, 0, 1])) / np.sqrt(1 + k * k)
    radius = np.linalg.norm(c.l[:, :3] - centre, axis=-1)
    assert np.ptp(radius) < 1e-9
    assert radius[0] == pytest.approx(1 / np.sqrt(1 + k * k))


def test_sphere_invariants_generic_kappa():
    c = spherical_curve(sine_kappa(), (0, 1), 1e-3)
    assert len(c.v) == 1001
    l, dl = c.l, c.dl
    assert np.max(np.abs(inner(l, l, EUCLIDEAN) - 1)) < 1e-8
    assert np.max(np.abs(inner(l, dl, EUCLIDEAN))) < 1e-8


def test_paraboloid_curve_straight_line_and_circle():
    line = paraboloid_curve(constant_kappa(0.0), (0, 2), 1e-2)
    a, b = line.states[:, 0], line.states[:, 1]
    assert np.allclose(a, line.v) and np.allclose(b, 0)
    assert np.allclose(inner(line.dl, line.dl, MINKOWSKI), 1)
    circle = paraboloid_curve(constant_kappa(1.0), (0, 2 * np.pi), 2 * np.pi / 4000)
    assert np.linalg.norm(circle.states[-1, :2] - circle.states[0, :2]) < 1e-6


def test_paraboloid_lift_conservation():
    c = paraboloid_curve(polynomial_kappa([1.0, 0.5]), (0, 1), 1e-3)
    l = c.l
    assert np.max(np.abs(inner(l, l, MINKOWSKI))) < 1e-8
    assert np.max(np.abs(inner(l, XI1, MINKOWSKI) + 1)) < 1e-8


def test_off_node_evaluation_and_range():
    c = spherical_curve(sine_kappa(), (0, 1), 1e-2)
    v = np.array([0.123, 0.4567])
    l = c.position(v)
    assert np.allclose(inner(l, l, EUCLIDEAN), 1, atol=1e-9)
    with pytest.raises(DomainViolation):
        c.position(np.array([1.5]))


@pytest.mark.parametrize("family,make,G", [
    (EUCLIDEAN_FAMILY, spherical_curve, lambda u: u ** 2 + 2 * u + 5),
    (PARABOLIC_FAMILY, paraboloid_curve, lambda u: u + 1),
])
def test_meridian_first_form(family, make, G):
    m = meridian_surface(family, make(sine_kappa(), (-0.2, 1.2), 1e-3, 0.0))
    u = np.linspace(0, 2, 9)
    ff = first_form(eval_jet(m, u, 0.5 + 0 * u), m.signature)
    assert np.allclose(ff.E, 1) and np.allclose(ff.F, 0, atol=1e-12) and np.allclose(ff.G, G(u))


def test_profile_domain_and_family_checks():
    with pytest.raises(DomainViolation):
        meridian_profile(PARABOLIC_FAMILY).check(np.array([-2.0]))
    with pytest.raises(ValidationError):
        meridian_profile("hyperbolic")
    with pytest.raises(ValidationError):
        meridian_surface(PARABOLIC_FAMILY, spherical_curve(constant_kappa(1.0), (0, 1)))
