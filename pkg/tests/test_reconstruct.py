import numpy as np
import pytest

from pnmc_lab.errors import DriftExceeded, MuVanishes, ValidationError
from pnmc_lab.meridian import EUCLIDEAN_FAMILY, PARABOLIC_FAMILY, constant_kappa, sine_kappa
from pnmc_lab.pde import GridField, family_fields, family_solution
from pnmc_lab.pseudo_euclidean import EUCLIDEAN, MINKOWSKI, inner
from pnmc_lab.reconstruct import (FrameState, compatibility_defect, connection_matrices,
                                  integrate_surface, roundtrip)
from pnmc_lab.surface import ParamDomain

BOX = (1.5, 2.5, -1.0, 0.0)


def flat_mu(c):
    def f(u, v):
        u = np.asarray(u, dtype=float)
        return 0 * u, np.full(np.shape(u), c), 0 * u
    return f


def test_constant_mu_connection():
    d = ParamDomain(0, 1, 0, 1, 5, 5)
    zero = GridField(np.zeros(d.shape), (d.h_u, d.h_v))
    mu = zero.with_values(np.full(d.shape, -1.0))
    cm = connection_matrices(zero, mu, zero)
    A = cm.A_u[2, 2]
    assert A[1, 3] == 1.0 and A[3, 1] == -1.0
    A[1, 3] = A[3, 1] = 0
    assert np.all(A == 0)
    with pytest.raises(MuVanishes):
        connection_matrices(zero, zero, zero)


@pytest.mark.parametrize("family,eps", [(EUCLIDEAN_FAMILY, None), (PARABOLIC_FAMILY, 1), (PARABOLIC_FAMILY, -1)])
def test_connection_is_skew_adjoint(family, eps):
    lam, mu, nu = family_solution(family, sine_kappa(), ParamDomain(*BOX, 9, 9))
    cm = connection_matrices(lam, mu, nu, eps)
    assert cm.skew_defect() == 0.0
    # column of b along u: -a (nu x + lam y)
    assert np.allclose(cm.A_u[..., :, 2], -cm.a[..., None] * np.stack([nu.values, lam.values, 0 * nu.values,
                                                                        0 * nu.values], -1))


def test_reconstruction_first_form_is_canonical():
    f = family_fields(EUCLIDEAN_FAMILY, constant_kappa(1.0))
    d = ParamDomain(*BOX, 41, 41)
    rec = integrate_surface(f, None, None, d)
    frame = rec.frame
    _, mu, _ = f(*d.mesh())
    a2 = 1 / np.abs(mu)
    # z_u = a x exactly along the integration, compare the scaled frame with FD tangents
    zu = np.gradient(rec.z, d.h_u, axis=0, edge_order=2)
    assert np.allclose(inner(zu, zu, EUCLIDEAN), a2, rtol=1e-3)
    assert np.allclose(inner(frame.x, frame.y, EUCLIDEAN), 0, atol=1e-9)
    assert rec.max_drift < 1e-6


def test_drift_bound_and_initial_frame_checks():
    f = family_fields(EUCLIDEAN_FAMILY)
    d = ParamDomain(*BOX, 11, 11)
    with pytest.raises(DriftExceeded):
        integrate_surface(f, None, None, d, drift_bound=1e-14)
    bad = FrameState(np.zeros(4), *(2 * np.eye(4)))
    with pytest.raises(ValidationError):
        integrate_surface(f, None, bad, d)
    assert integrate_surface(f, None, None, d, project=True).max_drift < 1e-12


def test_drift_on_fine_grid():
    f = family_fields(EUCLIDEAN_FAMILY, sine_kappa())
    d = ParamDomain(1.5, 1.5 + 99 * 0.02, -1.0, -1.0 + 99 * 0.02, 100, 100)
    assert integrate_surface(f, None, None, d).max_drift < 1e-6


def test_inconsistent_fields_have_defect():
    # lambda = nu = 0 with constant mu violates the Gauss equation
    d = ParamDomain(0, 1, 0, 1, 11, 11)
    assert compatibility_defect(flat_mu(1.0), None, None, d) > 1e-3


def test_compatibility_defect_order():
    f = family_fields(PARABOLIC_FAMILY, sine_kappa())
    defects = [compatibility_defect(f, 1, None, ParamDomain(*BOX, n, n)) for n in (6, 11, 21)]
    order = np.log2(defects[0] / defects[1]), np.log2(defects[1] / defects[2])
    assert min(order) > 3.5


def _rotation():
    rng = np.random.default_rng(7)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    return q


def _boost(r=0.6):
    B = np.eye(4)
    B[0, 0] = B[3, 3] = np.cosh(r)
    B[0, 3] = B[3, 0] = np.sinh(r)
    return B


@pytest.mark.parametrize("family,eps,A", [(EUCLIDEAN_FAMILY, None, _rotation()), (PARABOLIC_FAMILY, 1, _boost())])
def test_equivariance(family, eps, A):
    f = family_fields(family, sine_kappa())
    d = ParamDomain(*BOX, 15, 15)
    t = np.array([0.3, -1.0, 2.0, 0.5])
    base = integrate_surface(f, eps, None, d)
    moved = integrate_surface(f, eps, FrameState.standard(eps).transformed(A, t), d)
    assert np.allclose(moved.z, base.z @ A.T + t, atol=1e-8)


@pytest.mark.parametrize("family,eps", [(EUCLIDEAN_FAMILY, None), (PARABOLIC_FAMILY, 1)])
def test_roundtrip_and_control(family, eps):
    f = family_fields(family, constant_kappa(1.0))
    d = ParamDomain(*BOX, 30, 30)
    good = roundtrip(f, eps, d)
    assert not good.flagged and good.worst < 1e-3

    def shifted(u, v):
        lam, mu, nu = f(u, v)
        return lam, mu, nu + 0.1

    bad = roundtrip(shifted, eps, d)
    assert bad.flagged and bad.worst > 10 * good.worst


def test_roundtrip_from_grid_fields():
    d = ParamDomain(*BOX, 30, 30)
    r = roundtrip(family_solution(EUCLIDEAN_FAMILY, None, d), None, d)
    assert r.worst < 1e-3
    with pytest.raises(ValidationError):
        roundtrip(family_fields(EUCLIDEAN_FAMILY), None, d, margin=1)


def test_timelike_b_frame_signs():
    f = family_fields(PARABOLIC_FAMILY)
    rec = integrate_surface(f, -1, None, ParamDomain(*BOX, 21, 21))
    fr = rec.frame
    assert np.allclose(inner(fr.b, fr.b, MINKOWSKI), -1)
    assert np.allclose(inner(fr.l, fr.l, MINKOWSKI), 1)
