import numpy as np
import pytest

from pnmc_lab._numerics import central_diff, map_rows, observed_order, rk4_step, thread_cap


def test_rk4_global_order_four():
    hs, errs = (0.1, 0.05, 0.025), []
    for h in hs:
        y, t = np.array([1.0, 0.0]), 0.0
        for _ in range(int(round(2 / h))):
            y = rk4_step(lambda t, y: np.array([y[1], -y[0]]), t, y, h)
            t += h
        errs.append(abs(y[0] - np.cos(2.0)))
    assert observed_order(hs, errs) == pytest.approx(4, abs=0.1)


def test_rk4_per_point_steps():
    y = np.ones((3, 2))
    out = rk4_step(lambda t, y: y, 0.0, y, np.array([0.0, 0.1, 0.2]))
    assert np.allclose(out[:, 0], np.exp([0.0, 0.1, 0.2]), atol=1e-5)


def test_central_diff_edges():
    d = central_diff(np.arange(5.0) ** 2, 1.0, 0)
    assert np.isnan(d[0]) and np.isnan(d[-1]) and np.allclose(d[1:-1], [2, 4, 6])


def test_map_rows_independent_of_threads(monkeypatch):
    U, V = np.meshgrid(np.linspace(0, 1, 9), np.linspace(0, 1, 4), indexing="ij")
    f = lambda u, v: (np.sin(u) * v, u + v)
    a = map_rows(f, U, V, 1)
    b = map_rows(f, U, V, 3)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    monkeypatch.setenv("PNMC_LAB_THREADS", "4")
    assert thread_cap() == 4
    monkeypatch.setenv("PNMC_LAB_THREADS", "lots")
    assert thread_cap() == 1
