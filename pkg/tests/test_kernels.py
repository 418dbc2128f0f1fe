import subprocess
import sys

import numpy as np
import pytest

from hololink import _kernels


def _random_cloud(rng, n, complex_pts=False):
    pts = rng.normal(size=(n, 3))
    vel = rng.normal(size=(n, 3))
    if complex_pts:
        pts = pts + 1j * rng.normal(size=(n, 3))
        vel = vel + 1j * rng.normal(size=(n, 3))
    return pts, vel


def _gauss_oracle(x, dx, y, dy):
    """Direct formula: det3(y - x, dx, dy) / (4 pi |y - x|^3) on the grid."""
    d = y[None, :, :] - x[:, None, :]
    dxg = np.broadcast_to(dx[:, None, :], d.shape)
    dyg = np.broadcast_to(dy[None, :, :], d.shape)
    det = np.linalg.det(np.stack([d, dxg, dyg], axis=-2))
    n = np.linalg.norm(d, axis=-1)
    return det / (4 * np.pi * n ** 3)


def test_gauss_grid_matches_direct_formula(rng):
    x, dx = _random_cloud(rng, 7)
    y, dy = _random_cloud(rng, 9)
    y += 5.0
    got = _kernels.gauss_grid(x, dx, y, dy)
    assert np.max(np.abs(got - _gauss_oracle(x, dx, y, dy))) < 1e-13


def _bm_oracle(z, dz, w, dw):
    d = z[:, None, :] - w[None, :, :]
    dzg = np.broadcast_to(dz[:, None, :], d.shape)
    dwg = np.broadcast_to(dw[None, :, :], d.shape)
    det = np.linalg.det(np.stack([d, dzg, dwg], axis=-2))
    n2 = np.sum(d.real ** 2 + d.imag ** 2, axis=-1)
    return np.conj(det) / n2 ** 3


def test_bm_grid_matches_direct_formula(rng):
    z, dz = _random_cloud(rng, 6, complex_pts=True)
    w, dw = _random_cloud(rng, 8, complex_pts=True)
    w += 4.0
    got = _kernels.bm_grid(z, dz, w, dw)
    assert np.max(np.abs(got - _bm_oracle(z, dz, w, dw))) < 1e-13


def test_clink_grid_matches_direct_formula(rng):
    z, dz = _random_cloud(rng, 6, complex_pts=True)
    w, dw = _random_cloud(rng, 8, complex_pts=True)
    w += 4.0
    d = z[:, None, :] - w[None, :, :]
    dzg = np.broadcast_to(dz[:, None, :], d.shape)
    dwg = np.broadcast_to(dw[None, :, :], d.shape)
    det = np.linalg.det(np.stack([d, dzg, dwg], axis=-2))
    n2 = np.sum(d.real ** 2 + d.imag ** 2, axis=-1)
    oracle = np.abs(det) ** 2 / n2 ** 3
    got = _kernels.clink_grid(z, dz, w, dw)
    assert np.max(np.abs(got - oracle)) < 1e-12


def test_min_dist_matches_broadcast(rng):
    a = rng.normal(size=(40, 3))
    b = rng.normal(size=(30, 3)) + 2.0
    oracle = float(np.min(np.linalg.norm(a[:, None] - b[None, :], axis=-1)))
    assert _kernels.min_dist(a, b) == pytest.approx(oracle, rel=1e-14)


@pytest.mark.skipif(not _kernels.HAS_NUMBA,
                    reason="numba unavailable; single implementation")
def test_jit_and_numpy_paths_agree(rng):
    x, dx = _random_cloud(rng, 11)
    y, dy = _random_cloud(rng, 13)
    y += 3.0
    assert np.allclose(_kernels.gauss_grid(x, dx, y, dy),
                       _kernels.gauss_grid_np(x, dx, y, dy),
                       rtol=1e-13, atol=1e-15)

    z, dz = _random_cloud(rng, 10, complex_pts=True)
    w, dw = _random_cloud(rng, 12, complex_pts=True)
    w += 3.0
    assert np.allclose(_kernels.bm_grid(z, dz, w, dw),
                       _kernels.bm_grid_np(z, dz, w, dw),
                       rtol=1e-13, atol=1e-15)
    assert np.allclose(_kernels.clink_grid(z, dz, w, dw),
                       _kernels.clink_grid_np(z, dz, w, dw),
                       rtol=1e-13, atol=1e-15)

    a = rng.normal(size=(25, 3))
    b = rng.normal(size=(35, 3)) + 2.0
    assert _kernels.min_dist(a, b) == pytest.approx(
        _kernels.min_dist_np(a, b), rel=1e-14)


@pytest.mark.skipif(not _kernels.HAS_NUMBA,
                    reason="numba unavailable; single implementation")
def test_crossing_sum_paths_agree(rng):
    from hololink.scenes import torus_polyline_pair

    v1, v2 = torus_polyline_pair(n=128)
    direction = np.array([0.123, 0.456, 1.0])
    direction /= np.linalg.norm(direction)
    from hololink.gauss import _projection_frame
    u, v, dhat = _projection_frame(direction)
    p1 = np.stack([v1 @ u, v1 @ v], axis=-1)
    p2 = np.stack([v2 @ u, v2 @ v], axis=-1)
    d1, d2 = v1 @ dhat, v2 @ dhat
    total_nb, degen_nb = _kernels.crossing_sum(p1, d1, p2, d2)
    total_np, degen_np = _kernels.crossing_sum_np(p1, d1, p2, d2)
    assert total_nb == total_np
    assert degen_nb == degen_np


def test_no_numba_env_flag_selects_numpy_path():
    code = ("import hololink._kernels as k; "
            "print(k.HAS_NUMBA, k.gauss_grid is k.gauss_grid_np)")
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"HOLOLINK_NO_NUMBA": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True, cwd="/root/pkg/src")
    assert out.returncode == 0, out.stderr
    assert out.stdout.split() == ["False", "True"]
