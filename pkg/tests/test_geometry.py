"""Charts, metric jets and the Einstein constant of scaled Fubini-Study."""

import numpy as np
import pytest

from ckverify.geometry import flat_chart, fubini_study_chart
from ckverify.residuals import einstein_check, einstein_constant


def _wirtinger_hessian(f, z, h=1e-4):
    """``d^2 f / dz_i dzbar_j`` by central differences in real coordinates."""
    m = len(z)
    x = np.concatenate([z.real, z.imag])

    def F(v):
        return f(v[:m] + 1j * v[m:])

    D = np.zeros((2 * m, 2 * m))
    for a in range(2 * m):
        for b in range(2 * m):
            ea, eb = np.eye(2 * m)[a] * h, np.eye(2 * m)[b] * h
            D[a, b] = (F(x + ea + eb) - F(x + ea - eb) - F(x - ea + eb) + F(x - ea - eb)) / (4 * h * h)
    xx, xy, yx, yy = D[:m, :m], D[:m, m:], D[m:, :m], D[m:, m:]
    return 0.25 * ((xx + yy) + 1j * (xy - yx))


def _fs_metric(z, c):
    s = 1.0 + np.vdot(z, z).real
    return c * (np.eye(len(z)) / s - np.outer(z.conj(), z) / s ** 2)


def test_flat_metric_is_half_identity():
    ch = flat_chart(3)
    geo = ch.geometry(np.array([0.1, -0.2j, 0.3]), 4)
    assert np.allclose(geo.H.value, 0.5 * np.eye(3))
    assert np.allclose(geo.ricci.value, 0.0)


def test_fs_einstein_constant_finite_difference_oracle():
    # Ricci form -dd^c log det H by finite differences; the fitted ratio is (m+1)/c
    m, c = 2, 1.5
    ch = fubini_study_chart(m, c)
    z = np.array([0.3 + 0.1j, -0.2 + 0.4j])
    H_fd = _wirtinger_hessian(lambda w: c * np.log1p(np.vdot(w, w).real), z)
    geo = ch.geometry(z, 4)
    assert np.allclose(H_fd, geo.H.value, atol=1e-6)
    assert np.allclose(_fs_metric(z, c), geo.H.value, atol=1e-14)
    ric_fd = -_wirtinger_hessian(lambda w: np.log(np.linalg.det(_fs_metric(w, c)).real), z)
    assert np.allclose(ric_fd, geo.ricci.value, atol=1e-6)
    k_fit = np.real(np.trace(np.linalg.solve(geo.H.value, ric_fd))) / m
    assert k_fit == pytest.approx(2.0, rel=1e-6)
    assert einstein_constant(ch) == pytest.approx((m + 1) / c)


def test_einstein_check_passes_and_detects_wrong_constant():
    ch = fubini_study_chart(2, 1.0, 0.8)
    assert einstein_constant(ch) == 3.0
    assert einstein_check(ch, n_points=5).passed
    bad = einstein_check(ch, k=3.1, n_points=5)
    assert not bad.passed and bad.max_rel > 1e-3
    assert einstein_check(flat_chart(3), n_points=3).values["k"] == 0.0


def test_sample_points_stay_in_box():
    ch = flat_chart(2, 0.5)
    pts = ch.sample(np.random.default_rng(0), 50)
    assert pts.shape == (50, 2)
    assert all(ch.in_domain(p) for p in pts)
