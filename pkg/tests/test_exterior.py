"""Pointwise exterior algebra: bitmask operations against the tensor oracle."""

import numpy as np
import pytest

from ckverify.exterior import (MetricPoint, PqForm, TangentVector, algebra, inner, inner_any, interior,
                               l_omega, l_omega_star, norm, primitive_part, wedge)
from ckverify.oracle import (exterior_oracle_suite, form_to_tensor, hermitian_cometric, random_hermitian_metric,
                             tensor_inner, tensor_to_form)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def test_algebra_dimension():
    for m in range(1, 5):
        assert algebra(m).dim == 4 ** m


def test_flat_dz_has_norm_two():
    # g = sum dx^2 + dy^2 gives |dz|^2 = 2
    met = MetricPoint(0.5 * np.eye(3))
    dz = PqForm.zero(3)
    dz.c[1] = 1.0
    assert norm(met, dz) ** 2 == pytest.approx(2.0, abs=1e-14)


def test_wedge_graded_commutative(rng):
    m = 3
    for p1, q1, p2, q2 in [(1, 0, 0, 1), (1, 1, 1, 0), (0, 2, 1, 0)]:
        a = PqForm.random(rng, m, p1, q1)
        b = PqForm.random(rng, m, p2, q2)
        sign = (-1) ** ((p1 + q1) * (p2 + q2))
        assert np.allclose(wedge(a, b).c, sign * wedge(b, a).c, atol=1e-13)


def test_interior_is_antiderivation(rng):
    m = 3
    a = PqForm.random(rng, m, 1, 0)
    b = PqForm.random(rng, m, 1, 1)
    X = TangentVector.from_components(m, rng.standard_normal(2 * m) + 1j * rng.standard_normal(2 * m))
    lhs = interior(X, wedge(a, b))
    rhs = wedge(interior(X, a), b) - wedge(a, interior(X, b))
    assert np.allclose(lhs.c, rhs.c, atol=1e-13)


def test_round_trip_through_tensor(rng):
    a = PqForm.random(rng, 3, 1, 2)
    back = tensor_to_form(3, form_to_tensor(a, 3))
    assert np.array_equal(back.c, a.c)


def test_inner_product_matches_tensor_inner(rng):
    # the inner product equals the 1/k! tensor inner product, no extra 1/p! factor
    for m, p, q in [(2, 1, 1), (3, 1, 2), (4, 2, 1)]:
        H = random_hermitian_metric(rng, m)
        met = MetricPoint(H)
        a, b = PqForm.random(rng, m, p, q), PqForm.random(rng, m, p, q)
        k = p + q
        ref = tensor_inner(hermitian_cometric(H), form_to_tensor(a, k), form_to_tensor(b, k))
        assert inner(met, a, b) == pytest.approx(ref, rel=1e-12)


def test_l_omega_star_is_adjoint(rng):
    met = MetricPoint(random_hermitian_metric(rng, 3))
    a = PqForm.random(rng, 3, 1, 0)
    b = PqForm.random(rng, 3, 2, 1)
    x = inner_any(met, l_omega(met, a), b)
    y = inner_any(met, a, l_omega_star(met, b))
    assert x == pytest.approx(y, rel=1e-12)


def test_primitive_part_is_primitive(rng):
    met = MetricPoint(random_hermitian_metric(rng, 4))
    psi = primitive_part(met, PqForm.random(rng, 4, 1, 3))
    assert l_omega_star(met, psi).max_abs() < 1e-12 * psi.max_abs()


def test_oracle_suite_small():
    reports = exterior_oracle_suite(n_cases=60, seed=3)
    assert len(reports) == 4
    for r in reports:
        assert r.passed, (r.name, r.max_abs)
