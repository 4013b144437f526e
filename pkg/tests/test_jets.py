"""Truncated Taylor jets against closed-form derivatives."""

import math

import numpy as np
import pytest

from ckverify.jets import Jet, jet_det, jet_inv, stack


def _vars(order, base):
    return [Jet.variable(len(base), order, i, b) for i, b in enumerate(base)]


def test_product_rule_derivatives():
    x, y = _vars(4, [0.3, -0.7])
    f = x.exp() * y * y
    ex = math.exp(0.3)
    assert f.derivative_value((0, 0)) == pytest.approx(ex * 0.49)
    assert f.derivative_value((1, 0)) == pytest.approx(ex * 0.49)
    assert f.derivative_value((0, 1)) == pytest.approx(ex * 2 * -0.7)
    assert f.derivative_value((1, 2)) == pytest.approx(ex * 2)
    assert f.derivative_value((0, 3)) == pytest.approx(0.0, abs=1e-14)


def test_log_and_power():
    (x,) = _vars(5, [1.7])
    f = x.log()
    for n in range(1, 6):
        # d^n log x = (-1)^(n-1) (n-1)! / x^n
        ref = (-1) ** (n - 1) * math.factorial(n - 1) / 1.7 ** n
        assert f.derivative_value((n,)) == pytest.approx(ref, rel=1e-12)
    g = x.power(-2.5)
    assert g.derivative_value((2,)) == pytest.approx(-2.5 * -3.5 * 1.7 ** -4.5, rel=1e-12)


def test_differentiation_lowers_order():
    x, y = _vars(3, [0.1, 0.2])
    f = x * y
    assert f.order == 3
    assert f.d(0).order == 2
    with pytest.raises(ValueError):
        Jet.constant(2, 0, 1.0).d(0)


def test_addition_truncates_to_lower_order():
    x3 = Jet.variable(1, 3, 0, 0.5)
    x2 = Jet.variable(1, 2, 0, 0.5)
    assert (x3 * x3 + x2).order == 2


def test_matrix_inverse_and_determinant():
    x, y = _vars(3, [0.4, 0.9])
    A = stack([stack([1.0 + x * x, y], axis=-1), stack([y, 2.0 + x * y], axis=-1)], axis=-2)
    inv = jet_inv(A)
    det = jet_det(A)
    A0 = A.value
    assert np.allclose(inv.value, np.linalg.inv(A0), atol=1e-14)
    assert det.value == pytest.approx(np.linalg.det(A0))
    # d det = det tr(A^-1 dA) along x
    dA = A.d(0).value
    ref = np.linalg.det(A0) * np.trace(np.linalg.inv(A0) @ dA)
    assert det.d(0).value == pytest.approx(ref, rel=1e-12)
