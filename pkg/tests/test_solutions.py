"""Special pairs and Hermitian Killing instances."""

import pytest

from ckverify.geometry import flat_chart, form_jet, fubini_study_chart
from ckverify.residuals import (conformal_killing_check, einstein_cone_battery, hermitian_killing_check,
                                pair_invariant_checks, special_form_check)
from ckverify.solutions import (BaseVerificationError, lifted_hk, lifted_toric_hk, product_pair, product_pair2,
                                solution_descriptor, toric_hk)


def test_cone_pair_special_and_conformal_killing(cone3):
    assert special_form_check(cone3, 10, 0).passed
    assert conformal_killing_check(cone3.phi, 10, 0).passed
    for r in pair_invariant_checks(cone3, 5, 0):
        assert r.passed, r.name


def test_cone_constant_is_nine(cone3):
    reps = {r.name: r for r in einstein_cone_battery(cone3, 5, 0)}
    assert all(r.passed for r in reps.values())
    assert reps["|dbar tau|^2 constant"].values["k"] == pytest.approx(9.0, rel=1e-12)


@pytest.mark.parametrize("builder", [product_pair, product_pair2])
def test_product_pairs(builder):
    pair = builder(3)
    assert special_form_check(pair, 10, 0).passed


def test_calabi_pairs_special(flat_calabi_pair, fs_calabi_pair):
    assert special_form_check(flat_calabi_pair, 5, 0, tol=1e-6).passed
    assert special_form_check(fs_calabi_pair, 5, 0, tol=1e-5).passed
    assert conformal_killing_check(flat_calabi_pair.phi, 5, 0, tol=1e-6).passed


def test_scaled_tau_is_rejected(cone3):
    rep = special_form_check(cone3.scaled_tau(1.01), 5, 0)
    assert not rep.passed


@pytest.mark.parametrize("p", [1, 2, 3])
def test_toric_flat(p):
    inst = toric_hk(flat_chart(3), p)
    assert hermitian_killing_check(inst.tau, 10, 0).passed


@pytest.mark.parametrize("p", [1, 2])
def test_toric_fubini_study(p):
    inst = toric_hk(fubini_study_chart(2, 1.5, 0.8), p)
    assert hermitian_killing_check(inst.tau, 10, 0, tol=1e-7).passed


def test_toric_rejects_large_p():
    with pytest.raises(ValueError):
        toric_hk(flat_chart(2), 3)


def test_lifted_toric(flat_calabi, fs_calabi):
    for ch in (flat_calabi, fs_calabi):
        inst = lifted_toric_hk(ch, 2)
        assert hermitian_killing_check(inst.tau, 5, 0, tol=1e-6).passed


def test_lifted_rejects_non_killing_base(flat_calabi):
    def bad(c):
        return form_jet(c, [(c.z[0] * c.zb[0] ** 2, (), (1,))])

    with pytest.raises(BaseVerificationError):
        lifted_hk(flat_calabi, bad, None, 2)


def test_descriptor(cone3):
    d = solution_descriptor(cone3)
    assert d["family"] == "cone" and d["m"] == 3
