"""Operator suites, the derived-identity battery and negative controls."""

import numpy as np
import pytest

from ckverify.geometry import flat_chart, fubini_study_chart
from ckverify.residuals import (calabi_structure_battery, derived_identity_battery, fd_codifferential_check,
                                holomorphy_potential, hermitian_killing_check, kahler_identity_suite,
                                random_field, special_form_check, weitzenbock_suite)
from ckverify.solutions import product_pair


@pytest.mark.parametrize("chart", [flat_chart(3), fubini_study_chart(2, 1.5, 0.8)], ids=["flat", "fs"])
def test_operator_suites(chart):
    for r in kahler_identity_suite(chart, 3, 0) + weitzenbock_suite(chart, 3, 0):
        assert r.passed, (r.name, r.max_rel)


def test_jet_codifferential_matches_finite_differences():
    ch = fubini_study_chart(2, 1.5, 0.5)
    rep = fd_codifferential_check(ch, random_field(ch, (1, 1), seed=4), 3, 0)
    assert rep.passed, rep.max_rel


def test_battery_on_cone(cone3):
    reps = derived_identity_battery(cone3, 4, 0)
    assert all(r.passed for r in reps)
    # curvature-dependent items do not apply on a flat cone
    assert any(r.status == "not applicable" for r in reps)


def test_battery_on_calabi(flat_calabi_pair):
    reps = derived_identity_battery(flat_calabi_pair, 3, 0) + calabi_structure_battery(flat_calabi_pair, 3, 0)
    for r in reps:
        assert r.passed and r.status == "ok", (r.name, r.max_rel)


def test_frozen_norm_constants(flat_calabi_pair, fs_calabi_pair):
    for pair, C2 in [(flat_calabi_pair, 4.0), (fs_calabi_pair, 1.0 / 9.0)]:
        reps = {r.name: r for r in calabi_structure_battery(pair, 3, 0)}
        assert reps["|tau|^2 / X constant"].values["C2"] == pytest.approx(C2, rel=1e-10)


def test_holomorphy_potential(flat_calabi_pair):
    _, _, reps = holomorphy_potential(flat_calabi_pair, 3, 0)
    for r in reps:
        assert r.passed, (r.name, r.max_rel)


def test_negative_control_generic_perturbation():
    pair = product_pair(3)
    bad = pair.perturbed(random_field(pair.chart, (1, 2), seed=9), 0.1)
    rep = special_form_check(bad, 5, 0)
    assert not rep.passed and rep.max_rel > 1e-2
    worst = max(r.max_rel for r in derived_identity_battery(bad, 3, 0, include_order5=False))
    assert worst > 1e-2


def test_negative_control_hermitian_killing():
    ch = flat_chart(3)
    rep = hermitian_killing_check(random_field(ch, (0, 2), seed=1), 5, 0)
    assert not rep.passed and rep.max_rel > 1e-2


def test_points_are_seeded():
    from ckverify.residuals import sample_points

    ch = flat_chart(3)
    assert np.array_equal(sample_points(ch, 5, 3), sample_points(ch, 5, 3))
    assert not np.array_equal(sample_points(ch, 5, 3), sample_points(ch, 5, 4))
