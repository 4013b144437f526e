"""Calabi charts, lifts, the Chern connection and the dbar splitting."""

import numpy as np
import pytest

from ckverify.calabi import (BaseGeometry, bdel_split_check, chart_battery, chern_checks, lift, lift_checks)
from ckverify.geometry import FormField, form_jet
from ckverify.solutions import calabi_id_form, toric_form, toric_moment_maps


def _gamma(c):
    # a (0, 1) base form that is neither holomorphic nor closed
    return form_jet(c, [(c.z[0] * c.zb[1] + 0.3 * c.zb[0] ** 2, (), (1,))])


def test_base_einstein():
    assert BaseGeometry("fs", 2, 1.0).einstein_check(n_points=5).passed
    assert BaseGeometry("fs", 2, 1.0).scale == 3.0
    with pytest.raises(ValueError):
        BaseGeometry("flat", 2, 1.0)
    with pytest.raises(ValueError):
        BaseGeometry("fs", 2, 0.0)


def test_z_of_t_inverts(flat_calabi):
    ch = flat_calabi
    for z in [1.0, 1.3, 1.9]:
        assert ch.z_of_t(ch.t_of_z(z)) == pytest.approx(z, rel=1e-12)


def test_sampled_moment_map_stays_in_interval(fs_calabi):
    pts = fs_calabi.sample(np.random.default_rng(0), 20)
    zs = [fs_calabi.z_at(p) for p in pts]
    assert min(zs) >= 1.0 and max(zs) <= 2.0


@pytest.mark.parametrize("which", ["flat_calabi", "fs_calabi"])
def test_chart_battery(which, request):
    ch = request.getfixturevalue(which)
    reps = chart_battery(ch, 4, 0)
    for r in reps:
        assert r.passed, (r.name, r.max_rel)
    ric = [r for r in reps if r.name == "Ricci eigenvalues"][0]
    assert ric.values["multiplicities"] == [2, 4]


@pytest.mark.parametrize("which,weight", [("flat_calabi", 0), ("fs_calabi", -1), ("fs_calabi", 2)])
def test_lift_checks(which, weight, request):
    ch = request.getfixturevalue(which)
    for r in lift_checks(ch, _gamma, weight, 4, 0):
        assert r.passed, (r.name, r.max_rel)


def test_lift_rejects_fractional_weight(flat_calabi):
    with pytest.raises(ValueError):
        lift(flat_calabi, _gamma, 0.5)


def test_chern_checks(flat_calabi, fs_calabi):
    for ch in (flat_calabi, fs_calabi):
        tau = calabi_id_form(ch)
        for r in chern_checks(ch, tau, ch.m - 1, 3, 0):
            assert r.passed, (r.name, r.max_rel)


def test_dbar_splitting_on_non_invariant_form(fs_calabi):
    ch = fs_calabi
    m = ch.m
    ts, _ = toric_moment_maps(ch.base.chart(), 2)
    base = lift(ch, lambda c: toric_form(c, ts), 1)

    def fn(c):
        # break K-invariance so the vertical term does not vanish
        w = c.z[m - 1]
        return (c.zb[m - 1] ** 2 + w) * base.jet(c)

    rep = bdel_split_check(ch, FormField(m, fn, (0, 1), "test", ch), 4, 0)
    assert rep.passed, rep.max_rel
