"""Momentum profile, radial model and domain classification."""

import numpy as np
import pytest

from ckverify.profiles import (CSV_HEADER, MomentumProfile, ProfileError, RadialModel, RicciPrediction,
                               maximal_domain, norm_predictions, positivity_domain, positivity_scan,
                               profile_csv, profile_ode_check, radial_ode_check, tonnesen_ricci)


def test_frozen_profile_values():
    p = MomentumProfile(3, 1.0, 0.0)
    assert p.X(2.0) == 16.0
    assert p.dX(2.0) == 32.0
    pred = RicciPrediction(3, 1.0)
    assert pred.lambda1(1.0) == -9.0
    assert pred.lambda2(1.0) == -3.0
    assert pred.scal(1.0) == -30.0


def test_general_ricci_formula_agrees_with_prediction():
    # lambda1 = Lambda1 and lambda2 = Lambda2 + k/z once the base Ricci form is folded in
    for C1, k in [(1.0, 0.0), (0.5, 2.0), (-1.0, 3.0), (2.0, -0.5), (0.0, 1.0)]:
        p = MomentumProfile(4, C1, k)
        zs = np.linspace(0.5, 1.5, 7)
        L1, L2 = tonnesen_ricci(p, zs)
        pred = RicciPrediction.from_profile(p)
        assert np.allclose(L1, pred.lambda1(zs), rtol=1e-13, atol=1e-13)
        assert np.allclose(L2 + k / zs, pred.lambda2(zs), rtol=1e-13, atol=1e-13)
        assert np.allclose(pred.scal(zs), 2 * (pred.lambda1(zs) + 3 * pred.lambda2(zs)))


def test_norm_predictions():
    p = MomentumProfile(3, 1.0, 0.0)
    t2, p2 = norm_predictions(p, 4.0, 1.5)
    assert t2 == pytest.approx(4.0 * p.X(1.5))
    assert p2 == pytest.approx(2.0 * 1.5 ** 2)
    with pytest.raises(ProfileError):
        norm_predictions(p, 0.0, 1.0)


def test_profile_rejects_bad_parameters():
    with pytest.raises(ProfileError):
        MomentumProfile(3, 0.0, 0.0)
    with pytest.raises(ProfileError):
        MomentumProfile(2, 1.0, 0.0)
    with pytest.raises(ProfileError):
        MomentumProfile(3, -1.0, 0.0, 1.0, 2.0)


def test_radial_closed_form_value():
    # C1 = 0, k = 1, m = 3: G^3 = 2/3 at r = 1
    model = RadialModel(3, 1.0, 0.0, 1.0)
    assert model.Gm(1.0) == pytest.approx(2.0 / 3.0)
    assert model.G(1.0) ** 3 == pytest.approx(2.0 / 3.0)


def test_maximal_domain_table():
    d = maximal_domain(-1.0, 1.0, 1.0)
    assert (d.case, d.tag) == ("i", "punctured")
    d = maximal_domain(1.0, -1.0, 1.0)
    assert (d.case, d.tag, d.a) == ("ii", "r>a", 1.0)
    d = maximal_domain(4.0, 1.0, 1.0)
    assert (d.case, d.tag) == ("iii", "r<a")
    assert d.a == pytest.approx(0.5)
    d = maximal_domain(0.0, 2.0, 1.0)
    assert (d.case, d.tag) == ("iv", "punctured")
    assert maximal_domain(1.0, 0.0, 1.0).case == "outside"
    with pytest.raises(ProfileError):
        maximal_domain(0.0, 0.0, 1.0)


def test_positivity_domain_matches_scan():
    rng = np.random.default_rng(5)
    for _ in range(200):
        C1, k = rng.choice([-1.0, 0.0, 1.0]) * rng.uniform(0.2, 3.0), rng.choice([-1.0, 0.0, 1.0]) * rng.uniform(0.2, 3.0)
        if C1 == 0 and k == 0:
            continue
        lam = rng.uniform(0.2, 3.0)
        dom = positivity_domain(C1, k, lam)
        rs = np.exp(rng.uniform(-3, 3, 40))
        if dom.a is not None:
            rs = rs[np.abs(rs - dom.a) > 1e-6 * dom.a]
        assert np.array_equal(dom.contains(rs), positivity_scan(3, C1, k, lam, rs))


def test_case_ii_positivity_is_inside_the_radius():
    # the table gives r > a, the positivity conditions hold for r < a
    pos = positivity_domain(1.0, -1.0, 1.0)
    assert pos.tag == "r<a" and pos.a == 1.0
    assert positivity_scan(3, 1.0, -1.0, 1.0, [0.5])[0]
    assert not positivity_scan(3, 1.0, -1.0, 1.0, [2.0])[0]


def test_profile_csv_layout():
    text = profile_csv(MomentumProfile(3, 1.0, -1.0), [1.0, 1.5])
    lines = text.strip().split("\n")
    assert lines[0].split(",") == CSV_HEADER
    row = [float(v) for v in lines[1].split(",")]
    assert row[:2] == [1.0, pytest.approx(1.0 / 3.0)]
    assert row[3:6] == [-9.0, -3.0, -30.0]


def test_ode_checks_pass():
    for C1, k in [(1.0, 0.0), (-1.0, 1.0), (1.0, -1.0)]:
        reps = profile_ode_check(MomentumProfile(3, C1, k), 0.3 if C1 < 0 else 1.2, 0.8 if C1 < 0 else 2.0)
        assert all(r.passed for r in reps)
    reps = radial_ode_check(RadialModel(3, 1.0, -1.0, 1.0), 0.3, 3.0)
    assert all(r.passed for r in reps) and reps[0].values["monotone"]
    with pytest.raises(ProfileError):
        radial_ode_check(RadialModel(3, -1.0, 1.0, 1.0), 1.5, 2.0)
