"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected in ``RESULTS`` and repeated in the pytest
terminal summary, so they are visible without ``-s``.
"""

import time

import numpy as np
import pytest

from ckverify.algebraic import type_identity_suite
from ckverify.calabi import chart_battery, lift_checks
from ckverify.cli import main
from ckverify.geometry import FormField, flat_chart, form_jet, fubini_study_chart
from ckverify.oracle import exterior_oracle_suite
from ckverify.profiles import (MomentumProfile, ProfileError, RadialModel, maximal_domain, positivity_domain,
                               positivity_scan, profile_ode_check, radial_ode_check)
from ckverify.residuals import (calabi_structure_battery, derived_identity_battery, einstein_check,
                                einstein_cone_battery, einstein_constant, hermitian_killing_check,
                                kahler_identity_suite, random_field, special_form_check, weitzenbock_suite)
from ckverify.solutions import calabi_pair, lifted_toric_hk, product_pair, product_pair2, toric_hk

RESULTS = []


def _record(n, title, reports=(), ok=True, detail=""):
    bad = [r for r in reports if not r.passed]
    ok = ok and not bad
    worst = max((r.max_rel for r in reports), default=0.0)
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}  worst={worst:.2e} {detail}".rstrip()
    RESULTS.append(line)
    print(line)
    for r in bad:
        print("    failed:", r.line())
    assert ok, line


def test_criterion_01_exterior_oracle():
    t0 = time.perf_counter()
    reps = exterior_oracle_suite(n_cases=500, seed=0, m_max=4, tol=1e-12)
    dt = time.perf_counter() - t0
    assert [r.n_points for r in reps] == [500] * 4
    _record(1, "exterior algebra vs tensor oracle", reps, dt < 10, f"time={dt:.1f}s")


def test_criterion_02_type_identities():
    t0 = time.perf_counter()
    reps = type_identity_suite(n_cases=100, seed=0, tol=1e-12)
    dt = time.perf_counter() - t0
    _record(2, "type identities", reps, dt < 30 and all(r.n_points == 100 for r in reps), f"time={dt:.1f}s")


def test_criterion_03_kahler_and_weitzenbock(flat_calabi):
    t0 = time.perf_counter()
    reps = []
    for chart in (flat_chart(3), fubini_study_chart(2, 1.5, 0.8), flat_calabi):
        reps += kahler_identity_suite(chart, 50, 0, 1e-7)
        reps += weitzenbock_suite(chart, 50, 0, 1e-7)
    dt = time.perf_counter() - t0
    _record(3, "Kaehler identities and Weitzenboeck formulas", reps, dt < 180, f"time={dt:.1f}s")


def test_criterion_04_fubini_study_einstein():
    chart = fubini_study_chart(2, 1.5, 0.8)
    # (m + 1) / scale, confirmed against a finite-difference Ricci form in test_geometry
    assert einstein_constant(chart) == pytest.approx(2.0)
    rep = einstein_check(chart, n_points=20, seed=0, tol=1e-8)
    _record(4, "scaled Fubini-Study is Einstein", [rep], rep.values["k"] == pytest.approx(2.0))


def test_criterion_05_cone(cone3):
    reps = [special_form_check(cone3, 100, 0, 1e-8)]
    reps += einstein_cone_battery(cone3, 20, 0, 1e-7)
    _record(5, "cone pair special and Ricci-flat battery", reps, reps[0].n_points == 100)


def test_criterion_06_products():
    reps = [special_form_check(b(3), 100, 0, 1e-8) for b in (product_pair, product_pair2)]
    _record(6, "product pairs", reps)


def test_criterion_07_flat_calabi(flat_calabi, flat_calabi_pair):
    t0 = time.perf_counter()
    pair = flat_calabi_pair
    reps = [special_form_check(pair, 20, 0, 1e-6)]
    cb = {r.name: r for r in chart_battery(flat_calabi, 20, 0, 1e-7, 1e-6)}
    sb = {r.name: r for r in calabi_structure_battery(pair, 20, 0, 1e-6)}
    ric = cb["Ricci eigenvalues"]
    reps += [ric, sb["|tau|^2 / X constant"], sb["|phi|^2 / (z^2/2) constant"], sb["d* tau = 0"],
             sb["dbar tau = m theta^{0,1} ^ tau, theta = d ln z"]]
    dt = time.perf_counter() - t0
    ok = ric.values["multiplicities"] == [2, 4] and dt < 300
    _record(7, "Calabi pair on the flat base", reps, ok, f"C2={sb['|tau|^2 / X constant'].values['C2']:.6g} time={dt:.1f}s")


def test_criterion_08_fs_calabi(fs_calabi, fs_calabi_pair):
    reps = chart_battery(fs_calabi, 20, 0, 1e-7, 1e-6)
    reps.append(special_form_check(fs_calabi_pair, 20, 0, 1e-5))
    _record(8, "Calabi pair on the Fubini-Study base", reps)


def _table(C1, k):
    """Four-case table written out directly: (case, tag)."""
    if k > 0 > C1:
        return "i", "punctured"
    if C1 > 0 > k:
        return "ii", "r>a"
    if C1 > 0 and k > 0:
        return "iii", "r<a"
    if C1 == 0:
        return "iv", "punctured"
    return "outside", None


def test_criterion_09_profiles():
    reps = []
    for C1, k, zi in [(1.0, 0.0, (1.0, 2.0)), (1.0, 1.0, (0.5, 2.0)), (-1.0, 1.0, (0.3, 0.8)),
                      (1.0, -1.0, (1.2, 2.0)), (0.0, 2.0, (0.5, 3.0))]:
        reps += profile_ode_check(MomentumProfile(3, C1, k), *zi)
    for C1, k, lam, ri in [(0.0, 1.0, 1.0, (0.5, 3.0)), (-1.0, 1.0, 2.0, (0.2, 4.0)),
                           (1.0, 1.0, 1.0, (0.2, 0.9)), (1.0, -1.0, 1.0, (0.2, 0.9))]:
        reps += radial_ode_check(RadialModel(3, k, C1, lam), *ri)
    grid = np.array([-2.5, -1.0, -0.3, 0.0, 0.0, 0.4, 1.0, 1.7, 3.0, 0.0])
    lams = np.linspace(0.2, 3.0, 10)
    mismatches = 0
    rng = np.random.default_rng(0)
    for C1 in grid:
        for k in np.roll(grid, 3):
            for lam in lams:
                if C1 == 0 and k == 0:
                    with pytest.raises(ProfileError):
                        maximal_domain(C1, k, lam)
                    continue
                d = maximal_domain(C1, k, lam)
                case, tag = _table(C1, k)
                if d.case != case or (tag is not None and d.tag != tag):
                    mismatches += 1
                if case in ("ii", "iii") and not np.isclose(d.a, (C1 * lam) ** (-1 / (2 * k)), rtol=1e-14):
                    mismatches += 1
                pos = positivity_domain(C1, k, lam)
                rs = np.exp(rng.uniform(-3, 3, 20))
                if pos.a is not None:
                    rs = rs[np.abs(rs - pos.a) > 1e-6 * pos.a]
                if not np.array_equal(pos.contains(rs), positivity_scan(3, C1, k, lam, rs)):
                    mismatches += 1
    _record(9, "profile ODEs and maximal-domain table", reps, mismatches == 0,
            f"sweep=1000 mismatches={mismatches}")


def test_criterion_10_battery_and_negative_controls(cone3, flat_calabi_pair, fs_calabi_pair):
    pairs = [cone3, product_pair(3), product_pair2(3), flat_calabi_pair, fs_calabi_pair]
    reps = []
    for pair in pairs:
        reps += derived_identity_battery(pair, 5, 0, tol=1e-6, tol_order5=1e-5)
        if pair.family == "calabi":
            reps += calabi_structure_battery(pair, 5, 0, 1e-6, 1e-5)
    controls = []
    for i, pair in enumerate(pairs):
        bad = pair.perturbed(random_field(pair.chart, (1, pair.m - 1), seed=100 + i), 0.1)
        sp = special_form_check(bad, 5, 0)
        bat = derived_identity_battery(bad, 3, 0, include_order5=False)
        controls.append(min(sp.max_rel, max(r.max_rel for r in bat)))
    ok = min(controls) > 1e-2
    _record(10, "derived-identity battery and negative controls", reps, ok,
            f"weakest control={min(controls):.2e}")


def _gamma(c):
    return form_jet(c, [(c.z[0] * c.zb[1] + 0.3 * c.zb[0] ** 2, (), (1,))])


def test_criterion_11_hermitian_killing(flat_calabi, fs_calabi):
    reps = [hermitian_killing_check(toric_hk(flat_chart(3), p).tau, 20, 0, 1e-8) for p in (1, 2, 3)]
    for ch in (flat_calabi, fs_calabi):
        reps.append(hermitian_killing_check(lifted_toric_hk(ch, 2).tau, 10, 0, 1e-6))
    reps += lift_checks(flat_calabi, _gamma, 0, 10, 0, 1e-6)
    reps += lift_checks(fs_calabi, _gamma, 1, 10, 0, 1e-6)
    _record(11, "toric and lifted Hermitian Killing forms", reps)


def test_criterion_12_determinism(tmp_path, capsys):
    def strip(rs):
        out = []
        for r in rs:
            d = r.to_dict()
            d.pop("ms")
            out.append(d)
        return out

    a = strip(exterior_oracle_suite(50, seed=3) + type_identity_suite(5, seed=3))
    b = strip(exterior_oracle_suite(50, seed=3) + type_identity_suite(5, seed=3))
    ch = flat_chart(3)
    a += strip(kahler_identity_suite(ch, 3, 5))
    b += strip(kahler_identity_suite(ch, 3, 5))
    codes = [main(["verify-solution", "--family", "toric", "--points", "2"]),
             main(["verify-solution", "--family", "toric", "--points", "2", "--tol", "1e-30"]),
             main(["verify-identities", "--zmin", "2", "--zmax", "1"]),
             main(["profile", "--C1", "0", "--k", "0"])]
    capsys.readouterr()
    _record(12, "determinism and exit codes", [], a == b and codes == [0, 1, 2, 2], f"codes={codes}")
