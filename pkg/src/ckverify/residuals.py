"""Equation residuals and identity batteries.

Each check evaluates both sides of an identity from jets at seeded sample
points and records the residual relative to the largest term (see
:func:`ckverify.report.relative`).  All routines are deterministic in the
seed.
"""

from __future__ import annotations

import math

import numpy as np

from .exterior import (PqForm, TangentVector, algebra, antisym_trace_split, tensor_inner, vector_inner,
                       vector_norm)
from .geometry import Coords, FormField, KahlerChart, LocalGeometry, ScalarField, VectorField, form_jet, jwedge
from .jets import Jet, jeinsum, stack
from .report import CheckReport, ResidualAccumulator

__all__ = [
    "conformal_killing_residual",
    "special_form_residual",
    "special_form_residual_real",
    "hermitian_killing_residual",
    "special_form_check",
    "conformal_killing_check",
    "hermitian_killing_check",
    "derived_identity_battery",
    "einstein_cone_battery",
    "calabi_structure_battery",
    "holomorphy_potential",
    "pair_invariant_checks",
    "random_field",
    "kahler_identity_suite",
    "weitzenbock_suite",
    "fd_codifferential_check",
    "sample_points",
    "split_decompose",
    "einstein_constant",
    "einstein_check",
]

DEFAULT_POINTS = 50


# ---------------------------------------------------------------------------
# small helpers


def sample_points(chart: KahlerChart, n: int, seed: int) -> np.ndarray:
    return chart.sample(np.random.default_rng(seed), n)


def _one_form(geo: LocalGeometry, comps) -> Jet:
    """1-form jet from coefficient jets (or numbers) on ``e^0..e^{2m-1}``."""
    terms = []
    m = geo.m
    for a, v in enumerate(comps):
        if a < m:
            terms.append((v, (a + 1,), ()))
        else:
            terms.append((v, (), (a - m + 1,)))
    return form_jet(geo.coords, terms)


def _gen_flat10(geo: LocalGeometry, a: int) -> Jet:
    """``(E_a^flat)^{1,0}`` as a 1-form jet."""
    g = geo.g_bilinear
    m = geo.m
    return _one_form(geo, [g[a, b] for b in range(m)] + [0.0] * m)


def _gen_flat(geo: LocalGeometry, a: int) -> Jet:
    g = geo.g_bilinear
    return _one_form(geo, [g[a, b] for b in range(geo.n)])


def _unit(n: int, a: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[a] = 1.0
    return e


def _vals(jets) -> np.ndarray:
    return np.array([j.value for j in jets])


def tensor_norm(geo: LocalGeometry, arr: np.ndarray) -> float:
    """Norm of ``sum_a e^a (x) arr[a]`` in ``Lambda^1 (x) Lambda``."""
    return math.sqrt(max(tensor_inner(geo.metric, arr, arr).real, 0.0))


def _norm(geo: LocalGeometry, F) -> float:
    return geo.norm(F)


def _degree(F: Jet, m: int) -> int:
    alg = algebra(m)
    used = np.flatnonzero(np.any(F.c != 0, axis=0))
    degs = {int(alg.deg[A]) for A in used}
    if len(degs) > 1:
        raise ValueError("form is not of homogeneous degree")
    return degs.pop() if degs else 0


def _bidegree(F: Jet, m: int):
    alg = algebra(m)
    used = np.flatnonzero(np.any(F.c != 0, axis=0))
    types = {(int(alg.pdeg[A]), int(alg.qdeg[A])) for A in used}
    if len(types) > 1:
        raise ValueError("form is not of homogeneous bidegree")
    return types.pop() if types else (0, 0)


def _vec_components(X, geo: LocalGeometry) -> np.ndarray:
    if X is None:
        return None
    if isinstance(X, TangentVector):
        return X.components
    return np.asarray(X, dtype=complex)


def _j_vec(X: Jet, m: int) -> Jet:
    """``J`` on a vector jet: ``i`` on ``d/dz``, ``-i`` on ``d/dzbar``."""
    Jd = np.r_[1j * np.ones(m), -1j * np.ones(m)]
    return Jet(X.space, X.c * Jd)


def _ric_vec(geo: LocalGeometry, X: np.ndarray) -> np.ndarray:
    """Components of ``Ric(X)`` (the Ricci endomorphism) at the point."""
    return geo.metric.cometric @ (geo.ricci_bilinear.value.T @ X)


# ---------------------------------------------------------------------------
# pointwise residuals


def conformal_killing_residual(phi: FormField, pt, X=None, *, chart: KahlerChart | None = None,
                               order: int = 3, geo: LocalGeometry | None = None):
    """``nabla_X phi - 1/(p+1) X _| d phi + 1/(n-p+1) X^flat ^ d* phi``.

    Returns the residual ``PqForm`` for a given ``X`` or, with ``X=None``, the
    array of residuals over the coordinate vectors ``E_a`` (rows), which is
    the twistor part of ``nabla phi``.
    """
    chart = chart or phi.chart
    geo = geo or chart.geometry(pt, order)
    F = phi.jet(geo.coords)
    m = geo.m
    n = geo.n
    p = _degree(F, m)
    dF = geo.d(F)
    dsF = geo.dstar(F)
    rows = []
    for a in range(n):
        r = geo.nabla(F, a) - (1.0 / (p + 1)) * geo.contract(_unit(n, a), dF)
        r = r + (1.0 / (n - p + 1)) * jwedge(_gen_flat(geo, a), dsF)
        rows.append(r.value)
    rows = np.array(rows)
    Xc = _vec_components(X, geo)
    if Xc is None:
        return rows
    return PqForm(m, Xc @ rows)


def _special_rows(geo: LocalGeometry, Phi: Jet, Tau: Jet):
    """Rows ``nabla_{E_a} phi`` and ``(E_a^flat)^{1,0} ^ tau + (i/2) omega ^ (E_a _| tau)``."""
    n = geo.n
    lhs, rhs = [], []
    for a in range(n):
        lhs.append(geo.nabla(Phi, a).value)
        r = jwedge(_gen_flat10(geo, a), Tau) + 0.5j * jwedge(geo.omega, geo.contract(_unit(n, a), Tau))
        rhs.append(r.value)
    return np.array(lhs), np.array(rhs)


def special_form_residual(pair, pt, X=None, *, order: int = 3, geo: LocalGeometry | None = None):
    """``nabla_X phi - X^{1,0} ^ tau - (i/2) omega ^ (X _| tau)``.

    With ``X=None`` the residual rows over ``E_a`` are returned.
    """
    geo = geo or pair.chart.geometry(pt, order)
    c = geo.coords
    lhs, rhs = _special_rows(geo, pair.phi.jet(c), pair.tau.jet(c))
    rows = lhs - rhs
    Xc = _vec_components(X, geo)
    if Xc is None:
        return rows
    return PqForm(geo.m, Xc @ rows)


def special_form_residual_real(pair, pt, *, order: int = 3, geo: LocalGeometry | None = None):
    """Real form of the special equation on a real frame.

    For real ``X``: ``nabla_X phi = 1/2 (X^flat + i (JX)^flat) ^ tau + (i/2) omega ^ (X _| tau)``.
    Returns ``(residual rows over the real frame, lhs rows)``.
    """
    geo = geo or pair.chart.geometry(pt, order)
    c = geo.coords
    Phi, Tau = pair.phi.jet(c), pair.tau.jet(c)
    m = geo.m
    g = geo.metric.g_bilinear
    res, lhs = [], []
    for e in geo.metric.frame:
        X = e.components
        JX = e.j().components
        nab = geo.nabla_vec(Phi, X).value
        xf = PqForm.zero(m)
        jf = PqForm.zero(m)
        for b in range(2 * m):
            xf.c[1 << b] = (g.T @ X)[b]
            jf.c[1 << b] = (g.T @ JX)[b]
        x10 = (xf + jf * 1j) * 0.5
        tau = PqForm(m, Tau.value)
        r = (x10 ^ tau) + (PqForm(m, geo.omega.value) ^ PqForm(m, geo.contract(X, Tau).value)) * 0.5j
        res.append(nab - r.c)
        lhs.append(nab)
    return np.array(res), np.array(lhs)


def hermitian_killing_residual(tau: FormField, pt, X=None, *, chart: KahlerChart | None = None,
                               order: int = 3, geo: LocalGeometry | None = None):
    """``nabla_X tau - 1/(p+1) X_{1,0} _| del tau - 1/(q+1) X_{0,1} _| dbar tau``.

    ``X_{1,0}`` and ``X_{0,1}`` are the ``d/dz`` and ``d/dzbar`` parts of ``X``.
    """
    chart = chart or tau.chart
    geo = geo or chart.geometry(pt, order)
    T = tau.jet(geo.coords)
    m, n = geo.m, geo.n
    p, q = _bidegree(T, m)
    dT, dbT = geo.del_(T), geo.dbar(T)
    rows = []
    for a in range(n):
        e = _unit(n, a)
        if a < m:
            r = geo.nabla(T, a) - (1.0 / (p + 1)) * geo.contract(e, dT)
        else:
            r = geo.nabla(T, a) - (1.0 / (q + 1)) * geo.contract(e, dbT)
        rows.append(r.value)
    rows = np.array(rows)
    Xc = _vec_components(X, geo)
    if Xc is None:
        return rows
    return PqForm(m, Xc @ rows)


# ---------------------------------------------------------------------------
# sampled checks


def special_form_check(pair, n_points: int = DEFAULT_POINTS, seed: int = 0, tol: float = 1e-8,
                       name: str = "special-form equation", order: int = 3) -> CheckReport:
    acc = ResidualAccumulator(name, "nabla_X phi = X^{1,0} ^ tau + (i/2) omega ^ (X _| tau)", tol, seed)
    for pt in sample_points(pair.chart, n_points, seed):
        geo = pair.chart.geometry(pt, order)
        c = geo.coords
        lhs, rhs = _special_rows(geo, pair.phi.jet(c), pair.tau.jet(c))
        acc.add(tensor_norm(geo, lhs - rhs), [tensor_norm(geo, lhs), tensor_norm(geo, rhs)])
    return acc.report()


def conformal_killing_check(field_: FormField, n_points: int = DEFAULT_POINTS, seed: int = 0,
                            tol: float = 1e-8, name: str = "conformal Killing equation",
                            order: int = 3) -> CheckReport:
    """Twistor residual, cross-checked against the twistor part of ``antisym_trace_split``."""
    acc = ResidualAccumulator(name, "nabla_X phi = X _| d phi/(p+1) - X^flat ^ d* phi/(n-p+1)", tol, seed)
    split_dev = 0.0
    chart = field_.chart
    for pt in sample_points(chart, n_points, seed):
        geo = chart.geometry(pt, order)
        rows = conformal_killing_residual(field_, pt, geo=geo)
        F = field_.jet(geo.coords)
        nab = np.array([geo.nabla(F, a).value for a in range(geo.n)])
        _, _, tw = antisym_trace_split(geo.metric, nab)
        scale = tensor_norm(geo, nab)
        split_dev = max(split_dev, tensor_norm(geo, tw - rows) / max(scale, 1e-14))
        acc.add(tensor_norm(geo, rows), [scale])
    rep = acc.report()
    rep.values["split_crosscheck"] = split_dev
    if split_dev > max(tol, 1e-8):
        rep.passed = False
        rep.note = f"residual differs from twistor part of the split by {split_dev:.2e}"
    return rep


def hermitian_killing_check(tau: FormField, n_points: int = DEFAULT_POINTS, seed: int = 0,
                            tol: float = 1e-8, chart: KahlerChart | None = None,
                            name: str = "Hermitian Killing equation", order: int = 3) -> CheckReport:
    chart = chart or tau.chart
    acc = ResidualAccumulator(name, "nabla_X tau = X_{1,0} _| del tau/(p+1) + X_{0,1} _| dbar tau/(q+1)",
                              tol, seed)
    for pt in sample_points(chart, n_points, seed):
        geo = chart.geometry(pt, order)
        rows = hermitian_killing_residual(tau, pt, chart=chart, geo=geo)
        T = tau.jet(geo.coords)
        nab = np.array([geo.nabla(T, a).value for a in range(geo.n)])
        acc.add(tensor_norm(geo, rows), [tensor_norm(geo, nab)])
    return acc.report()


# ---------------------------------------------------------------------------
# derived identity battery


class _Battery:
    """Named accumulators in insertion order."""

    def __init__(self, seed: int):
        self.seed = seed
        self.accs: dict = {}
        self.skips: dict = {}

    def acc(self, key: str, ref: str, tol: float) -> ResidualAccumulator:
        if key not in self.accs:
            self.accs[key] = ResidualAccumulator(key, ref, tol, self.seed)
        return self.accs[key]

    def add(self, key, ref, tol, geo, lhs, rhs_terms, scale=0.0):
        """Residual of ``lhs = sum(rhs_terms)`` (jets or arrays)."""
        lv = lhs.value if isinstance(lhs, Jet) else np.asarray(lhs) + np.zeros(algebra(geo.m).dim)
        tv = [t.value if isinstance(t, Jet) else t for t in rhs_terms]
        res = lv - sum(tv) if tv else lv
        nrm = lambda v: geo.norm(PqForm(geo.m, v))  # noqa: E731
        self.acc(key, ref, tol).add(nrm(res), [nrm(lv)] + [nrm(v) for v in tv], scale)

    def skip(self, key, ref, tol, note):
        self.skips[key] = CheckReport.skipped(key, ref, self.seed, tol, note)

    def reports(self, order: list) -> list:
        out = []
        for k in order:
            if k in self.accs:
                out.append(self.accs[k].report())
            elif k in self.skips:
                out.append(self.skips[k])
        return out


BATTERY_KEYS = [
    ("a1", "(a) del phi = 0", "del phi = 0"),
    ("a2", "(a) dbar phi = i(m+1)/2 omega ^ tau", "dbar phi = i(m+1)/2 L_omega tau"),
    ("b1", "(b) dbar* phi = 0", "dbar* phi = 0"),
    ("b2", "(b) del* phi = -(m+1)/2 tau", "del* phi = -(m+1)/2 tau"),
    ("c1", "(c) d*d phi = (m+1)/2 (dbar tau - del tau)", "d* d phi = (m+1)/2 (dbar tau - del tau)"),
    ("c2", "(c) dd* phi = -(m+1)/2 (dbar tau + del tau)", "d d* phi = -(m+1)/2 (dbar tau + del tau)"),
    ("c3", "(c) Laplace phi = -(m+1) del tau", "Delta phi = -(m+1) del tau"),
    ("d", "(d) [rho, phi] = i del tau", "[rho, phi] = i del tau"),
    ("e", "(e) Ric(del tau) = scal/2 del tau", "Ric(del tau) = scal/2 del tau"),
    ("f", "(f) Laplace_dbar tau = m/(m-1) Ric(tau)", "Delta_dbar tau = m/(m-1) Ric(tau)"),
    ("g1", "(g) nabla^{0,1} dbar tau = 0", "nabla^{0,1} dbar tau = 0"),
    ("g1b", "(g) Laplace dbar tau = scal dbar tau", "Delta dbar tau = scal dbar tau"),
    ("g2", "(g) nabla_X01 del tau", "nabla_X01 del tau = 1/2 r(X^flat ^ tau) - 1/m X01 _| del dbar tau"),
    ("g3", "(g) nabla_X01 dbar* tau", "nabla_X01 dbar* tau = Ric(X) _| tau - 1/m X01 _| dbar* dbar tau"),
    ("g4", "(g) del* del tau = Ric(tau) + dbar* dbar tau/m", "del* del tau = Ric(tau) + 1/m dbar* dbar tau"),
    ("h", "(h) Jgrad(scal) _| phi", "Jgrad(scal) _| phi = i(m-3)/2 scal tau + i 2(2m-1)/(m-1) Ric(tau)"),
    ("i1", "(i) first-order twistor identity", "m/(m+1) nabla_X d*phi + 1/(m+1) X _| d*d phi = Ric(X) _| phi + 1/2 (X _| r phi - r(X _| phi))"),
    ("i2", "(i) d(r phi) = (m-1)/(m+1) r(d phi)", "d(r phi) = (m-1)/(m+1) r(d phi)"),
    ("i3", "(i) obstruction d r d phi = 0", "d r d phi = 0"),
    ("j", "(j) Weitzenboeck on phi", "m/(m+1) d*d phi + m/(m+1) dd* phi = r phi + Ric(phi)"),
    ("k1", "(k) dbar tau = m theta^{0,1} ^ tau", "dbar tau = m theta^{0,1} ^ tau"),
    ("k2", "(k) m dbar lambda2 ^ tau = (lambda1-lambda2) dbar tau", "m dbar lambda2 ^ tau = (lambda1 - lambda2) dbar tau"),
    ("l", "(l) volume-form identity on dbar tau", "<X2 _| dbar tau, X1 _| dbar tau> + c.c. = |dbar tau|^2 g(X1, X2)"),
]


def derived_identity_battery(pair, n_points: int = DEFAULT_POINTS, seed: int = 0, tol: float = 1e-6,
                             tol_order5: float = 1e-5, include_order5: bool = True) -> list:
    """Run identities (a)-(l) on a special pair; returns one report per sub-check.

    Sub-checks (e), (h) and (k) need a non-Einstein metric and are reported
    as not applicable on Ricci-flat pairs.
    """
    m = pair.m
    n = 2 * m
    chart = pair.chart
    B = _Battery(seed)
    refs = {k: r for k, _, r in BATTERY_KEYS}
    names = {k: nm for k, nm, _ in BATTERY_KEYS}
    flat = pair.ricci_flat
    Kfield = pair.extras.get("K")
    for key in ("e", "h", "k1", "k2"):
        if flat:
            B.skip(names[key], refs[key], tol, "Ricci-flat pair: identity needs a non-Einstein metric")
    if (not flat) and Kfield is None:
        for key in ("k1", "k2"):
            B.skip(names[key], refs[key], tol, "no Killing field attached to this pair")
    if not include_order5:
        # the Ricci jet has order 0 at potential order 4, so (k) needs order 5 too
        for key in ("h", "i2", "i3", "k1", "k2"):
            if names[key] not in B.skips:
                B.skip(names[key], refs[key], tol_order5, "order-5 jets disabled")

    def add(key, geo, lhs, terms, scale=0.0, t=tol):
        B.add(names[key], refs[key], t, geo, lhs, terms, scale)

    for pt in sample_points(chart, n_points, seed):
        order = 5 if include_order5 else 4
        geo = chart.geometry(pt, order)
        c = geo.coords
        Phi, Tau = pair.phi.jet(c), pair.tau.jet(c)
        cm = (m + 1) / 2.0
        dT, dbT = geo.del_(Tau), geo.dbar(Tau)
        dPhi = geo.d(Phi)
        nabla_phi = np.array([geo.nabla(Phi, a).value for a in range(n)])
        sc = tensor_norm(geo, nabla_phi)
        # (a), (b)
        add("a1", geo, geo.del_(Phi), [], sc)
        add("a2", geo, geo.dbar(Phi), [1j * cm * geo.l_omega(Tau)])
        dsP, dbsP = geo.delstar(Phi), geo.dbarstar(Phi)
        add("b1", geo, dbsP, [], sc)
        add("b2", geo, dsP, [-cm * Tau])
        # (c)
        dstar_d = geo.dstar(dPhi)
        d_dstar = geo.d(dsP + dbsP)
        add("c1", geo, dstar_d, [cm * dbT, -cm * dT])
        add("c2", geo, d_dstar, [-cm * dbT, -cm * dT])
        add("c3", geo, dstar_d + d_dstar, [-(m + 1) * dT])
        # (d)
        add("d", geo, geo.commutator(geo.rho, Phi), [1j * dT])
        scal = geo.scal
        ricT = geo.ric_act(Tau)
        if not flat:
            add("e", geo, geo.ric_act(dT), [0.5 * scal * dT])
        add("f", geo, geo.dbar_laplacian(Tau), [(m / (m - 1.0)) * ricT])
        # (g)
        for j in range(m):
            add("g1", geo, geo.nabla(dbT, m + j), [], geo.norm(dbT) + geo.norm(Tau))
        add("g1b", geo, geo.hodge_laplacian(dbT), [scal * dbT], geo.norm(Tau))
        ddbT = geo.del_(dbT)
        dbsdbT = geo.dbarstar(dbT)
        dbsT = geo.dbarstar(Tau)
        for j in range(m):
            a = m + j
            e = _unit(n, a)
            lhs = geo.nabla(dT, a)
            xt = jwedge(_gen_flat(geo, a), Tau)
            add("g2", geo, lhs, [0.5 * geo.curv_op(xt), -(1.0 / m) * geo.contract(e, ddbT)],
                geo.norm(Tau))
            lhs = geo.nabla(dbsT, a)
            rx = _ric_vec(geo, e)
            add("g3", geo, lhs, [geo.contract(rx, Tau).value,
                                       -(1.0 / m) * geo.contract(e, dbsdbT).value], geo.norm(Tau))
        add("g4", geo, geo.delstar(dT), [ricT, (1.0 / m) * dbsdbT], geo.norm(Tau))
        # (h)
        if include_order5 and not flat:
            gs = _j_vec(geo.gradient(scal), m)
            add("h", geo, geo.contract(gs, Phi),
                [0.5j * (m - 3) * scal * Tau, 2j * (2 * m - 1) / (m - 1.0) * ricT], t=tol_order5)
        # (i), (j)
        rPhi = geo.curv_op(Phi)
        dsPhi = dsP + dbsP
        for a in range(n):
            e = _unit(n, a)
            lhs = (m / (m + 1.0)) * geo.nabla(dsPhi, a).value + (1.0 / (m + 1)) * geo.contract(e, dstar_d).value
            rx = _ric_vec(geo, e)
            t1 = geo.contract(rx, Phi).value
            t2 = 0.5 * geo.contract(e, rPhi).value
            t3 = -0.5 * geo.curv_op(geo.contract(e, Phi)).value
            add("i1", geo, lhs, [t1, t2, t3], geo.norm(Phi) * max(abs(scal.value), 1.0), t=tol_order5)
        if include_order5:
            rdPhi = geo.curv_op(dPhi)
            add("i2", geo, geo.d(rPhi), [((m - 1.0) / (m + 1)) * rdPhi], geo.norm(Phi), t=tol_order5)
            add("i3", geo, geo.d(rdPhi), [], geo.norm(Phi) * max(abs(scal.value), 1.0)
                + geo.norm(rdPhi), t=tol_order5)
        add("j", geo, (m / (m + 1.0)) * (dstar_d + d_dstar), [rPhi, geo.ric_act(Phi)])
        # (k)
        if include_order5 and not flat and Kfield is not None:
            K = Kfield.jet(c)
            gKK = jeinsum("a,a->", jeinsum("ab,a->b", geo.g_bilinear, K), K)
            lam1 = jeinsum("a,a->", jeinsum("ab,a->b", geo.ricci_bilinear, K), K) / gKK
            lam2 = (0.5 * scal - lam1) / (m - 1)
            dl2 = _one_form(geo, [lam2.d(a) for a in range(n)])
            theta = dl2 / (lam1 - lam2)
            th01 = _one_form(geo, [0.0] * m + [theta[1 << (m + j)] for j in range(m)])
            add("k1", geo, dbT, [m * jwedge(th01, Tau)], t=tol_order5)
            dbl2 = _one_form(geo, [0.0] * m + [lam2.d(m + j) for j in range(m)])
            add("k2", geo, m * jwedge(dbl2, Tau), [(lam1 - lam2) * dbT], t=tol_order5)
        # (l)
        v = PqForm(m, dbT.value)
        kk = geo.norm(dbT) ** 2
        fr = geo.metric.frame
        conts = [PqForm(m, geo.contract(e.components, dbT).value) for e in fr]
        from .exterior import inner_any
        M = np.array([[inner_any(geo.metric, conts[j], conts[i]) + inner_any(geo.metric, conts[i], conts[j])
                       for j in range(n)] for i in range(n)])
        res = float(np.max(np.abs(M - kk * np.eye(n))))
        B.acc(names["l"], refs["l"], tol).add(res, [kk], geo.norm(Tau) ** 2)
        del v
    return B.reports([nm for _, nm, _ in BATTERY_KEYS])


# ---------------------------------------------------------------------------
# pair-level invariants


def pair_invariant_checks(pair, n_points: int = DEFAULT_POINTS, seed: int = 0, tol_prim: float = 1e-8,
                          tol_tau: float = 1e-6) -> list:
    """``phi`` primitive and ``tau = -2/(m+1) del* phi``."""
    m = pair.m
    a1 = ResidualAccumulator("phi primitive", "L*_omega phi = 0", tol_prim, seed)
    a2 = ResidualAccumulator("tau from phi", "tau = -2/(m+1) del* phi", tol_tau, seed)
    for pt in sample_points(pair.chart, n_points, seed):
        geo = pair.chart.geometry(pt, 3)
        c = geo.coords
        Phi, Tau = pair.phi.jet(c), pair.tau.jet(c)
        a1.add(geo.norm(geo.l_omega_star(Phi)), [], geo.norm(Phi))
        rhs = (-2.0 / (m + 1)) * geo.delstar(Phi)
        a2.add(geo.norm(Tau - rhs), [geo.norm(Tau), geo.norm(rhs)])
    return [a1.report(), a2.report()]


def _j_flat_vec(geo: LocalGeometry, v: np.ndarray) -> np.ndarray:
    m = geo.m
    return np.r_[1j * v[:m], -1j * v[m:]]


def einstein_cone_battery(pair, n_points: int = DEFAULT_POINTS, seed: int = 0, tol: float = 1e-7) -> list:
    """Consequences for a Ricci-flat pair with ``p = |tau|^2``, ``K = -J grad p``, ``k = |dbar tau|^2``.

    Checks ``del tau = 0``, ``nabla dbar tau = 0``, ``nabla K = -(k/m^2) J``,
    ``|dp|^2 = (2k/m^2) p``, ``tau = (m/k) JK _| dbar tau``, ``L_K tau = i(k/m) tau``,
    ``Hess p = (k/m^2) g`` and ``(1/2m) p Delta p + |dp|^2 = (k1/m) p`` with
    ``k1 = k/m``; also that ``k`` is constant across the sample.
    """
    m = pair.m
    n = 2 * m
    names = [
        ("del tau = 0", "del tau = 0"),
        ("nabla dbar tau = 0", "nabla dbar tau = 0"),
        ("nabla K = -(k/m^2) J", "nabla K = -k/m^2 J"),
        ("|dp|^2 = (2k/m^2) p", "|dp|^2 = 2k/m^2 p"),
        ("tau = (m/k) JK _| dbar tau", "tau = m/k JK _| dbar tau"),
        ("L_K tau = i(k/m) tau", "L_K tau = i k/m tau"),
        ("Hess p = (k/m^2) g", "Hess p = k/m^2 g"),
        ("(1/2m) p Lap p + |dp|^2 = (k1/m) p", "1/(2m) p Delta p + |dp|^2 = k1/m p"),
        ("|dbar tau|^2 constant", "|dbar tau|^2 = k constant"),
    ]
    accs = [ResidualAccumulator(a, b, tol, seed) for a, b in names]
    ks = []
    for pt in sample_points(pair.chart, n_points, seed):
        geo = pair.chart.geometry(pt, 4)
        c = geo.coords
        Tau = pair.tau.jet(c)
        dT, dbT = geo.del_(Tau), geo.dbar(Tau)
        nT = geo.norm(Tau)
        accs[0].add(geo.norm(dT), [], nT)
        nab = np.array([geo.nabla(dbT, a).value for a in range(n)])
        accs[1].add(tensor_norm(geo, nab), [], geo.norm(dbT) + nT)
        k = geo.norm(dbT) ** 2
        ks.append(k)
        p = geo.norm2_jet(Tau)
        gp = geo.gradient(p)
        K = -_j_vec(gp, m)
        nK = geo.nabla_vector(K).value
        Jm = np.diag(np.r_[1j * np.ones(m), -1j * np.ones(m)])
        accs[2].add(float(np.max(np.abs(nK + (k / m ** 2) * Jm))), [float(np.max(np.abs(nK))), k / m ** 2])
        dp = geo.d(form_jet(c, [(p, (), ())]))
        dp2 = geo.norm(dp) ** 2
        pv = float(p.value.real)
        accs[3].add(abs(dp2 - 2 * k / m ** 2 * pv), [dp2, 2 * k / m ** 2 * pv])
        if k > 1e-14:
            JK = _j_vec(K, m).value
            rhs = (m / k) * geo.contract(JK, dbT).value
            accs[4].add(geo.norm(PqForm(m, Tau.value - rhs)), [nT, geo.norm(PqForm(m, rhs))])
        LK = geo.lie_derivative(K, Tau)
        rhs = 1j * (k / m) * Tau
        accs[5].add(geo.norm(LK - rhs), [geo.norm(LK), geo.norm(rhs)])
        Hs = geo.hessian(p).value
        g = geo.metric.g_bilinear
        accs[6].add(float(np.max(np.abs(Hs - (k / m ** 2) * g))), [float(np.max(np.abs(Hs))), k / m ** 2 * float(np.max(np.abs(g)))])
        lap = float(geo.laplacian_fn(p).value.real)
        lhs = pv * lap / (2 * m) + dp2
        rhs = (k / m) / m * pv
        accs[7].add(abs(lhs - rhs), [abs(pv * lap / (2 * m)), dp2, abs(rhs)])
    reps = [a.report() for a in accs[:8]]
    ks = np.array(ks)
    dev = float(np.std(ks) / max(np.mean(ks), 1e-300)) if len(ks) else 0.0
    accs[8].add(dev, [1.0])
    rep = accs[8].report()
    rep.values["k"] = float(np.mean(ks)) if len(ks) else float("nan")
    reps.append(rep)
    return reps


# ---------------------------------------------------------------------------
# splitting of primitive (1, m-1)-forms


def _conj_vec(v: np.ndarray, m: int) -> np.ndarray:
    return np.r_[np.conj(v[m:]), np.conj(v[:m])]


def split_decompose(metric, U, psi: PqForm) -> dict:
    """Split ``psi`` in ``Lambda^{1,m-1}_0`` along ``V = span{U, Ubar}`` and ``H = V^perp``.

    ``U`` is a ``(1,0)``-vector spanning ``V^{1,0}``.  Returns ``psi1``
    (in ``Lambda^{0,m-2} H``), ``psi2`` (in ``Lambda^{1,0} V ^ Lambda^{0,m-1} H``),
    ``psi3`` (in ``Lambda^{0,1} V ^ Lambda^{1,m-2} H``), the forms
    ``omega_v``, ``omega_h`` and the remainder of
    ``psi - (omega_v - omega_h) ^ psi1 - psi2 - psi3``.
    """
    from .calabi import form_projector
    from .exterior import interior, one_form, wedge
    m = metric.m
    g = metric.g_bilinear
    Uc = U.components if isinstance(U, TangentVector) else np.asarray(U, dtype=complex)
    Ub = _conj_vec(Uc, m)
    Uv = TangentVector.from_components(m, Uc)
    Ubv = TangentVector.from_components(m, Ub)
    guu = Ub @ g @ Uc
    nu = one_form(m, g.T @ Ub) * (1.0 / guu)
    nub = one_form(m, g.T @ Uc) * (1.0 / guu)
    P = np.outer(Uc, g.T @ Ub) / guu + np.outer(Ub, g.T @ Uc) / guu
    Mp = form_projector(metric, P)
    om_v = PqForm(m, Mp @ metric.omega.c)
    om_h = metric.omega - om_v
    a = interior(Ubv, interior(Uv, psi))
    b = interior(Uv, psi) - wedge(nub, a)
    cc = interior(Ubv, psi) + wedge(nu, a)
    alpha = interior(Ubv, interior(Uv, om_v)).c[0]
    psi1 = a * (1.0 / alpha)
    psi2 = wedge(nu, b)
    psi3 = wedge(nub, cc)
    rem = psi - wedge(om_v - om_h, psi1) - psi2 - psi3
    return {"psi1": psi1, "psi2": psi2, "psi3": psi3, "omega_v": om_v, "omega_h": om_h,
            "remainder": rem, "projector": P}


def calabi_structure_battery(pair, n_points: int = DEFAULT_POINTS, seed: int = 0, tol: float = 1e-6,
                             tol_order5: float = 1e-5) -> list:
    """Structure of the Calabi pair relative to the splitting ``V + H``.

    Covers ``phi_1 = (del tau)_1 = 0``, the ``phi_2``/``phi_3`` relations,
    ``Ric(phi) = scal/2 phi``, ``phi_3 = (del tau)_3 = 0``, ``grad scal`` vertical,
    ``d* tau = 0``, ``dbar tau = m dbar(ln z) ^ tau``, and the constancy of
    ``|tau|^2 / X`` and ``|phi|^2 / (z^2/2)``.
    """
    chart = pair.chart
    m = pair.m
    n = 2 * m
    names = [
        ("split phi_1 = (del tau)_1 = 0", "phi_1 = (del tau)_1 = 0", tol),
        ("split (scal/2-2l1) phi_2 = (del tau)_2", "(scal/2 - 2 lambda1) phi_2 = (del tau)_2", tol),
        ("split (scal/2-2l2) phi_3 = (del tau)_3", "(scal/2 - 2 lambda2) phi_3 = (del tau)_3", tol),
        ("split phi_3 = (del tau)_3 = 0", "phi_3 = (del tau)_3 = 0", tol),
        ("Ric(phi) = scal/2 phi", "Ric(phi) = scal/2 phi", tol),
        ("grad(scal) vertical", "grad(scal) in V", tol_order5),
        ("d* tau = 0", "d* tau = 0", tol),
        ("dbar tau = m theta^{0,1} ^ tau, theta = d ln z", "dbar tau = m theta^{0,1} ^ tau", tol),
        ("|tau|^2 / X constant", "|tau|^2 = C2 X", tol),
        ("|phi|^2 / (z^2/2) constant", "|phi|^2 = C2/2 z^2", tol),
        ("decomposition remainder", "psi = (omega^V - omega^H) ^ psi_1 + psi_2 + psi_3", tol),
    ]
    accs = [ResidualAccumulator(a, b, t, seed) for a, b, t in names]
    r_tau, r_phi = [], []
    for pt in sample_points(chart, n_points, seed):
        geo = chart.geometry(pt, 5)
        c = geo.coords
        metric = geo.metric
        Phi, Tau = pair.phi.jet(c), pair.tau.jet(c)
        dT = geo.del_(Tau)
        K = chart.killing_jet(c).value
        U = np.r_[K[:m], np.zeros(m)]
        phi_v, dT_v = PqForm(m, Phi.value), PqForm(m, dT.value)
        sp = split_decompose(metric, U, phi_v)
        st = split_decompose(metric, U, dT_v)
        nf = lambda f: geo.norm(f)  # noqa: E731
        z = float(c.extras["z"].value.real)
        Xv = float(chart.X_jet(c).value.real)
        pred = chart.prediction()
        l1, l2 = float(pred.lambda1(z)), float(pred.lambda2(z))
        scal = float(geo.scal.value.real)
        accs[0].add(nf(sp["psi1"]) + nf(st["psi1"]), [], nf(phi_v) + nf(dT_v))
        lhs = sp["psi2"] * (scal / 2 - 2 * l1)
        accs[1].add(nf(lhs - st["psi2"]), [nf(lhs), nf(st["psi2"])], nf(dT_v))
        lhs = sp["psi3"] * (scal / 2 - 2 * l2)
        accs[2].add(nf(lhs - st["psi3"]), [nf(lhs), nf(st["psi3"])], nf(dT_v))
        accs[3].add(nf(sp["psi3"]) + nf(st["psi3"]), [], nf(phi_v) + nf(dT_v))
        rp = geo.ric_act(Phi)
        accs[4].add(geo.norm(rp - 0.5 * scal * Phi), [geo.norm(rp), abs(scal) / 2 * nf(phi_v)])
        gs = geo.gradient(geo.scal).value
        hor = gs - sp["projector"] @ gs
        accs[5].add(vector_norm(metric.g_bilinear, hor), [vector_norm(metric.g_bilinear, gs)])
        ds = geo.dstar(Tau)
        accs[6].add(geo.norm(ds), [], geo.norm(geo.nabla_vec(Tau, np.ones(n))) + nf(PqForm(m, Tau.value)))
        zj = c.extras["z"]
        th01 = _one_form(geo, [0.0] * m + [zj.d(m + j) / zj for j in range(m)])
        dbT = geo.dbar(Tau)
        rhs = m * jwedge(th01, Tau)
        accs[7].add(geo.norm(dbT - rhs), [geo.norm(dbT), geo.norm(rhs)])
        r_tau.append(geo.norm(Tau) ** 2 / Xv)
        r_phi.append(geo.norm(Phi) ** 2 / (z * z / 2))
        accs[10].add(nf(sp["remainder"]) + nf(st["remainder"]), [nf(phi_v), nf(dT_v)])
    for acc, arr, key in ((accs[8], r_tau, "C2"), (accs[9], r_phi, "C2")):
        arr = np.array(arr)
        acc.add(float(np.std(arr)), [float(abs(np.mean(arr)))])
    reps = [a.report() for a in accs]
    reps[8].values["C2"] = float(np.mean(r_tau)) if r_tau else float("nan")
    reps[9].values["C2"] = float(np.mean(r_phi)) if r_phi else float("nan")
    # the two length constants must agree
    if r_tau and r_phi:
        d = abs(np.mean(r_tau) - np.mean(r_phi)) / abs(np.mean(r_tau))
        reps[9].values["C2_agreement"] = float(d)
        if d > tol:
            reps[9].passed = False
            reps[9].note = f"C2 from |tau|^2 and |phi|^2 disagree by {d:.2e}"
    return reps


# ---------------------------------------------------------------------------
# holomorphy potential


def holomorphy_potential(pair, n_points: int = 20, seed: int = 0, tol: float = 1e-6):
    """``p = |tau|^2 + scal |phi|^2 / (m(2m-1))`` and ``K1 = -J grad p``.

    Returns ``(p, K1, reports)``: ``p`` and ``K1`` as fields, and reports for
    the Killing and holomorphy residuals of ``K1``, the identity
    ``|dp|^2 + (1/2m) p Delta p = (k1/m) p`` (``k1`` fitted at the first point,
    then frozen), ``L_K1 tau = i k1 tau`` and ``L_K1 phi = i k1 phi``, and,
    when the pair carries a Killing field ``K``, the angle between ``K1`` and ``K``.
    """
    m = pair.m
    chart = pair.chart
    order = 6

    def p_jet(c: Coords, geo: LocalGeometry | None = None) -> Jet:
        geo = geo or LocalGeometry(chart, np.array([z.value for z in c.z]), order)
        Tau, Phi = pair.tau.jet(geo.coords), pair.phi.jet(geo.coords)
        return geo.norm2_jet(Tau) + geo.scal * geo.norm2_jet(Phi) / (m * (2 * m - 1))

    def k1_jet(c: Coords) -> Jet:
        geo = LocalGeometry(chart, np.array([z.value for z in c.z]), order)
        return -_j_vec(geo.gradient(p_jet(c, geo)), m)

    names = [("K1 Killing (L_K1 g = 0)", "L_K1 g = 0"), ("K1 holomorphic (L_K1 J = 0)", "L_K1 J = 0"),
             ("|dp|^2 + (1/2m) p Lap p = (k1/m) p", "|dp|^2 + 1/(2m) p Delta p = k1/m p"),
             ("L_K1 tau = i k1 tau", "L_K1 tau = i k1 tau"), ("L_K1 phi = i k1 phi", "L_K1 phi = i k1 phi")]
    accs = [ResidualAccumulator(a, b, tol, seed) for a, b in names]
    angle = ResidualAccumulator("K1 parallel to K", "K1 = (2 C2 k/m) K", tol, seed)
    k1 = None
    ratios = []
    Kf = pair.extras.get("K")
    for pt in sample_points(chart, n_points, seed):
        geo = chart.geometry(pt, order)
        c = geo.coords
        Tau, Phi = pair.tau.jet(c), pair.phi.jet(c)
        pa = geo.norm2_jet(Tau)
        pb = geo.scal * geo.norm2_jet(Phi) / (m * (2 * m - 1))
        p = pa + pb
        # the two terms of p are used as reference magnitudes: on some pairs
        # their gradients cancel exactly and K1 vanishes
        Ka, Kb = -_j_vec(geo.gradient(pa), m), -_j_vec(geo.gradient(pb), m)
        K1 = Ka + Kb
        lg, lj = geo.killing_residuals(K1)
        g = geo.metric.g_bilinear
        sc = max(float(np.max(np.abs(geo.nabla_vector(Ka).value))),
                 float(np.max(np.abs(geo.nabla_vector(Kb).value))))
        accs[0].add(float(np.max(np.abs(lg))), [sc * float(np.max(np.abs(g)))])
        accs[1].add(float(np.max(np.abs(lj))), [sc])
        dp = geo.d(form_jet(c, [(p, (), ())]))
        dp2 = geo.norm(dp) ** 2
        pv = float(p.value.real)
        lap = float(geo.laplacian_fn(p).value.real)
        lapa = float(geo.laplacian_fn(pa).value.real)
        lapb = float(geo.laplacian_fn(pb).value.real)
        lhs = dp2 + pv * lap / (2 * m)
        if k1 is None:
            k1 = (m * lhs / pv) if abs(pv) > 1e-300 else 0.0
        rhs = k1 / m * pv
        accs[2].add(abs(lhs - rhs), [dp2, abs(pv * lapa / (2 * m)), abs(pv * lapb / (2 * m)), abs(rhs)])
        for acc, F in ((accs[3], Tau), (accs[4], Phi)):
            L = geo.lie_derivative(K1, F)
            r = 1j * k1 * F
            nabF = tensor_norm(geo, np.array([geo.nabla(F, a).value for a in range(2 * m)]))
            kmag = max(vector_norm(g, Ka.value), vector_norm(g, Kb.value))
            acc.add(geo.norm(L - r), [geo.norm(geo.lie_derivative(Ka, F)),
                                      geo.norm(geo.lie_derivative(Kb, F)), geo.norm(r)],
                    kmag * nabF + sc * geo.norm(F))
        if Kf is not None:
            Kv = Kf.jet(c).value
            k1v = K1.value
            nk = vector_norm(g, Kv)
            ratio = vector_inner(g, k1v, Kv) / nk ** 2
            res = vector_norm(g, k1v - ratio * Kv)
            acc_scale = max(vector_norm(g, Ka.value), vector_norm(g, Kb.value))
            angle.add(res, [vector_norm(g, k1v), acc_scale])
            ratios.append(float(np.real(ratio)))
    reps = [a.report() for a in accs]
    reps[2].values["k1"] = k1
    if Kf is not None:
        ar = angle.report()
        ar.values["ratio"] = float(np.mean(ratios)) if ratios else float("nan")
        reps.append(ar)
    return (ScalarField(m, lambda c: p_jet(c), "p", chart), VectorField(m, k1_jet, "K1", chart), reps)


# ---------------------------------------------------------------------------
# random test fields and operator suites


def random_field(chart: KahlerChart, bidegree, seed: int = 0, n_terms: int = 4, degree: int = 3,
                 name: str = "random") -> FormField:
    """Seeded form field whose coefficients are random polynomials in ``z, zbar``.

    The polynomials are centered at the chart's sampling region (first sample
    point) so that all terms are of comparable size.
    """
    m = chart.m
    p, q = bidegree
    alg = algebra(m)
    rng = np.random.default_rng(seed)
    masks = np.flatnonzero(alg.type_mask(p, q))
    center = chart.sample(np.random.default_rng(seed + 7919), 1)[0]
    terms = []
    for A in masks:
        mons = []
        for _ in range(n_terms):
            d = int(rng.integers(0, degree + 1))
            vars_ = [int(v) for v in rng.integers(0, 2 * m, size=d)]
            coef = complex(rng.standard_normal() + 1j * rng.standard_normal())
            mons.append((coef, vars_))
        terms.append((int(A), mons))

    def fn(c: Coords) -> Jet:
        out = c.zero_form()
        cc = out.c
        shifted = [c.z[i] - center[i] for i in range(m)] + [c.zb[i] - np.conj(center[i]) for i in range(m)]
        for A, mons in terms:
            val = c.const(0j)
            for coef, vars_ in mons:
                t = c.const(coef)
                for v in vars_:
                    t = t * shifted[v]
                val = val + t
            cc[:, A] += val.c
        return out

    return FormField(m, fn, (p, q), name, chart)


def kahler_identity_suite(chart: KahlerChart, n_points: int = DEFAULT_POINTS, seed: int = 0,
                          tol: float = 1e-7, fields=None) -> list:
    """``[L*, dbar] = -i del*``, ``[L*, del] = i dbar*``, ``[dbar*, L] = i del``, ``[del*, L] = -i dbar``."""
    m = chart.m
    if fields is None:
        bds = [(0, 1), (1, 1), (0, m - 1), (1, m - 1), (2, 1)]
        fields = [random_field(chart, bd, seed + i) for i, bd in enumerate(bds)]
    names = [("[L*, dbar] = -i del*", "[L*_omega, dbar] = -i del*"),
             ("[L*, del] = i dbar*", "[L*_omega, del] = i dbar*"),
             ("[dbar*, L] = i del", "[dbar*, L_omega] = i del"),
             ("[del*, L] = -i dbar", "[del*, L_omega] = -i dbar")]
    accs = [ResidualAccumulator(a, b, tol, seed) for a, b in names]
    for pt in sample_points(chart, n_points, seed):
        geo = chart.geometry(pt, 3)
        c = geo.coords
        for f in fields:
            F = f.jet(c)
            Ls, L = geo.l_omega_star, geo.l_omega
            lhs = Ls(geo.dbar(F)) - geo.dbar(Ls(F))
            r = -1j * geo.delstar(F)
            accs[0].add(geo.norm(lhs - r), [geo.norm(Ls(geo.dbar(F))), geo.norm(geo.dbar(Ls(F))), geo.norm(r)])
            lhs = Ls(geo.del_(F)) - geo.del_(Ls(F))
            r = 1j * geo.dbarstar(F)
            accs[1].add(geo.norm(lhs - r), [geo.norm(Ls(geo.del_(F))), geo.norm(geo.del_(Ls(F))), geo.norm(r)])
            a, b = geo.dbarstar(L(F)), L(geo.dbarstar(F))
            r = 1j * geo.del_(F)
            accs[2].add(geo.norm(a - b - r), [geo.norm(a), geo.norm(b), geo.norm(r)])
            a, b = geo.delstar(L(F)), L(geo.delstar(F))
            r = -1j * geo.dbar(F)
            accs[3].add(geo.norm(a - b - r), [geo.norm(a), geo.norm(b), geo.norm(r)])
    return [a.report() for a in accs]


def weitzenbock_suite(chart: KahlerChart, n_points: int = DEFAULT_POINTS, seed: int = 0,
                      tol: float = 1e-7, fields=None) -> list:
    """``Delta = nabla* nabla + r + Ric`` on all fields and
    ``Delta_dbar = (nabla^{0,1})* nabla^{0,1} - i [rho, .]`` on ``(0, q)``-fields,
    plus ``-i[rho, .] = Ric`` on ``(0, q)``-forms and ``Delta = 2 Delta_dbar``.
    """
    m = chart.m
    if fields is None:
        bds = [(0, 1), (0, 2), (1, 1), (1, m - 1), (0, m)]
        fields = [random_field(chart, bd, seed + 100 + i) for i, bd in enumerate(bds)]
    names = [("Weitzenboeck Delta = nabla*nabla + r + Ric", "Delta = nabla* nabla + r + Ric"),
             ("Weitzenboeck Delta_dbar on (0,q)", "Delta_dbar = (nabla^{0,1})* nabla^{0,1} - i[rho, .]"),
             ("-i[rho, .] = Ric on (0,q)", "-i[rho, .] acts as Ric on (0,q)-forms"),
             ("Delta = 2 Delta_dbar", "Delta = 2 Delta_dbar")]
    accs = [ResidualAccumulator(a, b, tol, seed) for a, b in names]
    for pt in sample_points(chart, n_points, seed):
        geo = chart.geometry(pt, 4)
        c = geo.coords
        for f in fields:
            F = f.jet(c)
            lap = geo.hodge_laplacian(F)
            rough = geo.rough_laplacian(F)
            rr, ric = geo.curv_op(F), geo.ric_act(F)
            accs[0].add(geo.norm(lap - rough - rr - ric),
                        [geo.norm(lap), geo.norm(rough), geo.norm(rr), geo.norm(ric)])
            lb = geo.dbar_laplacian(F)
            accs[3].add(geo.norm(lap - 2 * lb), [geo.norm(lap), 2 * geo.norm(lb)])
            if f.bidegree[0] == 0:
                r01 = geo.rough_laplacian_01(F)
                com = -1j * geo.commutator(geo.rho, F)
                accs[1].add(geo.norm(lb - r01 - com), [geo.norm(lb), geo.norm(r01), geo.norm(com)])
                accs[2].add(geo.norm(com - ric), [geo.norm(com), geo.norm(ric)])
    return [a.report() for a in accs]


def fd_codifferential_check(chart: KahlerChart, field_: FormField, n_points: int = 10, seed: int = 0,
                            tol: float = 1e-5, h: float = 1e-4) -> CheckReport:
    """Compare jet codifferentials with a finite-difference route.

    The finite-difference route differentiates the field coefficients and the
    metric (from order-2 potential jets) by Richardson-extrapolated central
    differences in each real direction, builds the Christoffel symbols from
    those and assembles ``d* = del* + dbar*`` with plain numpy.
    """
    m = chart.m
    n = 2 * m
    alg = algebra(m)
    acc = ResidualAccumulator("jet vs finite-difference d*", "d* F by jets = d* F by finite differences", tol, seed)

    def values(pt):
        g2 = LocalGeometry(chart, pt, 2)
        F = field_.jet(chart.coords(pt, 0)).value
        return F, g2.metric.H

    def central(pt, i, step):
        e = np.zeros(m, dtype=complex)
        if i % 2 == 0:
            e[i // 2] = step
        else:
            e[i // 2] = 1j * step
        Fp, Hp = values(pt + e)
        Fm, Hm = values(pt - e)
        return (Fp - Fm) / (2 * step), (Hp - Hm) / (2 * step)

    def richardson(pt, i):
        F1, H1 = central(pt, i, h)
        F2, H2 = central(pt, i, h / 2)
        return (4 * F2 - F1) / 3, (4 * H2 - H1) / 3

    for pt in sample_points(chart, n_points, seed):
        geo = chart.geometry(pt, 3)
        ref = geo.dstar(field_.jet(geo.coords)).value
        F0, H0 = values(pt)
        dx = [richardson(pt, 2 * k) for k in range(m)]
        dy = [richardson(pt, 2 * k + 1) for k in range(m)]
        # Wirtinger derivatives
        dF = [0.5 * (dx[k][0] - 1j * dy[k][0]) for k in range(m)] + [0.5 * (dx[k][0] + 1j * dy[k][0]) for k in range(m)]
        dH = [0.5 * (dx[k][1] - 1j * dy[k][1]) for k in range(m)] + [0.5 * (dx[k][1] + 1j * dy[k][1]) for k in range(m)]
        Hi = np.linalg.inv(H0)
        gam = np.einsum("lk,ijl->kij", Hi, np.array(dH[:m]))       # Gamma^k_ij
        gamb = np.einsum("kl,ilj->kij", Hi, np.array(dH[m:]))      # Gammabar^k_ij

        def nab(a):
            out = dF[a].copy()
            if a < m:
                C, off = gam[:, a, :], 0
            else:
                C, off = gamb[:, a - m, :], m
            for k in range(m):
                ck = alg.apply_contract_gen(off + k, F0)
                for j in range(m):
                    if C[k, j] != 0:
                        out -= C[k, j] * alg.apply_wedge_gen(off + j, ck)
            return out

        nabs = [nab(a) for a in range(n)]
        fd = np.zeros(alg.dim, dtype=complex)
        for i in range(m):
            for j in range(m):
                fd -= Hi[j, i] * alg.apply_contract_gen(i, nabs[m + j])
                fd -= Hi[j, i] * alg.apply_contract_gen(m + j, nabs[i])
        res = geo.norm(PqForm(m, ref - fd))
        acc.add(res, [geo.norm(PqForm(m, ref)), geo.norm(PqForm(m, fd))])
    return acc.report()


# ---------------------------------------------------------------------------
# Einstein charts


def einstein_constant(chart: KahlerChart) -> float:
    """Predicted ``k`` in ``Ric = k g`` for the flat and Fubini-Study charts.

    For ``K = c log(1 + |z|^2)`` the metric is ``c`` times the unit
    Fubini-Study metric, whose Ricci form is ``(m + 1)`` times its Kaehler form.
    """
    kind = chart.descriptor.get("kind")
    if kind == "flat":
        return 0.0
    if kind == "fs":
        return (chart.m + 1) / chart.descriptor["scale"]
    raise ValueError(f"no closed-form Einstein constant for chart kind {kind!r}")


def einstein_check(chart: KahlerChart, k: float | None = None, n_points: int = 20, seed: int = 0,
                   tol: float = 1e-8) -> CheckReport:
    """``Ric = k g`` at sampled points, with ``k`` from :func:`einstein_constant` by default."""
    k = einstein_constant(chart) if k is None else float(k)
    acc = ResidualAccumulator("Einstein constant", f"Ric = k g with k = {k:.12g}", tol, seed)
    for pt in sample_points(chart, n_points, seed):
        geo = chart.geometry(pt, 4)
        ric, H = geo.ricci.value, geo.H.value
        acc.add(np.max(np.abs(ric - k * H)), [np.max(np.abs(ric)), abs(k) * np.max(np.abs(H))])
    rep = acc.report()
    rep.values["k"] = k
    return rep
