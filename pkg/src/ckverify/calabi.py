"""Calabi-ansatz Kaehler charts over a Kaehler-Einstein base.

The chart has coordinates ``(zeta^1..zeta^(m-1), w)`` with ``w != 0``.  With
``t = log|w|^2 + K_N(zeta)`` the potential is ``F(t)`` and the moment map of
``K = -i (w d/dw - wbar d/dwbar)`` is ``z = F'(t)``.  The profile ODE
``dz/dt = X(z) / 2`` makes ``g(K, K) = X(z)``; it is solved in closed form:

* ``k != 0``: ``z^m = a lam e^(k t) / (1 - C1 lam e^(k t))`` with ``a = 2k/m``;
* ``k = 0``: ``z^-m = -(m/2) C1 (t + log lam)``.

``F`` itself has no closed form, but only its derivatives enter the metric,
and ``F^(n)(t0) = z^(n-1)(t0)``, so the potential jet is obtained by
integrating the Taylor series of ``z`` about ``t0`` term by term.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass

import numpy as np

from .exterior import PqForm, TangentVector, algebra, inner_any, vector_norm
from .geometry import (ChartDomainError, Coords, FormField, KahlerChart, LocalGeometry,
                       VectorField, _wedge_gen, form_jet, jwedge)
from .jets import Jet, jet_space
from .profiles import MomentumProfile, ProfileError, RicciPrediction
from .report import CheckReport, ResidualAccumulator

__all__ = [
    "BaseGeometry",
    "CalabiChart",
    "SplitFrame",
    "build_calabi_chart",
    "split_frame",
    "chern_nabla",
    "lift",
    "bdel_split_check",
    "chern_checks",
    "lift_checks",
    "form_projector",
    "chart_battery",
    "killing_field",
]


@dataclass(frozen=True)
class BaseGeometry:
    """Kaehler-Einstein base of complex dimension ``n = m - 1`` with ``rho = k omega``.

    ``kind`` is ``"flat"`` (``K_N = |zeta|^2 / 2``, ``k = 0``) or ``"fs"``
    (``K_N = c log(1 + |zeta|^2)`` with ``c = (n + 1) / k``).
    """

    kind: str
    n: int
    k: float

    def __post_init__(self):
        if self.kind not in ("flat", "fs"):
            raise ValueError(f"unknown base kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("base dimension must be >= 1")
        if self.kind == "flat" and self.k != 0:
            raise ValueError("the flat base has Einstein constant 0")
        if self.kind == "fs" and self.k <= 0:
            raise ValueError("the Fubini-Study base needs k > 0")

    @property
    def scale(self) -> float:
        return (self.n + 1) / self.k if self.kind == "fs" else 0.5

    def potential(self, zeta, zetab) -> Jet:
        s = sum(a * b for a, b in zip(zeta, zetab))
        if self.kind == "flat":
            return 0.5 * s
        return self.scale * (1.0 + s).log()

    def potential_value(self, zeta) -> float:
        s = float(np.sum(np.abs(zeta) ** 2))
        return 0.5 * s if self.kind == "flat" else self.scale * math.log1p(s)

    def chart(self, half_width: float = 1.0) -> KahlerChart:
        n = self.n

        def pot(c: Coords) -> Jet:
            return self.potential(c.z, c.zb)

        box = [(-half_width, half_width)] * (2 * n)
        return KahlerChart(n, pot, box=box, name=f"base-{self.kind}",
                           descriptor={"kind": self.kind, "m": n, "k": self.k, "scale": self.scale})

    def einstein_check(self, n_points: int = 20, seed: int = 0, tol: float = 1e-8) -> CheckReport:
        """``Ric^N = k g^N`` at sampled base points."""
        ch = self.chart()
        rng = np.random.default_rng(seed)
        acc = ResidualAccumulator("base Einstein", "Ric_N = k g_N", tol, seed)
        for pt in ch.sample(rng, n_points):
            geo = ch.geometry(pt, 4)
            ric = geo.ricci.value
            H = geo.H.value
            acc.add(np.max(np.abs(ric - self.k * H)), [np.max(np.abs(ric))], abs(self.k) * np.max(np.abs(H)))
        return acc.report()


class CalabiChart(KahlerChart):
    """Kaehler chart of Calabi type on ``{(zeta, w)}``.

    Parameters
    ----------
    base : BaseGeometry
    profile : MomentumProfile
        Must carry the z-interval used for sampling.
    lam : float
        Integration constant of the closed-form moment map.
    margin : float
        Relative margin kept from the ends of the z-interval.
    """

    def __init__(self, base: BaseGeometry, profile: MomentumProfile, lam: float = 1.0,
                 half_width: float = 0.6, margin: float = 0.05):
        m = base.n + 1
        if profile.m != m:
            raise ProfileError(f"profile dimension {profile.m} does not match base dimension {base.n} + 1")
        if profile.k != base.k:
            raise ProfileError(f"profile k={profile.k} does not match the base Einstein constant {base.k}")
        if profile.zmin is None:
            raise ProfileError("the profile needs a z-interval")
        if lam <= 0:
            raise ProfileError("lambda must be positive")
        self.m = m
        self.base = base
        self.profile = profile
        self.lam = float(lam)
        self.half_width = half_width
        zlo, zhi = profile.zmin, profile.zmax
        width = zhi - zlo
        self.zrange = (zlo + margin * width, zhi - margin * width)
        # the t-range must map back into the interval
        for z in (zlo, zhi):
            self.t_of_z(z)
        descriptor = {"kind": "calabi", "base": base.kind, "m": m, "k": profile.k,
                      "C1": profile.C1, "lambda": self.lam, "zmin": zlo, "zmax": zhi,
                      "half_width": half_width, "margin": margin}
        super().__init__(m, self._potential, sampler=self._sample, name=f"calabi-{base.kind}",
                         prepare=self._prepare, excluded=self._excluded, descriptor=descriptor)

    # closed forms ----------------------------------------------------------
    def z_of_t(self, t):
        m, C1, k, lam = self.m, self.profile.C1, self.profile.k, self.lam
        t = np.asarray(t, dtype=float)
        if k == 0:
            u = -0.5 * m * C1 * (t + math.log(lam))
            return u ** (-1.0 / m)
        E = lam * np.exp(k * t)
        y = (2 * k / m) * E / (1 - C1 * E)
        return y ** (1.0 / m)

    def t_of_z(self, z):
        m, C1, k, lam = self.m, self.profile.C1, self.profile.k, self.lam
        z = np.asarray(z, dtype=float)
        if k == 0:
            if C1 <= 0:
                raise ProfileError("k = 0 needs C1 > 0")
            return -2.0 / (m * C1) * z ** (-m) - math.log(lam)
        y = z ** m
        E = y / (2 * k / m + C1 * y)
        if np.any(E <= 0):
            raise ProfileError("z-interval leaves the domain of the closed-form moment map")
        return np.log(E / lam) / k

    def _z_series(self, t0: float, order: int) -> np.ndarray:
        """Taylor coefficients of ``z(t0 + s)`` in ``s``."""
        m, C1, k, lam = self.m, self.profile.C1, self.profile.k, self.lam
        s = Jet.variable(1, order, 0, 0.0)
        if k == 0:
            u = (s + t0 + math.log(lam)) * (-0.5 * m * C1)
            return u.power(-1.0 / m).c.real.copy()
        E = (s * k + k * t0).exp() * lam
        y = E * (2 * k / m) / (1 - E * C1)
        return y.power(1.0 / m).c.real.copy()

    def _prepare(self, c: Coords):
        n = self.base.n
        order = c.order
        zeta, zetab = c.z[:n], c.zb[:n]
        w, wb = c.z[n], c.zb[n]
        t = (w * wb).log() + self.base.potential(zeta, zetab)
        t0 = float(np.real(t.value))
        zc = self._z_series(t0, order + 1)
        Fc = np.zeros(order + 1)
        Fc[1:] = zc[:order] / np.arange(1, order + 1)
        c.extras["t"] = t
        c.extras["z"] = t.compose(list(zc[: order + 1]))
        c.extras["F"] = t.compose(list(Fc))

    def _potential(self, c: Coords) -> Jet:
        return c.extras["F"]

    def _excluded(self, pt) -> bool:
        z = self.z_at(pt)
        return not (self.zrange[0] <= z <= self.zrange[1])

    def z_at(self, pt) -> float:
        pt = np.asarray(pt, dtype=complex)
        n = self.base.n
        t = math.log(abs(pt[n]) ** 2) + self.base.potential_value(pt[:n])
        return float(self.z_of_t(t))

    def _sample(self, rng, count):
        n = self.base.n
        hw = self.half_width
        out = np.empty((count, n + 1), dtype=complex)
        out[:, :n] = rng.uniform(-hw, hw, (count, n)) + 1j * rng.uniform(-hw, hw, (count, n))
        z = rng.uniform(self.zrange[0], self.zrange[1], count)
        t = self.t_of_z(z)
        for i in range(count):
            r2 = math.exp(t[i] - self.base.potential_value(out[i, :n]))
            out[i, n] = math.sqrt(r2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        return out

    def in_domain(self, pt) -> bool:
        return not self._excluded(pt)

    # fields ----------------------------------------------------------------
    def killing_jet(self, c: Coords) -> Jet:
        """``K = -i (w d/dw - wbar d/dwbar)`` as a component jet."""
        m = self.m
        comps = [c.const(0.0)] * (2 * m)
        comps = list(comps)
        comps[m - 1] = c.z[m - 1] * (-1j)
        comps[2 * m - 1] = c.zb[m - 1] * 1j
        return _stack(comps)

    def jk_jet(self, c: Coords) -> Jet:
        """``JK = w d/dw + wbar d/dwbar``."""
        m = self.m
        comps = [c.const(0.0)] * (2 * m)
        comps[m - 1] = c.z[m - 1] * 1.0
        comps[2 * m - 1] = c.zb[m - 1] * 1.0
        return _stack(comps)

    def X_jet(self, c: Coords) -> Jet:
        z = c.extras["z"]
        p = self.profile
        return z * (z ** p.m * p.C1 + 2.0 * p.k / p.m)

    def prediction(self) -> RicciPrediction:
        return RicciPrediction.from_profile(self.profile)


def _stack(comps):
    from .jets import stack
    order = min(c.order for c in comps)
    return stack([c.truncate(order) for c in comps], axis=-1)


def build_calabi_chart(base: BaseGeometry, profile: MomentumProfile, zmin: float | None = None,
                       zmax: float | None = None, lam: float = 1.0, **kw) -> CalabiChart:
    """Construct and return a :class:`CalabiChart`; the interval is validated against the profile."""
    if zmin is not None:
        profile = profile.with_interval(zmin, zmax)
    return CalabiChart(base, profile, lam=lam, **kw)


def killing_field(chart: CalabiChart) -> VectorField:
    return VectorField(chart.m, chart.killing_jet, "K", chart)


# ---------------------------------------------------------------------------
# lifts of base forms


def lift(chart: CalabiChart, gamma, weight: float, bidegree=None, name: str = "lift") -> FormField:
    """Lift of a base form of weight ``weight``: ``gamma_hat = w^weight * gamma``.

    ``gamma(coords)`` returns a form jet that only involves the base
    coordinates ``zeta`` and their differentials; on the chart it is the
    pullback.  With this convention ``L_K gamma_hat = -i weight gamma_hat``
    and ``L_{JK} gamma_hat = weight gamma_hat``.
    """
    if float(weight) != int(weight):
        raise ValueError(f"lift weight must be an integer, got {weight}")
    weight = int(weight)
    m = chart.m

    def fn(c: Coords) -> Jet:
        g = gamma(c)
        if weight == 0:
            return g
        w = c.z[m - 1]
        fac = w ** weight if weight > 0 else w.power(weight)
        return fac * g

    return FormField(m, fn, bidegree, name, chart)


def base_del_coupled(chart: CalabiChart, gamma, weight: float):
    """``del gamma - weight dK_N ^ gamma`` as a callable on chart coordinates."""
    n = chart.base.n
    m = chart.m
    alg = algebra(m)

    def fn(c: Coords) -> Jet:
        g = gamma(c)
        KN = chart.base.potential(c.z[:n], c.zb[:n])
        dg = sum(_wedge_gen(alg, i, g.d(i)) for i in range(n))
        dK = form_jet(c, [(KN.d(i), (i + 1,), ()) for i in range(n)])
        return dg - weight * jwedge(dK, g)

    return fn


def base_dbar(chart: CalabiChart, gamma):
    n = chart.base.n
    m = chart.m
    alg = algebra(m)

    def fn(c: Coords) -> Jet:
        g = gamma(c)
        return sum(_wedge_gen(alg, m + i, g.d(m + i)) for i in range(n))

    return fn


def lift_checks(chart: CalabiChart, gamma, weight: float, n_points: int = 10, seed: int = 0,
                tol: float = 1e-6, order: int = 3) -> list:
    """Horizontality, commutation with ``dbar``, the twisted ``del`` rule and the Lie derivatives."""
    m = chart.m
    gh = lift(chart, gamma, weight)
    dbar_hat = lift(chart, base_dbar(chart, gamma), weight)
    del_hat = lift(chart, base_del_coupled(chart, gamma, weight), weight)
    names = [("lift horizontal", "K _| lift = JK _| lift = 0"),
             ("lift dbar", "dbar lift(gamma) = lift(dbar gamma)"),
             ("lift del", "X del lift = 2k dz ^ lift + X lift(del gamma)"),
             ("lift L_K", "L_K lift = -i k lift"),
             ("lift L_JK", "L_JK lift = k lift")]
    accs = [ResidualAccumulator(a, b, tol, seed) for a, b in names]
    rng = np.random.default_rng(seed)
    for pt in chart.sample(rng, n_points):
        geo = chart.geometry(pt, order)
        c = geo.coords
        G = gh.jet(c)
        K, JK = chart.killing_jet(c), chart.jk_jet(c)
        nG = geo.norm(G)
        r = max(geo.norm(geo.contract(K, G)), geo.norm(geo.contract(JK, G)))
        accs[0].add(r, [], nG * math.sqrt(chart.X_jet(c).value.real))
        a, b = geo.dbar(G), dbar_hat.jet(c)
        accs[1].add(geo.norm(a - b), [geo.norm(a), geo.norm(b)])
        X = chart.X_jet(c)
        z = c.extras["z"]
        dz = form_jet(c, [(z.d(i), (i + 1,), ()) for i in range(m)])
        lhs = X * geo.del_(G)
        t1 = (2.0 * weight) * jwedge(dz, G)
        t2 = X * del_hat.jet(c)
        accs[2].add(geo.norm(lhs - t1 - t2), [geo.norm(lhs), geo.norm(t1), geo.norm(t2)])
        LK = geo.lie_derivative(K, G)
        accs[3].add(geo.norm(LK + 1j * weight * G), [geo.norm(LK), abs(weight) * nG], nG)
        LJ = geo.lie_derivative(JK, G)
        accs[4].add(geo.norm(LJ - weight * G), [geo.norm(LJ), abs(weight) * nG], nG)
    return [a.report() for a in accs]


# ---------------------------------------------------------------------------
# vertical / horizontal splitting


@dataclass
class SplitFrame:
    """Splitting ``TM = V + H`` at a point, ``V = span{K, JK}``."""

    pt: np.ndarray
    K: TangentVector
    JK: TangentVector
    vertical: list
    horizontal: list
    projector: np.ndarray
    omega_v: PqForm
    omega_h: PqForm
    theta: PqForm
    lambda1: float
    lambda2: float


def _flat_vec(metric, comps) -> PqForm:
    m = metric.m
    cov = metric.g_bilinear.T @ comps
    out = PqForm.zero(m)
    for a in range(2 * m):
        out.c[1 << a] = cov[a]
    return out


def _vertical_projector(metric, Kc, JKc, XK) -> np.ndarray:
    """``P^a_b`` on component vectors, projecting onto ``span{K, JK}``."""
    g = metric.g_bilinear
    return (np.outer(Kc, g.T @ Kc) + np.outer(JKc, g.T @ JKc)) / XK


def _omega_split_jets(chart: CalabiChart, geo: LocalGeometry):
    c = geo.coords
    K, JK = chart.killing_jet(c), chart.jk_jet(c)
    X = chart.X_jet(c)
    ov = jwedge(geo.flat(K), geo.flat(JK)) / X
    oh = geo.omega - ov
    z = c.extras["z"]
    zf = form_jet(c, [(z.log(), (), ())])
    theta = geo.d(zf)
    return ov, oh, theta


def split_frame(chart: CalabiChart, pt, order: int = 4) -> SplitFrame:
    geo = chart.geometry(pt, order)
    c = geo.coords
    metric = geo.metric
    m = chart.m
    Kc = chart.killing_jet(c).value
    JKc = chart.jk_jet(c).value
    XK = float(np.real(Kc @ metric.g_bilinear @ Kc))
    if XK <= 1e-14:
        raise ChartDomainError("K vanishes at the requested point")
    P = _vertical_projector(metric, Kc, JKc, XK)
    Q = np.eye(2 * m) - P
    s = 1.0 / math.sqrt(XK)
    vert = [TangentVector.from_components(m, Kc * s, real=True),
            TangentVector.from_components(m, JKc * s, real=True)]
    hor = []
    for e in metric.frame:
        v = Q @ e.components
        for h in hor:
            v = v - np.real(h.components @ metric.g_bilinear @ v) * h.components
        nv = math.sqrt(max(np.real(v @ metric.g_bilinear @ v), 0.0))
        if nv > 1e-8 and len(hor) < 2 * m - 2:
            hor.append(TangentVector.from_components(m, v / nv, real=True))
    ov, oh, theta = _omega_split_jets(chart, geo)
    if order >= 4:
        Rb = geo.ricci_bilinear.value
        lam1 = float(np.real(Kc @ Rb @ Kc) / XK)
        hc = hor[0].components
        lam2 = float(np.real(hc @ Rb @ hc))
    else:
        lam1 = lam2 = float("nan")
    return SplitFrame(np.asarray(pt), TangentVector.from_components(m, Kc, real=True),
                      TangentVector.from_components(m, JKc, real=True), vert, hor, P,
                      PqForm(m, ov.value), PqForm(m, oh.value), PqForm(m, theta.value), lam1, lam2)


def form_projector(metric, Q: np.ndarray) -> np.ndarray:
    """Matrix on form coefficients of the pullback ``alpha -> alpha(Q., .., Q.)``."""
    m = metric.m
    alg = algebra(m)
    n = 2 * m
    images = []
    for b in range(n):
        f = PqForm.zero(m)
        for a in range(n):
            f.c[1 << a] = Q[b, a]
        images.append(f)
    M = np.zeros((alg.dim, alg.dim), dtype=complex)
    for A in range(alg.dim):
        f = PqForm.scalar(m)
        for b in range(n):
            if A >> b & 1:
                f = f ^ images[b]
        M[:, A] = f.c
    return M


def _christoffel_full(geo: LocalGeometry) -> np.ndarray:
    """``Gam[a, c, d]``: ``nabla_{E_c} E_d = Gam[a, c, d] E_a`` at the point."""
    m = geo.m
    G = np.zeros((2 * m,) * 3, dtype=complex)
    G[:m, :m, :m] = geo.gamma.value
    G[m:, m:, m:] = geo.gammabar.value
    return G


def _structure_endomorphism(chart: CalabiChart, c: Coords, geo: LocalGeometry) -> Jet:
    """``I = -J`` on ``V`` and ``J`` on ``H``, as a jet of ``(2m, 2m)`` matrices."""
    m = chart.m
    K, JK = chart.killing_jet(c), chart.jk_jet(c)
    X = chart.X_jet(c)
    g = geo.g_bilinear
    Kf = jeinsum_vec(g, K)
    JKf = jeinsum_vec(g, JK)
    from .jets import jeinsum
    P = (jeinsum("a,b->ab", K, Kf) + jeinsum("a,b->ab", JK, JKf)) / X
    Jm = np.diag(np.r_[1j * np.ones(m), -1j * np.ones(m)])
    eye = np.eye(2 * m)
    return jeinsum("ab,bc->ac", Jm, (P * -2.0) + eye)


def jeinsum_vec(g: Jet, X: Jet) -> Jet:
    from .jets import jeinsum
    return jeinsum("ab,a->b", g, X)


def chern_endomorphism(chart: CalabiChart, pt, order: int = 4) -> np.ndarray:
    """``A[c] = 1/2 (nabla_{E_c} I) I`` at the point, shape ``(2m, 2m, 2m)`` as ``A[c, a, b]``."""
    geo = chart.geometry(pt, order)
    c = geo.coords
    I = _structure_endomorphism(chart, c, geo)
    n = 2 * chart.m
    I0 = I.value
    Gam = _christoffel_full(geo)
    A = np.zeros((n, n, n), dtype=complex)
    for cc in range(n):
        dI = I.d(cc).value + Gam[:, cc, :] @ I0 - I0 @ Gam[:, cc, :]
        A[cc] = 0.5 * dI @ I0
    return A


def _endo_on_forms(m: int, A: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Derivation extension of an endomorphism to forms: ``-sum A[b, a] e^a ^ (E_b _| F)``."""
    alg = algebra(m)
    out = np.zeros_like(F, dtype=complex)
    n = 2 * m
    for b in range(n):
        cb = alg.apply_contract_gen(b, F)
        for a in range(n):
            if A[b, a] != 0:
                out -= A[b, a] * alg.apply_wedge_gen(a, cb)
    return out


def chern_nabla(chart: CalabiChart, field: FormField, X, pt, order: int = 4) -> PqForm:
    """``nabla^c_X F = nabla_X F + (1/2)(nabla_X I) I . F`` at ``pt``."""
    geo = chart.geometry(pt, order)
    Xc = X.components if isinstance(X, TangentVector) else np.asarray(X)
    F = field.jet(geo.coords)
    nab = geo.nabla_vec(F, Xc).value
    A = np.tensordot(Xc, chern_endomorphism(chart, pt, order), axes=(0, 0))
    return PqForm(chart.m, nab + _endo_on_forms(chart.m, A, F.value))


def _k01_form(metric, Kc, JKc) -> PqForm:
    return (_flat_vec(metric, Kc) - _flat_vec(metric, JKc) * 1j) * 0.5


def chern_checks(chart: CalabiChart, field: FormField, p: int, n_points: int = 10, seed: int = 0,
                 tol: float = 1e-6, order: int = 4) -> list:
    """Relation between the Levi-Civita and Chern connections on ``Lambda^{0,p} H``.

    Checks ``nabla_X tau = nabla^c_X tau - (i/z) K^{01} ^ (X _| tau)`` for
    horizontal ``X``, that ``nabla^c`` preserves ``V``, and
    ``L_{K_{0,1}} = nabla_{K_{0,1}} + i p X / (2z)``.
    """
    m = chart.m
    accs = [ResidualAccumulator("Chern vs Levi-Civita on H", "nabla_X tau = nabla^c_X tau - (i/z) K01 ^ (X _| tau)", tol, seed),
            ResidualAccumulator("Chern preserves V", "nabla^c V in V", tol, seed),
            ResidualAccumulator("Lie derivative along K01", "L_K01 = nabla_K01 + i p X / (2z)", tol, seed)]
    rng = np.random.default_rng(seed)
    for pt in chart.sample(rng, n_points):
        sf = split_frame(chart, pt, order)
        geo = chart.geometry(pt, order)
        c = geo.coords
        metric = geo.metric
        F = field.jet(c)
        Fv = PqForm(m, F.value)
        z = float(c.extras["z"].value.real)
        Xv = float(chart.X_jet(c).value.real)
        Kc, JKc = sf.K.components, sf.JK.components
        k01 = _k01_form(metric, Kc, JKc)
        Aall = chern_endomorphism(chart, pt, order)
        for h in sf.horizontal:
            Xc = h.components
            nab = PqForm(m, geo.nabla_vec(F, Xc).value)
            A = np.tensordot(Xc, Aall, axes=(0, 0))
            nc = PqForm(m, nab.c + _endo_on_forms(m, A, Fv.c))
            corr = (k01 ^ PqForm(m, geo.contract(Xc, F).value)) * (1j / z)
            res = nab - nc + corr
            accs[0].add(metric_norm(metric, res), [metric_norm(metric, nab), metric_norm(metric, nc),
                                                   metric_norm(metric, corr)])
            # nabla^c_X K stays vertical
            Gam = _christoffel_full(geo)
            Kj = chart.killing_jet(c)
            dK = np.array([Kj.d(a).value for a in range(2 * m)]).T  # [comp, a]
            nK = dK @ Xc + np.einsum("acd,c,d->a", Gam, Xc, Kc)
            ncK = nK + A @ Kc
            hor = ncK - sf.projector @ ncK
            accs[1].add(vector_norm(metric.g_bilinear, hor),
                        [vector_norm(metric.g_bilinear, ncK)], math.sqrt(Xv))
        K01 = 0.5 * (chart.killing_jet(c) + 1j * chart.jk_jet(c))
        L = geo.lie_derivative(K01, F).value
        nab = geo.nabla_vec(F, K01.value).value
        extra = 1j * p * Xv / (2 * z) * F.value
        res = PqForm(m, L - nab - extra)
        accs[2].add(metric_norm(metric, res), [metric_norm(metric, PqForm(m, L)),
                                               metric_norm(metric, PqForm(m, nab)),
                                               metric_norm(metric, PqForm(m, extra))])
    return [a.report() for a in accs]


def metric_norm(metric, f: PqForm) -> float:
    return float(np.sqrt(max(inner_any(metric, f, f).real, 0.0)))


def bdel_split_check(chart: CalabiChart, field: FormField, n_points: int = 10, seed: int = 0,
                     tol: float = 1e-6, order: int = 3, name: str = "dbar splitting") -> CheckReport:
    """``dbar = dbar_H + (2/X) K^{01} ^ L_{K_{0,1}}`` on horizontal ``(0, *)``-forms."""
    m = chart.m
    acc = ResidualAccumulator(name, "dbar = dbar_H + (2/X) K01 ^ L_K01", tol, seed)
    rng = np.random.default_rng(seed)
    for pt in chart.sample(rng, n_points):
        geo = chart.geometry(pt, order)
        c = geo.coords
        metric = geo.metric
        F = field.jet(c)
        Kc = chart.killing_jet(c).value
        JKc = chart.jk_jet(c).value
        Xv = float(chart.X_jet(c).value.real)
        P = _vertical_projector(metric, Kc, JKc, Xv)
        Q = np.eye(2 * m) - P
        Mh = form_projector(metric, Q)
        db = geo.dbar(F).value
        dbh = Mh @ db
        K01 = 0.5 * (chart.killing_jet(c) + 1j * chart.jk_jet(c))
        L = PqForm(m, geo.lie_derivative(K01, F).value)
        rhs = (_k01_form(metric, Kc, JKc) ^ L) * (2.0 / Xv)
        res = PqForm(m, db - dbh) - rhs
        acc.add(metric_norm(metric, res), [metric_norm(metric, PqForm(m, db)),
                                           metric_norm(metric, PqForm(m, dbh)), metric_norm(metric, rhs)])
    return acc.report()


def chart_battery(chart: CalabiChart, n_points: int = 20, seed: int = 0, tol: float = 1e-7,
                  tol_ricci: float = 1e-6) -> list:
    """Kaehler condition, moment map, profile, splitting and curvature checks on sampled points."""
    m = chart.m
    pred = chart.prediction()
    prof = chart.profile
    names = [
        ("Kaehler (d omega = 0)", "d omega = 0", tol),
        ("moment map K _| omega = dz", "K _| omega = dz", tol),
        ("profile g(K,K) = X(z)", "g(K, K) = X(z)", tol),
        ("Lee form d omega^V = -theta ^ omega^H", "d omega^V = -theta ^ omega^H", tol),
        ("-dK^flat = X' omega^V + (X/z) omega^H", "-d K^flat = X'(z) omega^V + z^-1 X(z) omega^H", tol),
        ("Ricci eigenvalues", "Ric = lambda1 on V, lambda2 on H", tol_ricci),
        ("theta = d lambda2 / (lambda1 - lambda2)", "theta = d lambda2 / (lambda1 - lambda2)", tol_ricci),
        ("theta(K) = 0", "theta(K) = 0", tol),
        ("V totally geodesic", "g(nabla_V W, H) = 0", tol_ricci),
        ("split reconstructs omega", "omega = omega^V + omega^H, both (1,1)", tol),
    ]
    accs = [ResidualAccumulator(a, b, t, seed) for a, b, t in names]
    multiplicity_ok = True
    rng = np.random.default_rng(seed)
    for pt in chart.sample(rng, n_points):
        geo = chart.geometry(pt, 5)
        c = geo.coords
        metric = geo.metric
        z = c.extras["z"]
        zv = float(z.value.real)
        zf = form_jet(c, [(z, (), ())])
        K = chart.killing_jet(c)
        JK = chart.jk_jet(c)
        X = chart.X_jet(c)
        nm = lambda J: geo.norm(J)  # noqa: E731
        dom = geo.d(geo.omega)
        accs[0].add(nm(dom), [], nm(geo.omega))
        a, b = geo.contract(K, geo.omega), geo.d(zf)
        accs[1].add(nm(a - b), [nm(a), nm(b)])
        gkk = float(np.real(K.value @ metric.g_bilinear @ K.value))
        Xv = float(X.value.real)
        accs[2].add(abs(gkk - Xv), [abs(gkk), abs(Xv)])
        ov, oh, theta = _omega_split_jets(chart, geo)
        lhs, rhs = geo.d(ov), -jwedge(theta, oh)
        accs[3].add(nm(lhs - rhs), [nm(lhs), nm(rhs)], nm(ov) * nm(theta))
        dk = -geo.d(geo.flat(K))
        r2 = float(prof.dX(zv)) * ov + (Xv / zv) * oh
        accs[4].add(nm(dk - r2), [nm(dk), nm(r2)])
        ev = np.sort(geo.curvature_at().ricci_eigenvalues().real)
        l1, l2 = float(pred.lambda1(zv)), float(pred.lambda2(zv))
        expect = np.sort([l1] + [l2] * (m - 1))
        accs[5].add(float(np.max(np.abs(ev - expect))), [float(np.max(np.abs(ev)))])
        # multiplicities (real): 2 for lambda1, 2m-2 for lambda2
        if abs(l1 - l2) > 1e-9 * max(abs(l1), 1.0):
            n1 = int(np.sum(np.abs(ev - l1) <= 1e-6 * abs(l1)))
            multiplicity_ok &= (2 * n1 == 2) and (2 * (m - n1) == 2 * m - 2)
        # eigenvalue functions from curvature jets
        lam1 = jeinsum_pair(geo.ricci_bilinear, K) / X
        lam2 = (geo.scal * 0.5 - lam1) / (m - 1)
        dl2 = geo.d(form_jet(c, [(lam2, (), ())]))
        th_pred = dl2.value / (lam1.value - lam2.value)
        tv = theta.value
        accs[6].add(float(np.max(np.abs(th_pred - tv))), [float(np.max(np.abs(tv)))])
        thK = PqForm(m, geo.contract(K, theta).value).c[0]
        accs[7].add(abs(thK), [], float(np.max(np.abs(tv))) * math.sqrt(Xv))
        # totally geodesic: horizontal part of nabla_V W for V, W in {K, JK}
        P = _vertical_projector(metric, K.value, JK.value, Xv)
        worst = 0.0
        scale = 0.0
        for Vj in (K, JK):
            for Wj in (K, JK):
                nW = geo.nabla_vector(Wj).value @ Vj.value
                hor = nW - P @ nW
                worst = max(worst, vector_norm(metric.g_bilinear, hor))
                scale = max(scale, vector_norm(metric.g_bilinear, nW))
        accs[8].add(worst, [scale], Xv)
        ovp, ohp = PqForm(m, ov.value), PqForm(m, oh.value)
        off = max(ovp.max_abs() - ovp.part(1, 1).max_abs(), 0.0) + (ohp - ohp.part(1, 1)).max_abs()
        off += (ovp + ohp - PqForm(m, geo.omega.value)).max_abs()
        accs[9].add(off, [ovp.max_abs(), ohp.max_abs()])
    reps = [a.report() for a in accs]
    reps[5].values["multiplicities"] = [2, 2 * m - 2] if multiplicity_ok else "mismatch"
    reps[5].passed = reps[5].passed and multiplicity_ok
    return reps


def jeinsum_pair(B: Jet, X: Jet) -> Jet:
    from .jets import jeinsum
    return jeinsum("b,b->", jeinsum("ab,a->b", B, X), X)
