"""Momentum profiles, radial models and closed-form curvature predictions.

The momentum profile ``X(z) = z (C1 z^m + 2k/m)`` is the squared length of the
circle generator as a function of its moment map.  On the fibre ``C`` with
radius ``r`` the moment map is ``z = G(r)`` with ``r G'(r) = X(G)``, solved by
``G^m = 2 k lam r^(2k) / (m (1 - C1 lam r^(2k)))`` for ``k != 0``.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .report import CheckReport, ResidualAccumulator

__all__ = [
    "ProfileError",
    "MomentumProfile",
    "RadialModel",
    "RicciPrediction",
    "DomainDescriptor",
    "profile_ode_check",
    "radial_ode_check",
    "maximal_domain",
    "positivity_domain",
    "positivity_scan",
    "tonnesen_ricci",
    "norm_predictions",
    "profile_csv",
    "CSV_HEADER",
]

CSV_HEADER = ["z", "X", "X_prime", "lambda1", "lambda2", "scal", "tau_norm2_pred", "phi_norm2_pred"]


class ProfileError(ValueError):
    """Invalid profile parameters or an interval outside the positivity domain."""


@dataclass(frozen=True)
class MomentumProfile:
    """``X(z) = z (C1 z^m + 2k/m)`` on an optional interval ``[zmin, zmax]``."""

    m: int
    C1: float
    k: float
    zmin: float | None = None
    zmax: float | None = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 3:
            raise ProfileError("m must be an integer >= 3")
        if self.C1 == 0 and self.k == 0:
            raise ProfileError("C1 = k = 0 gives X identically zero")
        if self.zmin is not None:
            if not (0 < self.zmin < self.zmax):
                raise ProfileError("z-interval must satisfy 0 < zmin < zmax")
            zs = np.linspace(self.zmin, self.zmax, 201)
            if np.any(self.X(zs) <= 0):
                raise ProfileError(
                    f"X(z) is not positive on [{self.zmin}, {self.zmax}] for C1={self.C1}, k={self.k}")

    def X(self, z):
        z = np.asarray(z, dtype=float)
        return z * (self.C1 * z ** self.m + 2.0 * self.k / self.m)

    def dX(self, z):
        z = np.asarray(z, dtype=float)
        return (self.m + 1) * self.C1 * z ** self.m + 2.0 * self.k / self.m

    def d2X(self, z):
        z = np.asarray(z, dtype=float)
        return self.m * (self.m + 1) * self.C1 * z ** (self.m - 1)

    def ode_rhs(self, z):
        """Right-hand side ``(m+1) X / z - 2k`` of the first order ODE for ``X``."""
        return (self.m + 1) * self.X(z) / np.asarray(z, dtype=float) - 2.0 * self.k

    def ode_residual(self, z):
        return self.dX(z) - self.ode_rhs(z)

    def with_interval(self, zmin: float, zmax: float) -> "MomentumProfile":
        return MomentumProfile(self.m, self.C1, self.k, zmin, zmax)


@dataclass(frozen=True)
class RicciPrediction:
    """Ricci eigenvalues on the vertical (``lambda1``) and horizontal (``lambda2``) parts."""

    m: int
    C1: float

    def lambda1(self, z):
        return -self.m ** 2 * self.C1 * np.asarray(z, dtype=float) ** (self.m - 1)

    def lambda2(self, z):
        return -self.m * self.C1 * np.asarray(z, dtype=float) ** (self.m - 1)

    def scal(self, z):
        m = self.m
        return -2 * m * (2 * m - 1) * self.C1 * np.asarray(z, dtype=float) ** (m - 1)

    @classmethod
    def from_profile(cls, profile: MomentumProfile) -> "RicciPrediction":
        return cls(profile.m, profile.C1)


@dataclass(frozen=True)
class RadialModel:
    """Fibre moment map ``G(r)`` for ``k != 0``."""

    m: int
    k: float
    C1: float
    lam: float

    def __post_init__(self):
        if self.k == 0:
            raise ProfileError("the radial closed form needs k != 0")
        if self.lam <= 0:
            raise ProfileError("lambda must be positive")

    def Gm(self, r):
        s = self.lam * np.asarray(r, dtype=float) ** (2 * self.k)
        return 2 * self.k * s / (self.m * (1 - self.C1 * s))

    def G(self, r):
        gm = self.Gm(r)
        if np.any(gm <= 0):
            raise ProfileError("G^m is not positive at the requested radii")
        return gm ** (1.0 / self.m)

    def dG(self, r):
        r = np.asarray(r, dtype=float)
        G = self.G(r)
        return G * (self.C1 * G ** self.m + 2 * self.k / self.m) / r

    def ode_residual(self, r):
        """``r G' - G (C1 G^m + 2k/m)`` with ``G'`` differentiated from the closed form."""
        r = np.asarray(r, dtype=float)
        s = self.lam * r ** (2 * self.k)
        dGm = 2 * self.k * (2 * self.k) * s / (self.m * r * (1 - self.C1 * s) ** 2)
        G = self.G(r)
        dG = dGm / (self.m * G ** (self.m - 1))
        return r * dG - G * (self.C1 * G ** self.m + 2 * self.k / self.m)

    @property
    def a(self):
        if self.C1 == 0:
            return None
        v = self.C1 * self.lam
        return v ** (-1.0 / (2 * self.k)) if v > 0 else None


@dataclass(frozen=True)
class DomainDescriptor:
    """Maximal radial domain ``rmin < r < rmax`` with a case tag."""

    tag: str
    a: float | None
    rmin: float
    rmax: float
    case: str

    def contains(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return (r > self.rmin) & (r < self.rmax)

    def to_dict(self) -> dict:
        return {"tag": self.tag, "a": self.a, "rmin": self.rmin,
                "rmax": None if np.isinf(self.rmax) else self.rmax, "case": self.case}


def maximal_domain(C1: float, k: float, lam: float) -> DomainDescriptor:
    """Four-case table for the maximal radial domain of the pair.

    ``case`` is ``"i"`` (``k > 0 > C1``), ``"ii"`` (``C1 > 0 > k``), ``"iii"``
    (``C1, k > 0``) or ``"iv"`` (``C1 = 0``) with ``a = (C1 lam)^(-1/(2k))``.
    Sign patterns outside the table (``k = 0``, or ``k < 0`` with ``C1 < 0``)
    fall back to :func:`positivity_domain` with ``case = "outside"``.

    In case ``"ii"`` the table gives ``{r > a}`` while the positivity conditions
    ``G, G' > 0`` hold on ``{0 < r < a}``; see :func:`positivity_domain`.
    """
    _check_params(C1, k, lam)
    inf = float("inf")
    if C1 == 0:
        return DomainDescriptor("punctured", None, 0.0, inf, "iv")
    if k > 0 > C1:
        return DomainDescriptor("punctured", None, 0.0, inf, "i")
    if C1 > 0 > k:
        a = (C1 * lam) ** (-1.0 / (2 * k))
        return DomainDescriptor("r>a", a, a, inf, "ii")
    if C1 > 0 and k > 0:
        a = (C1 * lam) ** (-1.0 / (2 * k))
        return DomainDescriptor("r<a", a, 0.0, a, "iii")
    d = positivity_domain(C1, k, lam)
    return DomainDescriptor(d.tag, d.a, d.rmin, d.rmax, "outside")


def _check_params(C1, k, lam):
    if C1 == 0 and k == 0:
        raise ProfileError("C1 = k = 0 is degenerate (X identically zero)")
    if lam <= 0:
        raise ProfileError("lambda must be positive")


def positivity_domain(C1: float, k: float, lam: float) -> DomainDescriptor:
    """Set of radii where ``G > 0`` and ``G' > 0``, from the closed forms.

    For ``C1 > 0 > k`` these hold on ``0 < r < a``; for ``k < 0 <= -C1`` no radius
    works.  ``k = 0`` uses the logarithmic solution ``G^-m = -(m/2) C1 log(lam r^2)``,
    which is admissible only for ``C1 > 0``.
    """
    _check_params(C1, k, lam)
    inf = float("inf")
    if k == 0:
        a = lam ** -0.5
        if C1 > 0:
            return DomainDescriptor("r<a", a, 0.0, a, "k=0, C1>0")
        return DomainDescriptor("empty", None, 0.0, 0.0, "k=0, C1<0")
    if k > 0:
        if C1 < 0:
            return DomainDescriptor("punctured", None, 0.0, inf, "k>0>C1")
        if C1 == 0:
            return DomainDescriptor("punctured", None, 0.0, inf, "C1=0")
        a = (C1 * lam) ** (-1.0 / (2 * k))
        return DomainDescriptor("r<a", a, 0.0, a, "C1,k>0")
    # k < 0
    if C1 > 0:
        a = (C1 * lam) ** (-1.0 / (2 * k))
        return DomainDescriptor("r<a", a, 0.0, a, "C1>0>k")
    return DomainDescriptor("empty", None, 0.0, 0.0, "k<0, C1<=0")


def positivity_scan(m: int, C1: float, k: float, lam: float, radii) -> np.ndarray:
    """Pointwise test of ``G > 0`` and ``G' > 0`` directly from the closed forms."""
    r = np.asarray(radii, dtype=float)
    if k == 0:
        u = -0.5 * m * C1 * np.log(lam * r ** 2)  # G^-m
        ok = u > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            G = np.where(ok, np.abs(u) ** (-1.0 / m), np.nan)
            dG = G * C1 * G ** m / r
        return ok & (dG > 0)
    s = lam * r ** (2 * k)
    with np.errstate(invalid="ignore", divide="ignore"):
        Gm = 2 * k * s / (m * (1 - C1 * s))
        G = np.where(Gm > 0, np.abs(Gm) ** (1.0 / m), np.nan)
        dG = G * (C1 * G ** m + 2 * k / m) / r
    return (Gm > 0) & np.isfinite(Gm) & (dG > 0)


def tonnesen_ricci(profile: MomentumProfile, z):
    """``(Lambda1, Lambda2)`` from the general Ricci-form formula for Calabi metrics."""
    m = profile.m
    z = np.asarray(z, dtype=float)
    X, dX, d2X = profile.X(z), profile.dX(z), profile.d2X(z)
    L1 = -0.5 * (d2X + (m - 1) * (dX * z - X) / z ** 2)
    L2 = -(dX + (m - 1) * X / z) / (2 * z)
    return L1, L2


def norm_predictions(profile: MomentumProfile, C2: float, z):
    """``(|tau|^2, |phi|^2) = (C2 X(z), C2 z^2 / 2)``."""
    if C2 <= 0:
        raise ProfileError("C2 must be positive")
    z = np.asarray(z, dtype=float)
    return C2 * profile.X(z), 0.5 * C2 * z ** 2


def profile_csv(profile: MomentumProfile, zs, C2: float = 1.0) -> str:
    pred = RicciPrediction.from_profile(profile)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for z in zs:
        t2, p2 = norm_predictions(profile, C2, z)
        row = [z, profile.X(z), profile.dX(z), pred.lambda1(z), pred.lambda2(z), pred.scal(z), t2, p2]
        w.writerow([f"{float(v):.17g}" for v in row])
    return buf.getvalue()


def profile_ode_check(profile: MomentumProfile, zmin: float, zmax: float, n: int = 50,
                      tol_closed: float = 1e-12, tol_rk: float = 1e-9, seed: int = 0):
    """Closed-form ODE residual and an adaptive RK oracle for ``X``.

    Returns two :class:`CheckReport` entries.
    """
    prof = profile.with_interval(zmin, zmax)
    rng = np.random.default_rng(seed)
    zs = np.sort(rng.uniform(zmin, zmax, n))
    acc = ResidualAccumulator("profile ODE (closed form)", "X' = (m+1) X / z - 2k", tol_closed, seed)
    for z in zs:
        acc.add(abs(prof.ode_residual(z)), [abs(prof.dX(z)), abs(prof.ode_rhs(z))])
    rep1 = acc.report()

    t0 = time.perf_counter()
    sol = solve_ivp(lambda z, y: [(prof.m + 1) * y[0] / z - 2 * prof.k], (zmin, zmax),
                    [float(prof.X(zmin))], method="RK45", rtol=1e-12, atol=1e-14, dense_output=True)
    num = sol.sol(zs)[0]
    exact = prof.X(zs)
    rel = np.abs(num - exact) / np.maximum(np.abs(exact), 1e-14)
    rep2 = CheckReport("profile ODE (RK45 oracle)", "X(z) = z (C1 z^m + 2k/m)", seed, n,
                       float(np.max(np.abs(num - exact))), float(np.max(rel)), tol_rk,
                       bool(np.max(rel) <= tol_rk), 1e3 * (time.perf_counter() - t0))
    return [rep1, rep2]


def radial_ode_check(model: RadialModel, rmin: float, rmax: float, n: int = 50,
                     tol_closed: float = 1e-12, tol_rk: float = 1e-9, seed: int = 0):
    """Closed-form residual of ``r G' = G (C1 G^m + 2k/m)``, monotonicity and an RK oracle."""
    dom = positivity_domain(model.C1, model.k, model.lam)
    if not (dom.contains(rmin) and dom.contains(rmax)):
        raise ProfileError(f"r-interval [{rmin}, {rmax}] leaves the maximal domain ({dom.tag})")
    rng = np.random.default_rng(seed)
    rs = np.sort(rng.uniform(rmin, rmax, n))
    acc = ResidualAccumulator("radial ODE (closed form)", "r G' = G (C1 G^m + 2k/m)", tol_closed, seed)
    G = model.G(rs)
    rhs = G * (model.C1 * G ** model.m + 2 * model.k / model.m)
    res = model.ode_residual(rs)
    for i in range(n):
        acc.add(abs(res[i]), [abs(rhs[i])])
    rep1 = acc.report()
    mono = bool(np.all(model.dG(rs) > 0) and np.all(G > 0))
    rep1.values["monotone"] = mono

    t0 = time.perf_counter()
    m, C1, k = model.m, model.C1, model.k
    sol = solve_ivp(lambda r, y: [y[0] * (C1 * y[0] ** m + 2 * k / m) / r], (rmin, rmax),
                    [float(model.G(rmin))], method="RK45", rtol=1e-12, atol=1e-14, dense_output=True)
    num = sol.sol(rs)[0]
    rel = np.abs(num - G) / np.abs(G)
    rep2 = CheckReport("radial ODE (RK45 oracle)", "G^m = 2k lam r^2k / (m (1 - C1 lam r^2k))",
                       seed, n, float(np.max(np.abs(num - G))), float(np.max(rel)), tol_rk,
                       bool(np.max(rel) <= tol_rk and mono), 1e3 * (time.perf_counter() - t0))
    return [rep1, rep2]
