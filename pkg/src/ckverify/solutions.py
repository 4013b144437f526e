"""Explicit special pairs and Hermitian Killing forms.

A special pair ``(phi, tau)`` consists of a primitive ``(1, m-1)``-form and a
``(0, m-1)``-form with

    nabla_X phi = X^{1,0} ^ tau + (i/2) omega ^ (X _| tau),

where ``X^{1,0}`` is the ``(1,0)``-part of the metric dual of ``X``.

Normalizations below were fixed by solving the equation numerically for the
coefficients of each ansatz; they are the canonical representatives with
``|Psi| = 1`` and no parallel part added.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calabi import BaseGeometry, CalabiChart, lift
from .geometry import (Coords, FormField, KahlerChart, ScalarField, VectorField, flat_chart,
                       form_jet, fubini_study_chart, jwedge, _wedge_gen)
from .exterior import algebra
from .jets import Jet, stack
from .residuals import hermitian_killing_check

__all__ = [
    "SpecialPair",
    "HermitianKillingInstance",
    "cone_pair",
    "product_pair",
    "product_pair2",
    "calabi_pair",
    "calabi_id_form",
    "toric_hk",
    "toric_moment_maps",
    "lifted_hk",
    "lifted_toric_hk",
    "BaseVerificationError",
    "solution_descriptor",
]


@dataclass(frozen=True)
class SpecialPair:
    """``phi`` of type ``(1, m-1)`` and ``tau`` of type ``(0, m-1)`` on ``chart``."""

    phi: FormField
    tau: FormField
    chart: KahlerChart
    family: str
    params: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def m(self) -> int:
        return self.chart.m

    @property
    def ricci_flat(self) -> bool:
        return self.family in ("cone", "product", "product2") or (
            self.family == "calabi" and self.params.get("C1", 1) == 0)

    def scaled_tau(self, s: float) -> "SpecialPair":
        """Same pair with ``tau`` multiplied by ``s`` (a negative control)."""
        return SpecialPair(self.phi, self.tau.scaled(s), self.chart, self.family + "-perturbed",
                           dict(self.params, tau_scale=s), self.extras)

    def perturbed(self, field_: FormField, eps: float) -> "SpecialPair":
        """``phi + eps * field_``, a generic perturbation."""
        return SpecialPair(self.phi + field_.scaled(eps), self.tau, self.chart,
                           self.family + "-perturbed", dict(self.params, eps=eps), self.extras)


@dataclass(frozen=True)
class HermitianKillingInstance:
    tau: FormField
    chart: KahlerChart
    provenance: str
    params: dict = field(default_factory=dict)


def _psi(c: Coords, idx, scale: float) -> Jet:
    return form_jet(c, [(scale, (), tuple(idx))])


def _radial(c: Coords, idx) -> Jet:
    """``sum z^i d/dz^i + zbar^i d/dzbar^i`` over the coordinates ``idx`` (0-based)."""
    m = c.m
    comps = [c.const(0j) for _ in range(2 * m)]
    for i in idx:
        comps[i] = c.z[i] * 1.0
        comps[m + i] = c.zb[i] * 1.0
    return stack(comps, axis=-1)


def _contract(c: Coords, X: Jet, F: Jet) -> Jet:
    alg = algebra(c.m)
    out = None
    for a in range(2 * c.m):
        if not np.any(X.c[:, a]):
            continue
        t = X[a] * Jet(F.space, alg.apply_contract_gen(a, F.c))
        out = t if out is None else out + t
    return out


def cone_pair(m: int, half_width: float = 1.0) -> SpecialPair:
    """Flat ``C^m`` with ``V = z d/dz + zbar d/dzbar`` and ``Psi = 2^(-m/2) dzbar^1..m``.

    ``tau = V _| Psi`` and ``phi = 1/4 sum zbar_i dz^i ^ tau``, which is half the
    ``(1,0)``-part of ``V^flat`` wedged with ``tau``.
    """
    if m < 3:
        raise ValueError("m must be >= 3")
    chart = flat_chart(m, half_width)
    scale = 2.0 ** (-m / 2)
    allidx = list(range(m))

    def tau(c: Coords) -> Jet:
        return _contract(c, _radial(c, allidx), _psi(c, range(1, m + 1), scale))

    def phi(c: Coords) -> Jet:
        v10 = form_jet(c, [(0.25 * c.zb[i], (i + 1,), ()) for i in range(m)])
        return jwedge(v10, tau(c))

    def V(c: Coords) -> Jet:
        return _radial(c, allidx)

    def K(c: Coords) -> Jet:
        # K = -J V: components -i z on d/dz and +i zbar on d/dzbar
        comps = [c.z[i] * -1j for i in range(m)] + [c.zb[i] * 1j for i in range(m)]
        return stack(comps, axis=-1)

    def p(c: Coords) -> Jet:
        return 0.5 * sum(z * zb for z, zb in zip(c.z, c.zb))

    extras = {"V": VectorField(m, V, "V", chart), "K": VectorField(m, K, "K", chart),
              "p": ScalarField(m, p, "p", chart), "k": float(m * m)}
    return SpecialPair(FormField(m, phi, (1, m - 1), "phi", chart),
                       FormField(m, tau, (0, m - 1), "tau", chart), chart, "cone", {"m": m}, extras)


def _product_parts(c: Coords):
    """Building blocks on ``C x C^(m-1)`` with ``w = z^1``."""
    m = c.m
    nidx = list(range(1, m))
    psiN = _psi(c, range(2, m + 1), 2.0 ** (-(m - 1) / 2))
    vpsi = _contract(c, _radial(c, nidx), psiN)
    omC = form_jet(c, [(0.5j, (1,), (1,))])
    omN = form_jet(c, [(0.5j, (i + 1,), (i + 1,)) for i in nidx])
    dw = form_jet(c, [(1.0, (1,), ())])
    dwb = form_jet(c, [(1.0, (), (1,))])
    wb = c.zb[0]
    vN10 = form_jet(c, [(0.5 * c.zb[i], (i + 1,), ()) for i in nidx])
    return psiN, vpsi, omC, omN, dw, dwb, wb, vN10


def product_pair(m: int, half_width: float = 1.0) -> SpecialPair:
    """``C x C^(m-1)``: ``tau = Psi_N`` and
    ``phi = (i/2)(omega_C - omega_N) ^ (V_N _| Psi_N) + (wbar/2) dw ^ Psi_N``.
    """
    if m < 3:
        raise ValueError("m must be >= 3")
    chart = flat_chart(m, half_width)

    def tau(c):
        return _product_parts(c)[0]

    def phi(c):
        psiN, vpsi, omC, omN, dw, dwb, wb, vN10 = _product_parts(c)
        return 0.5j * jwedge(omC - omN, vpsi) + 0.5 * (wb * jwedge(dw, psiN))

    return SpecialPair(FormField(m, phi, (1, m - 1), "phi", chart),
                       FormField(m, tau, (0, m - 1), "tau", chart), chart, "product", {"m": m})


def product_pair2(m: int, half_width: float = 1.0) -> SpecialPair:
    """Second product solution: ``tau = wbar Psi_N - dwbar ^ (V_N _| Psi_N)`` and
    ``phi = (i/2) wbar (omega_C - omega_N) ^ (V_N _| Psi_N) + (wbar^2/4) dw ^ Psi_N
    + (1/2) dwbar ^ V_N^{1,0} ^ (V_N _| Psi_N)``, with ``V_N^{1,0}`` the ``(1,0)``-part of ``V_N^flat``.
    """
    if m < 3:
        raise ValueError("m must be >= 3")
    chart = flat_chart(m, half_width)

    def tau(c):
        psiN, vpsi, omC, omN, dw, dwb, wb, vN10 = _product_parts(c)
        return wb * psiN - jwedge(dwb, vpsi)

    def phi(c):
        psiN, vpsi, omC, omN, dw, dwb, wb, vN10 = _product_parts(c)
        return (0.5j * (wb * jwedge(omC - omN, vpsi)) + 0.25 * (wb * wb * jwedge(dw, psiN))
                + 0.5 * jwedge(dwb, jwedge(vN10, vpsi)))

    return SpecialPair(FormField(m, phi, (1, m - 1), "phi", chart),
                       FormField(m, tau, (0, m - 1), "tau", chart), chart, "product2", {"m": m})


def calabi_id_form(chart: CalabiChart, exponent: float | None = None) -> FormField:
    """The horizontal ``(0, m-1)``-form used to build ``tau`` on a Calabi chart.

    It is the weight ``-k`` lift of ``(1 + |zeta|^2)^s dzetabar^1..(m-1)`` with
    ``s = exponent`` (default ``-m``; on the flat base the factor
    is absent).
    """
    base = chart.base
    n = base.n
    s = -chart.m if exponent is None else exponent

    def gamma(c: Coords) -> Jet:
        if base.kind == "flat":
            coef = c.const(1.0 + 0j)
        else:
            S = 1.0 + sum(c.z[i] * c.zb[i] for i in range(n))
            coef = S.power(s) if s != 0 else c.const(1.0 + 0j)
        return form_jet(c, [(coef, (), tuple(range(1, n + 1)))])

    return lift(chart, gamma, -base.k, (0, n), name="id")


def calabi_pair(chart: CalabiChart, exponent: float | None = None) -> SpecialPair:
    """``tau = z^m id`` and ``phi = (z / X(z)) dz ^ tau`` on a Calabi chart (holomorphic part of ``dz``)."""
    m = chart.m
    idf = calabi_id_form(chart, exponent)

    def tau(c):
        return c.extras["z"] ** m * idf.jet(c)

    def phi(c):
        z = c.extras["z"]
        dz = form_jet(c, [(z.d(i), (i + 1,), ()) for i in range(m)])
        return (z / chart.X_jet(c)) * jwedge(dz, tau(c))

    params = {"m": m, "C1": chart.profile.C1, "k": chart.profile.k, "base": chart.base.kind,
              "lambda": chart.lam, "zmin": chart.profile.zmin, "zmax": chart.profile.zmax}
    extras = {"K": VectorField(m, chart.killing_jet, "K", chart),
              "JK": VectorField(m, chart.jk_jet, "JK", chart)}
    return SpecialPair(FormField(m, phi, (1, m - 1), "phi", chart),
                       FormField(m, tau, (0, m - 1), "tau", chart), chart, "calabi", params, extras)


def toric_moment_maps(chart: KahlerChart, p: int):
    """Moment maps ``t_i`` of the rotations ``z^i -> e^(i s) z^i`` for ``i < p``.

    Flat charts use ``|z_i|^2 / 2``; Fubini-Study charts ``c |z_i|^2 / (1 + |z|^2)``.
    Returns ``(moment_map_fns, killing_field_fns)``.
    """
    kind = chart.descriptor.get("kind")
    m = chart.m
    if p > m:
        raise ValueError("p must not exceed m")

    def t_fn(i):
        def t(c: Coords) -> Jet:
            if kind == "flat":
                return 0.5 * c.z[i] * c.zb[i]
            S = 1.0 + sum(c.z[j] * c.zb[j] for j in range(m))
            return chart.descriptor["scale"] * c.z[i] * c.zb[i] / S
        return t

    def k_fn(i):
        def K(c: Coords) -> Jet:
            comps = [c.const(0j) for _ in range(2 * m)]
            comps[i] = c.z[i] * -1j
            comps[m + i] = c.zb[i] * 1j
            return stack(comps, axis=-1)
        return K

    if kind not in ("flat", "fs"):
        raise ValueError(f"toric moment maps are provided for flat and Fubini-Study charts, not {kind!r}")
    return [t_fn(i) for i in range(p)], [k_fn(i) for i in range(p)]


def _dbar_fn(c: Coords, f: Jet) -> Jet:
    m = c.m
    return form_jet(c, [(f.d(m + i), (), (i + 1,)) for i in range(m)])


def toric_form(c: Coords, ts) -> Jet:
    """``sum (-1)^(i-1) t_i dbar t_1 ^ .. (omit i) .. ^ dbar t_p``."""
    p = len(ts)
    vals = [t(c) for t in ts]
    if p == 1:
        return form_jet(c, [(vals[0], (), ())])
    dts = [_dbar_fn(c, v) for v in vals]
    out = None
    for i in range(p):
        rest = [dts[j] for j in range(p) if j != i]
        w = rest[0]
        for r in rest[1:]:
            w = jwedge(w, r)
        t = ((-1) ** i) * (vals[i] * w)
        out = t if out is None else out + t
    return out


def toric_hk(chart: KahlerChart, p: int) -> HermitianKillingInstance:
    """Hermitian Killing ``(0, p-1)``-form built from ``p`` torus moment maps."""
    ts, _ = toric_moment_maps(chart, p)
    m = chart.m

    def tau(c):
        return toric_form(c, ts)

    return HermitianKillingInstance(FormField(m, tau, (0, p - 1), f"toric{p}", chart), chart, "toric",
                                    {"p": p, "chart": chart.descriptor})


class BaseVerificationError(ValueError):
    """A base input to :func:`lifted_hk` is not Hermitian Killing on the base."""


def lifted_hk(chart: CalabiChart, tau1, tau2, p: int, weight: float = 0.0, verify: bool = True,
              tol: float = 1e-8) -> HermitianKillingInstance:
    """``tau = dbar(z^p lift(tau1)) + z^(p+1) lift(tau2)``.

    ``tau1`` and ``tau2`` are callables on base coordinates returning form jets
    of types ``(0, p-1)`` and ``(0, p)`` on the base (or ``None`` for zero).
    With ``verify`` both are first checked against the Hermitian Killing
    equation on the base chart.
    """
    m = chart.m
    n = chart.base.n
    if verify:
        bchart = chart.base.chart()
        for gam, bideg in ((tau1, (0, p - 1)), (tau2, (0, p))):
            if gam is None:
                continue
            rep = hermitian_killing_check(FormField(n, gam, bideg, "base", bchart), 5, tol=tol)
            if not rep.passed:
                raise BaseVerificationError(
                    f"base form of type {bideg} is not Hermitian Killing (residual {rep.max_rel:.2e})")
    l1 = lift(chart, tau1, weight, (0, p - 1), "tau1") if tau1 is not None else None
    l2 = lift(chart, tau2, weight, (0, p), "tau2") if tau2 is not None else None
    alg = algebra(m)

    def tau(c):
        z = c.extras["z"]
        out = c.zero_form()
        if l1 is not None:
            g = z ** p * l1.jet(c)
            out = out + sum(_wedge_gen(alg, m + i, g.d(m + i)) for i in range(m))
        if l2 is not None:
            out = out + z ** (p + 1) * l2.jet(c)
        return out

    return HermitianKillingInstance(FormField(m, tau, (0, p), "lifted", chart), chart, "lifted",
                                    {"p": p, "weight": weight, "chart": chart.descriptor})


def lifted_toric_hk(chart: CalabiChart, p: int) -> HermitianKillingInstance:
    """``lifted_hk`` with ``tau1`` the toric form of ``p`` base moment maps and ``tau2 = 0``."""
    ts, _ = toric_moment_maps(chart.base.chart(), p)
    return lifted_hk(chart, lambda c: toric_form(c, ts), None, p)


def solution_descriptor(obj) -> dict:
    if isinstance(obj, SpecialPair):
        return {"family": obj.family, "m": obj.m, "params": obj.params, "chart": obj.chart.descriptor}
    return {"family": obj.provenance, "m": obj.chart.m, "params": obj.params}
