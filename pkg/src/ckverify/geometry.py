"""Kaehler geometry from a potential, evaluated through truncated jets.

A :class:`KahlerChart` carries a potential ``K(z, zbar)`` with
``g_{i jbar} = d_i d_jbar K``.  :class:`LocalGeometry` expands metric,
Christoffel symbols and curvature about one point, and provides the
differential operators on form-valued jets: ``del``, ``delbar``, ``nabla``,
the codifferentials, ``L_omega`` and its adjoint, the Ricci action, the
curvature operator and the Laplacians.

Jet-level operators sum over frames through the cometric ``G^{ab}`` rather
than an explicit orthonormal frame; the pointwise versions in
:mod:`ckverify.exterior` use Gram-Schmidt frames, which gives two routes to
compare.

Order bookkeeping: a potential jet of order ``N`` gives ``g`` to order ``N-2``,
Christoffel symbols to ``N-3`` and curvature to ``N-4``.  Products truncate to
the smaller order automatically.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exterior import (CurvatureAtPoint, MetricPoint, PqForm, TangentVector, algebra,
                       inner_any)
from .jets import Jet, jeinsum, jet_det, jet_inv, stack

__all__ = [
    "ChartDomainError",
    "Coords",
    "KahlerChart",
    "LocalGeometry",
    "FormField",
    "ScalarField",
    "VectorField",
    "flat_chart",
    "fubini_study_chart",
    "metric_at",
    "curvature_at",
    "jwedge",
    "form_jet",
]


class ChartDomainError(ValueError):
    """Raised when a point leaves the chart domain or the metric degenerates."""


class Coords:
    """Coordinate jets ``z^i``, ``zbar^i`` about a base point.

    Charts may attach extra jets (for example a moment map) in :attr:`extras`.
    """

    def __init__(self, chart: "KahlerChart", pt, order: int):
        self.chart = chart
        self.m = chart.m
        self.pt = np.asarray(pt, dtype=complex)
        self.order = order
        n = 2 * self.m
        self.z = [Jet.variable(n, order, i, self.pt[i]) for i in range(self.m)]
        self.zb = [Jet.variable(n, order, self.m + i, np.conj(self.pt[i])) for i in range(self.m)]
        self.extras: dict = {}

    def const(self, value) -> Jet:
        return Jet.constant(2 * self.m, self.order, value)

    def zero_form(self) -> Jet:
        return Jet.constant(2 * self.m, self.order, np.zeros(algebra(self.m).dim, dtype=complex))


def form_jet(coords: Coords, terms) -> Jet:
    """Assemble a form jet from ``[(coefficient jet or number, I, J), ...]``."""
    alg = algebra(coords.m)
    order = min([coords.order] + [t[0].order for t in terms if isinstance(t[0], Jet)])
    out = coords.zero_form().truncate(order)
    c = out.c
    for coef, I, J in terms:
        A = alg.mask(I, J)
        if isinstance(coef, Jet):
            c[:, A] += coef.truncate(order).c
        else:
            c[0, A] += coef
    return out


def jwedge(a: Jet, b: Jet) -> Jet:
    """Exterior product of two form-valued jets (last axis is the form index)."""
    order = min(a.order, b.order)
    a, b = a.truncate(order), b.truncate(order)
    sp = a.space
    dim = a.shape[-1]
    m = (dim.bit_length() - 1) // 2
    alg = algebra(m)
    pi, pj, red = sp.products
    A = a.c[pi][..., alg.pair_a]
    B = b.c[pj][..., alg.pair_b]
    if A.ndim < B.ndim:
        A = A.reshape(A.shape[:1] + (1,) * (B.ndim - A.ndim) + A.shape[1:])
    elif B.ndim < A.ndim:
        B = B.reshape(B.shape[:1] + (1,) * (A.ndim - B.ndim) + B.shape[1:])
    prod = A * B * alg.pair_sign
    lead = prod.shape[:-1]
    flat = prod.reshape(-1, prod.shape[-1])
    out = np.asarray((alg.pair_reduce @ flat.T).T).reshape(lead + (dim,))
    tail = out.shape[1:]
    res = red @ out.reshape(out.shape[0], -1)
    return Jet(sp, np.asarray(res).reshape((sp.n,) + tail))


def _wedge_gen(alg, a, F: Jet) -> Jet:
    return Jet(F.space, alg.apply_wedge_gen(a, F.c))


def _contract_gen(alg, a, F: Jet) -> Jet:
    return Jet(F.space, alg.apply_contract_gen(a, F.c))


def _box_sampler(box):
    box = np.asarray(box, dtype=float)

    def sample(rng, n):
        u = rng.uniform(box[:, 0], box[:, 1], size=(n, box.shape[0]))
        return u[:, 0::2] + 1j * u[:, 1::2]

    return sample


class KahlerChart:
    """A Kaehler potential on a coordinate domain.

    Parameters
    ----------
    m : int
        Complex dimension.
    potential : callable
        ``potential(coords) -> Jet``, a real function written in terms of
        ``coords.z`` and ``coords.zb``.
    box : array_like, optional
        ``2m`` real intervals ``(lo, hi)`` for ``x_1, y_1, ..., x_m, y_m``.
    sampler : callable, optional
        ``sampler(rng, n) -> (n, m)`` complex points; overrides ``box``.
    excluded : callable, optional
        ``excluded(pt) -> bool`` for loci to avoid.
    prepare : callable, optional
        ``prepare(coords)`` attaches extra jets before the potential is evaluated.
    """

    def __init__(self, m: int, potential: Callable, *, box=None, sampler=None, excluded=None,
                 name: str = "chart", prepare: Callable | None = None, descriptor: dict | None = None):
        self.m = m
        self.potential = potential
        self.name = name
        self.box = None if box is None else np.asarray(box, dtype=float)
        self._sampler = sampler or (_box_sampler(box) if box is not None else None)
        self.excluded = excluded
        self.prepare = prepare
        self.descriptor = dict(descriptor or {"kind": name, "m": m})
        self._geo_cache: dict = {}

    def coords(self, pt, order: int) -> Coords:
        c = Coords(self, pt, order)
        if self.prepare is not None:
            self.prepare(c)
        return c

    def in_domain(self, pt) -> bool:
        pt = np.asarray(pt, dtype=complex)
        if self.box is not None:
            x = np.empty(2 * self.m)
            x[0::2], x[1::2] = pt.real, pt.imag
            if np.any(x < self.box[:, 0]) or np.any(x > self.box[:, 1]):
                return False
        return not (self.excluded is not None and self.excluded(pt))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self._sampler is None:
            raise ChartDomainError("chart has no sampling domain")
        out = []
        while len(out) < n:
            for p in self._sampler(rng, max(n, 8)):
                if self.excluded is None or not self.excluded(p):
                    out.append(p)
                if len(out) == n:
                    break
        return np.array(out)

    def geometry(self, pt, order: int = 4) -> "LocalGeometry":
        key = (tuple(np.round(np.asarray(pt, dtype=complex), 15)), order)
        geo = self._geo_cache.get(key)
        if geo is None:
            if len(self._geo_cache) > 256:
                self._geo_cache.clear()
            geo = LocalGeometry(self, pt, order)
            self._geo_cache[key] = geo
        return geo


def flat_chart(m: int, half_width: float = 1.0) -> KahlerChart:
    """``C^m`` with ``g = sum dx^2 + dy^2``, potential ``|z|^2 / 2``."""

    def pot(c: Coords) -> Jet:
        return 0.5 * sum(z * zb for z, zb in zip(c.z, c.zb))

    box = [(-half_width, half_width)] * (2 * m)
    return KahlerChart(m, pot, box=box, name="flat", descriptor={"kind": "flat", "m": m})


def fubini_study_chart(m: int, scale: float, half_width: float = 1.0) -> KahlerChart:
    """Affine chart of ``CP^m`` with potential ``scale * log(1 + |z|^2)``.

    The Einstein constant is ``Ric = (m + 1) / scale * g``.
    """

    def pot(c: Coords) -> Jet:
        s = 1.0 + sum(z * zb for z, zb in zip(c.z, c.zb))
        return scale * s.log()

    box = [(-half_width, half_width)] * (2 * m)
    return KahlerChart(m, pot, box=box, name="fs",
                       descriptor={"kind": "fs", "m": m, "scale": scale})


class LocalGeometry:
    """Metric, connection and curvature jets about one point.

    Parameters
    ----------
    chart : KahlerChart
    pt : array_like
        Complex coordinates of the base point.
    order : int
        Order of the potential jet (2..7).
    """

    def __init__(self, chart: KahlerChart, pt, order: int = 4):
        if order < 2:
            raise ValueError("potential jet order must be at least 2")
        self.chart = chart
        self.m = chart.m
        self.n = 2 * chart.m
        self.pt = np.asarray(pt, dtype=complex)
        self.order = order
        self.alg = algebra(self.m)
        self.coords = chart.coords(self.pt, order)
        self.potential = chart.potential(self.coords)
        m = self.m
        d1 = [self.potential.d(i) for i in range(m)]
        self.H = stack([stack([d1[i].d(m + j) for j in range(m)]) for i in range(m)], axis=-2)
        H0 = self.H.value
        try:
            self.metric = MetricPoint(H0)
        except ValueError as exc:
            raise ChartDomainError(f"{exc} at point {np.round(self.pt, 6).tolist()}") from None

    # -- metric ---------------------------------------------------------
    @functools.cached_property
    def Hinv(self) -> Jet:
        return jet_inv(self.H)

    def _require(self, need: int, what: str):
        if self.order < need:
            raise ValueError(f"{what} needs a potential jet of order >= {need} (have {self.order})")

    @functools.cached_property
    def dH(self) -> Jet:
        """``dH[a, i, j] = d_a H_ij``, order ``N - 3``."""
        self._require(3, "connection")
        return stack([self.H.d(a) for a in range(self.n)], axis=0)

    @functools.cached_property
    def gamma(self) -> Jet:
        """``Gamma[k, i, j] = Gamma^k_{ij}`` (holomorphic), order ``N - 3``."""
        m = self.m
        dHh = self.dH[:m]  # [i, j, l] = d_i H_jl
        return jeinsum("lk,ijl->kij", self.Hinv, dHh)

    @functools.cached_property
    def gammabar(self) -> Jet:
        """``Gammabar[k, i, j] = Gamma^kbar_{ibar jbar}``."""
        m = self.m
        dHa = self.dH[m:]  # [i, l, j] = d_ibar H_lj
        return jeinsum("kl,ilj->kij", self.Hinv, dHa)

    @functools.cached_property
    def cometric(self) -> Jet:
        m = self.m
        Hi = self.Hinv
        G = np.zeros((Hi.space.n, self.n, self.n), dtype=complex)
        G[:, :m, m:] = np.swapaxes(Hi.c, 1, 2)
        G[:, m:, :m] = Hi.c
        return Jet(Hi.space, G)

    @functools.cached_property
    def g_bilinear(self) -> Jet:
        m = self.m
        G = np.zeros((self.H.space.n, self.n, self.n), dtype=complex)
        G[:, :m, m:] = self.H.c
        G[:, m:, :m] = np.swapaxes(self.H.c, 1, 2)
        return Jet(self.H.space, G)

    @functools.cached_property
    def omega(self) -> Jet:
        return self._form11(1j * self.H)

    def _form11(self, M: Jet) -> Jet:
        m = self.m
        c = np.zeros((M.space.n, self.alg.dim), dtype=complex)
        for i in range(m):
            for j in range(m):
                c[:, self.alg.mask((i + 1,), (j + 1,))] = M.c[:, i, j]
        return Jet(M.space, c)

    # -- curvature ------------------------------------------------------
    @functools.cached_property
    def riemann(self) -> Jet:
        """``R_{i jbar k lbar}`` (positive on Fubini-Study), order ``N - 4``."""
        self._require(4, "curvature")
        m = self.m
        ddH = stack([stack([self.dH[k].d(m + l) for l in range(m)], axis=0) for k in range(m)],
                    axis=0)  # [k, l, i, j]
        dHh = self.dH[:m]  # [k, i, q]
        dHa = self.dH[m:]  # [l, p, j]
        t = jeinsum("kiq,qp->kip", dHh, self.Hinv)
        t2 = jeinsum("kip,lpj->ijkl", t, dHa)
        return t2 - ddH.transpose(2, 3, 0, 1)

    @functools.cached_property
    def ricci(self) -> Jet:
        return jeinsum("lk,ijkl->ij", self.Hinv, self.riemann)

    @functools.cached_property
    def ricci_logdet(self) -> Jet:
        """``-d_i d_jbar log det g``, an independent route to the Ricci form."""
        self._require(4, "curvature")
        ld = jet_det(self.H).log()
        m = self.m
        return stack([stack([-ld.d(i).d(m + j) for j in range(m)]) for i in range(m)], axis=-2)

    @functools.cached_property
    def scal(self) -> Jet:
        return 2.0 * jeinsum("ji,ij->", self.Hinv, self.ricci)

    @functools.cached_property
    def rho(self) -> Jet:
        return self._form11(1j * self.ricci)

    @functools.cached_property
    def ricci_bilinear(self) -> Jet:
        m = self.m
        R = self.ricci
        B = np.zeros((R.space.n, self.n, self.n), dtype=complex)
        B[:, :m, m:] = R.c
        B[:, m:, :m] = np.swapaxes(R.c, 1, 2)
        return Jet(R.space, B)

    @functools.cached_property
    def riemann_tensor(self) -> Jet:
        """``R(E_a, E_b, E_c, E_d)`` on coordinate vectors."""
        m = self.m
        Rp = self.riemann.c
        T = np.zeros((Rp.shape[0],) + (self.n,) * 4, dtype=complex)
        for k in range(m):
            for l in range(m):
                for i in range(m):
                    for j in range(m):
                        v = -Rp[:, i, j, k, l]
                        K, L, I, Jb = k, m + l, i, m + j
                        T[:, K, L, I, Jb] = v
                        T[:, L, K, I, Jb] = -v
                        T[:, K, L, Jb, I] = -v
                        T[:, L, K, Jb, I] = v
        return Jet(self.riemann.space, T)

    def curvature_at(self) -> CurvatureAtPoint:
        return CurvatureAtPoint(self.metric, self.riemann.value)

    # -- first-order operators on forms -----------------------------------
    def del_(self, F: Jet) -> Jet:
        return sum(_wedge_gen(self.alg, i, F.d(i)) for i in range(self.m))

    def dbar(self, F: Jet) -> Jet:
        m = self.m
        return sum(_wedge_gen(self.alg, m + i, F.d(m + i)) for i in range(m))

    def d(self, F: Jet) -> Jet:
        return sum(_wedge_gen(self.alg, a, F.d(a)) for a in range(self.n))

    def dolbeault(self, F: Jet):
        return self.del_(F), self.dbar(F)

    def contract(self, X, F: Jet) -> Jet:
        """``X _| F`` for constant components or a vector jet ``X``."""
        if isinstance(X, TangentVector):
            X = X.components
        if isinstance(X, Jet):
            return sum(X[a] * _contract_gen(self.alg, a, F) for a in range(self.n))
        return sum((X[a] * _contract_gen(self.alg, a, F) for a in range(self.n) if X[a] != 0), 0 * F)

    def nabla(self, F: Jet, a: int) -> Jet:
        """``nabla_{E_a} F`` with ``E_a = d/dz^a`` (``a < m``) or ``d/dzbar^(a-m)``."""
        m = self.m
        alg = self.alg
        dF = F.d(a)
        if a < m:
            C = self.gamma[:, a, :]  # [k, j]
            off = 0
        else:
            C = self.gammabar[:, a - m, :]
            off = m
        ks = [_contract_gen(alg, off + k, F) for k in range(m)]
        U = stack([stack([_wedge_gen(alg, off + j, ks[k]) for j in range(m)], axis=0)
                   for k in range(m)], axis=0)  # [k, j, D]
        return dF - jeinsum("kj,kjD->D", C, U)

    def nabla_all(self, F: Jet) -> list:
        return [self.nabla(F, a) for a in range(self.n)]

    def nabla_vec(self, F: Jet, X) -> Jet:
        if isinstance(X, TangentVector):
            X = X.components
        if isinstance(X, Jet):
            return sum(X[a] * self.nabla(F, a) for a in range(self.n))
        return sum((X[a] * self.nabla(F, a) for a in range(self.n) if X[a] != 0), 0 * F)

    def _trace_pairs(self):
        m = self.m
        return [(i, m + j) for i in range(m) for j in range(m)]

    def dstar(self, F: Jet) -> Jet:
        """``d* F = -sum G^{ab} E_a _| nabla_b F``."""
        return self.delstar(F) + self.dbarstar(F)

    def delstar(self, F: Jet) -> Jet:
        """``del* F = -sum (H^-1)_ji d_i _| nabla_jbar F``."""
        m = self.m
        Hi = self.Hinv
        out = None
        nab = [self.nabla(F, m + j) for j in range(m)]
        for i in range(m):
            for j in range(m):
                t = Hi[j, i] * _contract_gen(self.alg, i, nab[j])
                out = t if out is None else out + t
        return -out

    def dbarstar(self, F: Jet) -> Jet:
        """``delbar* F = -sum (H^-1)_ji d_jbar _| nabla_i F``."""
        m = self.m
        Hi = self.Hinv
        out = None
        nab = [self.nabla(F, i) for i in range(m)]
        for i in range(m):
            for j in range(m):
                t = Hi[j, i] * _contract_gen(self.alg, m + j, nab[i])
                out = t if out is None else out + t
        return -out

    def codifferentials(self, F: Jet):
        ds, dbs = self.delstar(F), self.dbarstar(F)
        return ds, dbs, ds + dbs

    def l_omega(self, F: Jet) -> Jet:
        return jwedge(self.omega, F)

    def l_omega_star(self, F: Jet) -> Jet:
        """``L*_omega = i sum (H^-1)_ji iota_{d_i} iota_{d_jbar}``."""
        m = self.m
        Hi = self.Hinv
        out = None
        for j in range(m):
            ij = _contract_gen(self.alg, m + j, F)
            for i in range(m):
                t = Hi[j, i] * _contract_gen(self.alg, i, ij)
                out = t if out is None else out + t
        return 1j * out

    def delstar_kahler(self, F: Jet) -> Jet:
        """``del* = i [L*_omega, delbar]``."""
        return 1j * (self.l_omega_star(self.dbar(F)) - self.dbar(self.l_omega_star(F)))

    def dbarstar_kahler(self, F: Jet) -> Jet:
        """``delbar* = -i [L*_omega, del]``."""
        return -1j * (self.l_omega_star(self.del_(F)) - self.del_(self.l_omega_star(F)))

    # -- algebraic curvature actions ----------------------------------------
    def bilinear_derivation(self, B: Jet, F: Jet) -> Jet:
        """``sum_i B(e_i, .) ^ (e_i _| F)`` for a bilinear form jet ``B[a, c]``."""
        M = jeinsum("ab,ac->bc", self.cometric, B)
        alg = self.alg
        out = None
        for b in range(self.n):
            ib = _contract_gen(alg, b, F)
            for c in range(self.n):
                if not np.any(M.c[:, b, c]):
                    continue
                t = M[b, c] * _wedge_gen(alg, c, ib)
                out = t if out is None else out + t
        return out if out is not None else 0 * F

    def form_to_bilinear(self, alpha: Jet) -> Jet:
        """``alpha(E_a, E_c)`` from a 2-form jet."""
        n = self.n
        c = np.zeros((alpha.space.n, n, n), dtype=complex)
        for a in range(n):
            for b in range(a + 1, n):
                v = alpha.c[:, (1 << a) | (1 << b)]
                c[:, a, b] = v
                c[:, b, a] = -v
        return Jet(alpha.space, c)

    def ric_act(self, F: Jet) -> Jet:
        return self.bilinear_derivation(self.ricci_bilinear, F)

    def commutator(self, alpha: Jet, F: Jet) -> Jet:
        """``[alpha, F] = sum (e_i _| alpha) ^ (e_i _| F)`` for a 2-form jet ``alpha``."""
        return self.bilinear_derivation(self.form_to_bilinear(alpha), F)

    def curv_op(self, F: Jet) -> Jet:
        """``r(F) = sum R(e_i, e_j) ^ (e_i _| e_j _| F)``."""
        G = self.cometric
        T = jeinsum("ab,acef->bcef", G, self.riemann_tensor)
        T = jeinsum("cd,bcef->bdef", G, T)
        n = self.n
        alg = self.alg
        out = None
        for b in range(n):
            for d in range(n):
                if b == d or not np.any(T.c[:, b, d]):
                    continue
                R2 = np.zeros((T.space.n, alg.dim), dtype=complex)
                for e in range(n):
                    for f in range(e + 1, n):
                        R2[:, (1 << e) | (1 << f)] = T.c[:, b, d, e, f]
                inner_ = _contract_gen(alg, b, _contract_gen(alg, d, F))
                t = jwedge(Jet(T.space, R2), inner_)
                out = t if out is None else out + t
        return out if out is not None else 0 * F

    # -- Laplacians ----------------------------------------------------------
    def rough_laplacian(self, F: Jet) -> Jet:
        """``nabla* nabla F = -sum G^{ab} nabla^2_{a,b} F`` (no Christoffel correction on mixed pairs)."""
        m = self.m
        Hi = self.Hinv
        nb = self.nabla_all(F)
        out = None
        for i in range(m):
            for j in range(m):
                t = Hi[j, i] * (self.nabla(nb[m + j], i) + self.nabla(nb[i], m + j))
                out = t if out is None else out + t
        return -out

    def rough_laplacian_01(self, F: Jet) -> Jet:
        """``(nabla^{0,1})* nabla^{0,1} F = -sum (H^-1)_ji nabla_i nabla_jbar F``."""
        m = self.m
        Hi = self.Hinv
        out = None
        for j in range(m):
            nj = self.nabla(F, m + j)
            for i in range(m):
                t = Hi[j, i] * self.nabla(nj, i)
                out = t if out is None else out + t
        return -out

    def hodge_laplacian(self, F: Jet) -> Jet:
        return self.d(self.dstar(F)) + self.dstar(self.d(F))

    def dbar_laplacian(self, F: Jet) -> Jet:
        return self.dbar(self.dbarstar(F)) + self.dbarstar(self.dbar(F))

    def laplacians(self, F: Jet):
        return self.hodge_laplacian(F), self.dbar_laplacian(F), self.rough_laplacian(F)

    # -- functions and vector fields -----------------------------------------
    def gradient(self, f: Jet) -> Jet:
        """Components of ``grad f`` on ``E_a``."""
        df = f.grad()
        return jeinsum("ab,b->a", self.cometric, df)

    def hessian(self, f: Jet) -> Jet:
        """``Hess f (E_a, E_b) = d_a d_b f - Gamma^c_ab d_c f``."""
        m = self.m
        n = self.n
        df = [f.d(a) for a in range(n)]
        Hs = stack([stack([df[a].d(b) for b in range(n)], axis=0) for a in range(n)], axis=0)
        corr_h = jeinsum("kij,k->ij", self.gamma, stack(df[:m], axis=0))
        corr_a = jeinsum("kij,k->ij", self.gammabar, stack(df[m:], axis=0))
        order = min(Hs.order, corr_h.order)
        Hs = Hs.truncate(order)
        out = Hs.c.copy()
        out[:, :m, :m] -= corr_h.truncate(order).c
        out[:, m:, m:] -= corr_a.truncate(order).c
        return Jet(Hs.space, out)

    def laplacian_fn(self, f: Jet) -> Jet:
        return -jeinsum("ab,ab->", self.cometric, self.hessian(f))

    def nabla_vector(self, X: Jet) -> Jet:
        """``(nabla X)[c, a] = (nabla_{E_a} X)^c``."""
        m = self.m
        n = self.n
        dX = stack([X.d(a) for a in range(n)], axis=-1)  # [c, a]
        gh = jeinsum("kij,j->ki", self.gamma, X[:m])
        ga = jeinsum("kij,j->ki", self.gammabar, X[m:])
        order = min(dX.order, gh.order)
        dX = dX.truncate(order)
        out = dX.c.copy()
        out[:, :m, :m] += gh.truncate(order).c
        out[:, m:, m:] += ga.truncate(order).c
        return Jet(dX.space, out)

    def flat(self, X: Jet) -> Jet:
        """``X^flat`` as a 1-form jet."""
        comps = jeinsum("ab,a->b", self.g_bilinear, X)
        c = np.zeros((comps.space.n, self.alg.dim), dtype=complex)
        for a in range(self.n):
            c[:, 1 << a] = comps.c[:, a]
        return Jet(comps.space, c)

    def lie_derivative(self, X: Jet, F: Jet) -> Jet:
        """Cartan: ``L_X F = X _| dF + d(X _| F)``."""
        return self.contract(X, self.d(F)) + self.d(self.contract(X, F))

    def killing_residuals(self, X: Jet):
        """Values of ``L_X g`` and ``L_X J`` at the base point (as matrices on ``E_a``)."""
        nX = self.nabla_vector(X).value  # [c, a]
        g = self.metric.g_bilinear
        lg = nX.T @ g + g @ nX  # (L_X g)(E_a, E_b) = g(nabla_a X, E_b) + g(E_a, nabla_b X)
        Jm = np.diag(np.r_[1j * np.ones(self.m), -1j * np.ones(self.m)])
        lj = Jm @ nX - nX @ Jm
        return lg, lj

    @functools.cached_property
    def gen_gram(self) -> Jet:
        """Jet of the Gram matrix ``<e^a, e^b>`` on the generators."""
        m = self.m
        Hi = self.Hinv
        C = np.zeros((Hi.space.n, self.n, self.n), dtype=complex)
        C[:, :m, :m] = np.swapaxes(Hi.c, 1, 2)
        C[:, m:, m:] = Hi.c
        return Jet(Hi.space, C)

    def inner_jet(self, F: Jet, G: Jet) -> Jet:
        """Jet of the pointwise function ``<F, G>``."""
        C = self.gen_gram
        order = min(F.order, G.order, C.order)
        F, G, C = F.truncate(order), G.truncate(order), C.truncate(order)
        Gc = G.conj_function()
        used_f = np.flatnonzero(np.any(F.c != 0, axis=0))
        used_g = np.flatnonzero(np.any(Gc.c != 0, axis=0))
        out = Jet.constant(self.n, order, 0j)
        alg = self.alg
        for A in used_f:
            ga = [a for a in range(self.n) if A >> a & 1]
            for B in used_g:
                gb = [b for b in range(self.n) if B >> b & 1]
                if alg.pdeg[A] != alg.pdeg[B] or alg.qdeg[A] != alg.qdeg[B]:
                    continue
                if ga:
                    sub = Jet(C.space, C.c[:, ga][:, :, gb])
                    det = jet_det(sub)
                else:
                    det = 1.0
                out = out + F[A] * Gc[B] * det
        return out

    def norm2_jet(self, F: Jet) -> Jet:
        return self.inner_jet(F, F)

    # -- pointwise helpers ---------------------------------------------------
    def at(self, F: Jet) -> PqForm:
        return PqForm(self.m, F.value)

    def norm(self, F) -> float:
        c = F.value if isinstance(F, Jet) else F.c
        f = PqForm(self.m, c)
        return float(np.sqrt(max(inner_any(self.metric, f, f).real, 0.0)))


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class FormField:
    """A form field given by closed-form coefficient functions.

    ``fn(coords)`` returns a jet with trailing axis of length ``4**m`` whose
    coefficients are the form components in the bitmask basis.
    """

    m: int
    fn: Callable
    bidegree: tuple | None = None
    name: str = ""
    chart: KahlerChart | None = field(default=None, compare=False)

    def jet(self, coords: Coords) -> Jet:
        J = self.fn(coords)
        if J.shape != (algebra(self.m).dim,):
            raise ValueError(f"field {self.name!r} returned shape {J.shape}")
        return J

    def at(self, pt, chart: KahlerChart | None = None) -> PqForm:
        chart = chart or self.chart
        return PqForm(self.m, self.jet(chart.coords(pt, 0)).value)

    def scaled(self, s: complex, name: str | None = None) -> "FormField":
        fn = self.fn
        return FormField(self.m, lambda c: fn(c) * s, self.bidegree, name or f"{s}*{self.name}",
                         self.chart)

    def __add__(self, other: "FormField") -> "FormField":
        f, g = self.fn, other.fn
        bd = self.bidegree if self.bidegree == other.bidegree else None
        return FormField(self.m, lambda c: f(c) + g(c), bd, f"{self.name}+{other.name}", self.chart)


@dataclass(frozen=True)
class ScalarField:
    m: int
    fn: Callable
    name: str = ""
    chart: KahlerChart | None = field(default=None, compare=False)

    def jet(self, coords: Coords) -> Jet:
        return self.fn(coords)


@dataclass(frozen=True)
class VectorField:
    """Vector field with components on ``(d/dz, d/dzbar)`` as a jet of shape ``(2m,)``."""

    m: int
    fn: Callable
    name: str = ""
    chart: KahlerChart | None = field(default=None, compare=False)

    def jet(self, coords: Coords) -> Jet:
        return self.fn(coords)

    def at(self, pt, chart: KahlerChart | None = None) -> TangentVector:
        chart = chart or self.chart
        comps = self.fn(chart.coords(pt, 0)).value
        return TangentVector.from_components(self.m, comps)


def metric_at(chart: KahlerChart, pt) -> MetricPoint:
    """Metric at a point from the order-2 potential jet."""
    return LocalGeometry(chart, pt, 2).metric


def curvature_at(chart: KahlerChart, pt, order: int = 4) -> CurvatureAtPoint:
    if order < 4:
        raise ValueError("curvature needs a potential jet of order >= 4")
    return chart.geometry(pt, order).curvature_at()
