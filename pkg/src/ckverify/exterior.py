"""Pointwise complex exterior algebra on C^m.

A form is stored as a dense complex vector over the full exterior algebra of
the 2m complex generators ``dz^1..dz^m, dzbar^1..dzbar^m``.  The basis element
with bitmask ``A`` is the wedge of the generators whose bits are set, taken in
increasing generator order, so ``dz^I ^ dzbar^J`` with the holomorphic factors
first.  Bits ``0..m-1`` are ``dz^i`` and bits ``m..2m-1`` are ``dzbar^i``.

Conventions
-----------
* ``J d/dx = d/dy`` so ``J d/dz = i d/dz`` and ``dz^i`` spans the (1,0)-forms.
* ``g_{i jbar} = H_{ij}``; the Kaehler form is ``omega = i H_{ij} dz^i ^ dzbar^j``
  and ``omega(X, Y) = g(JX, Y)``.
* Forms are evaluated with the determinant convention, ``(e^1^e^2)(E_1,E_2) = 1``.
* ``X _| a`` inserts ``X`` into the first slot.
* The Hermitian inner product is sesquilinear in the second argument and has
  no ``1/p!`` factor, so ``|dz|^2 = 2`` and ``|omega|^2 = m`` on flat space.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

__all__ = [
    "Algebra",
    "algebra",
    "PqForm",
    "TangentVector",
    "MetricPoint",
    "CurvatureAtPoint",
    "wedge",
    "contract",
    "interior",
    "j_act",
    "commutator",
    "l_omega",
    "l_omega_star",
    "l_alpha_star",
    "primitive_part",
    "ric_act",
    "curv_op",
    "antisym_trace_split",
    "inner",
    "inner_any",
    "norm",
    "normalize_volume",
    "evaluate",
    "flat",
    "sharp10",
]


def _popcount(x: int) -> int:
    return bin(x).count("1")


class Algebra:
    """Index tables for the exterior algebra on ``2m`` generators.

    Generator operators are stored as signed index maps rather than dense
    matrices, so they apply to the last axis of any array.
    """

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("m must be positive")
        self.m = m
        self.n = 2 * m
        self.dim = 1 << self.n
        masks = np.arange(self.dim)
        holo = (1 << m) - 1
        self.pdeg = np.array([_popcount(a & holo) for a in masks])
        self.qdeg = np.array([_popcount(a >> m) for a in masks])
        self.deg = self.pdeg + self.qdeg
        # e^a ^ . and iota_a as (src, dst, sign)
        self.wedge_maps = []
        self.contract_maps = []
        for a in range(self.n):
            bit = 1 << a
            below = bit - 1
            src = np.array([A for A in masks if not A & bit])
            sgn = np.array([(-1.0) ** _popcount(A & below) for A in src])
            self.wedge_maps.append((src, src | bit, sgn))
            csrc = np.array([A for A in masks if A & bit])
            csgn = np.array([(-1.0) ** _popcount(A & below) for A in csrc])
            self.contract_maps.append((csrc, csrc ^ bit, csgn))
        # disjoint pairs for the general wedge
        iA, iB, sg = [], [], []
        for A in range(self.dim):
            comp = (self.dim - 1) ^ A
            B = comp
            while True:
                iA.append(A)
                iB.append(B)
                sg.append(self._wedge_sign(A, B))
                if B == 0:
                    break
                B = (B - 1) & comp
        self.pair_a = np.array(iA)
        self.pair_b = np.array(iB)
        self.pair_out = self.pair_a | self.pair_b
        self.pair_sign = np.array(sg, dtype=float)

    def _wedge_sign(self, A: int, B: int) -> float:
        inv = 0
        for b in range(self.n):
            if B >> b & 1:
                inv += _popcount(A >> (b + 1))
        return -1.0 if inv % 2 else 1.0

    def mask(self, I=(), J=()) -> int:
        """Bitmask of ``dz^I ^ dzbar^J`` (1-based indices)."""
        A = 0
        for i in I:
            A |= 1 << (i - 1)
        for j in J:
            A |= 1 << (self.m + j - 1)
        return A

    def split_mask(self, A: int):
        I = tuple(i + 1 for i in range(self.m) if A >> i & 1)
        J = tuple(j + 1 for j in range(self.m) if A >> (self.m + j) & 1)
        return I, J

    def apply_wedge_gen(self, a: int, v: np.ndarray) -> np.ndarray:
        src, dst, sgn = self.wedge_maps[a]
        out = np.zeros_like(v)
        out[..., dst] = v[..., src] * sgn
        return out

    def apply_contract_gen(self, a: int, v: np.ndarray) -> np.ndarray:
        src, dst, sgn = self.contract_maps[a]
        out = np.zeros_like(v)
        out[..., dst] = v[..., src] * sgn
        return out

    @functools.cached_property
    def pair_reduce(self):
        return sparse.csr_matrix(
            (np.ones(self.pair_out.size), (self.pair_out, np.arange(self.pair_out.size))),
            shape=(self.dim, self.pair_out.size),
        )

    def wedge_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exterior product on the last axis with broadcasting of leading axes."""
        prod = a[..., self.pair_a] * b[..., self.pair_b] * self.pair_sign
        lead = prod.shape[:-1]
        flat_ = prod.reshape(-1, prod.shape[-1])
        out = (self.pair_reduce @ flat_.T).T
        return np.asarray(out).reshape(lead + (self.dim,))

    @functools.cached_property
    def wedge_gen_dense(self) -> np.ndarray:
        """Dense matrices of ``e^a ^ .``, shape ``(2m, dim, dim)``."""
        out = np.zeros((self.n, self.dim, self.dim))
        for a, (src, dst, sgn) in enumerate(self.wedge_maps):
            out[a, dst, src] = sgn
        return out

    @functools.cached_property
    def contract_gen_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.dim, self.dim))
        for a, (src, dst, sgn) in enumerate(self.contract_maps):
            out[a, dst, src] = sgn
        return out

    def type_mask(self, p: int, q: int) -> np.ndarray:
        return (self.pdeg == p) & (self.qdeg == q)


@functools.lru_cache(maxsize=None)
def algebra(m: int) -> Algebra:
    """Cached :class:`Algebra` for dimension ``m``."""
    return Algebra(m)


class PqForm:
    """A complex form at a point, usually of pure bidegree ``(p, q)``.

    Mixed-degree forms are allowed so that ``d = del + delbar`` can be
    represented; :attr:`bidegree` reports ``None`` for them.

    Parameters
    ----------
    m : int
        Complex dimension.
    c : array_like
        Coefficients over the bitmask basis, length ``4**m``.
    """

    __slots__ = ("m", "c")

    def __init__(self, m: int, c):
        c = np.asarray(c, dtype=complex)
        if c.shape != (1 << (2 * m),):
            raise ValueError(f"coefficient vector must have length {1 << (2 * m)}")
        self.m = m
        self.c = c

    # construction
    @classmethod
    def zero(cls, m: int) -> "PqForm":
        return cls(m, np.zeros(1 << (2 * m), dtype=complex))

    @classmethod
    def scalar(cls, m: int, value: complex = 1.0) -> "PqForm":
        f = cls.zero(m)
        f.c[0] = value
        return f

    @classmethod
    def basis(cls, m: int, I=(), J=(), coeff: complex = 1.0) -> "PqForm":
        """``coeff * dz^I ^ dzbar^J`` for increasing 1-based index tuples."""
        for T in (I, J):
            if any(not 1 <= i <= m for i in T) or list(T) != sorted(set(T)):
                raise ValueError(f"index tuple {T} must be strictly increasing in 1..{m}")
        f = cls.zero(m)
        f.c[algebra(m).mask(I, J)] = coeff
        return f

    @classmethod
    def from_coeffs(cls, m: int, p: int, q: int, coeffs: dict) -> "PqForm":
        """Build a pure ``(p, q)``-form from ``{(I, J): value}``."""
        if not (0 <= p <= m and 0 <= q <= m):
            raise ValueError("bidegree out of range")
        f = cls.zero(m)
        alg = algebra(m)
        for (I, J), v in coeffs.items():
            if len(I) != p or len(J) != q:
                raise ValueError(f"entry {(I, J)} is not of type ({p},{q})")
            f = f + cls.basis(m, I, J, v)
        del alg
        return f

    @classmethod
    def random(cls, rng: np.random.Generator, m: int, p: int, q: int) -> "PqForm":
        alg = algebra(m)
        sel = alg.type_mask(p, q)
        c = np.zeros(alg.dim, dtype=complex)
        c[sel] = rng.standard_normal(sel.sum()) + 1j * rng.standard_normal(sel.sum())
        return cls(m, c)

    # inspection
    @property
    def types(self) -> list:
        alg = algebra(self.m)
        nz = np.abs(self.c) > 0
        return sorted({(int(alg.pdeg[A]), int(alg.qdeg[A])) for A in np.flatnonzero(nz)})

    @property
    def bidegree(self):
        t = self.types
        return t[0] if len(t) == 1 else None

    @property
    def coeffs(self) -> dict:
        alg = algebra(self.m)
        return {alg.split_mask(int(A)): self.c[A] for A in np.flatnonzero(self.c)}

    def part(self, p: int, q: int) -> "PqForm":
        sel = algebra(self.m).type_mask(p, q)
        return PqForm(self.m, np.where(sel, self.c, 0))

    def degree_part(self, k: int) -> "PqForm":
        sel = algebra(self.m).deg == k
        return PqForm(self.m, np.where(sel, self.c, 0))

    def conj(self) -> "PqForm":
        """Complex conjugate form (swaps dz and dzbar)."""
        alg = algebra(self.m)
        m = self.m
        out = np.zeros_like(self.c)
        for A in np.flatnonzero(self.c):
            A = int(A)
            lo, hi = A & ((1 << m) - 1), A >> m
            B = hi | (lo << m)
            # reorder dzbar^I ^ dz^J into dz^J ^ dzbar^I
            sign = (-1.0) ** (_popcount(lo) * _popcount(hi))
            out[B] += sign * np.conj(self.c[A])
        del alg
        return PqForm(m, out)

    # arithmetic
    def _check(self, other: "PqForm"):
        if not isinstance(other, PqForm) or other.m != self.m:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        self._check(other)
        return PqForm(self.m, self.c + other.c)

    def __sub__(self, other):
        self._check(other)
        return PqForm(self.m, self.c - other.c)

    def __neg__(self):
        return PqForm(self.m, -self.c)

    def __mul__(self, s):
        return PqForm(self.m, self.c * complex(s))

    __rmul__ = __mul__

    def __truediv__(self, s):
        return PqForm(self.m, self.c / complex(s))

    def __xor__(self, other):
        return wedge(self, other)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.c))) if self.c.size else 0.0

    def allclose(self, other: "PqForm", atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.c - other.c)) <= atol)

    def __repr__(self):
        items = ", ".join(f"{k}: {v:.4g}" for k, v in list(self.coeffs.items())[:6])
        return f"PqForm(m={self.m}, {{{items}}})"


@dataclass(frozen=True)
class TangentVector:
    """Complexified tangent vector ``sum holo_i d/dz^i + antiholo_i d/dzbar^i``."""

    m: int
    holo: np.ndarray
    antiholo: np.ndarray
    real: bool = False

    def __post_init__(self):
        h = np.asarray(self.holo, dtype=complex).reshape(self.m)
        a = np.asarray(self.antiholo, dtype=complex).reshape(self.m)
        object.__setattr__(self, "holo", h)
        object.__setattr__(self, "antiholo", a)
        if self.real and not np.allclose(a, np.conj(h), atol=1e-12, rtol=0):
            raise ValueError("real vector must have antiholo = conj(holo)")

    @classmethod
    def from_real(cls, m: int, xs, ys) -> "TangentVector":
        """``sum xs_i d/dx_i + ys_i d/dy_i``."""
        h = np.asarray(xs, dtype=float) + 1j * np.asarray(ys, dtype=float)
        return cls(m, h, np.conj(h), real=True)

    @classmethod
    def from_components(cls, m: int, comps, real: bool = False) -> "TangentVector":
        comps = np.asarray(comps, dtype=complex)
        return cls(m, comps[:m], comps[m:], real=real)

    @classmethod
    def generator(cls, m: int, a: int) -> "TangentVector":
        c = np.zeros(2 * m, dtype=complex)
        c[a] = 1.0
        return cls.from_components(m, c)

    @property
    def components(self) -> np.ndarray:
        return np.concatenate([self.holo, self.antiholo])

    def j(self) -> "TangentVector":
        return TangentVector(self.m, 1j * self.holo, -1j * self.antiholo, self.real)

    def part10(self) -> "TangentVector":
        return TangentVector(self.m, self.holo, np.zeros(self.m))

    def part01(self) -> "TangentVector":
        return TangentVector(self.m, np.zeros(self.m), self.antiholo)

    def __add__(self, other):
        return TangentVector(self.m, self.holo + other.holo, self.antiholo + other.antiholo,
                             self.real and other.real)

    def __sub__(self, other):
        return TangentVector(self.m, self.holo - other.holo, self.antiholo - other.antiholo,
                             self.real and other.real)

    def __mul__(self, s):
        real = self.real and np.isreal(s)
        return TangentVector(self.m, self.holo * s, self.antiholo * s, bool(real))

    __rmul__ = __mul__

    def real_part_coords(self):
        """``(xs, ys)`` of a real vector."""
        return self.holo.real.copy(), self.holo.imag.copy()


def _compound_gram(C: np.ndarray, alg: Algebra) -> np.ndarray:
    """Gram matrix on all basis masks: ``G[A, B] = det C[A, B]``."""
    G = np.zeros((alg.dim, alg.dim), dtype=complex)
    G[0, 0] = 1.0
    for p in range(alg.m + 1):
        for q in range(alg.m + 1):
            idx = np.flatnonzero(alg.type_mask(p, q))
            if p + q == 0:
                continue
            gens = [[a for a in range(alg.n) if A >> a & 1] for A in idx]
            gens = np.array(gens)
            sub = C[gens[:, None, :, None], gens[None, :, None, :]]
            G[np.ix_(idx, idx)] = np.linalg.det(sub)
    return G


class MetricPoint:
    """Kaehler metric data at a point.

    Parameters
    ----------
    H : (m, m) complex array
        ``g_{i jbar}``; Hermitian positive definite.
    """

    def __init__(self, H):
        H = np.asarray(H, dtype=complex)
        m = H.shape[0]
        if H.shape != (m, m):
            raise ValueError("metric must be square")
        herm = 0.5 * (H + H.conj().T)
        if np.max(np.abs(H - herm)) > 1e-10 * max(1.0, np.max(np.abs(H))):
            raise ValueError("metric is not Hermitian")
        ev = np.linalg.eigvalsh(herm)
        if ev.min() <= 0:
            raise ValueError(f"metric is not positive definite (min eigenvalue {ev.min():.3g})")
        self.m = m
        self.H = herm
        self.Hinv = np.linalg.inv(herm)
        self.alg = algebra(m)

    @functools.cached_property
    def g_bilinear(self) -> np.ndarray:
        """``g(E_a, E_b)`` on the complex coordinate vectors."""
        m = self.m
        g = np.zeros((2 * m, 2 * m), dtype=complex)
        g[:m, m:] = self.H
        g[m:, :m] = self.H.T
        return g

    @functools.cached_property
    def cometric(self) -> np.ndarray:
        """``G^{ab}`` with ``sum_i e_i (x) e_i = sum G^{ab} E_a (x) E_b``."""
        return np.linalg.inv(self.g_bilinear)

    @functools.cached_property
    def gen_gram(self) -> np.ndarray:
        """Hermitian Gram matrix ``<e^a, e^b>`` on the generators."""
        m = self.m
        C = np.zeros((2 * m, 2 * m), dtype=complex)
        C[:m, :m] = self.Hinv.T
        C[m:, m:] = self.Hinv
        return C

    @functools.cached_property
    def gram(self) -> np.ndarray:
        return _compound_gram(self.gen_gram, self.alg)

    @functools.cached_property
    def omega(self) -> PqForm:
        return l_form_11(self.m, 1j * self.H)

    @functools.cached_property
    def frame(self) -> list:
        """Real orthonormal frame by Gram-Schmidt on ``d/dx_1, d/dy_1, ...``."""
        m = self.m
        raw = []
        for i in range(m):
            e = np.zeros(m)
            e[i] = 1.0
            raw.append(TangentVector.from_real(m, e, np.zeros(m)))
            raw.append(TangentVector.from_real(m, np.zeros(m), e))
        return gram_schmidt(self, raw)

    def rotated_frame(self, seed: int = 0) -> list:
        """The Gram-Schmidt frame rotated by a seeded orthogonal matrix."""
        rng = np.random.default_rng(seed)
        Q, _ = np.linalg.qr(rng.standard_normal((2 * self.m, 2 * self.m)))
        base = np.array([e.components for e in self.frame])
        comps = Q @ base
        return [TangentVector.from_components(self.m, c, real=True) for c in comps]

    def g(self, X: TangentVector, Y: TangentVector) -> complex:
        return X.components @ self.g_bilinear @ Y.components

    @functools.cached_property
    def volume_normalization(self) -> float:
        """``c > 0`` with ``|c dzbar^1 ^ ... ^ dzbar^m| = 1``."""
        A = self.alg.mask((), tuple(range(1, self.m + 1)))
        return 1.0 / np.sqrt(self.gram[A, A].real)


def gram_schmidt(metric: MetricPoint, vectors: list) -> list:
    out = []
    for v in vectors:
        w = v
        for e in out:
            w = w - e * metric.g(w, e).real
        n2 = metric.g(w, w).real
        out.append(w * (1.0 / np.sqrt(n2)))
    return out


@dataclass(frozen=True)
class CurvatureAtPoint:
    """Curvature of a Kaehler metric at a point.

    ``riemann[i, j, k, l]`` is ``R_{i jbar k lbar}`` in the potential convention
    ``R_{i jbar k lbar} = -d_k d_lbar g_{i jbar} + g^{p qbar} d_k g_{i qbar} d_lbar g_{p jbar}``,
    which is positive for Fubini-Study.  ``ricci[i, j]`` is ``Ric(d_i, d_jbar)``.
    """

    metric: MetricPoint
    riemann: np.ndarray
    ricci: np.ndarray = field(default=None)
    scal: float = field(default=None)

    def __post_init__(self):
        Hinv = self.metric.Hinv
        R = np.asarray(self.riemann, dtype=complex)
        object.__setattr__(self, "riemann", R)
        ric = np.einsum("lk,ijkl->ij", Hinv, R)
        if self.ricci is None:
            object.__setattr__(self, "ricci", ric)
        scal = 2.0 * np.einsum("ji,ij->", Hinv, self.ricci).real
        if self.scal is None:
            object.__setattr__(self, "scal", float(scal))

    def check_symmetries(self, rtol: float = 1e-10) -> float:
        """Max relative violation of the Kaehler symmetries and trace relations."""
        R = self.riemann
        s = max(np.max(np.abs(R)), 1e-300)
        v = max(
            np.max(np.abs(R - R.transpose(2, 1, 0, 3))),
            np.max(np.abs(R - R.transpose(0, 3, 2, 1))),
            np.max(np.abs(R - np.conj(R.transpose(1, 0, 3, 2)))),
        ) / s
        ric = np.einsum("lk,ijkl->ij", self.metric.Hinv, R)
        v = max(v, np.max(np.abs(ric - self.ricci)) / max(np.max(np.abs(ric)), 1e-300))
        return float(v)

    @functools.cached_property
    def rho(self) -> PqForm:
        return l_form_11(self.metric.m, 1j * self.ricci)

    @functools.cached_property
    def ricci_bilinear(self) -> np.ndarray:
        m = self.metric.m
        r = np.zeros((2 * m, 2 * m), dtype=complex)
        r[:m, m:] = self.ricci
        r[m:, :m] = self.ricci.T
        return r

    @functools.cached_property
    def tensor(self) -> np.ndarray:
        """``R(E_a, E_b, E_c, E_d) = g(R(E_a, E_b) E_c, E_d)`` with ``R = nabla^2_{Y,X} - nabla^2_{X,Y}``."""
        return riemann_tensor(self.riemann)

    def ricci_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of ``Ric`` relative to ``g`` (each with real multiplicity 2)."""
        ev = np.linalg.eigvals(self.metric.Hinv @ self.ricci)
        return np.sort(ev.real)


def riemann_tensor(Rpot: np.ndarray) -> np.ndarray:
    """Full 4-tensor on ``E_a`` from potential-convention components."""
    m = Rpot.shape[0]
    n = 2 * m
    T = np.zeros((n,) * 4, dtype=complex)
    h = np.arange(m)
    a = h + m
    # R(d_k, d_lbar, d_i, d_jbar) = -R_{i jbar k lbar}
    Rk = -Rpot.transpose(2, 3, 0, 1)  # [k, l, i, j]
    T[np.ix_(h, a, h, a)] = Rk
    T[np.ix_(a, h, h, a)] = -Rk.transpose(1, 0, 2, 3)
    T[np.ix_(h, a, a, h)] = -Rk.transpose(0, 1, 3, 2)
    T[np.ix_(a, h, a, h)] = Rk.transpose(1, 0, 3, 2)
    return T


# --------------------------------------------------------------------------
# algebraic operations


def l_form_11(m: int, M: np.ndarray) -> PqForm:
    """``sum_{ij} M_ij dz^i ^ dzbar^j``."""
    f = PqForm.zero(m)
    alg = algebra(m)
    for i in range(m):
        for j in range(m):
            f.c[alg.mask((i + 1,), (j + 1,))] += M[i, j]
    return f


def one_form(m: int, comps) -> PqForm:
    """``sum_a comps[a] e^a`` over the 2m generators."""
    f = PqForm.zero(m)
    for a, v in enumerate(comps):
        f.c[1 << a] = v
    return f


def wedge(a: PqForm, b: PqForm) -> PqForm:
    """Exterior product; degrees beyond the top give the zero form."""
    if a.m != b.m:
        raise ValueError("dimension mismatch")
    return PqForm(a.m, algebra(a.m).wedge_arrays(a.c, b.c))


def interior(X: TangentVector, a: PqForm) -> PqForm:
    """Full contraction ``X _| a`` (first slot)."""
    if X.m != a.m:
        raise ValueError("dimension mismatch")
    alg = algebra(a.m)
    out = np.zeros_like(a.c)
    for k, v in enumerate(X.components):
        if v != 0:
            out += v * alg.apply_contract_gen(k, a.c)
    return PqForm(a.m, out)


def contract(X: TangentVector, a: PqForm):
    """``(X_{1,0} _| a, X_{0,1} _| a)``: the (p-1,q) and (p,q-1) parts."""
    return interior(X.part10(), a), interior(X.part01(), a)


def evaluate(a: PqForm, *vectors: TangentVector) -> complex:
    """``a(X_1, ..., X_k)`` for a k-form (higher parts ignored)."""
    f = a.degree_part(len(vectors))
    for X in vectors:
        f = interior(X, f)
    return complex(f.c[0])


def j_act(a: PqForm) -> PqForm:
    """``(J a)(X_1..X_k) = a(JX_1..JX_k)``; multiplies a (p,q)-form by ``i^(p-q)``."""
    alg = algebra(a.m)
    return PqForm(a.m, a.c * (1j ** ((alg.pdeg - alg.qdeg) % 4)))


def flat(metric: MetricPoint, X: TangentVector) -> PqForm:
    """``X^flat = g(X, .)``."""
    return one_form(metric.m, metric.g_bilinear.T @ X.components)


def sharp10(metric: MetricPoint, X: TangentVector) -> PqForm:
    """``X^{1,0}``, the (1,0)-part of ``X^flat``."""
    return flat(metric, X).part(1, 0)


def inner(metric: MetricPoint, a: PqForm, b: PqForm) -> complex:
    """Hermitian inner product, conjugate-linear in ``b``."""
    if a.m != b.m or a.m != metric.m:
        raise ValueError("dimension mismatch")
    ta, tb = a.types, b.types
    if ta and tb and ta != tb:
        raise ValueError(f"bidegree mismatch {ta} vs {tb}")
    return complex(a.c @ metric.gram @ np.conj(b.c))


def norm(metric: MetricPoint, a: PqForm) -> float:
    return float(np.sqrt(max(inner_any(metric, a, a).real, 0.0)))


def inner_any(metric: MetricPoint, a: PqForm, b: PqForm) -> complex:
    """Inner product without the bidegree check (mixed forms allowed)."""
    return complex(a.c @ metric.gram @ np.conj(b.c))


def normalize_volume(metric: MetricPoint) -> PqForm:
    """The (0,m)-form ``c dzbar^1 ^ ... ^ dzbar^m`` with unit length."""
    m = metric.m
    return PqForm.basis(m, (), tuple(range(1, m + 1)), metric.volume_normalization)


def _frame(metric, frame):
    return metric.frame if frame is None else frame


def commutator(metric: MetricPoint, alpha: PqForm, phi: PqForm, frame=None) -> PqForm:
    """``[alpha, phi] = sum_i (e_i _| alpha) ^ (e_i _| phi)``."""
    out = PqForm.zero(phi.m)
    for e in _frame(metric, frame):
        out = out + wedge(interior(e, alpha), interior(e, phi))
    return out


def l_omega(metric: MetricPoint, a: PqForm) -> PqForm:
    return wedge(metric.omega, a)


def l_alpha_star(metric: MetricPoint, alpha: PqForm, a: PqForm, frame=None) -> PqForm:
    """Adjoint of ``alpha ^ .``: ``1/2 sum conj(alpha(e_i, e_j)) e_j _| e_i _|``."""
    fr = _frame(metric, frame)
    out = PqForm.zero(a.m)
    for ei in fr:
        ia = interior(ei, a)
        for ej in fr:
            c = np.conj(evaluate(alpha, ei, ej))
            if c != 0:
                out = out + interior(ej, ia) * (0.5 * c)
    return out


def l_omega_star(metric: MetricPoint, a: PqForm, frame=None) -> PqForm:
    return l_alpha_star(metric, metric.omega, a, frame)


def _bidegree_basis(m: int, p: int, q: int) -> np.ndarray:
    return np.flatnonzero(algebra(m).type_mask(p, q))


def primitive_part(metric: MetricPoint, a: PqForm) -> PqForm:
    """Orthogonal projection onto ``ker L*_omega`` (per bidegree)."""
    m = metric.m
    out = PqForm.zero(m)
    for (p, q) in a.types:
        ap = a.part(p, q)
        if p == 0 or q == 0:
            out = out + ap
            continue
        lo = _bidegree_basis(m, p - 1, q - 1)
        L = np.zeros((metric.alg.dim, lo.size), dtype=complex)
        for j, A in enumerate(lo):
            e = PqForm.zero(m)
            e.c[A] = 1.0
            L[:, j] = l_omega(metric, e).c
        G = metric.gram
        # least squares in the Gram metric: min |a - L b|
        M = L.conj().T @ G.T @ L
        rhs = L.conj().T @ G.T @ ap.c
        b = np.linalg.lstsq(M, rhs, rcond=None)[0]
        out = out + PqForm(m, ap.c - L @ b)
    return out


def ric_act(metric: MetricPoint, ric: np.ndarray, phi: PqForm, frame=None) -> PqForm:
    """``Ric(phi) = sum_i Ric(e_i)^flat ^ (e_i _| phi)`` with ``ric[i, j] = Ric(d_i, d_jbar)``."""
    m = metric.m
    r = np.zeros((2 * m, 2 * m), dtype=complex)
    r[:m, m:] = ric
    r[m:, :m] = np.asarray(ric).T
    out = PqForm.zero(m)
    for e in _frame(metric, frame):
        re = one_form(m, e.components @ r)
        out = out + wedge(re, interior(e, phi))
    return out


def curvature_2form(curv: CurvatureAtPoint, X: TangentVector, Y: TangentVector) -> PqForm:
    """``R(X, Y)`` as the 2-form ``(Z, W) -> g(R(X,Y)Z, W)``."""
    m = curv.metric.m
    T = np.einsum("abcd,a,b->cd", curv.tensor, X.components, Y.components)
    out = PqForm.zero(m)
    alg = algebra(m)
    for c in range(2 * m):
        for d in range(c + 1, 2 * m):
            out.c[(1 << c) | (1 << d)] += T[c, d]
    del alg
    return out


def curv_op(curv: CurvatureAtPoint, phi: PqForm, frame=None) -> PqForm:
    """``r(phi) = sum_{ij} R(e_i, e_j) ^ (e_i _| e_j _| phi)``."""
    fr = _frame(curv.metric, frame)
    out = PqForm.zero(phi.m)
    for ei in fr:
        for ej in fr:
            inner_ = interior(ei, interior(ej, phi))
            if np.any(inner_.c):
                out = out + wedge(curvature_2form(curv, ei, ej), inner_)
    return out


def antisym_trace_split(metric: MetricPoint, gamma: np.ndarray):
    """Split ``gamma`` in ``Lambda^1 (x) Lambda^p`` into its three irreducible parts.

    Parameters
    ----------
    gamma : (2m, 4**m) complex array
        ``gamma = sum_a e^a (x) gamma[a]`` over the coordinate coframe, each
        ``gamma[a]`` homogeneous of degree ``p``.

    Returns
    -------
    (ga, gt, gtw) : three arrays shaped like ``gamma``
        The parts coming from ``Lambda^{p+1}``, from ``Lambda^{p-1}`` and the
        twistor part.  They are mutually orthogonal and sum to ``gamma``.
    """
    m = metric.m
    alg = metric.alg
    n = 2 * m
    gamma = np.asarray(gamma, dtype=complex)
    degs = {int(alg.deg[A]) for A in np.flatnonzero(np.any(gamma != 0, axis=0))}
    if len(degs) > 1:
        raise ValueError("gamma must have homogeneous form degree")
    p = degs.pop() if degs else 0
    a = sum(alg.apply_wedge_gen(b, gamma[b]) for b in range(n))
    G = metric.cometric
    t = sum(G[b, c] * alg.apply_contract_gen(b, gamma[c])
            for b in range(n) for c in range(n) if G[b, c] != 0)
    ga = np.array([alg.apply_contract_gen(c, a) / (p + 1) for c in range(n)])
    gflat = metric.g_bilinear
    gt = np.array([
        sum(gflat[c, b] * alg.apply_wedge_gen(b, t) for b in range(n)) / (n - p + 1)
        for c in range(n)
    ])
    return ga, gt, gamma - ga - gt


def tensor_inner(metric: MetricPoint, x: np.ndarray, y: np.ndarray) -> complex:
    """Inner product on ``Lambda^1 (x) Lambda^p`` in coordinate-coframe form."""
    C = metric.gen_gram
    return complex(np.einsum("ab,aA,AB,bB->", C, x, metric.gram, np.conj(y)))


def all_bidegrees(m: int):
    return list(itertools.product(range(m + 1), repeat=2))


def conj_components(v: np.ndarray) -> np.ndarray:
    """Components of the complex conjugate vector (swaps the two halves)."""
    v = np.asarray(v, dtype=complex)
    m = v.shape[-1] // 2
    return np.concatenate([np.conj(v[..., m:]), np.conj(v[..., :m])], axis=-1)


def vector_norm(g: np.ndarray, v: np.ndarray) -> float:
    """Hermitian length ``sqrt(g(v, conj v))`` of a complex vector given by components."""
    v = np.asarray(v, dtype=complex)
    return float(np.sqrt(max(np.real(v @ g @ conj_components(v)), 0.0)))


def vector_inner(g: np.ndarray, v: np.ndarray, w: np.ndarray) -> complex:
    """Hermitian product ``g(v, conj w)``."""
    return complex(np.asarray(v) @ g @ conj_components(w))
