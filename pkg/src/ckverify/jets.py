"""Truncated multivariate Taylor jets.

A :class:`Jet` holds the Taylor coefficients ``c_alpha = d^alpha f / alpha!`` of
a function of ``nvars`` variables about a base point, up to total order ``N``.
Coefficients may carry trailing tensor axes, so one jet can hold a whole matrix
or form of functions.  Monomials are stored in graded order, which makes
truncation to a lower order a prefix slice.

For a chart of complex dimension ``m`` the variables are the Wirtinger
displacements ``(dz^1..dz^m, dzbar^1..dzbar^m)``, treated as independent.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np
from scipy import sparse

__all__ = ["JetSpace", "Jet", "jet_space", "jeinsum", "jet_inv", "jet_det", "stack"]


class JetSpace:
    """Monomial tables for ``nvars`` variables up to total order ``order``."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        monos = []
        for d in range(order + 1):
            # reverse-lex within a degree, stable across orders
            for combo in itertools.combinations_with_replacement(range(nvars), d):
                e = [0] * nvars
                for v in combo:
                    e[v] += 1
                monos.append(tuple(e))
        self.monomials = np.array(monos, dtype=int).reshape(len(monos), nvars)
        self.index = {mo: i for i, mo in enumerate(monos)}
        self.n = len(monos)
        self.degree = self.monomials.sum(axis=1)
        self.offsets = [int(np.searchsorted(self.degree, d)) for d in range(order + 2)]

    @functools.cached_property
    def products(self):
        """Pairs ``(i, j, k)`` with ``mono_i * mono_j = mono_k`` and ``deg k <= order``."""
        pi, pj, pk = [], [], []
        for i, a in enumerate(self.monomials):
            da = self.degree[i]
            for j in range(self.offsets[self.order - da + 1]):
                k = self.index[tuple(a + self.monomials[j])]
                pi.append(i)
                pj.append(j)
                pk.append(k)
        pi, pj, pk = map(np.array, (pi, pj, pk))
        red = sparse.csr_matrix((np.ones(pk.size), (pk, np.arange(pk.size))), shape=(self.n, pk.size))
        return pi, pj, red

    @functools.cached_property
    def conj_permutation(self) -> np.ndarray:
        """Index map sending monomial ``(a, b)`` to ``(b, a)`` for Wirtinger halves."""
        if self.nvars % 2:
            raise ValueError("conjugation needs an even number of Wirtinger variables")
        h = self.nvars // 2
        return np.array([self.index[tuple(np.r_[mo[h:], mo[:h]])] for mo in self.monomials])

    @functools.lru_cache(maxsize=None)
    def derivative_map(self, v: int):
        """Source indices and factors for ``d/dx_v`` into the order-1 lower space."""
        lower = jet_space(self.nvars, self.order - 1)
        src = np.empty(lower.n, dtype=int)
        fac = np.empty(lower.n)
        for i, a in enumerate(lower.monomials):
            b = a.copy()
            b[v] += 1
            src[i] = self.index[tuple(b)]
            fac[i] = b[v]
        return src, fac


@functools.lru_cache(maxsize=None)
def jet_space(nvars: int, order: int) -> JetSpace:
    return JetSpace(nvars, order)


def _bc(fac, c):
    return fac.reshape(fac.shape + (1,) * (c.ndim - 1))


class Jet:
    """Truncated Taylor expansion with optional trailing tensor shape.

    Parameters
    ----------
    space : JetSpace
    c : ndarray
        Coefficients of shape ``(space.n, *shape)``.
    """

    __array_priority__ = 100
    __slots__ = ("space", "c")

    def __init__(self, space: JetSpace, c):
        c = np.asarray(c)
        if c.shape[0] != space.n:
            raise ValueError("coefficient table does not match the jet space")
        self.space = space
        self.c = c

    # construction
    @classmethod
    def constant(cls, nvars: int, order: int, value) -> "Jet":
        sp = jet_space(nvars, order)
        value = np.asarray(value)
        c = np.zeros((sp.n,) + value.shape, dtype=np.result_type(value, float))
        c[0] = value
        return cls(sp, c)

    @classmethod
    def variable(cls, nvars: int, order: int, v: int, base=0.0) -> "Jet":
        sp = jet_space(nvars, order)
        c = np.zeros(sp.n, dtype=np.result_type(base, float))
        c[0] = base
        if order >= 1:
            e = [0] * nvars
            e[v] = 1
            c[sp.index[tuple(e)]] = 1.0
        return cls(sp, c)

    # shape and order
    @property
    def order(self) -> int:
        return self.space.order

    @property
    def nvars(self) -> int:
        return self.space.nvars

    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def value(self):
        return self.c[0]

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        sp = jet_space(self.nvars, order)
        return Jet(sp, self.c[: sp.n])

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.space, self.c[(slice(None),) + idx])

    def reshape(self, *shape) -> "Jet":
        return Jet(self.space, self.c.reshape((self.space.n,) + tuple(shape)))

    def transpose(self, *axes) -> "Jet":
        return Jet(self.space, self.c.transpose((0,) + tuple(a + 1 for a in axes)))

    def conj_function(self) -> "Jet":
        """Jet of the complex conjugate function.

        The variables are Wirtinger pairs ``(dz, dzbar)``, so conjugation swaps
        the two halves of every exponent and conjugates the coefficients.
        Trailing axes are conjugated entrywise.
        """
        perm = self.space.conj_permutation
        return Jet(self.space, np.conj(self.c[perm]))

    def conj_coeffs(self) -> "Jet":
        """Conjugate the stored coefficients (not the function)."""
        return Jet(self.space, np.conj(self.c))

    def apply(self, M: np.ndarray) -> "Jet":
        """Apply a constant matrix on the last axis: ``out[..., i] = M[i, j] x[..., j]``."""
        return Jet(self.space, self.c @ M.T)

    def map_coeffs(self, fn) -> "Jet":
        """Apply a linear coefficient map acting on the trailing axes."""
        return Jet(self.space, fn(self.c))

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets over different variables")
            order = min(self.order, other.order)
            return self.truncate(order), other.truncate(order)
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            return Jet(a.space, a.c + b.c)
        c = self.c.astype(np.result_type(self.c, np.asarray(other)), copy=True)
        c[0] = c[0] + other
        return Jet(self.space, c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return Jet(self.space, self.c * other)
        a, b = pair
        return Jet(a.space, _product(a.space, a.c, b.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.space, self.c / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, s):
        if isinstance(s, (int, np.integer)) and s >= 0:
            out = Jet.constant(self.nvars, self.order, np.ones(self.shape))
            base = self
            e = int(s)
            while e:
                if e & 1:
                    out = out * base
                e >>= 1
                if e:
                    base = base * base
            return out
        return self.power(s)

    # univariate compositions
    def compose(self, derivs) -> "Jet":
        """``f(self)`` given ``derivs[n] = f^(n)(value) / n!`` for n = 0..order."""
        x = Jet(self.space, self.c.copy())
        x.c[0] = 0
        out = Jet(self.space, np.zeros_like(self.c, dtype=np.result_type(self.c, derivs[0])))
        for n in range(self.order, -1, -1):
            out = out * x if n < self.order else out
            out = out + derivs[n]
        return out

    def exp(self) -> "Jet":
        e0 = np.exp(self.value)
        return self.compose([e0 / math.factorial(n) for n in range(self.order + 1)])

    def log(self) -> "Jet":
        a = self.value
        ds = [np.log(a)] + [(-1) ** (n + 1) / (n * a ** n) for n in range(1, self.order + 1)]
        return self.compose(ds)

    def power(self, s) -> "Jet":
        a = self.value
        ds, coef = [], 1.0
        for n in range(self.order + 1):
            ds.append(coef * a ** (s - n))
            coef = coef * (s - n) / (n + 1)
        return self.compose(ds)

    def reciprocal(self) -> "Jet":
        return self.power(-1)

    def sqrt(self) -> "Jet":
        return self.power(0.5)

    # differentiation
    def d(self, v: int) -> "Jet":
        """Partial derivative in variable ``v``; the order drops by one."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        src, fac = self.space.derivative_map(v)
        return Jet(jet_space(self.nvars, self.order - 1), self.c[src] * _bc(fac, self.c))

    def grad(self) -> "Jet":
        """All first partials stacked on a new trailing axis."""
        return stack([self.d(v) for v in range(self.nvars)], axis=-1)

    def derivative_value(self, alpha) -> complex:
        """``d^alpha f`` at the base point."""
        alpha = tuple(alpha)
        i = self.space.index[alpha]
        return self.c[i] * np.prod([math.factorial(a) for a in alpha])


def _product(space: JetSpace, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    pi, pj, red = space.products
    # scalar-like operands broadcast over the trailing axes of the other
    if a.ndim < b.ndim:
        a = a.reshape(a.shape + (1,) * (b.ndim - a.ndim))
    elif b.ndim < a.ndim:
        b = b.reshape(b.shape + (1,) * (a.ndim - b.ndim))
    prod = a[pi] * b[pj]
    tail = prod.shape[1:]
    out = red @ prod.reshape(prod.shape[0], -1)
    return np.asarray(out).reshape((space.n,) + tail)


def jeinsum(spec: str, a: Jet, b: Jet) -> Jet:
    """Einsum over trailing axes of two jets, multiplying the series.

    ``jeinsum('ij,jk->ik', A, B)`` is the matrix product of two matrix-valued jets.
    """
    if not isinstance(b, Jet):
        ins, out = spec.split("->")
        sa, sb = ins.split(",")
        return Jet(a.space, np.einsum(f"Z{sa},{sb}->Z{out}", a.c, b))
    if not isinstance(a, Jet):
        ins, out = spec.split("->")
        sa, sb = ins.split(",")
        return Jet(b.space, np.einsum(f"{sa},Z{sb}->Z{out}", a, b.c))
    order = min(a.order, b.order)
    a, b = a.truncate(order), b.truncate(order)
    sp = a.space
    pi, pj, red = sp.products
    ins, out = spec.split("->")
    sa, sb = ins.split(",")
    prod = np.einsum(f"Z{sa},Z{sb}->Z{out}", a.c[pi], b.c[pj])
    tail = prod.shape[1:]
    res = red @ prod.reshape(prod.shape[0], -1)
    return Jet(sp, np.asarray(res).reshape((sp.n,) + tail))


def stack(jets, axis: int = -1) -> Jet:
    order = min(j.order for j in jets)
    jets = [j.truncate(order) for j in jets]
    ax = axis if axis < 0 else axis + 1
    return Jet(jets[0].space, np.stack([j.c for j in jets], axis=ax))


def jet_inv(A: Jet) -> Jet:
    """Inverse of a square-matrix-valued jet by a terminating Neumann series."""
    A0inv = np.linalg.inv(A.value)
    dA = Jet(A.space, A.c.copy())
    dA.c[0] = 0
    # A^{-1} = sum_k (-A0^{-1} dA)^k A0^{-1}; dA has no constant term
    T = jeinsum("ij,jk->ik", A0inv, dA) * -1.0
    out = Jet.constant(A.nvars, A.order, A0inv)
    term = out
    for _ in range(A.order):
        term = jeinsum("ij,jk->ik", T, term)
        out = out + term
    return out


def jet_det(A: Jet) -> Jet:
    """Determinant of a small square-matrix-valued jet by permutation expansion."""
    n = A.shape[0]
    total = None
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = A[0, perm[0]]
        for i in range(1, n):
            term = term * A[i, perm[i]]
        term = term * (-1.0 if inv % 2 else 1.0)
        total = term if total is None else total + term
    return total
