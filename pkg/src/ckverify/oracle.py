"""Brute-force alternating-tensor oracle for the pointwise exterior algebra.

Forms are expanded into fully antisymmetric arrays ``T[a_1, ..., a_k]`` over
the ``2m`` complex generators, using the determinant convention
``T[a_1..a_k] = a(E_{a_1}, ..., E_{a_k})``.  Every operation is done on those
arrays by explicit permutation sums and index contractions, independently of
the bitmask tables in :mod:`ckverify.exterior`.  The metric enters through the
real metric in ``x, y`` coordinates.
"""

from __future__ import annotations

import functools
import itertools
import math
import time

import numpy as np

from .exterior import MetricPoint, PqForm, TangentVector, algebra, interior, l_omega, l_omega_star, wedge
from .report import CheckReport

__all__ = [
    "form_to_tensor",
    "tensor_to_form",
    "tensor_wedge",
    "tensor_contract",
    "tensor_omega",
    "tensor_lstar",
    "hermitian_cometric",
    "tensor_inner",
    "random_hermitian_metric",
    "exterior_oracle_suite",
]


@functools.lru_cache(maxsize=None)
def _signed_perms(k: int):
    out = []
    for p in itertools.permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if p[i] > p[j])
        out.append((p, -1.0 if inv % 2 else 1.0))
    return tuple(out)


def form_to_tensor(a: PqForm, k: int) -> np.ndarray:
    """Degree-``k`` part of ``a`` as an alternating ``(2m)^k`` array."""
    n = 2 * a.m
    T = np.zeros((n,) * k, dtype=complex)
    for A in np.flatnonzero(a.c):
        gens = [b for b in range(n) if A >> b & 1]
        if len(gens) != k:
            continue
        for p, s in _signed_perms(k):
            T[tuple(gens[i] for i in p)] = s * a.c[A]
    return T


def tensor_to_form(m: int, T: np.ndarray) -> PqForm:
    k = T.ndim
    out = PqForm.zero(m)
    for gens in itertools.combinations(range(2 * m), k):
        A = sum(1 << b for b in gens)
        out.c[A] = T[gens] if k else T
    return out


def tensor_wedge(S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """``(S ^ T) = 1/(p! q!) sum_sigma sgn(sigma) sigma(S (x) T)``."""
    p, q = S.ndim, T.ndim
    P = np.multiply.outer(S, T)
    out = np.zeros_like(P)
    for perm, s in _signed_perms(p + q):
        out += s * np.transpose(P, perm)
    return out / (math.factorial(p) * math.factorial(q))


def tensor_contract(X: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Insert ``X`` into the first slot."""
    return np.tensordot(X, T, axes=(0, 0))


def _real_to_complex(m: int) -> np.ndarray:
    """Columns are ``d/dx_i``, ``d/dy_i`` written in the ``d/dz, d/dzbar`` basis."""
    Q = np.zeros((2 * m, 2 * m), dtype=complex)
    for i in range(m):
        Q[i, i] = 1.0
        Q[m + i, i] = 1.0
        Q[i, m + i] = 1j
        Q[m + i, m + i] = -1j
    return Q


def _real_metric(H: np.ndarray) -> np.ndarray:
    """``g(d/dx_i, d/dx_j)`` etc. from ``g(d/dz^i, d/dzbar^j) = H_ij``."""
    m = H.shape[0]
    Q = _real_to_complex(m)
    gc = np.zeros((2 * m, 2 * m), dtype=complex)
    gc[:m, m:] = H
    gc[m:, :m] = H.T
    gR = Q.T @ gc @ Q
    return gR.real


def hermitian_cometric(H: np.ndarray) -> np.ndarray:
    """``<e^a, e^b>`` for the complex generators, via the real inverse metric."""
    m = H.shape[0]
    ginv = np.linalg.inv(_real_metric(H))
    # dz^i = dx^i + i dy^i as rows over the real coframe
    P = np.zeros((2 * m, 2 * m), dtype=complex)
    for i in range(m):
        P[i, i], P[i, m + i] = 1.0, 1j
        P[m + i, i], P[m + i, m + i] = 1.0, -1j
    return P @ ginv @ P.conj().T


def tensor_omega(H: np.ndarray) -> np.ndarray:
    """``omega(E_a, E_b) = g(J E_a, E_b)`` with ``J d/dz = i d/dz``."""
    m = H.shape[0]
    gc = np.zeros((2 * m, 2 * m), dtype=complex)
    gc[:m, m:] = H
    gc[m:, :m] = H.T
    jfac = np.concatenate([np.full(m, 1j), np.full(m, -1j)])
    return jfac[:, None] * gc


def tensor_inner(G: np.ndarray, S: np.ndarray, T: np.ndarray) -> complex:
    """``1/k! sum S[I] conj(T[J]) prod G[i, j]``."""
    k = S.ndim
    R = np.conj(T)
    for _ in range(k):
        R = np.tensordot(G, R, axes=(1, k - 1))
    # each pass moved the contracted slot to the front and cycled the rest
    return complex(np.sum(S * R) / math.factorial(k))


def tensor_lstar(G: np.ndarray, W: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Adjoint of ``W ^ .`` for a 2-form ``W``: ``1/2 conj(W_ab G_aa' G_bb') T[a', b', ...]``."""
    Wr = np.conj(np.einsum("ab,ac,bd->cd", W, G, G))
    return 0.5 * np.tensordot(Wr, T, axes=([0, 1], [0, 1]))


def random_hermitian_metric(rng: np.random.Generator, m: int) -> np.ndarray:
    A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return 0.5 * np.eye(m) + 0.2 * A @ A.conj().T


def _random_form(rng, m, k):
    """Random form of total degree ``k`` with a random single bidegree."""
    ps = [p for p in range(max(0, k - m), min(k, m) + 1)]
    p = int(rng.choice(ps))
    return PqForm.random(rng, m, p, k - p)


def exterior_oracle_suite(n_cases: int = 500, seed: int = 0, m_max: int = 4, tol: float = 1e-12,
                          max_degree: int = 5) -> list:
    """Compare wedge, contraction, ``L_omega`` and ``L*_omega`` with the tensor oracle.

    Each case draws ``m``, a random Hermitian metric, random forms and a random
    complex vector.  Residuals are absolute maxima of coefficient differences.
    """
    rng = np.random.default_rng(seed)
    names = [("exterior oracle: wedge", "a ^ b by alternation"),
             ("exterior oracle: contraction", "X _| a by slot insertion"),
             ("exterior oracle: L_omega", "omega ^ a by alternation"),
             ("exterior oracle: L*_omega", "adjoint of omega ^ by tensor contraction")]
    worst = [0.0] * 4
    t0 = time.perf_counter()
    for _ in range(n_cases):
        m = int(rng.integers(1, m_max + 1))
        top = min(2 * m, max_degree)
        H = random_hermitian_metric(rng, m)
        metric = MetricPoint(H)
        G = hermitian_cometric(H)
        W = tensor_omega(H)
        # wedge
        k1 = int(rng.integers(0, top + 1))
        k2 = int(rng.integers(0, top - k1 + 1))
        a, b = _random_form(rng, m, k1), _random_form(rng, m, k2)
        ref = tensor_to_form(m, tensor_wedge(form_to_tensor(a, k1), form_to_tensor(b, k2)))
        worst[0] = max(worst[0], np.max(np.abs(wedge(a, b).c - ref.c)))
        # contraction
        k = int(rng.integers(1, top + 1))
        a = _random_form(rng, m, k)
        X = rng.standard_normal(2 * m) + 1j * rng.standard_normal(2 * m)
        ref = tensor_to_form(m, tensor_contract(X, form_to_tensor(a, k)))
        got = interior(TangentVector.from_components(m, X), a)
        worst[1] = max(worst[1], np.max(np.abs(got.c - ref.c)))
        # L_omega
        k = int(rng.integers(0, top - 1)) if top >= 2 else 0
        a = _random_form(rng, m, k)
        ref = tensor_to_form(m, tensor_wedge(W, form_to_tensor(a, k)))
        worst[2] = max(worst[2], np.max(np.abs(l_omega(metric, a).c - ref.c)))
        # L*_omega
        k = int(rng.integers(2, top + 1)) if top >= 2 else 0
        a = _random_form(rng, m, k)
        if k >= 2:
            ref = tensor_to_form(m, tensor_lstar(G, W, form_to_tensor(a, k)))
        else:
            ref = PqForm.zero(m)
        worst[3] = max(worst[3], np.max(np.abs(l_omega_star(metric, a).c - ref.c)))
    ms = 1e3 * (time.perf_counter() - t0)
    return [CheckReport(n, r, seed, n_cases, float(w), float(w), tol, bool(w <= tol), ms)
            for (n, r), w in zip(names, worst)]
