"""Pointwise type identities on random algebraic data.

Every check draws a random Hermitian metric, random forms and, where needed,
a random Ricci endomorphism or a random algebraic Kaehler curvature tensor,
then evaluates both sides of a purely algebraic identity.
"""

from __future__ import annotations

import numpy as np

from .exterior import (CurvatureAtPoint, MetricPoint, PqForm, TangentVector, commutator, curv_op,
                       curvature_2form, flat, inner_any, interior, l_form_11, l_omega, l_omega_star,
                       primitive_part, ric_act, wedge)
from .report import ResidualAccumulator

__all__ = [
    "random_metric",
    "random_hermitian",
    "random_kahler_curvature",
    "ricci_with_eigenvalues",
    "type_identity_suite",
]


def random_metric(rng: np.random.Generator, m: int) -> MetricPoint:
    A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return MetricPoint(0.5 * np.eye(m) + 0.2 * A @ A.conj().T)


def random_hermitian(rng: np.random.Generator, m: int) -> np.ndarray:
    A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return 0.5 * (A + A.conj().T)


def random_kahler_curvature(rng: np.random.Generator, metric: MetricPoint, n_terms: int = 3) -> CurvatureAtPoint:
    """``R_{i jbar k lbar} = sum_s c_s A^s_ik conj(A^s_jl)`` with symmetric ``A^s``.

    This has all the Kaehler symmetries, so the first Bianchi identity holds.
    """
    m = metric.m
    R = np.zeros((m,) * 4, dtype=complex)
    for _ in range(n_terms):
        A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        A = A + A.T
        R += rng.standard_normal() * np.einsum("ik,jl->ijkl", A, np.conj(A))
    return CurvatureAtPoint(metric, R)


def _conj_vec(v: np.ndarray, m: int) -> np.ndarray:
    return np.concatenate([np.conj(v[m:]), np.conj(v[:m])])


def ricci_with_eigenvalues(metric: MetricPoint, U: np.ndarray, lam1: float, lam2: float):
    """Ricci form ``ric[i, j]`` with eigenvalue ``lam1`` on ``span{U, Ubar}`` and ``lam2`` on its complement.

    Returns ``(ric, P)`` with ``P`` the projector onto the two-plane.
    """
    m = metric.m
    g = metric.g_bilinear
    Ub = _conj_vec(U, m)
    guu = Ub @ g @ U
    P = (np.outer(U, g.T @ Ub) + np.outer(Ub, g.T @ U)) / guu
    rb = lam2 * g + (lam1 - lam2) * (P.T @ g @ P)
    return rb[:m, m:], P


def _rand_vec(rng, m):
    return TangentVector.from_components(m, rng.standard_normal(2 * m) + 1j * rng.standard_normal(2 * m))


def type_identity_suite(n_cases: int = 100, seed: int = 0, tol: float = 1e-12) -> list:
    """Algebraic identities of the exterior algebra of a Kaehler manifold.

    Each identity is evaluated on ``n_cases`` independent random inputs with
    ``m`` in ``{3, 4}``.  Residuals are relative to the largest term, or to the
    size of the inputs when both sides vanish.
    """
    from .residuals import split_decompose

    rng = np.random.default_rng(seed)
    A = {k: ResidualAccumulator(k, ref, tol, seed) for k, ref in [
        ("[omega, phi] = i(q-p) phi", "commutator with the Kaehler form on (p,q)-forms"),
        ("L_omega adjoint", "<L_omega a, b> = <a, L*_omega b>"),
        ("[L*_omega, L_rho] = scal/2 - Ric", "commutator of L*_omega and L_rho"),
        ("[r, L_omega] = -2 L_rho", "r(omega ^ phi) - omega ^ r(phi) + 2 rho ^ phi = 0"),
        ("Ric(X) contraction lemma", "2 (Ric(X) _| phi)_{0,m-1} = X_{1,0} _| (Ric(phi) + i[rho, phi])"),
        ("primitive splitting: Ric", "Ric(psi) = scal/2 psi + (l1 - l2) omega ^ psi1"),
        ("primitive splitting: [rho, .]", "[rho, psi] on the three summands"),
        ("r(X^flat ^ phi) on (0,p)", "r(X^flat ^ phi) = 2 sum R(e_i, X) ^ (e_i _| phi)"),
        ("frame independence of r", "r computed in two orthonormal frames"),
    ]}
    acc = list(A.values())
    for _ in range(n_cases):
        m = int(rng.integers(3, 5))
        met = random_metric(rng, m)
        # [omega, phi]
        p, q = (int(x) for x in rng.integers(0, m + 1, 2))
        phi = PqForm.random(rng, m, p, q)
        lhs = commutator(met, met.omega, phi)
        rhs = phi * (1j * (q - p))
        acc[0].add((lhs - rhs).max_abs(), [lhs.max_abs(), rhs.max_abs()], phi.max_abs())
        # adjointness
        p, q = (int(x) for x in rng.integers(0, m, 2))
        a = PqForm.random(rng, m, p, q)
        b = PqForm.random(rng, m, p + 1, q + 1)
        x, y = inner_any(met, l_omega(met, a), b), inner_any(met, a, l_omega_star(met, b))
        acc[1].add(abs(x - y), [abs(x), abs(y)])
        # (ls)
        ric = random_hermitian(rng, m)
        rho = l_form_11(m, 1j * ric)
        scal = 2.0 * np.einsum("ji,ij->", met.Hinv, ric).real
        p, q = (int(x) for x in rng.integers(0, m + 1, 2))
        phi = PqForm.random(rng, m, p, q)
        t1 = l_omega_star(met, wedge(rho, phi))
        t2 = wedge(rho, l_omega_star(met, phi))
        rhs = phi * (0.5 * scal) - ric_act(met, ric, phi)
        acc[2].add((t1 - t2 - rhs).max_abs(), [t1.max_abs(), t2.max_abs(), rhs.max_abs()],
                   phi.max_abs() * np.max(np.abs(ric)))
        # (cc1)
        curv = random_kahler_curvature(rng, met)
        rsz = np.max(np.abs(curv.riemann))
        phi = PqForm.random(rng, m, p, q)
        t1 = curv_op(curv, wedge(met.omega, phi))
        t2 = wedge(met.omega, curv_op(curv, phi))
        t3 = wedge(curv.rho, phi) * 2.0
        acc[3].add((t1 - t2 + t3).max_abs(), [t1.max_abs(), t2.max_abs(), t3.max_abs()], phi.max_abs() * rsz)
        # Ric(X) contraction lemma on primitive (1, m-1)-forms
        psi = primitive_part(met, PqForm.random(rng, m, 1, m - 1))
        X = _rand_vec(rng, m)
        r = np.zeros((2 * m, 2 * m), dtype=complex)
        r[:m, m:], r[m:, :m] = ric, ric.T
        RX = TangentVector.from_components(m, met.cometric @ (r.T @ X.components))
        lhs = interior(RX, psi).part(0, m - 1) * 2.0
        rr = ric_act(met, ric, psi) + commutator(met, rho, psi) * 1j
        rhs = interior(X.part10(), rr)
        acc[4].add((lhs - rhs).max_abs(), [lhs.max_abs(), rhs.max_abs()])
        # primitive splitting
        u = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        U = np.concatenate([u, np.zeros(m)])
        l1, l2 = rng.uniform(-2.0, 2.0, 2)
        ric2, _ = ricci_with_eigenvalues(met, U, l1, l2)
        rho2 = l_form_11(m, 1j * ric2)
        scal2 = 2.0 * (l1 + (m - 1) * l2)
        sp = split_decompose(met, U, psi)
        s1, s2, s3 = sp["psi1"], sp["psi2"], sp["psi3"]
        dv = sp["omega_v"] - sp["omega_h"]
        lhs = ric_act(met, ric2, psi)
        t1, t2 = psi * (0.5 * scal2), wedge(met.omega, s1) * (l1 - l2)
        acc[5].add((lhs - t1 - t2).max_abs(), [lhs.max_abs(), t1.max_abs(), t2.max_abs()])
        lhs = commutator(met, rho2, psi)
        t1 = wedge(dv, s1) * (1j * l2 * (m - 2))
        t2 = s2 * (1j * ((m - 1) * l2 - l1))
        t3 = s3 * (1j * (l1 + (m - 3) * l2))
        acc[6].add((lhs - t1 - t2 - t3).max_abs(), [lhs.max_abs(), t1.max_abs(), t2.max_abs(), t3.max_abs()])
        # r(X^flat ^ phi) on (0, p)-forms
        pp = int(rng.integers(1, m))
        phi = PqForm.random(rng, m, 0, pp)
        X = _rand_vec(rng, m)
        lhs = curv_op(curv, wedge(flat(met, X), phi))
        rhs = PqForm.zero(m)
        for e in met.frame:
            rhs = rhs + wedge(curvature_2form(curv, e, X), interior(e, phi)) * 2.0
        acc[7].add((lhs - rhs).max_abs(), [lhs.max_abs(), rhs.max_abs()])
        # frame independence
        phi = PqForm.random(rng, m, int(rng.integers(0, m + 1)), int(rng.integers(0, m + 1)))
        a1 = curv_op(curv, phi)
        a2 = curv_op(curv, phi, met.rotated_frame(int(rng.integers(0, 2 ** 31))))
        acc[8].add((a1 - a2).max_abs(), [a1.max_abs(), a2.max_abs()], phi.max_abs() * rsz)
    return [a.report() for a in acc]
