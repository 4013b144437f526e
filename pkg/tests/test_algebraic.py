"""Type identities on random algebraic data."""

import numpy as np

from ckverify.algebraic import random_kahler_curvature, random_metric, ricci_with_eigenvalues, type_identity_suite


def test_type_identity_suite_small():
    reps = type_identity_suite(n_cases=8, seed=11)
    assert len(reps) == 9
    for r in reps:
        assert r.passed, (r.name, r.max_rel)


def test_ricci_with_eigenvalues_spectrum():
    rng = np.random.default_rng(2)
    met = random_metric(rng, 3)
    U = np.concatenate([rng.standard_normal(3) + 1j * rng.standard_normal(3), np.zeros(3)])
    ric, _ = ricci_with_eigenvalues(met, U, 2.0, -0.5)
    ev = np.sort(np.linalg.eigvals(np.linalg.solve(met.H, ric)).real)
    assert np.allclose(ev, [-0.5, -0.5, 2.0])


def test_random_curvature_is_hermitian():
    rng = np.random.default_rng(3)
    curv = random_kahler_curvature(rng, random_metric(rng, 3))
    R = curv.riemann
    # R_{i jbar k lbar} = conj(R_{j ibar l kbar}) and symmetric in i, k
    assert np.allclose(R, np.conj(R.transpose(1, 0, 3, 2)))
    assert np.allclose(R, R.transpose(2, 1, 0, 3))
