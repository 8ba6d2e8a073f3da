import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from occnlos.forward import assemble_pairs, grid_pairs
from occnlos.priors import GaussianPrior, prior_covariance, sample_reflectivity, simulate_measurements
from occnlos.reconstruction import IllPosedError, depth_search, gaussian_nll, mmse, nmse_predict


def _random_instance(rng, n=12, m=8):
    B = rng.normal(size=(n, n))
    cov = B @ B.T / n + 0.1 * np.eye(n)
    d = np.sqrt(np.diag(cov))
    prior = GaussianPrior(1.0, cov / np.outer(d, d))
    A = rng.uniform(0, 1, (m, n))
    return A, prior


def test_identity_shrinkage(rng):
    y = rng.normal(size=6)
    res = mmse(np.eye(6), y, GaussianPrior(1.0, np.eye(6)), 0.25)
    np.testing.assert_allclose(res.estimate, y / 1.25, rtol=1e-14)
    np.testing.assert_allclose(res.posterior_std, np.sqrt(0.25 / 1.25))
    assert res.nmse == pytest.approx(0.2)


def test_huge_noise_collapses_to_prior(rng):
    A, prior = _random_instance(rng)
    res = mmse(A, rng.normal(size=8), prior, 1e12)
    assert np.max(np.abs(res.estimate)) < 1e-9
    assert res.nmse == pytest.approx(1.0, abs=1e-9)


def test_normal_equations_oracle(rng):
    for _ in range(100):
        n = int(rng.integers(2, 17))
        m = int(rng.integers(1, 13))
        A, prior = _random_instance(rng, n, m)
        sigma2 = float(rng.uniform(0.01, 1.0))
        y = rng.normal(size=m)
        # Minimizer of |y - Af|^2 / sigma2 + f^T cov^{-1} f.
        H = A.T @ A / sigma2 + np.linalg.inv(prior.cov)
        want = np.linalg.solve(H, A.T @ y / sigma2)
        got = mmse(A, y, prior, sigma2).estimate
        np.testing.assert_allclose(got, want, rtol=1e-8, atol=1e-10 * np.abs(want).max())


def test_predicted_nmse_matches_monte_carlo():
    rng = np.random.default_rng(11)
    A, prior = _random_instance(rng, 16, 10)
    sigma2 = 0.05
    pred = nmse_predict(A, prior, sigma2)
    errs = []
    for s in range(500):
        f = sample_reflectivity(prior, [s, 1])
        y = simulate_measurements(A, f, sigma2, [s, 2])
        errs.append(np.sum((mmse(A, y, prior, sigma2).estimate - f) ** 2))
    emp = np.mean(errs) / prior.energy
    assert abs(emp / pred - 1) < 0.05


def test_nmse_predict_limits(rng):
    prior = GaussianPrior(1.0, np.eye(5))
    assert nmse_predict(np.zeros((3, 5)), prior, 0.1) == 1.0
    assert nmse_predict(np.zeros((0, 5)), prior, 0.1) == 1.0
    A = rng.normal(size=(5, 5)) + 5 * np.eye(5)
    assert nmse_predict(A, prior, 1e-14) < 1e-12


def test_result_matches_predict(rng):
    A, prior = _random_instance(rng)
    res = mmse(A, rng.normal(size=8), prior, 0.3)
    assert res.nmse == pytest.approx(nmse_predict(A, prior, 0.3), rel=1e-12)
    assert np.all(res.posterior_std <= 1 + 1e-9)
    assert 0 <= res.nmse <= 1 + 1e-9


def test_unobserved_uncorrelated_patch_keeps_prior_std(rng):
    A = rng.uniform(size=(4, 5))
    A[:, 2] = 0
    res = mmse(A, rng.normal(size=4), GaussianPrior(1.0, np.eye(5)), 0.1)
    assert res.posterior_std[2] == pytest.approx(1.0)
    assert np.all(res.posterior_std[[0, 1, 3, 4]] < 1)


def test_row_permutation_invariance(rng):
    A, prior = _random_instance(rng, 10, 9)
    y = rng.normal(size=9)
    perm = rng.permutation(9)
    a = mmse(A, y, prior, 0.2)
    b = mmse(A[perm], y[perm], prior, 0.2)
    np.testing.assert_allclose(a.estimate, b.estimate, rtol=1e-10)
    assert a.nmse == pytest.approx(b.nmse, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 10.0))
def test_more_rows_never_hurt(seed, sigma2):
    rng = np.random.default_rng(seed)
    A, prior = _random_instance(rng, 8, 10)
    values = [nmse_predict(A[:k], prior, sigma2) for k in range(11)]
    assert np.all(np.diff(values) <= 1e-12)


def test_nll_even_in_y(rng):
    A, prior = _random_instance(rng)
    y = rng.normal(size=8)
    for full in (False, True):
        assert gaussian_nll(A, y, prior, 0.1, full) == pytest.approx(gaussian_nll(A, -y, prior, 0.1, full))


def test_full_nll_adds_half_logdet(rng):
    A, prior = _random_instance(rng)
    y = rng.normal(size=8)
    K = A @ prior.cov @ A.T + 0.1 * np.eye(8)
    want = 0.5 * np.linalg.slogdet(K)[1] + 0.5 * y @ np.linalg.solve(K, y)
    assert gaussian_nll(A, y, prior, 0.1, full=True) == pytest.approx(want, rel=1e-10)
    assert gaussian_nll(A, y, prior, 0.1) == pytest.approx(y @ np.linalg.solve(K, y), rel=1e-10)


def test_singular_noiseless_system_is_reported():
    A = np.ones((2, 3))
    with pytest.raises(IllPosedError):
        mmse(A, np.ones(2), GaussianPrior(1.0, np.eye(3)), 0.0)


def test_shape_errors():
    prior = GaussianPrior(1.0, np.eye(3))
    with pytest.raises(ValueError):
        mmse(np.ones((2, 4)), np.ones(2), prior, 0.1)
    with pytest.raises(ValueError):
        mmse(np.ones((2, 3)), np.ones(3), prior, 0.1)
    with pytest.raises(ValueError):
        mmse(np.ones((2, 3)), np.ones(2), prior, -0.1)


# -- depth search -----------------------------------------------------------------

CANDIDATES = [1.6, 1.7, 1.8, 1.9, 2.0, 2.1, 2.2, 2.3, 2.4]


def test_noiseless_depth_recovered(two_occluder_room):
    prior = prior_covariance(two_occluder_room.patches, 0.05)
    idx = np.random.default_rng(2).integers(0, 100, (30, 2))
    pts = grid_pairs(two_occluder_room, idx)
    build = lambda D: assemble_pairs(two_occluder_room.with_depth(D), pts).entries
    for true_D in (1.8, 2.0, 2.3):
        y = build(true_D) @ sample_reflectivity(prior, 4)
        # Tiny noise variance only to regularize the solve; y itself is exact.
        res = depth_search(y, build, CANDIDATES, prior, 1e-12 * np.mean(y**2))
        assert res.best_distance == true_D
        assert res.nll.shape == (9,)


def test_single_candidate(rng):
    A, prior = _random_instance(rng)
    y = rng.normal(size=8)
    res = depth_search(y, lambda D: A, [3.0], prior, 0.1)
    assert res.best_distance == 3.0
    assert res.nll[0] == pytest.approx(gaussian_nll(A, y, prior, 0.1))
    np.testing.assert_allclose(res.estimate, mmse(A, y, prior, 0.1).estimate)


def test_ties_go_to_first_candidate(rng):
    A, prior = _random_instance(rng)
    res = depth_search(rng.normal(size=8), lambda D: A, [1.0, 2.0, 3.0], prior, 0.1)
    assert res.best_distance == 1.0 and res.best_index == 0


@pytest.mark.parametrize("cands", [[], [2.0, 1.0], [1.0, 1.0]])
def test_bad_candidates(cands, rng):
    A, prior = _random_instance(rng)
    with pytest.raises(ValueError):
        depth_search(np.zeros(8), lambda D: A, cands, prior, 0.1)
