"""Posterior-mean reconstruction under the Gaussian prior, and depth search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as la

from ..priors import GaussianPrior
from .linalg import chol_logdet, chol_solve, spd_factor


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Estimate, per-patch posterior standard deviation and a-priori NMSE."""

    estimate: np.ndarray
    posterior_std: np.ndarray
    nmse: float


@dataclass(frozen=True, eq=False)
class DepthSearchResult:
    best_distance: float
    estimate: np.ndarray
    nll: np.ndarray
    candidates: np.ndarray

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.nll))


def _check(A, prior: GaussianPrior, sigma2: float) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, float))
    if A.shape[1] != prior.n:
        raise ValueError(f"matrix has {A.shape[1]} columns but the prior has {prior.n} patches")
    if sigma2 < 0:
        raise ValueError("noise variance must be nonnegative")
    return A


def _posterior_terms(A, prior: GaussianPrior, sigma2: float):
    B = A @ prior.cov
    K = B @ A.T + sigma2 * np.eye(A.shape[0])
    L = spd_factor(K, noiseless=(sigma2 == 0))
    W = la.solve_triangular(L, B, lower=True)
    return B, L, W


def mmse(A, y, prior: GaussianPrior, sigma2: float) -> ReconstructionResult:
    """Posterior mean ``cov A^T (A cov A^T + sigma2 I)^{-1} y`` with its uncertainty.

    The NMSE is the posterior trace over the prior trace.
    """
    A = _check(A, prior, sigma2)
    y = np.asarray(y, float)
    if y.shape != (A.shape[0],):
        raise ValueError("measurement vector does not match the matrix")
    prior_var = np.diag(prior.cov)
    if A.shape[0] == 0:
        return ReconstructionResult(np.zeros(prior.n), np.sqrt(prior_var), 1.0)
    B, L, W = _posterior_terms(A, prior, sigma2)
    est = B.T @ chol_solve(L, y)
    post_var = np.clip(prior_var - np.sum(W**2, axis=0), 0.0, None)
    nmse = float(post_var.sum() / prior_var.sum())
    return ReconstructionResult(est, np.sqrt(post_var), nmse)


def nmse_predict(A, prior: GaussianPrior, sigma2: float) -> float:
    """Expected normalized squared error of the posterior mean; needs no data."""
    A = _check(A, prior, sigma2)
    if A.shape[0] == 0 or not np.any(A):
        return 1.0
    _, _, W = _posterior_terms(A, prior, sigma2)
    tr = prior.energy
    return float(max(tr - np.sum(W**2), 0.0) / tr)


def gaussian_nll(A, y, prior: GaussianPrior, sigma2: float, full: bool = False) -> float:
    """``y^T (A cov A^T + sigma2 I)^{-1} y``; with ``full`` the Gaussian evidence
    ``0.5 log det(.) + 0.5 y^T (.)^{-1} y`` instead."""
    A = _check(A, prior, sigma2)
    y = np.asarray(y, float)
    K = A @ prior.cov @ A.T + sigma2 * np.eye(A.shape[0])
    L = spd_factor(K, noiseless=(sigma2 == 0))
    z = la.solve_triangular(L, y, lower=True)
    quad = float(z @ z)
    if full:
        return 0.5 * chol_logdet(L) + 0.5 * quad
    return quad


def depth_search(y, build_matrix: Callable[[float], np.ndarray], candidates: Sequence[float],
                 prior: GaussianPrior, sigma2: float, full_likelihood: bool = False
                 ) -> DepthSearchResult:
    """Pick the wall distance whose model best explains ``y`` (uniform prior over candidates).

    ``build_matrix(D)`` returns the measurement matrix for a hidden wall at
    distance ``D``.  Ties go to the first (smallest) candidate.
    """
    cands = np.asarray(candidates, float)
    if cands.size == 0:
        raise ValueError("no candidate distances")
    if np.any(np.diff(cands) <= 0):
        raise ValueError("candidate distances must be strictly increasing")
    mats = [np.asarray(build_matrix(float(D)), float) for D in cands]
    nll = np.array([gaussian_nll(A, y, prior, sigma2, full_likelihood) for A in mats])
    if not np.all(np.isfinite(nll)):
        raise FloatingPointError("non-finite likelihood for some candidate")
    best = int(np.argmin(nll))
    est = mmse(mats[best], y, prior, sigma2).estimate
    return DepthSearchResult(float(cands[best]), est, nll, cands)
