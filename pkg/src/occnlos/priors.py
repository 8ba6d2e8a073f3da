"""Gaussian reflectivity prior, additive noise and SNR bookkeeping."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import PatchSet


@dataclass(frozen=True, eq=False)
class GaussianPrior:
    """Zero-mean Gaussian prior ``f ~ N(0, cov)`` over patch reflectivities."""

    sigma_f2: float
    cov: np.ndarray

    def __post_init__(self):
        cov = np.array(self.cov, float)
        if not self.sigma_f2 > 0:
            raise ValueError("spatial variance must be positive")
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ValueError("covariance must be square")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ValueError("covariance must be symmetric")
        cov.setflags(write=False)
        object.__setattr__(self, "cov", cov)

    @property
    def n(self) -> int:
        return self.cov.shape[0]

    @property
    def energy(self) -> float:
        """Expected squared norm of a draw, tr(cov)."""
        return float(np.trace(self.cov))

    @cached_property
    def factor(self) -> np.ndarray:
        """Symmetric square root with eigenvalues clipped at zero."""
        w, v = np.linalg.eigh(self.cov)
        neg = -w[w < 0].sum() if np.any(w < 0) else 0.0
        if neg > 1e-6 * max(w.max(), 0.0):
            warnings.warn(f"clipping {neg:.3g} of negative spectrum from prior covariance",
                          RuntimeWarning, stacklevel=2)
        w = np.clip(w, 0.0, None)
        if not np.all(np.isfinite(w)) or w.max() <= 0:
            raise np.linalg.LinAlgError("prior covariance has no positive spectrum")
        return (v * np.sqrt(w)) @ v.T


@dataclass(frozen=True)
class NoiseModel:
    """i.i.d. zero-mean Gaussian measurement noise of variance ``sigma2``."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 >= 0:
            raise ValueError("noise variance must be nonnegative")


def squared_exponential(points, sigma_f2: float) -> np.ndarray:
    """Kernel ``exp(-|x_i - x_j|^2 / (2 pi sigma_f2))`` between rows of ``points``."""
    p = np.asarray(points, float)
    d2 = np.sum((p[:, None, :] - p[None, :, :]) ** 2, axis=-1)
    return np.exp(-d2 / (2 * np.pi * sigma_f2))


def prior_covariance(patches: PatchSet | np.ndarray, sigma_f2: float) -> GaussianPrior:
    """Smoothness prior over the patch centers."""
    if not sigma_f2 > 0:
        raise ValueError("spatial variance must be positive")
    centers = patches.centers if isinstance(patches, PatchSet) else np.asarray(patches, float)
    return GaussianPrior(sigma_f2, squared_exponential(centers, sigma_f2))


def sample_reflectivity(prior: GaussianPrior, seed) -> np.ndarray:
    """One draw from the prior; identical output for identical ``seed``."""
    rng = np.random.default_rng(seed)
    return prior.factor @ rng.standard_normal(prior.n)


def _signal_power(A, prior: GaussianPrior) -> float:
    A = np.asarray(A, float)
    return float(np.einsum("ij,jk,ik->", A, prior.cov, A))


def snr_db(A, prior: GaussianPrior, sigma2: float) -> float:
    """``10 log10( tr(A cov A^T) / (M sigma2) )``; +inf when ``sigma2 == 0``."""
    A = np.asarray(A, float)
    m = A.shape[0]
    if m < 1:
        raise ValueError("need at least one measurement")
    power = _signal_power(A, prior)
    if sigma2 == 0:
        return float("inf") if power > 0 else float("nan")
    if sigma2 < 0:
        raise ValueError("noise variance must be nonnegative")
    if power == 0:
        return float("-inf")
    return 10.0 * np.log10(power / (m * sigma2))


def noise_for_target_snr(A, prior: GaussianPrior, snr_db_target: float) -> float:
    """Noise variance that makes :func:`snr_db` return ``snr_db_target``."""
    A = np.asarray(A, float)
    power = _signal_power(A, prior)
    if A.shape[0] < 1 or power <= 0:
        raise ValueError("cannot set an SNR for a zero measurement matrix")
    return power / (A.shape[0] * 10.0 ** (snr_db_target / 10.0))


def simulate_measurements(A, f, sigma2: float, seed) -> np.ndarray:
    """``y = A f + eps`` with ``eps ~ N(0, sigma2 I)``."""
    A = np.asarray(A, float)
    f = np.asarray(f, float)
    if A.ndim != 2 or f.shape != (A.shape[1],):
        raise ValueError(f"cannot apply a {A.shape} matrix to a vector of shape {f.shape}")
    if sigma2 < 0:
        raise ValueError("noise variance must be nonnegative")
    y = A @ f
    if sigma2 > 0:
        rng = np.random.default_rng(seed)
        y = y + np.sqrt(sigma2) * rng.standard_normal(A.shape[0])
    return y
