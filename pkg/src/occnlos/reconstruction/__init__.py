"""Inverse solvers: Gaussian-prior MMSE, TV-regularized least squares,
mismatch prediction and hidden-wall depth search."""

from .bayes import (DepthSearchResult, ReconstructionResult, depth_search, gaussian_nll, mmse,
                    nmse_predict)
from .linalg import IllPosedError, spd_factor
from .mismatch import MismatchPrediction, Spectrum, mismatch_spectrum, spectrum
from .tv import TVResult, power_iteration, tv_norm, tv_prox, tv_reconstruct

__all__ = [
    "DepthSearchResult", "IllPosedError", "MismatchPrediction", "ReconstructionResult",
    "Spectrum", "TVResult", "depth_search", "gaussian_nll", "mismatch_spectrum", "mmse",
    "nmse_predict", "power_iteration", "spd_factor", "spectrum", "tv_norm", "tv_prox",
    "tv_reconstruct",
]
