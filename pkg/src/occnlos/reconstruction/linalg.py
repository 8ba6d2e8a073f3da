"""Symmetric positive-definite factorizations shared by the solvers."""

from __future__ import annotations

import numpy as np
import scipy.linalg as la


class IllPosedError(np.linalg.LinAlgError):
    """Raised when a noiseless system is singular, so no unique estimate exists."""


def spd_factor(K: np.ndarray, noiseless: bool = False) -> np.ndarray:
    """Lower Cholesky factor of a symmetric PSD matrix.

    On failure a jitter of ``1e-10 * trace(K) / M`` is added once, unless
    ``noiseless`` is set, in which case the system is reported as ill-posed.
    """
    K = 0.5 * (K + K.T)
    try:
        return la.cholesky(K, lower=True)
    except la.LinAlgError:
        if noiseless:
            raise IllPosedError("singular noiseless system: measurements do not determine f")
    m = K.shape[0]
    jitter = 1e-10 * np.trace(K) / max(m, 1)
    try:
        return la.cholesky(K + jitter * np.eye(m), lower=True)
    except la.LinAlgError as exc:
        raise np.linalg.LinAlgError("matrix is not positive definite even after jitter") from exc


def chol_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    return la.cho_solve((L, True), b)


def chol_logdet(L: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(L))))
