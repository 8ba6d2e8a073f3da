"""Frequency-domain prediction of reconstructions under a mispositioned flat occluder.

Far-field, ``l == c``, noiseless continuum model: the true occluder sits at
relative height ``alpha`` and the model assumes ``alpha_mis`` together with a
transverse offset ``delta_x``.  Equating the two measurement spectra gives

    Fhat(w) = r S(-r w / a') / S(-w / a') exp(-j w dx / a') F((a / a') r w),
    r = (1 - a') / (1 - a)

with the transform ``F(w) = int f(x) exp(-j w x) dx``.  Under this convention
a purely transverse error reproduces ``f`` shifted by ``+delta_x / alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Spectrum of a sampled, finitely supported function.

    ``samples`` (already zero-padded) sit at ``x0 + n * dx``.  Calling the
    object evaluates the transform at arbitrary frequencies; for a signal of
    finite support this is exact band-limited (Dirichlet-kernel) interpolation
    of the values on the DFT grid.
    """

    samples: np.ndarray
    dx: float
    x0: float = 0.0

    @property
    def omega(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.samples.size, self.dx)

    @property
    def positions(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.samples.size)

    @property
    def values(self) -> np.ndarray:
        return self.dx * np.exp(-1j * self.omega * self.x0) * np.fft.fft(self.samples)

    def __call__(self, omega) -> np.ndarray:
        omega = np.asarray(omega, float)
        phase = np.exp(-1j * np.multiply.outer(omega, self.positions))
        return self.dx * phase @ self.samples

    def inverse(self, values) -> np.ndarray:
        """Spatial samples whose spectrum on :attr:`omega` is ``values``."""
        return np.fft.ifft(np.asarray(values) * np.exp(1j * self.omega * self.x0) / self.dx)


def spectrum(samples, dx: float, x0: float = 0.0, pad: int = 4) -> Spectrum:
    """Zero-pad ``samples`` to ``pad`` times their length and wrap them as a :class:`Spectrum`."""
    s = np.asarray(samples, float)
    padded = np.zeros(pad * s.size)
    padded[: s.size] = s
    return Spectrum(padded, float(dx), float(x0))


@dataclass(frozen=True, eq=False)
class MismatchPrediction:
    omega: np.ndarray
    values: np.ndarray
    recoverable: np.ndarray
    shape_ratio: np.ndarray


def mismatch_spectrum(F: Spectrum, S: Spectrum, alpha: float, alpha_mis: float,
                      delta_x: float, threshold: float | None = None) -> MismatchPrediction:
    """Predicted spectrum of the reconstruction, evaluated on ``F``'s frequency grid.

    Frequencies where ``|S(-w / alpha_mis)|`` falls below ``threshold``
    (default ``1e-8 * max|S|``) are marked unrecoverable and set to 0.
    """
    for a in (alpha, alpha_mis):
        if not 0 < a < 1:
            raise ValueError("relative occluder heights must lie in (0, 1)")
    w = F.omega
    r = (1 - alpha_mis) / (1 - alpha)
    den = S(-w / alpha_mis)
    num = S(-r * w / alpha_mis)
    if threshold is None:
        threshold = 1e-8 * np.max(np.abs(S.values))
    ok = np.abs(den) > threshold
    ratio = np.where(ok, num / np.where(ok, den, 1.0), 0.0)
    rescaled = F((alpha / alpha_mis) * r * w)
    vals = r * ratio * np.exp(-1j * w * delta_x / alpha_mis) * rescaled
    return MismatchPrediction(w, np.where(ok, vals, 0.0), ok, ratio)
