"""Test-function families used by the harness and the test-suite."""

from __future__ import annotations

import math

import numpy as np

from schromax.grid import GridFunction, GridSpec, SpectralFunction, to_spectrum


def gaussian(spec: GridSpec, lam: float = 0.0, width: float = 1.0) -> SpectralFunction:
    """Spectrum of ``e^{i lam x_1} e^{-|x|^2 / (2 width^2)}``."""
    x = spec.coordinates()
    r2 = sum(xj * xj for xj in x)
    vals = np.exp(-r2 / (2 * width**2)) * np.exp(1j * lam * x[0])
    return to_spectrum(GridFunction(spec, np.broadcast_to(vals, spec.shape)))


def gaussian_spectrum_exact(spec: GridSpec, lam: float = 0.0) -> SpectralFunction:
    """Closed-form spectrum ``(2 pi)^{n/2} e^{-|xi - lam e_1|^2 / 2}`` on the grid."""
    xi = spec.frequencies()
    shifted = [k - lam if j == 0 else k for j, k in enumerate(xi)]
    q = sum(k * k for k in shifted)
    vals = (2 * math.pi) ** (spec.n / 2) * np.exp(-q / 2)
    return SpectralFunction(spec, np.broadcast_to(vals, spec.shape))


def indicator_spectrum(spec: GridSpec, A: float = 1.0, value: complex = 1.0) -> SpectralFunction:
    return SpectralFunction(spec, np.where(spec.xi_sq <= A * A, value, 0.0))


def random_band_limited(spec: GridSpec, A: float, rng: np.random.Generator) -> SpectralFunction:
    """Complex Gaussian coefficients on ``|xi| <= A``, zero elsewhere."""
    coeffs = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    coeffs = np.where(spec.xi_sq <= A * A, coeffs, 0)
    if not coeffs.any():
        raise ValueError(f"no grid frequency inside |xi| <= {A}")
    return SpectralFunction(spec, coeffs)


def random_spectrum(spec: GridSpec, rng: np.random.Generator, decay: float = 2.0) -> SpectralFunction:
    """Random spectrum with ``(1+|xi|)^{-decay}`` envelope, spread over many shells."""
    coeffs = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    return SpectralFunction(spec, coeffs * (1 + np.sqrt(spec.xi_sq)) ** (-decay))
