"""Exact Fourier-multiplier evolution, Sobolev norms and dyadic splitting."""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from schromax.grid import (
    GridFunction,
    GridSpec,
    SpectralFunction,
    _check_same_grid,
    from_spectrum,
    spectral_l2,
)


@dataclass(frozen=True)
class PropagatorParams:
    a: float
    t: float = 0.0
    y: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"dispersion exponent a must be > 0, got {self.a}")
        if not math.isfinite(self.t):
            raise ValueError("t must be finite")
        if self.y is not None:
            y = tuple(float(v) for v in np.atleast_1d(self.y))
            if not all(math.isfinite(v) for v in y):
                raise ValueError("y must be finite")
            object.__setattr__(self, "y", y)


def dispersion(spec: GridSpec, a: float) -> np.ndarray:
    """``|xi|^a`` with the value 0 at the origin for every ``a > 0``."""
    return spec.xi_sq ** (a / 2)


def multiplier(spec: GridSpec, a: float, t: float, y=None) -> np.ndarray:
    phase = t * dispersion(spec, a)
    if y is not None:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if y.shape != (spec.n,):
            raise ValueError(f"shift y must have length {spec.n}")
        for xi_j, y_j in zip(spec.frequencies(), y):
            phase = phase + xi_j * y_j
    return np.exp(1j * phase)


def propagate(F: SpectralFunction, p: PropagatorParams, spec: GridSpec | None = None) -> GridFunction:
    """Return ``x -> S_t f(x + y)`` sampled on the grid of ``F``."""
    if spec is not None:
        _check_same_grid(spec, F.spec)
    if not isinstance(p, PropagatorParams):
        raise TypeError("p must be PropagatorParams")
    m = multiplier(F.spec, p.a, p.t, p.y)
    return from_spectrum(SpectralFunction(F.spec, F.coefficients * m))


def propagate_batch(
    F: SpectralFunction,
    a: float,
    ts: Sequence[float],
    ys: np.ndarray | None = None,
    chunk: int = 32,
) -> Iterator[np.ndarray]:
    """Yield ``|S_t f(. + y)|`` for consecutive chunks of samples.

    Each yielded array has shape ``(k, *grid.shape)`` with ``k <= chunk``.
    Bypasses the GridFunction wrapper so large sample sets stay cheap.
    """
    if not a > 0:
        raise ValueError(f"dispersion exponent a must be > 0, got {a}")
    spec = F.spec
    ts = np.asarray(ts, dtype=float)
    if ys is not None:
        ys = np.asarray(ys, dtype=float).reshape(len(ts), spec.n)
    disp = dispersion(spec, a)
    freqs = [np.broadcast_to(k, spec.shape) for k in spec.frequencies()]
    pre = F.coefficients * spec._sign
    axes = tuple(range(1, spec.n + 1))
    scale = 1.0 / spec.h**spec.n
    expand = (slice(None),) + (None,) * spec.n
    for start in range(0, len(ts), chunk):
        tt = ts[start:start + chunk]
        phase = tt[expand] * disp
        if ys is not None:
            for j, k in enumerate(freqs):
                phase = phase + ys[start:start + chunk, j][expand] * k
        vals = np.fft.ifftn(pre * np.exp(1j * phase), axes=axes) * scale
        yield np.abs(vals)


def sobolev_norm(F: SpectralFunction, s: float) -> float:
    """``(int (1+|xi|^2)^s |f^(xi)|^2 dxi)^{1/2}`` by the grid Riemann sum."""
    spec = F.spec
    w = (1.0 + spec.xi_sq) ** s
    terms = (w * np.square(np.abs(F.coefficients))).ravel().tolist()
    return math.sqrt(math.fsum(terms) * spec.dxi**spec.n)


def shell_index(spec: GridSpec) -> np.ndarray:
    """Dyadic shell of every frequency: 0 for ``|xi| <= 1``, else the ``k`` with
    ``2^{k-1} < |xi| <= 2^k``.  Computed exactly from the binary exponent of
    ``|xi|^2``."""
    q = spec.xi_sq
    mant, expo = np.frexp(q)
    # smallest c with q <= 2^c
    c = np.where(mant == 0.5, expo - 1, expo)
    k = np.where(q <= 1.0, 0, (c + 1) // 2)
    return k.astype(np.int64)


@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    pieces: tuple[SpectralFunction, ...]
    K: int

    def reconstruct(self) -> SpectralFunction:
        total = self.pieces[0].coefficients.copy()
        for p in self.pieces[1:]:
            total = total + p.coefficients
        return SpectralFunction(self.pieces[0].spec, total)

    def l2_norms(self) -> list[float]:
        c = (2 * math.pi) ** (-self.pieces[0].spec.n / 2)
        return [c * spectral_l2(p) for p in self.pieces]


def dyadic_split(F: SpectralFunction) -> DyadicDecomposition:
    """Sharp-cutoff split of ``F`` into the ball ``|xi| <= 1`` and the shells
    ``2^{k-1} < |xi| <= 2^k``."""
    idx = shell_index(F.spec)
    K = int(idx.max())
    zero = np.zeros_like(F.coefficients)
    pieces = tuple(
        SpectralFunction(F.spec, np.where(idx == k, F.coefficients, zero)) for k in range(K + 1)
    )
    return DyadicDecomposition(pieces, K)


def band_limit(F: SpectralFunction, A: float) -> SpectralFunction:
    spec = F.spec
    if not 0 < A < spec.nyquist:
        raise ValueError(f"band limit A must lie in (0, {spec.nyquist}), got {A}")
    keep = spec.xi_sq <= A * A
    return SpectralFunction(spec, np.where(keep, F.coefficients, 0))


def support_radius(F: SpectralFunction) -> float:
    """Largest ``|xi|`` carrying a nonzero coefficient (0 for the zero function)."""
    nz = F.coefficients != 0
    if not nz.any():
        return 0.0
    return float(math.sqrt(F.spec.xi_sq[nz].max()))
