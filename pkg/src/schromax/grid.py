"""Periodic grids standing in for R^n, with quadrature-scaled transforms.

The forward transform approximates ``f^(xi) = int e^{-i xi.x} f(x) dx`` and the
inverse carries the ``(2 pi)^{-n}`` weight, so no unitary normalisation is
applied anywhere.  Coefficients are stored in numpy FFT order; use
:meth:`GridSpec.frequencies` to get the matching ``xi`` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Torus ``[-L/2, L/2)^n`` sampled with ``N`` points per axis."""

    n: int = 1
    L: float = 40.0
    N: int = 4096

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension n must be a positive integer, got {self.n}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"domain length L must be positive, got {self.L}")
        if int(self.N) != self.N or self.N < 16 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 16, got {self.N}")

    @classmethod
    def default(cls, n: int = 1) -> GridSpec:
        if n == 1:
            return cls(1, 40.0, 4096)
        if n == 2:
            return cls(2, 20.0, 256)
        raise ValueError("no default grid for n > 2")

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def dxi(self) -> float:
        return 2 * math.pi / self.L

    @property
    def nyquist(self) -> float:
        return math.pi * self.N / self.L

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    def axis(self) -> np.ndarray:
        return -self.L / 2 + self.h * np.arange(self.N)

    def axis_frequencies(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.h)

    def coordinates(self) -> list[np.ndarray]:
        x = self.axis()
        return np.meshgrid(*([x] * self.n), indexing="ij", sparse=True)

    def frequencies(self) -> list[np.ndarray]:
        xi = self.axis_frequencies()
        return np.meshgrid(*([xi] * self.n), indexing="ij", sparse=True)

    @cached_property
    def xi_sq(self) -> np.ndarray:
        """``|xi|^2`` on the frequency grid (read-only)."""
        out = sum(k * k for k in self.frequencies())
        out = np.broadcast_to(out, self.shape).copy()
        out.setflags(write=False)
        return out

    @cached_property
    def _sign(self) -> np.ndarray:
        # (-1)^k per axis: moves the sample origin from index 0 to x = -L/2
        s1 = np.where(np.arange(self.N) % 2 == 0, 1.0, -1.0)
        out = np.ones(self.shape)
        for ax in range(self.n):
            idx = [None] * self.n
            idx[ax] = slice(None)
            out = out * s1[tuple(idx)]
        out.setflags(write=False)
        return out


def _frozen_values(values, spec: GridSpec, what: str) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.shape != spec.shape:
        raise ValueError(f"{what} shape {arr.shape} does not match grid {spec.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridFunction:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_values(self.values, self.spec, "values"))


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    spec: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", _frozen_values(self.coefficients, self.spec, "coefficients")
        )

    def __add__(self, other: SpectralFunction) -> SpectralFunction:
        _check_same_grid(self.spec, other.spec)
        return SpectralFunction(self.spec, self.coefficients + other.coefficients)

    def scaled(self, c: complex) -> SpectralFunction:
        return SpectralFunction(self.spec, c * self.coefficients)


def _check_same_grid(a: GridSpec, b: GridSpec) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


def to_spectrum(f: GridFunction) -> SpectralFunction:
    spec = f.spec
    F = np.fft.fftn(f.values) * spec._sign * spec.h**spec.n
    return SpectralFunction(spec, F)


def from_spectrum(F: SpectralFunction) -> GridFunction:
    spec = F.spec
    f = np.fft.ifftn(F.coefficients * spec._sign) / spec.h**spec.n
    return GridFunction(spec, f)


def fsum_sq(values: np.ndarray) -> float:
    """Correctly rounded sum of ``|values|^2`` (order independent)."""
    return math.fsum(np.square(np.abs(values)).ravel().tolist())


def l2_norm(f: GridFunction) -> float:
    return math.sqrt(fsum_sq(f.values) * f.spec.h**f.spec.n)


def spectral_l2(F: SpectralFunction) -> float:
    """``(sum |F|^2 dxi^n)^{1/2}``, the frequency-side L2 norm."""
    return math.sqrt(fsum_sq(F.coefficients) * F.spec.dxi**F.spec.n)
