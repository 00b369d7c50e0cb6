import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schromax.families import gaussian, gaussian_spectrum_exact
from schromax.grid import (
    GridFunction,
    GridSpec,
    SpectralFunction,
    from_spectrum,
    l2_norm,
    spectral_l2,
    to_spectrum,
)


def test_grid_geometry(grid1):
    assert grid1.h == pytest.approx(40 / 4096)
    assert grid1.dxi == pytest.approx(2 * math.pi / 40)
    assert grid1.nyquist == pytest.approx(math.pi / grid1.h)
    x = grid1.axis()
    assert x[0] == -20.0 and x[-1] == pytest.approx(20 - grid1.h)
    assert grid1.shape == (4096,)


def test_defaults():
    assert GridSpec.default(1) == GridSpec(1, 40.0, 4096)
    assert GridSpec.default(2) == GridSpec(2, 20.0, 256)


@pytest.mark.parametrize("kwargs", [{"N": 100}, {"N": 8}, {"L": -1.0}, {"n": 0}])
def test_grid_rejects_bad_sizes(kwargs):
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def test_cached_arrays_are_read_only(small1):
    with pytest.raises(ValueError):
        small1.xi_sq[0] = 1.0


def test_values_are_immutable(small1):
    f = GridFunction(small1, np.ones(small1.shape))
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_shape_mismatch_rejected(small1):
    with pytest.raises(ValueError):
        GridFunction(small1, np.ones(10))


def test_mixing_grids_rejected(small1, grid1):
    F = to_spectrum(GridFunction(small1, np.ones(small1.shape)))
    G = to_spectrum(GridFunction(grid1, np.ones(grid1.shape)))
    with pytest.raises(ValueError):
        F + G


def test_gaussian_transform_matches_closed_form(grid1):
    F = gaussian(grid1)
    exact = gaussian_spectrum_exact(grid1)
    assert np.max(np.abs(F.coefficients - exact.coefficients)) < 1e-12


def test_modulated_gaussian_transform(grid1):
    F = gaussian(grid1, lam=4.0)
    exact = gaussian_spectrum_exact(grid1, lam=4.0)
    assert np.max(np.abs(F.coefficients - exact.coefficients)) < 1e-10


def test_gaussian_l2(grid1):
    assert l2_norm(from_spectrum(gaussian(grid1))) == pytest.approx(math.pi**0.25, rel=1e-13)


def test_two_dimensional_gaussian(small2):
    F = gaussian(small2)
    exact = gaussian_spectrum_exact(small2)
    assert np.max(np.abs(F.coefficients - exact.coefficients)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]))
def test_round_trip_and_plancherel(seed, n):
    spec = GridSpec(n, 10.0, 64)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    f = GridFunction(spec, v)
    F = to_spectrum(f)
    assert np.allclose(from_spectrum(F).values, v, atol=1e-12)
    assert spectral_l2(F) == pytest.approx((2 * math.pi) ** (n / 2) * l2_norm(f), rel=1e-12)


def test_spectral_arithmetic(small1):
    F = SpectralFunction(small1, np.ones(small1.shape))
    G = (F + F).scaled(0.5)
    assert np.array_equal(G.coefficients, F.coefficients)
