import math

import numpy as np
import pytest

from schromax.covering import CoveringProfile
from schromax.families import gaussian, random_band_limited
from schromax.grid import GridSpec, from_spectrum, l2_norm
from schromax.maximal import maximal_field, maximal_ratio, ratio_from_parts, top_shell
from schromax.propagator import PropagatorParams, propagate
from schromax.settools import CurveSpec, SequenceSpec, SetSpec, SpaceTimeSamples, sample_set


def test_single_sample_is_the_evolution(small1, rng):
    F = random_band_limited(small1, 4.0, rng)
    S = SpaceTimeSamples.from_points([[0.7, 0.3]])
    fld = maximal_field(F, S, 2.0)
    u = propagate(F, PropagatorParams(2.0, 0.3, (0.7,))).values
    assert np.allclose(fld.values, np.abs(u), atol=1e-13)


def test_dominates_initial_data(small1, rng):
    F = random_band_limited(small1, 4.0, rng)
    fld = maximal_field(F, sample_set(SetSpec.time_interval(1.0), 0.05), 2.0)
    assert np.all(fld.values >= np.abs(from_spectrum(F).values) - 1e-13)
    assert fld.l2_norm() >= l2_norm(from_spectrum(F))


def test_monotone_under_inclusion(small1, rng):
    F = random_band_limited(small1, 6.0, rng)
    seq = SequenceSpec("geometric", rho=0.5)
    small = maximal_field(F, sample_set(SetSpec.time_sequence(seq), 0.1), 2.0)
    big = maximal_field(F, sample_set(SetSpec.time_interval(1.0), 2.0**-8), 2.0)
    both = SpaceTimeSamples.from_points(
        np.column_stack([np.zeros(len(small.samples) + len(big.samples)),
                         np.concatenate([small.samples.t, big.samples.t])]))
    union = maximal_field(F, both, 2.0)
    assert np.all(union.values >= small.values - 1e-13)
    assert np.allclose(union.values, np.maximum(small.values, big.values), atol=1e-13)


def test_chunking_does_not_matter(small1, rng):
    F = random_band_limited(small1, 4.0, rng)
    S = sample_set(SetSpec.curve_graph(CurveSpec("power", beta=0.5)), 0.02)
    a = maximal_field(F, S, 2.0, chunk=1).values
    b = maximal_field(F, S, 2.0, chunk=64).values
    assert np.array_equal(a, b)


def test_dimension_mismatch(small2):
    with pytest.raises(ValueError):
        maximal_field(gaussian(small2), SpaceTimeSamples.from_points([[0.0, 0.0]]), 2.0)


def test_csv_layout(small1):
    fld = maximal_field(gaussian(small1), SpaceTimeSamples.from_points([[0.0, 0.0]]), 2.0)
    lines = fld.to_csv().splitlines()
    assert lines[0] == "x,value" and len(lines) == small1.N + 1


def test_top_shell(small1):
    assert top_shell(gaussian(small1, lam=0.0)) >= 3


def test_ratio_report_for_interval(grid1):
    F = gaussian(grid1)
    rep = maximal_ratio(F, SetSpec.time_interval(1.0), 2.0, 1.1, m_max=20, resolution=2.0**-8,
                        mode="thmA")
    assert rep.conclusive and 0 < rep.ratio < 1
    assert rep.explicit_bound is None


def test_explicit_bound_holds_for_sqrt_graph():
    grid = GridSpec(1, 40.0, 1024)
    spec = SetSpec.curve_graph(CurveSpec("power", beta=0.5))
    F = gaussian(grid, lam=4.0)
    rep = maximal_ratio(F, spec, 2.0, 1.1, m_max=10, resolution=2.0**-8)
    assert rep.explicit_bound is not None and rep.explicit_holds
    assert rep.rhs <= rep.explicit_bound


def test_ratio_from_constant_profile(small1):
    F = gaussian(small1)
    fld = maximal_field(F, SpaceTimeSamples.from_points([[0.0, 0.0]]), 2.0)
    prof = CoveringProfile.constant(1, range(30), b=2.0)
    rep = ratio_from_parts(F, fld, prof, 1.0, a=2.0)
    # N = 1: the series is sum 4^{-m} = 4/3 up to truncation
    assert rep.sum.total == pytest.approx(4 / 3, rel=1e-8)
    assert rep.rhs == pytest.approx(math.sqrt(rep.sum.total) * rep.sobolev)


def test_thmA_mode_requires_time_only(small1):
    spec = SetSpec.curve_graph(CurveSpec("power", beta=0.5))
    with pytest.raises(ValueError):
        maximal_ratio(gaussian(small1), spec, 2.0, 1.1, 5, 0.1, mode="thmA")
