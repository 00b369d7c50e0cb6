import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schromax.covering import (
    CoveringProfile,
    count_set,
    cover_1d,
    cover_1d_bruteforce,
    cover_aniso,
    cover_aniso_bruteforce,
    cover_cells,
    covering_profile,
    fit_tail_exponent,
    lemma1_check,
    lemma2_check,
    lemma2_scan,
    rhs_sum,
)
from schromax.settools import CurveSpec, SequenceSpec, SetSpec, SpaceTimeSamples, sample_set

points_1d = st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=10)


@settings(max_examples=300, deadline=None)
@given(points_1d, st.floats(0.01, 0.6))
def test_greedy_is_optimal(pts, r):
    assert cover_1d(pts, r) == cover_1d_bruteforce(pts, r)


def test_greedy_closed_intervals():
    assert cover_1d([0.0, 0.5, 1.0], 0.5) == 2
    assert cover_1d([0.0, 1.0], 1.0) == 1
    assert cover_1d([0.3, 0.3, 0.3], 0.1) == 1


def test_cover_rejects_bad_input():
    with pytest.raises(ValueError):
        cover_1d([], 0.1)
    with pytest.raises(ValueError):
        cover_1d([0.0], 0.0)
    with pytest.raises(ValueError):
        cover_1d_bruteforce(np.linspace(0, 1, 20), 0.1)
    S = SpaceTimeSamples.from_points(np.zeros((7, 2)))
    with pytest.raises(ValueError):
        cover_aniso_bruteforce(S, 2.0, 0.5)
    with pytest.raises(ValueError):
        cover_aniso(S, 2.0, 1.5)


space_time = st.lists(st.tuples(st.floats(-1, 1), st.floats(0, 1)), min_size=1, max_size=6)


@settings(max_examples=300, deadline=None)
@given(space_time, st.sampled_from([0.125, 0.25, 0.5, 1.0]), st.sampled_from([1.0, 2.0, 3.0]))
def test_grid_count_within_slack_of_minimum(pts, r, b):
    S = SpaceTimeSamples.from_points(pts)
    brute = cover_aniso_bruteforce(S, b, r)
    grid = cover_aniso(S, b, r)
    assert brute <= grid <= 4 * brute


def test_cover_cells_contain_samples():
    S = sample_set(SetSpec.curve_graph(CurveSpec("power", beta=0.5)), 2.0**-10)
    r, b = 0.25, 2.0
    cells = cover_cells(S, b, r)
    assert len(cells) == cover_aniso(S, b, r)
    pts = np.column_stack([S.y, S.t])
    side = np.array([r, r**b])
    inside = np.all((pts[:, None] >= cells[None] - 1e-12) & (pts[:, None] <= cells[None] + side + 1e-12), axis=2)
    assert inside.any(axis=1).all()


def test_coarse_samples_rejected():
    S = sample_set(SetSpec.curve_graph(CurveSpec("power", beta=1.0)), 0.5)
    with pytest.raises(ValueError):
        cover_aniso(S, 2.0, 0.125)


def test_interval_count_is_exact():
    assert count_set(SetSpec.time_interval(1.0), 1.0, 0.25) == (4, "greedy")
    assert count_set(SetSpec.time_interval(1.0), 2.0, 0.25) == (16, "greedy")
    assert count_set(SetSpec.time_interval(0.0), 1.0, 0.25) == (1, "greedy")


def test_geometric_sequence_counts_are_logarithmic():
    spec = SetSpec.time_sequence(SequenceSpec("geometric", rho=0.5))
    n, _ = count_set(spec, 1.0, 2.0**-10)
    assert n == 10


def test_finite_sequence_has_no_closure():
    spec = SetSpec.time_sequence(SequenceSpec("explicit", values=(0.9, 0.5, 0.1)))
    assert count_set(spec, 1.0, 0.01)[0] == 3


def test_graph_slab_count_matches_fine_sampling():
    spec = SetSpec.curve_graph(CurveSpec("power", beta=0.5))
    for m in (1, 2, 3):
        exact, _ = count_set(spec, 2.0, 2.0**-m)
        sampled = cover_aniso(sample_set(spec, 2.0**-18), 2.0, 2.0**-m)
        assert exact == sampled


def test_sqrt_graph_profile():
    spec = SetSpec.curve_graph(CurveSpec("power", beta=0.5))
    prof = covering_profile(spec, 2.0, range(8))
    assert prof.counts.tolist() == [4**m + 1 for m in range(8)]


def test_harmonic_curve_sequence_profile():
    spec = SetSpec.curve_sequence(CurveSpec("power", beta=0.5), SequenceSpec("power", delta=1))
    prof = covering_profile(spec, 2.0, range(2, 8))
    assert prof.slope() == pytest.approx(1.0, abs=0.05)


def test_profile_serialisation():
    prof = covering_profile(SetSpec.time_interval(), 1.0, range(3))
    assert prof.to_csv().splitlines()[0] == "m,r,count,method"
    assert json.loads(prof.to_json())["entries"][2]["count"] == 4
    const = CoveringProfile.constant(5, range(4))
    assert const.counts.tolist() == [5] * 4
    assert const.slope() == pytest.approx(0, abs=1e-12)


def test_tail_exponent():
    ms = np.arange(10)
    assert fit_tail_exponent(ms, 2.0 ** (-0.5 * ms)) == pytest.approx(-0.5)
    assert math.isnan(fit_tail_exponent([1], [1.0]))


def test_rhs_sum_modes():
    prof = covering_profile(SetSpec.time_interval(), 1.0, range(21))
    assert rhs_sum(prof, 0.6, mode="thmA", a=1.0).convergent
    assert not rhs_sum(prof, 0.5, mode="thmA", a=1.0).convergent
    assert not rhs_sum(prof, 0.9, mode="thmA", a=2.0).convergent
    rep = rhs_sum(prof, 1.5, mode="thm1")
    assert rep.converged and rep.growth_exponent == pytest.approx(-2.0, abs=1e-6)
    # sum of 2^m 2^{-3m} = 4/3 in the limit
    assert rep.extrapolated_sum == pytest.approx(4 / 3, rel=1e-6)
    with pytest.raises(ValueError):
        rhs_sum(prof, 1.0, mode="thmA")
    with pytest.raises(ValueError):
        rhs_sum(prof, 0.0)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.tuples(st.floats(-1, 1), st.floats(0, 1)), min_size=1, max_size=6),
    st.integers(1, 3), st.sampled_from([(1.0, 2.0), (1.0, 3.0), (2.0, 3.0)]),
)
def test_lemma1_on_bruteforce_counts(pts, m, bb):
    b, b1 = bb
    rep = lemma1_check(SpaceTimeSamples.from_points(pts), 2.0**-m, b, b1)
    assert rep.method == "brute" and rep.holds


def test_lemma1_on_sets():
    spec = SetSpec.curve_graph(CurveSpec("power", beta=0.5))
    assert lemma1_check(spec, 0.25, 2.0, 3.0).holds
    with pytest.raises(ValueError):
        lemma1_check(spec, 0.25, 3.0, 2.0)


def test_lemma2_sqrt_graph_bounded():
    spec = SetSpec.curve_graph(CurveSpec("power", beta=0.5))
    scan = lemma2_scan(spec, 2.0, range(2, 9))
    assert not scan.growing and scan.max_ratio < 2
    with pytest.raises(ValueError):
        lemma2_check(spec, 0.25, 1.0)
