"""Covering numbers of time sets and anisotropic space-time sets.

Three counting methods are used:

* ``greedy`` -- left-to-right interval sweep, exactly minimal in one dimension;
* ``grid``   -- occupied cells of the origin-anchored lattice with spacing
  ``r`` in space and ``r^b`` in time (within ``2^{n+1}`` of the minimum);
* ``brute``  -- exhaustive minimum for tiny point sets, used as an oracle.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from schromax.settools import (
    MAX_SAMPLES,
    SetSpec,
    SpaceTimeSamples,
    effective_exponents,
    project_time,
    sample_set,
)

BRUTE_1D_LIMIT = 12
BRUTE_ANISO_LIMIT = 6


def _as_times(points) -> np.ndarray:
    pts = np.unique(np.asarray(points, dtype=float).ravel())
    if pts.size == 0:
        raise ValueError("cannot cover an empty point set")
    return pts


def _check_r(r: float) -> None:
    if not (r > 0 and math.isfinite(r)):
        raise ValueError(f"side length r must be positive, got {r}")


def cover_1d(points, r: float) -> int:
    """Minimal number of closed intervals of length ``r`` covering ``points``."""
    _check_r(r)
    pts = _as_times(points)
    count, i = 0, 0
    while i < len(pts):
        count += 1
        i = int(np.searchsorted(pts, pts[i] + r, side="right"))
    return count


def cover_1d_bruteforce(points, r: float) -> int:
    """Exhaustive minimum over interval anchors placed at the points."""
    _check_r(r)
    raw = np.asarray(points, dtype=float).ravel()
    if raw.size > BRUTE_1D_LIMIT:
        raise ValueError(f"brute force is limited to {BRUTE_1D_LIMIT} points, got {raw.size}")
    pts = [float(p) for p in _as_times(raw)]
    for k in range(1, len(pts) + 1):
        for anchors in itertools.combinations(pts, k):
            if all(any(p <= q <= p + r for p in anchors) for q in pts):
                return k
    raise AssertionError("unreachable: singletons always cover")


def _time_side(r: float, b: float) -> float:
    return r**b


def _check_aniso_args(b: float, r: float) -> None:
    if not b > 0:
        raise ValueError(f"time exponent b must be > 0, got {b}")
    if not 0 < r <= 1:
        raise ValueError(f"r must lie in (0, 1], got {r}")


def _cells(y: np.ndarray, t: np.ndarray, b: float, r: float) -> np.ndarray:
    idx = np.column_stack([np.floor(y / r), np.floor(t / _time_side(r, b))]).astype(np.int64)
    lo = idx.min(axis=0)
    dims = idx.max(axis=0) - lo + 1
    if np.prod(dims.astype(float)) < 2.0**62:
        # one integer key per cell is much cheaper than a row-wise unique
        keys = np.unique(np.ravel_multi_index((idx - lo).T, tuple(dims)))
        return np.column_stack(np.unravel_index(keys, tuple(dims))) + lo
    return np.unique(idx, axis=0)


def cover_aniso(S: SpaceTimeSamples, b: float, r: float) -> int:
    """Occupied lattice cells of side ``r`` (space) by ``r^b`` (time)."""
    _check_aniso_args(b, r)
    if S.max_dy is not None and (S.max_dy > r or S.max_dt > _time_side(r, b)):
        raise ValueError(
            f"samples too coarse for r={r}, b={b}: steps ({S.max_dy:.3g}, {S.max_dt:.3g}) "
            f"exceed ({r:.3g}, {_time_side(r, b):.3g})"
        )
    return len(_cells(S.y, S.t, b, r))


def cover_cells(S: SpaceTimeSamples, b: float, r: float) -> np.ndarray:
    """Lower corners ``(y_1..y_n, t)`` of the occupied lattice cells."""
    _check_aniso_args(b, r)
    cells = _cells(S.y, S.t, b, r).astype(float)
    cells[:, :-1] *= r
    cells[:, -1] *= _time_side(r, b)
    return cells


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def cover_aniso_bruteforce(S: SpaceTimeSamples, b: float, r: float) -> int:
    """Exact minimal number of (freely placed) ``b``-cubes of side ``r``.

    A group of points fits in one box iff its extent is at most ``r`` in every
    spatial coordinate and at most ``r^b`` in time, so the minimum is the
    smallest admissible partition.
    """
    _check_aniso_args(b, r)
    if len(S) > BRUTE_ANISO_LIMIT:
        raise ValueError(f"brute force is limited to {BRUTE_ANISO_LIMIT} points, got {len(S)}")
    pts = np.column_stack([S.y, S.t])
    sides = np.array([r] * S.n + [_time_side(r, b)])

    def fits(block):
        sub = pts[block]
        return bool(np.all(sub.max(axis=0) - sub.min(axis=0) <= sides))

    best = len(pts)
    for part in _set_partitions(list(range(len(pts)))):
        if len(part) < best and all(fits(blk) for blk in part):
            best = len(part)
    return best


# ------------------------------------------------------------------ profiles

@dataclass(frozen=True)
class ProfileEntry:
    m: int
    r: float
    count: int
    method: str


@dataclass(frozen=True)
class CoveringProfile:
    b: float
    entries: tuple[ProfileEntry, ...]

    def __post_init__(self):
        ms = [e.m for e in self.entries]
        if not ms:
            raise ValueError("profile needs at least one entry")
        if any(m2 <= m1 for m1, m2 in itertools.pairwise(ms)):
            raise ValueError("profile m values must be strictly increasing")

    @classmethod
    def constant(cls, value: int, m_range, b: float = 1.0, method: str = "given") -> CoveringProfile:
        return cls(b, tuple(ProfileEntry(m, 2.0**-m, value, method) for m in m_range))

    @property
    def ms(self) -> np.ndarray:
        return np.array([e.m for e in self.entries])

    @property
    def counts(self) -> np.ndarray:
        return np.array([e.count for e in self.entries], dtype=float)

    def slope(self, m_lo: int | None = None, m_hi: int | None = None) -> float:
        """Least-squares slope of ``log2 N(2^{-m})`` against ``m``."""
        ms = self.ms
        sel = np.ones(len(ms), bool)
        if m_lo is not None:
            sel &= ms >= m_lo
        if m_hi is not None:
            sel &= ms <= m_hi
        if sel.sum() < 2:
            raise ValueError("need at least two profile entries to fit a slope")
        return float(np.polyfit(ms[sel], np.log2(self.counts[sel]), 1)[0])

    def to_csv(self) -> str:
        lines = ["m,r,count,method"]
        lines += [f"{e.m},{e.r:.17g},{e.count},{e.method}" for e in self.entries]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"b": self.b, "entries": [asdict(e) for e in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _graph_cells_monotone(spec: SetSpec, b: float, r: float) -> int:
    """Exact occupied-cell count for the graph of a monotone curve over ``[0, 1]``.

    Each half-open time slab ``[j tau, (j+1) tau)`` maps onto an interval of
    curve values, so the cells it meets are read off the slab endpoints.
    """
    curve = spec.curve
    tau = _time_side(r, b)
    n_full = math.floor(1.0 / tau)
    if n_full + 1 > MAX_SAMPLES:
        raise ValueError(f"{n_full + 1} time slabs exceed the limit {MAX_SAMPLES}")
    lo = np.arange(n_full) * tau
    g_lo, g_hi = curve(lo) / r, curve(lo + tau) / r
    if curve.kind == "constant":
        full = np.ones(n_full)
    elif curve.c >= 0:
        full = np.maximum(np.ceil(g_hi) - np.floor(g_lo), 1)
    else:
        full = np.floor(g_lo) - np.floor(g_hi) + 1
    count = int(full.sum())
    last = n_full * tau
    if last <= 1.0:
        v0, v1 = curve(np.array([last, 1.0])) / r
        count += int(abs(math.floor(v1) - math.floor(v0))) + 1
    return count


def _sampling_resolution(spec: SetSpec, b: float, r: float) -> float:
    """Parameter step making neighbouring samples move at most half a cell."""
    tau = _time_side(r, b)
    if spec.kind == "box":
        return min(r, tau) / 2 if spec.r > 0 else 1.0
    step = tau / 2
    if spec.curve is not None:
        step = min(step, spec.curve.step_for(r / 2))
    return step


def count_set(spec: SetSpec, b: float, r: float) -> tuple[int, str]:
    """``N_{E,b}(r)`` for a set description, with the method used."""
    if spec.time_only:
        _check_r(r)
        ell = _time_side(r, b)
        if spec.kind == "time_interval":
            # the greedy sweep over a continuum interval tiles it exactly
            return (max(1, math.ceil(spec.T / ell)) if spec.T > 0 else 1), "greedy"
        times = project_time(sample_set(spec, ell))
        if spec.sequence.infinite:
            # closed intervals cover E iff they cover its closure, which adds 0
            times = np.concatenate([[0.0], times])
        return cover_1d(times, ell), "greedy"
    if (
        spec.kind == "curve_graph"
        and spec.curve.kind in ("power", "constant")
        and spec.curve.direction is None
    ):
        return _graph_cells_monotone(spec, b, r), "grid"
    _check_aniso_args(b, r)
    S = sample_set(spec, _sampling_resolution(spec, b, r))
    closure = spec.closure_point()
    if closure is not None:
        y0, t0 = closure
        S = SpaceTimeSamples(np.vstack([y0, S.y]), np.concatenate([[t0], S.t]), spec)
    return cover_aniso(S, b, r), "grid"


def covering_profile(spec: SetSpec, b: float, m_range) -> CoveringProfile:
    """``m -> N_{E,b}(2^{-m})`` over ``m_range``, resampling ``spec`` per scale."""
    ms = list(m_range)
    if not ms:
        raise ValueError("m_range is empty")
    entries = []
    for m in ms:
        r = 2.0**-m
        count, method = count_set(spec, b, r)
        entries.append(ProfileEntry(int(m), r, int(count), method))
    return CoveringProfile(b, tuple(entries))


# ----------------------------------------------------------------- RHS sums

@dataclass(frozen=True)
class SumReport:
    """Truncated series ``sum_m N(2^{-m}) w_m``.

    ``converged`` follows the strict rule (last five increments each below
    ``1e-6`` of the running sum); ``convergent`` classifies the infinite series
    by the fitted tail exponent of the terms, which is what threshold scans use.
    """

    s: float
    mode: str
    a: float | None
    ms: tuple[int, ...]
    terms: tuple[float, ...]
    partial_sums: tuple[float, ...]
    converged: bool
    growth_exponent: float
    convergent: bool
    extrapolated_sum: float
    m_max: int

    @property
    def total(self) -> float:
        return self.partial_sums[-1]

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(self).items()}


def fit_tail_exponent(ms, values) -> float:
    """Slope of ``log2 values`` over the upper half of ``ms`` (at least 3 points)."""
    ms = np.asarray(ms, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(ms) < 2:
        return math.nan
    k = max(3, (len(ms) + 1) // 2)
    ms, v = ms[-k:], v[-k:]
    return float(np.polyfit(ms, np.log2(v), 1)[0])


def rhs_sum(profile: CoveringProfile, s: float, mode: str = "thm1", a: float | None = None,
            tol: float = 1e-9) -> SumReport:
    """Partial sums of ``N 2^{-2ms}`` (``thm1``) or ``N 2^{-2ms/a}`` (``thmA``)."""
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s}")
    if mode == "thm1":
        rate = 2 * s
    elif mode == "thmA":
        if a is None or not a > 0:
            raise ValueError("thmA mode needs a > 0")
        rate = 2 * s / a
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ms = profile.ms
    terms = profile.counts * 2.0 ** (-rate * ms)
    partial = np.array([math.fsum(terms[: i + 1].tolist()) for i in range(len(terms))])
    converged = len(terms) >= 5 and all(
        terms[i] < 1e-6 * partial[i] for i in range(len(terms) - 5, len(terms))
    )
    expo = fit_tail_exponent(ms, terms)
    convergent = converged or (math.isfinite(expo) and expo < -tol)
    if convergent and math.isfinite(expo) and expo < 0:
        q = 2.0**expo
        extrap = float(partial[-1] + terms[-1] * q / (1 - q))
    elif convergent:
        extrap = float(partial[-1])
    else:
        extrap = math.inf
    return SumReport(
        s=float(s), mode=mode, a=a, ms=tuple(int(m) for m in ms),
        terms=tuple(terms.tolist()), partial_sums=tuple(partial.tolist()),
        converged=bool(converged), growth_exponent=expo, convergent=bool(convergent),
        extrapolated_sum=extrap, m_max=int(ms[-1]),
    )


# ------------------------------------------------------------------- lemmas

@dataclass(frozen=True)
class Lemma1Report:
    r: float
    b: float
    b1: float
    count_b: int
    count_b1: int
    method: str
    slack: float
    monotone_holds: bool
    scaling_holds: bool

    @property
    def holds(self) -> bool:
        return self.monotone_holds and self.scaling_holds


def lemma1_check(source, r: float, b: float, b1: float) -> Lemma1Report:
    """Check ``N_b(r) <= N_b1(r)`` and ``N_b1(r) <= r^{b-b1} N_b(r)`` for ``b < b1``.

    Brute-force counts (sample sets of at most six points) are checked
    exactly; lattice counts get slack ``2^{n+1}``.
    """
    if not 0 < b < b1:
        raise ValueError(f"need 0 < b < b1, got b={b}, b1={b1}")
    if not 0 < r <= 1:
        raise ValueError(f"r must lie in (0, 1], got {r}")
    if isinstance(source, SpaceTimeSamples):
        n = source.n
        if len(source) <= BRUTE_ANISO_LIMIT:
            nb = cover_aniso_bruteforce(source, b, r)
            nb1 = cover_aniso_bruteforce(source, b1, r)
            method, slack = "brute", 1.0
        else:
            nb, nb1 = cover_aniso(source, b, r), cover_aniso(source, b1, r)
            method, slack = "grid", 2.0 ** (n + 1)
    else:
        n = source.n
        (nb, method), (nb1, _) = count_set(source, b, r), count_set(source, b1, r)
        slack = 1.0 if method == "greedy" else 2.0 ** (n + 1)
    return Lemma1Report(
        r=r, b=b, b1=b1, count_b=nb, count_b1=nb1, method=method, slack=slack,
        monotone_holds=nb <= slack * nb1,
        scaling_holds=nb1 <= slack * r ** (b - b1) * nb,
    )


@dataclass(frozen=True)
class Lemma2Report:
    r: float
    b: float
    count_set: int
    count_projection: int

    @property
    def ratio(self) -> float:
        return self.count_set / self.count_projection


def _projection_spec(spec: SetSpec) -> SetSpec:
    if spec.kind == "curve_graph":
        return SetSpec.time_interval(1.0, n=spec.n)
    if spec.kind == "curve_sequence":
        return SetSpec.time_sequence(spec.sequence, n=spec.n)
    raise ValueError(f"set kind {spec.kind!r} is not a curve set")


def lemma2_check(spec: SetSpec, r: float, b: float) -> Lemma2Report:
    """Both sides of ``N_{E,b}(r) <~ N_{E_0}(r^b)`` for a curve set, ``b >= 1/beta``."""
    a1, _ = effective_exponents(spec, b)
    if b < a1:
        raise ValueError(f"need b >= 1/beta = {a1}, got {b}")
    n_e, _ = count_set(spec, b, r)
    n_e0, _ = count_set(_projection_spec(spec), 1.0, r**b)
    return Lemma2Report(r, b, n_e, n_e0)


@dataclass(frozen=True)
class Lemma2Scan:
    reports: tuple[Lemma2Report, ...]
    growth_slope: float
    growing: bool = field(default=False)

    @property
    def max_ratio(self) -> float:
        return max(rep.ratio for rep in self.reports)


def lemma2_scan(spec: SetSpec, b: float, m_range, growth_tol: float = 0.1) -> Lemma2Scan:
    """Ratios ``N_{E,b}(r) / N_{E_0}(r^b)`` over ``r = 2^{-m}``.

    Flags a ratio that grows like a power of ``1/r``.
    """
    reports = tuple(lemma2_check(spec, 2.0**-m, b) for m in m_range)
    ms = np.array(list(m_range), dtype=float)
    ratios = np.array([rep.ratio for rep in reports])
    slope = float(np.polyfit(ms, np.log2(ratios), 1)[0]) if len(ms) > 1 else 0.0
    return Lemma2Scan(reports, slope, slope > growth_tol)
