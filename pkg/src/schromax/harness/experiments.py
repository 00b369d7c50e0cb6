"""Named verifications wiring grids, sets, covers and maximal fields together."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from schromax.covering import cover_cells, covering_profile, rhs_sum
from schromax.families import random_band_limited
from schromax.grid import SpectralFunction, from_spectrum, l2_norm
from schromax.harness.config import ExperimentConfig
from schromax.maximal import RatioReport, maximal_field, maximal_ratio, ratio_from_parts
from schromax.propagator import PropagatorParams, dispersion, propagate, support_radius
from schromax.settools import SetSpec, SpaceTimeSamples, effective_exponents, sample_set

SPREAD_LIMIT = 10.0


@dataclass
class VerificationReport:
    name: str
    inputs: dict
    measured: float
    bound: float
    passed: bool
    runtime: float = 0.0
    details: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = False) -> dict:
        out = {"name": self.name, "inputs": self.inputs, "measured": self.measured,
               "bound": self.bound, "passed": self.passed, "details": self.details}
        if timing:
            out["runtime"] = self.runtime
        return out


# ------------------------------------------------------- single cube

def _require_band(F: SpectralFunction, A: float) -> None:
    if support_radius(F) > A * (1 + 1e-12):
        raise ValueError(f"f is not band-limited to |xi| <= {A}")


def verify_cube(cfg: ExperimentConfig, corner_y, corner_t: float, r: float, A: float,
                F: SpectralFunction | None = None) -> VerificationReport:
    """``||sup_{cube} |S_t f(x+y)| ||_2 <= (1+rA)^n (1+r^a A^a) ||f||_2``."""
    start = time.perf_counter()
    if A < 1:
        raise ValueError(f"need A >= 1, got {A}")
    if r * A > 1 + 1e-12:
        raise ValueError(f"need rA <= 1, got r={r}, A={A}")
    F = cfg.function_for() if F is None else F
    _require_band(F, A)
    n, a = cfg.grid.n, cfg.a
    cube = SetSpec.box(corner_y, corner_t, r, a, n=n)
    # rA <= 1 keeps the phase change across the cube below 2 radians, so 33 points
    # per side already resolve the supremum.
    S = sample_set(cube, max(cfg.resolution, r / 32))
    measured = maximal_field(F, S, a).l2_norm()
    norm = l2_norm(from_spectrum(F))
    bound = (1 + r * A) ** n * (1 + r**a * A**a) * norm
    inputs = {"corner_y": list(np.atleast_1d(corner_y)), "corner_t": corner_t, "r": r, "A": A,
              "a": a, "n": n, "f_l2": norm, "samples": len(S)}
    return VerificationReport("verify-cube", inputs, measured, bound, measured <= bound,
                              time.perf_counter() - start)


def verify_cube_random(cfg: ExperimentConfig) -> VerificationReport:
    """The configured cube, then ``cfg.trials`` random functions and cubes with ``rA <= 1``."""
    start = time.perf_counter()
    rng = cfg.rng()
    fixed_F = random_band_limited(cfg.grid, cfg.cube_A, cfg.rng(1))
    runs = [verify_cube(cfg, np.zeros(cfg.grid.n), 0.0, cfg.cube_r, cfg.cube_A, fixed_F)]
    for _ in range(cfg.trials):
        A = float(rng.uniform(1.0, min(16.0, 0.9 * cfg.grid.nyquist)))
        r = float(rng.uniform(0.05, 1.0)) / A
        corner = rng.uniform(-2, 2, size=cfg.grid.n)
        F = random_band_limited(cfg.grid, A, rng)
        runs.append(verify_cube(cfg, corner, float(rng.uniform(0, 2)), r, A, F))
    worst = max(rep.measured / rep.bound for rep in runs)
    return VerificationReport(
        "verify-cube", {"trials": cfg.trials, "seed": cfg.seed}, worst, 1.0,
        all(rep.passed for rep in runs), time.perf_counter() - start,
        {"runs": [rep.to_dict() for rep in runs]},
    )


# ------------------------------------------------------ covered sets

def _inside_cubes(S: SpaceTimeSamples, cubes: np.ndarray, r: float, a: float) -> bool:
    lo = cubes
    hi = cubes + np.array([r] * S.n + [r**a])
    pts = np.column_stack([S.y, S.t])
    tol = 1e-12
    for chunk in np.array_split(pts, max(1, len(pts) // 4096)):
        inside = np.all((chunk[:, None, :] >= lo[None] - tol) & (chunk[:, None, :] <= hi[None] + tol), axis=2)
        if not inside.any(axis=1).all():
            return False
    return True


def verify_cover_bound(cfg: ExperimentConfig, cubes, r: float, A: float,
                       F: SpectralFunction | None = None,
                       samples: SpaceTimeSamples | None = None) -> VerificationReport:
    """``int sup_E |S_t f(x+y)|^2 dx <= 2^{2n+2} N ||f||_2^2`` for ``E`` inside ``N`` cubes."""
    start = time.perf_counter()
    if A < 1 or r * A > 1 + 1e-12:
        raise ValueError(f"need A >= 1 and rA <= 1, got r={r}, A={A}")
    cubes = np.atleast_2d(np.asarray(cubes, dtype=float))
    n, a = cfg.grid.n, cfg.a
    if cubes.shape[1] != n + 1:
        raise ValueError(f"cube corners need {n + 1} coordinates")
    F = cfg.function_for() if F is None else F
    _require_band(F, A)
    S = sample_set(cfg.set, cfg.resolution) if samples is None else samples
    if not _inside_cubes(S, cubes, r, a):
        raise ValueError("the sampled set is not contained in the given cubes")
    measured = maximal_field(F, S, a).l2_norm() ** 2
    norm = l2_norm(from_spectrum(F))
    N = len(cubes)
    bound = 2.0 ** (2 * n + 2) * N * norm**2
    inputs = {"cubes": N, "r": r, "A": A, "a": a, "n": n, "f_l2": norm, "samples": len(S)}
    return VerificationReport("verify-cover", inputs, measured, bound, measured <= bound,
                              time.perf_counter() - start)


def verify_cover_random(cfg: ExperimentConfig) -> VerificationReport:
    """Random band-limited ``f`` against the lattice cover of the configured set."""
    start = time.perf_counter()
    rng = cfg.rng()
    S = sample_set(cfg.set, cfg.resolution)
    runs = []
    for _ in range(cfg.trials):
        m = int(rng.integers(0, 5))
        r = 2.0**-m
        A = float(rng.uniform(1.0, 1 / r)) if m else 1.0
        F = random_band_limited(cfg.grid, A, rng)
        cubes = cover_cells(S, cfg.a, r)
        runs.append(verify_cover_bound(cfg, cubes, r, A, F, S))
    worst = max(rep.measured / rep.bound for rep in runs)
    return VerificationReport(
        "verify-cover", {"trials": cfg.trials, "seed": cfg.seed, "set": cfg.set.kind}, worst, 1.0,
        all(rep.passed for rep in runs), time.perf_counter() - start,
        {"runs": [rep.to_dict() for rep in runs]},
    )


# ------------------------------------------------------ maximal ratios

def verify_thmA(cfg: ExperimentConfig, F: SpectralFunction | None = None) -> RatioReport:
    if not cfg.set.time_only:
        raise ValueError("thmA mode needs a time-only set")
    F = cfg.function_for() if F is None else F
    return maximal_ratio(F, cfg.set, cfg.a, cfg.s, cfg.m_max, cfg.resolution, mode="thmA")


def verify_thm1(cfg: ExperimentConfig, F: SpectralFunction | None = None) -> RatioReport:
    F = cfg.function_for() if F is None else F
    return maximal_ratio(F, cfg.set, cfg.a, cfg.s, cfg.m_max, cfg.resolution, mode=cfg.mode)


def ratio_family(cfg: ExperimentConfig, lams=None, mode: str | None = None) -> VerificationReport:
    """Ratios for modulated Gaussians ``e^{i lam x} e^{-x^2/2}``; passes iff max/min < limit."""
    start = time.perf_counter()
    mode = mode or ("thmA" if cfg.mode == "thmA" else "thm1")
    lams = cfg.lams if lams is None else tuple(lams)
    S = sample_set(cfg.set, cfg.resolution)
    profile = covering_profile(cfg.set, cfg.a if mode == "thm1" else 1.0, range(cfg.m_max + 1))
    reports = []
    for lam in lams:
        F = cfg.function_for(lam=lam)
        fld = maximal_field(F, S, cfg.a)
        reports.append(ratio_from_parts(F, fld, profile, cfg.s, mode=mode, a=cfg.a,
                                        meta={"lam": lam}))
    ratios = [rep.ratio for rep in reports]
    spread = max(ratios) / min(ratios)
    limit = cfg.spread_max
    explicit_ok = all(rep.explicit_holds is not False for rep in reports)
    return VerificationReport(
        f"ratio-family-{mode}",
        {"lams": list(lams), "a": cfg.a, "s": cfg.s, "set": cfg.set.kind, "m_max": cfg.m_max,
         "resolution": cfg.resolution, "samples": len(S)},
        spread, limit, spread < limit and explicit_ok, time.perf_counter() - start,
        {"ratios": ratios, "explicit_bounds_hold": explicit_ok,
         "conclusive": all(rep.conclusive for rep in reports),
         "reports": [rep.to_dict() for rep in reports]},
    )


# ----------------------------------------------------------- threshold scans

def predicted_boundary(spec: SetSpec, a: float, mode: str = "thm1") -> float | None:
    """Regularity ``s`` at which the covering series switches to convergence.

    Graphs: ``a2/2``.  Sequence sets: ``a2 g/(2(g+1))`` with ``g`` the infimum of
    admissible summability exponents (``g -> 0`` for geometric sequences,
    ``g = 1/delta`` for ``t_k = k^{-delta}``, else the ``gamma`` tag).
    Time-only sets use ``a2 = a``; thmA mode measures ``s`` in units of ``a``.
    """
    if spec.curve is not None:
        a2 = effective_exponents(spec, a)[1]
    else:
        a2 = a
    if spec.kind in ("curve_graph", "time_interval"):
        return a2 / 2
    if spec.kind in ("curve_sequence", "time_sequence"):
        seq = spec.sequence
        if seq.kind == "geometric":
            g = 0.0
        elif seq.kind == "power":
            g = 1 / seq.delta
        elif seq.gamma is not None:
            g = seq.gamma
        else:
            return None
        return a2 * g / (2 * (g + 1))
    return None


def scan_s(cfg: ExperimentConfig, s_grid=None, with_ratio: bool = True) -> VerificationReport:
    """Classify the covering series over a grid of ``s`` and locate the boundary."""
    start = time.perf_counter()
    s_grid = cfg.s_grid if s_grid is None else tuple(s_grid)
    if not all(0 < s <= 4 for s in s_grid):
        raise ValueError("s grid must lie in (0, 4]")
    mode = cfg.mode
    if mode == "thmA" and not cfg.set.time_only:
        raise ValueError("thmA mode needs a time-only set")
    b = cfg.a if mode == "thm1" else 1.0
    profile = covering_profile(cfg.set, b, range(cfg.m_min, cfg.m_max + 1))
    fld = F = None
    if with_ratio and cfg.m_min == 0:
        F = cfg.function_for()
        fld = maximal_field(F, sample_set(cfg.set, cfg.resolution), cfg.a)
    rows = []
    for s in s_grid:
        rep = rhs_sum(profile, s, mode=mode, a=cfg.a)
        ratio = math.nan
        if fld is not None and rep.convergent:
            ratio = ratio_from_parts(F, fld, profile, s, mode=mode, a=cfg.a).ratio
        rows.append({"s": s, "growth_exponent": rep.growth_exponent, "convergent": rep.convergent,
                     "converged": rep.converged, "partial_sum": rep.total, "ratio": ratio})
    flags = [row["convergent"] for row in rows]
    monotone = all(not f1 or f2 for f1, f2 in itertools.pairwise(flags))
    boundary = next((row["s"] for row in rows if row["convergent"]), math.nan)
    predicted = predicted_boundary(cfg.set, cfg.a, mode)
    step = s_grid[1] - s_grid[0] if len(s_grid) > 1 else 0.0
    if predicted is None:
        ok = monotone
    elif predicted < s_grid[0]:
        ok = monotone and all(flags)
    else:
        ok = monotone and abs(boundary - predicted) <= step + 1e-9
    details = {"rows": rows, "monotone": monotone, "predicted": predicted,
               "profile_slope": profile.slope(max(cfg.m_min, (cfg.m_min + cfg.m_max) // 2)),
               "profile": profile.to_dict(), "mode": mode}
    return VerificationReport(
        "scan-s", {"set": cfg.set.kind, "a": cfg.a, "s_grid": list(s_grid), "m_min": cfg.m_min,
                   "m_max": cfg.m_max},
        boundary, math.nan if predicted is None else predicted, ok,
        time.perf_counter() - start, details,
    )


# -------------------------------------------------------- pointwise decay

def convergence_experiment(cfg: ExperimentConfig, F: SpectralFunction | None = None) -> VerificationReport:
    """``d_k = max_x |S_{t_k} f(x + Gamma(t_k)) - f(x)|`` along a sequence set.

    Each ``d_k`` is compared with the multiplier bound
    ``|e^{i(t|xi|^a + xi.y)} - 1| <= t|xi|^a + |xi||y|``, which gives
    ``d_k <= t_k C_a + |y_k| C_1`` with ``C_p = (2 pi)^{-n} sum |xi|^p |f^| dxi^n``.
    """
    start = time.perf_counter()
    spec = cfg.set
    if not spec.discrete:
        raise ValueError("the convergence experiment needs a sequence set")
    F = cfg.function_for() if F is None else F
    g = F.spec
    f = from_spectrum(F).values
    t = spec.sequence.first(cfg.k_max)
    ys = np.zeros((len(t), g.n)) if spec.curve is None else spec.curve.points(t, g.n)
    w = (2 * math.pi) ** (-g.n) * g.dxi**g.n
    absF = np.abs(F.coefficients)
    c_a = w * math.fsum((dispersion(g, cfg.a) * absF).ravel().tolist())
    c_1 = w * math.fsum((np.sqrt(g.xi_sq) * absF).ravel().tolist())
    rows = []
    for k, (tk, yk) in enumerate(zip(t, ys), 1):
        u = propagate(F, PropagatorParams(cfg.a, float(tk), tuple(yk))).values
        d = float(np.max(np.abs(u - f)))
        bound = tk * c_a + float(np.linalg.norm(yk)) * c_1
        rows.append({"k": k, "t": float(tk), "d": d, "d_over_t": d / tk, "oracle_bound": bound})
    d = np.array([row["d"] for row in rows])
    tail = d[2:] if len(d) > 3 else d
    decreasing = bool(np.all(np.diff(tail) < 0))
    oracle_ok = all(row["d"] <= row["oracle_bound"] for row in rows)
    fitted_c = rows[0]["d"] / rows[0]["t"]
    fitted_ok = all(row["d"] <= fitted_c * row["t"] for row in rows)
    details = {"rows": rows, "C_a": c_a, "C_1": c_1, "strictly_decreasing_from_k3": decreasing,
               "oracle_bound_holds": oracle_ok, "fitted_C_k1": fitted_c,
               "fitted_C_holds": fitted_ok}
    return VerificationReport(
        "converge", {"a": cfg.a, "k_max": cfg.k_max, "set": spec.kind}, float(d[-1]),
        float(rows[-1]["oracle_bound"]), decreasing and oracle_ok, time.perf_counter() - start,
        details,
    )
