"""Maximal functions ``sup_{(y,t) in E} |S_t f(x + y)|`` over sampled sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from schromax.covering import CoveringProfile, SumReport, covering_profile, rhs_sum
from schromax.grid import GridSpec, SpectralFunction, fsum_sq
from schromax.propagator import propagate_batch, shell_index, sobolev_norm
from schromax.settools import SetSpec, SpaceTimeSamples, sample_set


@dataclass(frozen=True, eq=False)
class MaximalField:
    spec: GridSpec
    values: np.ndarray
    source: SpectralFunction
    samples: SpaceTimeSamples

    def l2_norm(self) -> float:
        return math.sqrt(fsum_sq(self.values) * self.spec.h**self.spec.n)

    def to_csv(self) -> str:
        n = self.spec.n
        header = "x,value" if n == 1 else ",".join(f"x{j + 1}" for j in range(n)) + ",value"
        grids = np.meshgrid(*([self.spec.axis()] * n), indexing="ij")
        cols = [g.ravel() for g in grids] + [self.values.ravel()]
        rows = (",".join(f"{v:.17g}" for v in row) for row in zip(*cols))
        return header + "\n" + "\n".join(rows) + "\n"


def maximal_field(F: SpectralFunction, S: SpaceTimeSamples, a: float, chunk: int = 32) -> MaximalField:
    """Pointwise max of ``|S_t f(x + y)|`` over the samples ``(y, t)``.

    A finite sample set gives a lower bound for the supremum over the full set.
    Samples are streamed in chunks, so memory stays at ``chunk`` grid copies.
    """
    if not a > 0:
        raise ValueError(f"dispersion exponent a must be > 0, got {a}")
    if len(S) == 0:
        raise ValueError("sample set is empty")
    if S.n != F.spec.n:
        raise ValueError(f"samples live in R^{S.n}, grid in R^{F.spec.n}")
    ys = None if not np.any(S.y) else S.y
    best = np.zeros(F.spec.shape)
    for block in propagate_batch(F, a, S.t, ys, chunk=chunk):
        np.maximum(best, block.max(axis=0), out=best)
    best.setflags(write=False)
    return MaximalField(F.spec, best, F, S)


@dataclass(frozen=True)
class RatioReport:
    """Both sides of ``||S*_E f||_2 <~ (sum_m N 2^{-2ms})^{1/2} ||f||_{H_s}``.

    ``explicit_bound`` is the same right side with the constant carried
    through the dyadic argument, ``(2^{2n+2} 4^s (2 pi)^{-n})^{1/2}``; it is
    only reported when the truncated sum reaches the highest dyadic shell
    in which ``f`` has spectrum, since then truncation loses nothing.
    """

    lhs: float
    rhs: float
    ratio: float
    sobolev: float
    sum: SumReport
    conclusive: bool
    explicit_bound: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def explicit_holds(self) -> bool | None:
        return None if self.explicit_bound is None else self.lhs <= self.explicit_bound

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio, "sobolev": self.sobolev,
            "conclusive": self.conclusive, "explicit_bound": self.explicit_bound,
            "explicit_holds": self.explicit_holds, "sum": self.sum.to_dict(), "meta": self.meta,
        }


def top_shell(F: SpectralFunction) -> int:
    nz = F.coefficients != 0
    return int(shell_index(F.spec)[nz].max()) if nz.any() else 0


def ratio_from_parts(F: SpectralFunction, field_: MaximalField, profile: CoveringProfile,
                     s: float, mode: str = "thm1", a: float | None = None,
                     meta: dict | None = None) -> RatioReport:
    """Assemble a :class:`RatioReport` from a computed field and profile."""
    report = rhs_sum(profile, s, mode=mode, a=a)
    hs = sobolev_norm(F, s)
    lhs = field_.l2_norm()
    rhs = math.sqrt(report.total) * hs
    explicit = None
    n = F.spec.n
    if mode == "thm1" and report.ms[0] == 0 and report.m_max >= top_shell(F) and profile.b == a:
        const = 2.0 ** (2 * n + 2) * 4.0**s * (2 * math.pi) ** (-n)
        explicit = math.sqrt(const * report.total) * hs
    return RatioReport(
        lhs=lhs, rhs=rhs, ratio=lhs / rhs if rhs > 0 else math.inf, sobolev=hs, sum=report,
        conclusive=report.convergent, explicit_bound=explicit, meta=dict(meta or {}),
    )


def maximal_ratio(F: SpectralFunction, spec: SetSpec, a: float, s: float, m_max: int,
                  resolution: float, mode: str = "thm1", chunk: int = 32) -> RatioReport:
    """LHS/RHS of the maximal estimate for ``E = spec``.

    ``mode="thm1"`` counts ``a``-cubes and weights ``2^{-2ms}``; ``mode="thmA"``
    (time-only sets) counts intervals and weights ``2^{-2ms/a}``.
    """
    if not s > 0:
        raise ValueError(f"s must be > 0, got {s}")
    if mode == "thmA" and not spec.time_only:
        raise ValueError("thmA mode needs a time-only set")
    S = sample_set(spec, resolution)
    fld = maximal_field(F, S, a, chunk=chunk)
    b = a if mode == "thm1" else 1.0
    profile = covering_profile(spec, b, range(m_max + 1))
    meta = {"a": a, "s": s, "mode": mode, "m_max": m_max, "resolution": resolution,
            "samples": len(S), "set": spec.kind,
            "grid": {"n": F.spec.n, "L": F.spec.L, "N": F.spec.N}}
    return ratio_from_parts(F, fld, profile, s, mode=mode, a=a, meta=meta)
