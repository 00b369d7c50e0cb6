"""Space-time sets: Holder curve graphs, time sequences and boxes.

A :class:`SetSpec` is a symbolic description; :func:`sample_set` turns it into a
finite :class:`SpaceTimeSamples` whose points lie exactly on the set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

HEAD = 10  # sequence terms always kept by sample_set
MAX_SAMPLES = 1 << 24


def load_values(path) -> tuple[float, ...]:
    """Read one float per line; blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(float(line))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not out:
        raise ValueError(f"{path}: no values")
    return tuple(out)


# --------------------------------------------------------------------- curves

CURVE_KINDS = ("power", "weierstrass", "constant", "explicit")


@dataclass(frozen=True)
class CurveSpec:
    """Scalar profile ``Gamma(t)`` on ``[0, 1]`` acting along a unit vector.

    ``power``: ``c t^beta``; ``weierstrass``: ``c sum_{j=1}^J 2^{-beta j} cos(2^j t)``;
    ``constant``: ``c``; ``explicit``: piecewise-linear through ``values`` on a
    uniform grid of ``[0, 1]``.
    """

    kind: str = "power"
    beta: float = 1.0
    c: float = 1.0
    J: int = 20
    values: tuple[float, ...] = ()
    direction: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if not self.beta > 0:
            raise ValueError(f"Holder exponent beta must be > 0, got {self.beta}")
        if self.kind in ("power", "weierstrass", "explicit") and self.beta > 1:
            # only constant curves are beta-Holder with beta > 1
            raise ValueError(f"{self.kind} curve needs beta <= 1, got {self.beta}")
        if self.kind == "weierstrass" and self.J < 1:
            raise ValueError("weierstrass curve needs J >= 1")
        if self.kind == "explicit":
            if len(self.values) < 2:
                raise ValueError("explicit curve needs at least two values")
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.direction is not None:
            e = np.asarray(self.direction, dtype=float)
            norm = float(np.linalg.norm(e))
            if e.ndim != 1 or norm == 0:
                raise ValueError("direction must be a nonzero vector")
            object.__setattr__(self, "direction", tuple((e / norm).tolist()))

    @classmethod
    def from_file(cls, path, beta: float, c: float = 1.0) -> CurveSpec:
        return cls("explicit", beta=beta, c=c, values=load_values(path))

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            return self.c * t**self.beta
        if self.kind == "constant":
            return np.full_like(t, self.c)
        if self.kind == "weierstrass":
            out = np.zeros_like(t)
            for j in range(1, self.J + 1):
                out += 2.0 ** (-self.beta * j) * np.cos(2.0**j * t)
            return self.c * out
        knots = np.linspace(0.0, 1.0, len(self.values))
        return self.c * np.interp(t, knots, self.values)

    def unit_vector(self, n: int) -> np.ndarray:
        if self.direction is None:
            e = np.zeros(n)
            e[0] = 1.0
            return e
        if len(self.direction) != n:
            raise ValueError(f"curve direction has length {len(self.direction)}, expected {n}")
        return np.asarray(self.direction)

    def points(self, t, n: int) -> np.ndarray:
        return np.outer(self(t), self.unit_vector(n))

    @property
    def lipschitz_constant(self) -> float:
        c = abs(self.c)
        if self.kind == "constant":
            return 0.0
        if self.kind == "power":
            return c if self.beta == 1 else math.inf
        if self.kind == "weierstrass":
            return c * sum(2.0 ** ((1 - self.beta) * j) for j in range(1, self.J + 1))
        v = np.asarray(self.values)
        return c * float(np.max(np.abs(np.diff(v)))) * (len(v) - 1)

    @property
    def holder_constant(self) -> float:
        """``C`` with ``|Gamma(t1) - Gamma(t2)| <= C |t1 - t2|^beta`` on ``[0, 1]``."""
        c = abs(self.c)
        if self.kind == "constant":
            return 0.0
        if self.kind == "power":
            # |t1^b - t2^b| <= |t1 - t2|^b for 0 < b <= 1
            return c
        if self.kind == "weierstrass":
            b = self.beta
            if b == 1:
                return c * self.J
            series = 2.0 ** (1 - b) * (1 / (1 - 2.0 ** (b - 1)) + 1 / (1 - 2.0 ** (-b)))
            return min(c * series, self.lipschitz_constant)
        # Lipschitz on [0, 1] implies beta-Holder for beta <= 1
        return self.lipschitz_constant

    def step_for(self, d: float) -> float:
        """A parameter step guaranteeing ``|Gamma(t+dt) - Gamma(t)| <= d``."""
        steps = [0.0]
        C = self.holder_constant
        if C == 0:
            return math.inf
        steps.append((d / C) ** (1 / self.beta))
        lip = self.lipschitz_constant
        if math.isfinite(lip):
            steps.append(d / lip)
        return max(steps)


# ------------------------------------------------------------------ sequences

SEQUENCE_KINDS = ("geometric", "power", "explicit")


@dataclass(frozen=True)
class SequenceSpec:
    """Decreasing positive times ``t_1 > t_2 > ... > 0``.

    ``geometric``: ``t_k = rho^k``; ``power``: ``t_k = k^{-delta}`` (so ``t_1 = 1``);
    ``explicit``: the given values.  ``kmax`` truncates the generators;
    ``gamma`` tags the exponent for which ``sum t_k^gamma`` is finite.
    """

    kind: str = "geometric"
    rho: float = 0.5
    delta: float = 1.0
    values: tuple[float, ...] = ()
    kmax: int | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in SEQUENCE_KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "geometric" and not 0 < self.rho < 1:
            raise ValueError(f"geometric ratio must lie in (0, 1), got {self.rho}")
        if self.kind == "power" and not self.delta > 0:
            raise ValueError(f"power exponent must be > 0, got {self.delta}")
        if self.kmax is not None and self.kmax < 1:
            raise ValueError("kmax must be >= 1")
        if self.kind == "explicit":
            v = np.asarray(self.values, dtype=float)
            if v.size == 0:
                raise ValueError("explicit sequence is empty")
            if not (v[0] <= 1 and v[-1] > 0 and np.all(np.diff(v) < 0)):
                raise ValueError("explicit sequence must satisfy 1 >= t_1 > t_2 > ... > 0")
            object.__setattr__(self, "values", tuple(v.tolist()))

    @classmethod
    def from_file(cls, path, gamma: float | None = None) -> SequenceSpec:
        return cls("explicit", values=load_values(path), gamma=gamma)

    @property
    def infinite(self) -> bool:
        return self.kind != "explicit" and self.kmax is None

    def _generate(self, K: int) -> np.ndarray:
        k = np.arange(1, K + 1, dtype=float)
        if self.kind == "geometric":
            return self.rho**k
        return 1.0 / k**self.delta

    def _count_at_least(self, resolution: float) -> int:
        if self.kind == "geometric":
            K = math.floor(math.log(resolution) / math.log(self.rho)) + 2
        else:
            K = math.floor(resolution ** (-1 / self.delta)) + 2
        K = max(K, 1)
        if K > MAX_SAMPLES:
            raise ValueError(f"resolution {resolution} needs {K} sequence terms (> {MAX_SAMPLES})")
        t = self._generate(K)
        return int(np.count_nonzero(t >= resolution))

    def first(self, K: int) -> np.ndarray:
        """The first ``K`` terms (fewer if the sequence is shorter)."""
        if self.kind == "explicit":
            return np.asarray(self.values[:K])
        if self.kmax is not None:
            K = min(K, self.kmax)
        return self._generate(K)

    def terms(self, resolution: float | None = None) -> np.ndarray:
        """All ``t_k >= resolution`` plus the first ``HEAD`` terms (capped by ``kmax``)."""
        if self.kind == "explicit":
            return np.asarray(self.values)
        if resolution is None:
            if self.kmax is None:
                raise ValueError("infinite sequence needs a resolution or kmax")
            K = self.kmax
        else:
            if not resolution > 0:
                raise ValueError(f"resolution must be > 0, got {resolution}")
            K = max(HEAD, self._count_at_least(resolution))
            if self.kmax is not None:
                K = min(K, self.kmax)
        return self._generate(K)


@dataclass(frozen=True)
class Summability:
    partial_sum: float
    decay_exponent: float
    converges: bool


def summability(seq: SequenceSpec, gamma: float, kmax: int = 10**6, tol: float = 1e-2) -> Summability:
    """Classify ``sum t_k^gamma`` from its first ``kmax`` terms.

    The decay exponent ``p`` of ``t_k^gamma ~ k^{-p}`` is read off between
    ``kmax/10`` and ``kmax``; the series is declared convergent iff ``p > 1 + tol``
    (or the terms vanish, which happens for geometric sequences).
    """
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    if seq.kind == "explicit":
        t = np.asarray(seq.values)
        return Summability(math.fsum((t**gamma).tolist()), math.inf, True)
    K = kmax if seq.kmax is None else min(kmax, seq.kmax)
    t = seq._generate(K) ** gamma
    total = math.fsum(t.tolist())
    lo = max(K // 10, 1)
    if t[-1] == 0 or t[lo - 1] == 0:
        return Summability(total, math.inf, True)
    p = -(math.log(t[-1]) - math.log(t[lo - 1])) / math.log(K / lo)
    return Summability(total, p, p > 1 + tol)


# ----------------------------------------------------------------------- sets

SET_KINDS = ("time_interval", "time_sequence", "curve_graph", "curve_sequence", "box")


@dataclass(frozen=True)
class SetSpec:
    """Bounded set ``E`` in ``R^{n+1}`` (space ``R^n`` times time)."""

    kind: str
    n: int = 1
    T: float = 1.0
    curve: CurveSpec | None = None
    sequence: SequenceSpec | None = None
    corner_y: tuple[float, ...] | None = None
    corner_t: float = 0.0
    r: float = 1.0
    box_a: float = 2.0

    def __post_init__(self):
        if self.kind not in SET_KINDS:
            raise ValueError(f"unknown set kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "time_interval" and not (self.T >= 0 and math.isfinite(self.T)):
            raise ValueError(f"interval end T must be finite and >= 0, got {self.T}")
        if self.kind in ("curve_graph", "curve_sequence") and self.curve is None:
            raise ValueError(f"{self.kind} needs a curve")
        if self.kind in ("time_sequence", "curve_sequence") and self.sequence is None:
            raise ValueError(f"{self.kind} needs a sequence")
        if self.curve is not None:
            self.curve.unit_vector(self.n)
        if self.kind == "box":
            y0 = (0.0,) * self.n if self.corner_y is None else tuple(float(v) for v in self.corner_y)
            if len(y0) != self.n:
                raise ValueError(f"box corner must have length {self.n}")
            if not (self.r >= 0 and self.box_a > 0):
                raise ValueError("box needs r >= 0 and a > 0")
            object.__setattr__(self, "corner_y", y0)

    @classmethod
    def time_interval(cls, T: float = 1.0, n: int = 1) -> SetSpec:
        return cls("time_interval", n=n, T=T)

    @classmethod
    def time_sequence(cls, seq: SequenceSpec, n: int = 1) -> SetSpec:
        return cls("time_sequence", n=n, sequence=seq)

    @classmethod
    def curve_graph(cls, curve: CurveSpec, n: int = 1) -> SetSpec:
        return cls("curve_graph", n=n, curve=curve)

    @classmethod
    def curve_sequence(cls, curve: CurveSpec, seq: SequenceSpec, n: int = 1) -> SetSpec:
        return cls("curve_sequence", n=n, curve=curve, sequence=seq)

    @classmethod
    def box(cls, corner_y=None, corner_t: float = 0.0, r: float = 1.0, a: float = 2.0, n: int = 1) -> SetSpec:
        return cls("box", n=n, corner_y=corner_y, corner_t=corner_t, r=r, box_a=a)

    @property
    def time_only(self) -> bool:
        return self.kind in ("time_interval", "time_sequence")

    @property
    def discrete(self) -> bool:
        return self.kind in ("time_sequence", "curve_sequence")

    def closure_point(self) -> tuple[np.ndarray, float] | None:
        """The limit point ``(Gamma(0), 0)`` of an infinite sequence set, else None."""
        if not (self.discrete and self.sequence.infinite):
            return None
        if self.curve is None:
            return np.zeros(self.n), 0.0
        return self.curve.points(np.array([0.0]), self.n)[0], 0.0


@dataclass(frozen=True, eq=False)
class SpaceTimeSamples:
    """Finite subset of a set ``E``.

    ``max_dy`` / ``max_dt`` bound the per-coordinate displacement between
    neighbouring samples of a continuum set; both are None for discrete sets.
    """

    y: np.ndarray
    t: np.ndarray
    source: SetSpec | None = None
    density: float | None = None
    max_dy: float | None = None
    max_dt: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        t = np.array(self.t, dtype=float).ravel()
        if y.ndim == 1:
            y = y.reshape(len(t), -1)
        if len(t) == 0:
            raise ValueError("sample set is empty")
        if y.shape[0] != len(t):
            raise ValueError("y and t sample counts differ")
        y.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", t)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def n(self) -> int:
        return self.y.shape[1]

    @classmethod
    def from_points(cls, points, n: int = 1) -> SpaceTimeSamples:
        """Discrete samples from ``(y_1..y_n, t)`` rows."""
        arr = np.asarray(points, dtype=float).reshape(-1, n + 1)
        return cls(arr[:, :n], arr[:, n])


def _lattice(start: float, length: float, resolution: float) -> np.ndarray:
    if length == 0:
        return np.array([start])
    K = math.ceil(length / resolution)
    return start + np.linspace(0.0, length, K + 1)


def _check_size(count: float) -> None:
    if count > MAX_SAMPLES:
        raise ValueError(f"sampling would create {int(count)} points (> {MAX_SAMPLES})")


def sample_set(spec: SetSpec, resolution: float) -> SpaceTimeSamples:
    """Deterministic finite sampling of ``spec`` with parameter step ``<= resolution``."""
    if not resolution > 0:
        raise ValueError(f"resolution must be > 0, got {resolution}")
    n = spec.n
    if spec.kind == "time_interval":
        _check_size(spec.T / resolution)
        t = _lattice(0.0, spec.T, resolution)
        step = t[1] - t[0] if len(t) > 1 else 0.0
        return SpaceTimeSamples(np.zeros((len(t), n)), t, spec, resolution, 0.0, step)
    if spec.kind == "curve_graph":
        _check_size(1 / resolution)
        t = _lattice(0.0, 1.0, resolution)
        y = spec.curve.points(t, n)
        dy = float(np.max(np.abs(np.diff(y, axis=0)))) if len(t) > 1 else 0.0
        return SpaceTimeSamples(y, t, spec, resolution, dy, float(t[1] - t[0]))
    if spec.kind in ("time_sequence", "curve_sequence"):
        t = spec.sequence.terms(resolution)
        y = np.zeros((len(t), n)) if spec.curve is None else spec.curve.points(t, n)
        return SpaceTimeSamples(y, t, spec, resolution)
    # box
    side_t = spec.r**spec.box_a if spec.r > 0 else 0.0
    per_axis = max(spec.r / resolution, 1) + 1
    _check_size(per_axis**n * (max(side_t / resolution, 1) + 1))
    axes = [_lattice(c, spec.r, resolution) for c in spec.corner_y]
    axes.append(_lattice(spec.corner_t, side_t, resolution))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    dy = max((ax[1] - ax[0] if len(ax) > 1 else 0.0) for ax in axes[:-1])
    dt = axes[-1][1] - axes[-1][0] if len(axes[-1]) > 1 else 0.0
    return SpaceTimeSamples(pts[:, :n], pts[:, n], spec, resolution, float(dy), float(dt))


def project_time(S: SpaceTimeSamples) -> np.ndarray:
    """Sorted, deduplicated time coordinates of the samples."""
    return np.unique(S.t)


def dyadic_block_counts(seq: SequenceSpec, j_max: int) -> list[int]:
    """``#A_j`` for ``j = 0..j_max`` where ``A_j = {t_k : 2^{-j-1} < t_k <= 2^{-j}}``."""
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    t = seq.terms(2.0 ** (-j_max - 1))
    mant, expo = np.frexp(t)
    # t = mant * 2^expo; an exact power 2^{-j} has mant = 1/2
    j = np.where(mant == 0.5, 1 - expo, -expo)
    counts = np.bincount(j[(j >= 0) & (j <= j_max)], minlength=j_max + 1)
    return [int(c) for c in counts[: j_max + 1]]


def effective_exponents(spec: SetSpec, a: float) -> tuple[float, float]:
    """``(a1, a2) = (1/beta, max(a, 1/beta))``."""
    if spec.curve is None:
        raise ValueError(f"set kind {spec.kind!r} has no curve, so no Holder exponent")
    if not a > 0:
        raise ValueError("a must be > 0")
    a1 = 1.0 / spec.curve.beta
    return a1, max(a, a1)
