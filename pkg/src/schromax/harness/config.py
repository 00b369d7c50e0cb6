"""Plain-text experiment configs.

INI-style ``key = value`` pairs in the sections ``experiment``, ``grid``,
``function``, ``set``, ``params`` and ``output``.  Every key has a default;
unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from schromax.families import gaussian, indicator_spectrum, random_band_limited
from schromax.grid import GridSpec, SpectralFunction
from schromax.harness.reports import read_spectrum_csv
from schromax.propagator import band_limit
from schromax.settools import CurveSpec, SequenceSpec, SetSpec

EXPERIMENTS = (
    "cover", "rhs-sum", "propagate", "maximal", "verify-cube", "verify-cover",
    "verify-thmA", "verify-thm1", "scan-s", "converge",
)
FAMILIES = ("gaussian", "modulated_gaussian", "band_limited", "indicator", "spectrum_file")


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


# section -> key -> (parser, default text)
SCHEMA: dict[str, dict[str, tuple]] = {
    "experiment": {"name": (str, "verify-thm1"), "seed": (int, "0"), "trials": (int, "20")},
    "grid": {"n": (int, "1"), "L": (float, ""), "N": (int, "")},
    "function": {
        "family": (str, "gaussian"), "lam": (float, "0"), "width": (float, "1"),
        "A": (float, "8"), "band": (float, "0"), "path": (str, ""),
    },
    "set": {
        "kind": (str, "curve_graph"), "T": (float, "1"),
        "curve": (str, "power"), "beta": (float, "0.5"), "c": (float, "1"), "J": (int, "20"),
        "curve_path": (str, ""),
        "sequence": (str, "power"), "rho": (float, "0.5"), "delta": (float, "1"),
        "kmax": (int, "0"), "sequence_path": (str, ""), "gamma": (float, "0"),
        "corner_y": (_floats, "0"), "corner_t": (float, "0"), "r": (float, "1"), "box_a": (float, "2"),
    },
    "params": {
        "a": (float, "2"), "s": (float, "1.1"), "b": (float, "0"), "mode": (str, "thm1"),
        "m_min": (int, "0"), "m_max": (int, ""), "resolution": (float, "0.0009765625"),
        "s_min": (float, "0.5"), "s_max": (float, "1.5"), "s_step": (float, "0.05"),
        "lams": (_floats, "0,4,16,64"), "t": (float, "0.5"), "y": (_floats, "0"),
        "cube_r": (float, "0.125"), "cube_A": (float, "8"), "k_max": (int, "20"),
        "slope_min": (float, "nan"), "slope_max": (float, "nan"), "spread_max": (float, "10"),
    },
    "output": {"dir": (str, "out"), "prefix": (str, "")},
}


@dataclass(frozen=True)
class FunctionSpec:
    family: str = "gaussian"
    lam: float = 0.0
    width: float = 1.0
    A: float = 8.0
    band: float = 0.0
    path: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    seed: int
    trials: int
    grid: GridSpec
    function: FunctionSpec
    set: SetSpec
    a: float
    s: float
    b: float
    mode: str
    m_min: int
    m_max: int
    resolution: float
    s_grid: tuple[float, ...]
    lams: tuple[float, ...]
    t: float
    y: tuple[float, ...]
    cube_r: float
    cube_A: float
    k_max: int
    slope_range: tuple[float, float]
    spread_max: float
    out_dir: str
    prefix: str
    raw: dict = field(default_factory=dict, compare=False)

    def rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)

    def function_for(self, lam: float | None = None, rng: np.random.Generator | None = None) -> SpectralFunction:
        return make_function(self.grid, self.function, lam=lam, rng=rng or self.rng())


def make_function(grid: GridSpec, fs: FunctionSpec, lam: float | None = None,
                  rng: np.random.Generator | None = None) -> SpectralFunction:
    lam = fs.lam if lam is None else lam
    if fs.family == "gaussian":
        F = gaussian(grid, 0.0, fs.width)
    elif fs.family == "modulated_gaussian":
        F = gaussian(grid, lam, fs.width)
    elif fs.family == "band_limited":
        F = random_band_limited(grid, fs.A, rng if rng is not None else np.random.default_rng(0))
    elif fs.family == "indicator":
        F = indicator_spectrum(grid, fs.A)
    else:
        if not fs.path:
            raise ConfigError("family spectrum_file needs function.path")
        F = read_spectrum_csv(fs.path, grid)
    if fs.band > 0:
        F = band_limit(F, fs.band)
    return F


def _parse_raw(parser: configparser.ConfigParser) -> dict[str, dict[str, str]]:
    raw = {sec: {k: d for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}
    for sec in parser.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key, value in parser.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
            raw[sec][key] = value.strip()
    return raw


def _optional(v, empty=0):
    return None if v == empty else v


def _build_set(v: dict, n: int, base: Path) -> SetSpec:
    kind = v["kind"]
    seq = curve = None
    if kind in ("time_sequence", "curve_sequence"):
        if v["sequence"] == "explicit":
            if not v["sequence_path"]:
                raise ConfigError("explicit sequence needs set.sequence_path")
            seq = SequenceSpec.from_file(base / v["sequence_path"], gamma=_optional(v["gamma"]))
        else:
            seq = SequenceSpec(v["sequence"], rho=v["rho"], delta=v["delta"],
                               kmax=_optional(v["kmax"]), gamma=_optional(v["gamma"]))
    if kind in ("curve_graph", "curve_sequence"):
        if v["curve"] == "explicit":
            if not v["curve_path"]:
                raise ConfigError("explicit curve needs set.curve_path")
            curve = CurveSpec.from_file(base / v["curve_path"], beta=v["beta"], c=v["c"])
        else:
            curve = CurveSpec(v["curve"], beta=v["beta"], c=v["c"], J=v["J"])
    if kind == "box":
        corner = v["corner_y"] if len(v["corner_y"]) == n else v["corner_y"][:1] * n
        return SetSpec.box(corner, v["corner_t"], v["r"], v["box_a"], n=n)
    return SetSpec(kind, n=n, T=v["T"], curve=curve, sequence=seq)


def build_config(raw: dict[str, dict[str, str]], base: Path | None = None) -> ExperimentConfig:
    base = base or Path(".")
    vals: dict[str, dict] = {}
    for sec, keys in SCHEMA.items():
        vals[sec] = {}
        for key, (conv, _) in keys.items():
            text = raw[sec][key]
            if text == "":
                vals[sec][key] = None
                continue
            try:
                vals[sec][key] = conv(text)
            except ValueError:
                raise ConfigError(f"[{sec}] {key} = {text!r}: cannot parse") from None
    e, g, f, st, p, o = (vals[k] for k in ("experiment", "grid", "function", "set", "params", "output"))
    if e["name"] not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {e['name']!r}; choose from {', '.join(EXPERIMENTS)}")
    if f["family"] not in FAMILIES:
        raise ConfigError(f"unknown function family {f['family']!r}")
    try:
        n = g["n"]
        default = GridSpec.default(n) if n in (1, 2) else None
        grid = GridSpec(n, g["L"] or (default.L if default else 20.0), g["N"] or (default.N if default else 64))
        the_set = _build_set(st, n, base)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not p["a"] > 0:
        raise ConfigError("params.a must be > 0")
    if not p["s"] > 0:
        raise ConfigError("params.s must be > 0")
    if p["mode"] not in ("thm1", "thmA"):
        raise ConfigError("params.mode must be thm1 or thmA")
    if not p["s_step"] > 0 or not 0 < p["s_min"] <= p["s_max"] <= 4:
        raise ConfigError("s grid must satisfy 0 < s_min <= s_max <= 4 with s_step > 0")
    m_max = p["m_max"]
    if m_max is None:
        m_max = 20 if the_set.time_only else 10
    count = math.floor((p["s_max"] - p["s_min"]) / p["s_step"] + 1e-9) + 1
    s_grid = tuple(round(p["s_min"] + i * p["s_step"], 12) for i in range(count))
    return ExperimentConfig(
        name=e["name"], seed=e["seed"], trials=e["trials"], grid=grid,
        function=FunctionSpec(f["family"], f["lam"], f["width"], f["A"], f["band"], f["path"] or ""),
        set=the_set, a=p["a"], s=p["s"], b=p["b"] or p["a"], mode=p["mode"],
        m_min=p["m_min"], m_max=m_max, resolution=p["resolution"], s_grid=s_grid,
        lams=p["lams"], t=p["t"], y=p["y"], cube_r=p["cube_r"], cube_A=p["cube_A"],
        k_max=p["k_max"], slope_range=(p["slope_min"], p["slope_max"]),
        spread_max=p["spread_max"], out_dir=o["dir"], prefix=o["prefix"] or e["name"],
        raw=raw,
    )


def load_config(path=None, overrides: dict[str, str] | None = None, text: str | None = None) -> ExperimentConfig:
    """Read a config file (or ``text``), apply ``section.key`` overrides, validate."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    base = Path(".")
    try:
        if path is not None:
            path = Path(path)
            if not path.is_file():
                raise ConfigError(f"config file not found: {path}")
            parser.read_string(path.read_text(), source=str(path))
            base = path.parent
        if text is not None:
            parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    for dotted, value in (overrides or {}).items():
        sec, _, key = dotted.partition(".")
        if not key:
            raise ConfigError(f"override {dotted!r} must look like section.key")
        if not parser.has_section(sec):
            if sec not in SCHEMA:
                raise ConfigError(f"unknown section [{sec}]")
            parser.add_section(sec)
        parser.set(sec, key, value)
    return build_config(_parse_raw(parser), base)
