"""``schromax`` command line.

Exit codes: 0 all verifications passed, 1 some verification failed,
2 usage or configuration error.
"""

from __future__ import annotations

import functools
import math
import sys
from importlib import resources
from pathlib import Path

import click
import numpy as np

from schromax.covering import covering_profile, rhs_sum
from schromax.grid import from_spectrum, l2_norm
from schromax.harness import experiments as ex
from schromax.harness.config import EXPERIMENTS, ConfigError, ExperimentConfig, load_config
from schromax.harness.reports import (
    SCHEMA_VERSION,
    csv_text,
    dumps,
    spectrum_csv,
    write_atomic,
    write_plot_data,
)
from schromax.maximal import maximal_field
from schromax.propagator import PropagatorParams, propagate, sobolev_norm
from schromax.settools import sample_set


def _grid_rows(spec, *arrays):
    mesh = np.meshgrid(*([spec.axis()] * spec.n), indexing="ij")
    cols = [m.ravel() for m in mesh] + [np.ravel(a) for a in arrays]
    return zip(*(c.tolist() for c in cols))


def _x_header(n):
    return ["x"] if n == 1 else [f"x{j + 1}" for j in range(n)]


class Outcome:
    def __init__(self, passed: bool, report, csv_header=None, csv_rows=None, plots=None, extra=None):
        self.passed = passed
        self.report = report
        self.csv_header = csv_header
        self.csv_rows = csv_rows
        self.plots = plots or {}
        self.extra = extra or {}


def _ratio_rows(reports):
    return [[rep.meta.get("lam", 0.0), rep.lhs, rep.rhs, rep.ratio,
             math.nan if rep.explicit_bound is None else rep.explicit_bound] for rep in reports]


def _run_experiment(cfg: ExperimentConfig, timing: bool) -> Outcome:
    name = cfg.name
    if name == "cover":
        prof = covering_profile(cfg.set, cfg.b, range(cfg.m_min, cfg.m_max + 1))
        slope = prof.slope() if len(prof.entries) > 1 else math.nan
        lo, hi = cfg.slope_range
        ok = (math.isnan(lo) or slope >= lo) and (math.isnan(hi) or slope <= hi)
        rows = [[e.m, e.r, e.count, e.method] for e in prof.entries]
        return Outcome(ok, {"profile": prof.to_dict(), "slope": slope, "slope_range": [lo, hi]},
                       ["m", "r", "count", "method"], rows,
                       {"profile": (prof.ms, np.log2(prof.counts))})
    if name == "rhs-sum":
        b = cfg.a if cfg.mode == "thm1" else 1.0
        prof = covering_profile(cfg.set, b, range(cfg.m_min, cfg.m_max + 1))
        rep = rhs_sum(prof, cfg.s, mode=cfg.mode, a=cfg.a)
        rows = [[e.m, e.r, e.count, g, p] for e, g, p in zip(prof.entries, rep.terms, rep.partial_sums)]
        return Outcome(True, {"profile": prof.to_dict(), "sum": rep.to_dict()},
                       ["m", "r", "count", "term", "partial_sum"], rows,
                       {"partial_sums": (rep.ms, rep.partial_sums)})
    if name == "propagate":
        F = cfg.function_for()
        y = cfg.y if len(cfg.y) == cfg.grid.n else cfg.y[:1] * cfg.grid.n
        u = propagate(F, PropagatorParams(cfg.a, cfg.t, y))
        f = from_spectrum(F)
        rep = {"t": cfg.t, "y": list(y), "a": cfg.a, "f_l2": l2_norm(f), "u_l2": l2_norm(u),
               "sobolev": sobolev_norm(F, cfg.s), "s": cfg.s}
        rows = list(_grid_rows(cfg.grid, u.values.real, u.values.imag, np.abs(u.values)))
        plots = {"abs_u": (cfg.grid.axis(), np.abs(u.values))} if cfg.grid.n == 1 else {}
        return Outcome(True, rep, _x_header(cfg.grid.n) + ["re", "im", "abs"], rows, plots,
                       {"spectrum.csv": spectrum_csv(F)})
    if name == "maximal":
        F = cfg.function_for()
        S = sample_set(cfg.set, cfg.resolution)
        fld = maximal_field(F, S, cfg.a)
        rep = {"l2": fld.l2_norm(), "f_l2": l2_norm(from_spectrum(F)), "samples": len(S), "a": cfg.a}
        plots = {"maximal": (cfg.grid.axis(), fld.values)} if cfg.grid.n == 1 else {}
        return Outcome(True, rep, _x_header(cfg.grid.n) + ["value"],
                       list(_grid_rows(cfg.grid, fld.values)), plots)
    if name in ("verify-cube", "verify-cover"):
        rep = ex.verify_cube_random(cfg) if name == "verify-cube" else ex.verify_cover_random(cfg)
        runs = rep.details["runs"]
        rows = [[i, run["inputs"]["r"], run["inputs"]["A"], run["measured"], run["bound"], run["passed"]]
                for i, run in enumerate(runs)]
        return Outcome(rep.passed, rep.to_dict(timing), ["trial", "r", "A", "measured", "bound", "passed"], rows)
    if name in ("verify-thmA", "verify-thm1"):
        mode = "thmA" if name == "verify-thmA" else cfg.mode
        if mode == "thmA" and not cfg.set.time_only:
            raise ValueError("verify-thmA needs a time-only set")
        if cfg.function.family == "modulated_gaussian":
            rep = ex.ratio_family(cfg, mode=mode)
            reps = rep.details["reports"]
            rows = [[r["meta"]["lam"], r["lhs"], r["rhs"], r["ratio"],
                     math.nan if r["explicit_bound"] is None else r["explicit_bound"]] for r in reps]
            return Outcome(rep.passed, rep.to_dict(timing), ["lam", "lhs", "rhs", "ratio", "explicit_bound"], rows)
        single = ex.verify_thmA(cfg) if mode == "thmA" else ex.verify_thm1(cfg)
        return Outcome(single.explicit_holds is not False, single.to_dict(),
                       ["lam", "lhs", "rhs", "ratio", "explicit_bound"], _ratio_rows([single]))
    if name == "scan-s":
        rep = ex.scan_s(cfg)
        rows = [[r["s"], r["growth_exponent"], r["convergent"], r["partial_sum"], r["ratio"]]
                for r in rep.details["rows"]]
        plots = {"growth_exponent": ([r[0] for r in rows], [r[1] for r in rows])}
        return Outcome(rep.passed, rep.to_dict(timing),
                       ["s", "growth_exponent", "convergent", "partial_sum", "ratio"], rows, plots)
    if name == "converge":
        rep = ex.convergence_experiment(cfg)
        rows = [[r["k"], r["t"], r["d"], r["d_over_t"], r["oracle_bound"]] for r in rep.details["rows"]]
        plots = {"decay": ([r[0] for r in rows], [r[2] for r in rows])}
        return Outcome(rep.passed, rep.to_dict(timing), ["k", "t", "d", "d_over_t", "oracle_bound"], rows, plots)
    raise ConfigError(f"unknown experiment {name!r}")


def execute(cfg: ExperimentConfig, emit_plot_data: bool = False, timing: bool = False) -> Outcome:
    """Run ``cfg`` and write ``<dir>/<prefix>.json`` and ``.csv`` (plus extras)."""
    outcome = _run_experiment(cfg, timing)
    out = Path(cfg.out_dir)
    doc = {"schema": SCHEMA_VERSION, "experiment": cfg.name, "passed": outcome.passed,
           "config": cfg.raw, "report": outcome.report}
    write_atomic(out / f"{cfg.prefix}.json", dumps(doc) + "\n")
    if outcome.csv_header:
        write_atomic(out / f"{cfg.prefix}.csv", csv_text(outcome.csv_header, outcome.csv_rows))
    for suffix, text in outcome.extra.items():
        write_atomic(out / f"{cfg.prefix}_{suffix}", text)
    if emit_plot_data:
        for curve, (xs, ys) in outcome.plots.items():
            write_plot_data(out / "plot", f"{cfg.prefix}_{curve}", xs, ys)
    return outcome


def _parse_sets(values) -> dict[str, str]:
    out = {}
    for item in values:
        key, sep, value = item.partition("=")
        if not sep:
            raise click.BadParameter(f"{item!r} is not section.key=value", param_hint="--set")
        out[key.strip()] = value.strip()
    return out


def _load(config, sets, name=None, out=None) -> ExperimentConfig:
    overrides = _parse_sets(sets)
    if name is not None:
        overrides["experiment.name"] = name
    if out is not None:
        overrides["output.dir"] = out
    try:
        return load_config(config, overrides)
    except (ConfigError, ValueError) as exc:
        raise click.UsageError(str(exc)) from None


def _finish(cfg: ExperimentConfig, emit_plot_data: bool, timing: bool) -> bool:
    try:
        outcome = execute(cfg, emit_plot_data, timing)
    except (ConfigError, ValueError) as exc:
        raise click.UsageError(f"{cfg.name}: {exc}") from None
    status = "PASS" if outcome.passed else "FAIL"
    click.echo(f"{status} {cfg.name} -> {Path(cfg.out_dir) / cfg.prefix}.json")
    return outcome.passed


def common_options(func):
    @click.option("--config", "config", type=click.Path(dir_okay=False), default=None,
                  help="INI config file; missing keys take defaults.")
    @click.option("--set", "sets", multiple=True, metavar="SECTION.KEY=VALUE",
                  help="Override a config key (repeatable).")
    @click.option("--out", default=None, help="Output directory (overrides output.dir).")
    @click.option("--emit-plot-data", is_flag=True, help="Also write two-column plot files.")
    @click.option("--timing", is_flag=True, help="Include runtimes in JSON (breaks byte-identity).")
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)

    return wrapper


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Schrodinger maximal-function laboratory."""


def _make_command(exp_name: str):
    @main.command(name=exp_name, help=f"Run the {exp_name} experiment.")
    @common_options
    def command(config, sets, out, emit_plot_data, timing):
        cfg = _load(config, sets, exp_name, out)
        sys.exit(0 if _finish(cfg, emit_plot_data, timing) else 1)

    return command


for _name in EXPERIMENTS:
    _make_command(_name)


def battery_configs() -> list[Path]:
    root = resources.files("schromax") / "configs"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".ini"))


@main.command()
@click.argument("configs", nargs=-1, type=click.Path(dir_okay=False))
@click.option("--battery", is_flag=True, help="Run every shipped config.")
@click.option("--set", "sets", multiple=True, metavar="SECTION.KEY=VALUE")
@click.option("--out", default=None)
@click.option("--emit-plot-data", is_flag=True)
@click.option("--timing", is_flag=True)
def run(configs, battery, sets, out, emit_plot_data, timing):
    """Run experiments described by config files."""
    paths = [Path(c) for c in configs]
    if battery:
        paths += battery_configs()
    if not paths:
        raise click.UsageError("give at least one config file or --battery")
    cfgs = [_load(p, sets, None, out) for p in paths]
    results = [_finish(cfg, emit_plot_data, timing) for cfg in cfgs]
    sys.exit(0 if all(results) else 1)


if __name__ == "__main__":
    main()
