"""Command-line front end: ``lambda-osc {dressed,steady,sweep,figures,validate,rates}``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__, config as cfgmod
from .config import ConfigError, RunConfig
from .generator import assemble
from .observables import ZeroDenominator
from .params import derive_dressed, validate_regime
from .rates import base_rates, case1_rates, case2_rates, emitter_rates
from .solver import SolverError
from .sweep import (CSV_SCHEMA_VERSION, SweepConfig, SweepFailed, converge_nmax, emitter_only_columns,
                    point_params, rows_to_csv, run_sweep)
from .validation import equivalence_suite, regime_ladder

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CONVERGENCE, EXIT_VALIDATION = 0, 2, 3, 4, 5

EPILOG = """exit codes:
  0  success
  2  configuration error (unknown key, bad value, unreadable file)
  3  solver failure
  4  n_max did not converge below n_max_cap
  5  oracle validation mismatch

LAMBDA_OSC_SEED seeds the random draws of `validate`;
LAMBDA_OSC_NUMBA=0 selects the pure-numpy kernels."""


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _clean(obj):
    """NaN/inf become null so the output is strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _load(args, required: bool = True) -> RunConfig | None:
    if args.config is None:
        if required:
            raise CliError(f"`{args.command}` needs --config PATH", EXIT_CONFIG)
        return None
    run = cfgmod.load(args.config)
    _apply_flags(run, args)
    return run


def _apply_flags(run: RunConfig, args) -> None:
    try:
        if args.case is not None:
            run.sweep.case = args.case
        if args.jobs is not None:
            if args.jobs < 1:
                raise ConfigError("--jobs must be >= 1")
            run.sweep.jobs = args.jobs
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.format is not None:
        run.format = args.format
    if args.out is not None:
        run.out_dir = args.out


def _tables(p, reading="corrected"):
    d = derive_dressed(p)
    b = base_rates(d, p.gamma2, p.gamma3, p.gamma)
    return d, {
        "base": b.as_dict(),
        "case1": case1_rates(b, d, p.gamma2, p.gamma3, p.gamma).as_dict(),
        "case2": case2_rates(b, d, p.gamma2, p.gamma3, p.gamma).as_dict(),
        "emitter": emitter_rates(b, d, p.gamma, reading).as_dict(),
    }


def _text_table(title: str, table: dict) -> list[str]:
    width = max(len(k) for k in table)
    return [f"[{title}]"] + [f"  {k:<{width}} = {v!r}" for k, v in table.items()]


def _emit(text: str, run: RunConfig | None, filename: str) -> None:
    if run is not None and run.out_dir:
        out = Path(run.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_rates(args) -> int:
    run = _load(args)
    _, tables = _tables(run.params, run.reading)
    if run.format == "json":
        _emit(_dump_json(tables), run, f"{run.name}_rates.json")
    else:
        lines = []
        for k, t in tables.items():
            lines += _text_table(f"{k} rates", t)
        _emit("\n".join(lines) + "\n", run, f"{run.name}_rates.txt")
    return EXIT_OK


def cmd_dressed(args) -> int:
    run = _load(args)
    d, tables = _tables(run.params, run.reading)
    warnings = validate_regime(run.params, d, run.regime_threshold)
    if run.format == "json":
        doc = {"params": run.params.as_dict(), "dressed": d.as_dict(), "rates": tables, "warnings": warnings}
        _emit(_dump_json(doc), run, f"{run.name}_dressed.json")
    else:
        lines = _text_table("params", run.params.as_dict()) + _text_table("dressed", d.as_dict())
        for k, t in tables.items():
            lines += _text_table(f"{k} rates", t)
        lines += ["[warnings]"] + [f"  {w}" for w in warnings or ["none"]]
        _emit("\n".join(lines) + "\n", run, f"{run.name}_dressed.txt")
    return EXIT_OK


def _dump_generator(path: str, p, case: int, n_max: int, reading: str, multi: bool) -> None:
    target = Path(path)
    if multi:
        target = target.with_name(f"{target.stem}_case{case}{target.suffix}")
    coo = assemble(p, case, n_max, reading).matrix.tocoo()
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w") as fh:
        fh.write(f"# case={case} n_max={n_max} shape={coo.shape[0]}x{coo.shape[1]} nnz={coo.nnz}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{int(i)} {int(j)} {float(v)!r}\n")


def cmd_steady(args) -> int:
    run = _load(args)
    p = run.params
    rows = [converge_nmax(p, case, run.sweep, p.omega23 / (2.0 * p.Omega0)) for case in run.sweep.cases]
    try:
        analytic = emitter_only_columns(p, run.reading)
    except ZeroDenominator:
        analytic = None
    failed = [r for r in rows if r.observables is None]
    if failed and all(r.error and not r.error.startswith(("NonPhysical", "ResidualTooLarge")) for r in failed):
        raise CliError(f"solver failure: {failed[0].error}", EXIT_SOLVER)
    if args.dump_generator:
        for r in rows:
            _dump_generator(args.dump_generator, p, r.case, r.n_max_used, run.reading, len(rows) > 1)
    if run.format == "json":
        doc = {"rows": [r.as_dict() | {"error": r.error} for r in rows], "emitter_only_analytic": analytic}
        _emit(_dump_json(doc), run, f"{run.name}_steady.json")
    else:
        _emit(rows_to_csv(rows), run, f"{run.name}_steady.csv")
        if analytic is not None:
            sys.stderr.write("# emitter-only analytic: " +
                             ", ".join(f"{k}={v!r}" for k, v in analytic.items()) + "\n")
    if any(not r.converged for r in rows):
        for r in rows:
            if not r.converged:
                sys.stderr.write(f"case {r.case}: {r.error}\n")
        return EXIT_CONVERGENCE
    return EXIT_OK


def _manifest(run: RunConfig, rows, extra=None) -> dict:
    return {"code_version": __version__, "csv_schema": CSV_SCHEMA_VERSION, "config": run.manifest(),
            "rows": [{"axis": r.axis, "case": r.case, "converged": r.converged, "n_max_used": r.n_max_used,
                      "error": r.error} for r in rows], **(extra or {})}


def cmd_sweep(args) -> int:
    run = _load(args)
    try:
        rows = run_sweep(run.sweep)
    except SweepFailed as exc:
        raise CliError(str(exc), EXIT_SOLVER) from None
    if run.format == "json":
        _emit(_dump_json([r.as_dict() for r in rows]), run, f"{run.name}.json")
    else:
        _emit(rows_to_csv(rows), run, f"{run.name}.csv")
    if run.out_dir:
        Path(run.out_dir, f"{run.name}_manifest.json").write_text(_dump_json(_manifest(run, rows)))
    return EXIT_OK if all(r.converged for r in rows) else EXIT_CONVERGENCE


PLOT_TEMPLATE = '''"""Plot {name}.csv: scaled mean occupation, g2 and dressed inversion."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
with open(here / "{name}.csv") as fh:
    rows = [r for r in csv.DictReader(fh) if r["mean_n_over_nbar"]]


def col(key):
    return [float(r[key]) for r in rows]


x = col("axis")
fig, axes = plt.subplots(3, 1, sharex=True, figsize=(5, 8))
axes[0].plot(x, col("mean_n_over_nbar"))
axes[0].set_ylabel("<n>/nbar")
{log}
axes[1].plot(x, col("g2"))
axes[1].set_ylabel("g2(0)")
axes[2].plot(x, col("Rz"), label="Rz")
axes[2].plot(x, col("Rz_g0"), "--", label="Rz (g=0)")
axes[2].set_ylabel("inversion")
axes[2].set_xlabel("{axis}")
axes[2].legend()
fig.suptitle("{name}: case {case}")
fig.tight_layout()
fig.savefig(here / "{name}.{ext}")
if "--show" in sys.argv:
    plt.show()
'''


def _figure_run(name: str, override: dict | None, jobs: int | None) -> RunConfig:
    doc = cfgmod.preset_document(name)
    if override:
        doc = cfgmod.merge(doc, override)
    run = cfgmod.from_document(doc, f"preset:{name}")
    if jobs is not None:
        if jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        run.sweep.jobs = jobs
    return run


def cmd_figures(args) -> int:
    override = None
    if args.config:
        override = cfgmod.read_document(args.config)
        bad = set(override) - {"sweep", "output", "solver"}
        if bad:
            raise ConfigError(f"figures accepts only [sweep], [output] and [solver] overrides, got {sorted(bad)}")
        bad = {"axis", "case"} & set(override.get("sweep", {}))
        if bad:
            raise ConfigError(f"figures fixes the axis and case of each preset; remove {sorted(bad)}")
        override = {k: dict(v) for k, v in override.items()}
        override.get("output", {}).pop("name", None)
    out = Path(args.out or (override or {}).get("output", {}).get("dir") or "figures")
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"code_version": __version__, "csv_schema": CSV_SCHEMA_VERSION, "figures": {}}
    status = EXIT_OK
    for name in cfgmod.PRESETS:
        run = _figure_run(name, override, args.jobs)
        entry = {"config": run.manifest()}
        try:
            rows = run_sweep(run.sweep)
        except SweepFailed as exc:
            entry.update(status="failed", error=str(exc))
            manifest["figures"][name] = entry
            status = EXIT_SOLVER
            continue
        p = run.sweep.base
        extra = lambda r: emitter_only_columns(point_params(p, run.sweep.axis, r.axis), run.reading)  # noqa: E731
        (out / f"{name}.csv").write_text(rows_to_csv(rows, extra))
        (out / f"{name}_plot.py").write_text(PLOT_TEMPLATE.format(
            name=name, axis=run.sweep.axis, case=run.sweep.case, ext="pdf",
            log='axes[0].set_yscale("log")' if name in ("fig2", "fig4") else ""))
        unconverged = [r.axis for r in rows if not r.converged]
        entry.update(status="ok" if not unconverged else "unconverged", unconverged_axis=unconverged,
                     rows=len(rows))
        if unconverged and status == EXIT_OK:
            status = EXIT_CONVERGENCE
        manifest["figures"][name] = entry
        (out / "manifest.json").write_text(_dump_json(manifest))
    (out / "manifest.json").write_text(_dump_json(manifest))
    return status


def cmd_validate(args) -> int:
    run = _load(args, required=False)
    v = run.validate if run else cfgmod.validate_settings()
    if run is not None:
        cases = run.sweep.cases
    else:
        cases = (1, 2) if args.case in (None, "both") else (int(args.case),)
    reading = run.reading if run else "corrected"
    eq = equivalence_suite(v["draws"], v["n_max"], v["seed"], v["tolerance"], reading, cases)
    # a generator that fails the oracle need not have a physical steady state
    ladders = [regime_ladder(c, v["ladder_scales"], v["ladder_n_max"]) for c in cases] if eq["passed"] else []
    report = {"code_version": __version__, "equivalence": eq, "ladder": ladders,
              "passed": eq["passed"]}
    out = Path(args.out) if args.out else None
    text = _dump_json(report)
    if out:
        out.mkdir(parents=True, exist_ok=True)
        (out / "validate.json").write_text(text)
    else:
        sys.stdout.write(text)
    if not eq["passed"]:
        worst = max(eq["draws"], key=lambda r: r["max_deviation"])
        sys.stderr.write(f"oracle mismatch: case {worst['case']} max deviation {worst['max_deviation']:.3g}\n")
        return EXIT_VALIDATION
    if not all(l["monotone"] for l in ladders):
        sys.stderr.write("warning: regime ladder discrepancy is not monotone\n")
    return EXIT_OK


COMMANDS = {"dressed": cmd_dressed, "steady": cmd_steady, "sweep": cmd_sweep, "figures": cmd_figures,
            "validate": cmd_validate, "rates": cmd_rates}

HELP = {
    "dressed": "dressed-state quantities, all rate tables and regime warnings",
    "steady": "single-point steady state with n_max convergence",
    "sweep": "parameter scan from a config",
    "figures": "the four canonical scans, one CSV and plot script each",
    "validate": "generator versus operator-level oracles",
    "rates": "all four rate tables",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML run configuration")
    common.add_argument("--case", choices=("1", "2", "both"), help="override the configured case")
    common.add_argument("--jobs", type=int, metavar="N", help="worker processes for sweeps")
    common.add_argument("--out", metavar="DIR", help="write outputs into DIR instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--dump-generator", metavar="PATH",
                        help="(steady) write the final generator as 'row col value' lines")
    parser = argparse.ArgumentParser(prog="lambda-osc", description=__doc__, epilog=EPILOG,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name], description=HELP[name], epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except SolverError as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
