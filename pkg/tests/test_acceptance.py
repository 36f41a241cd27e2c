"""Acceptance criteria 1-9, one PASS/FAIL line each."""
import functools
import math
import time

import numpy as np

from lambda_osc.config import PRESETS, load_preset
from lambda_osc.generator import N_BLOCKS, assemble, trace_functional
from lambda_osc.observables import reduce
from lambda_osc.solver import steady_state
from lambda_osc.sweep import SweepConfig, converge_nmax, emitter_only_columns, point_params, run_sweep
from lambda_osc.validation import equivalence_suite, regime_ladder


@functools.lru_cache(maxsize=None)
def preset_sweep(name):
    run = load_preset(name)
    t0 = time.perf_counter()
    rows = run_sweep(run.sweep)
    return run, rows, time.perf_counter() - t0


def ratio(rows):
    return np.array([r.observables.mean_n_over_nbar if r.observables else np.nan for r in rows])


def g2s(rows):
    return np.array([r.observables.g2 if r.observables else np.nan for r in rows])


def verdict(report_line, k, ok, detail):
    report_line(f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def longest_run(axis, mask):
    best, start = 0.0, None
    for i, m in enumerate(mask):
        if m and start is None:
            start = i
        if start is not None and (not m or i == len(mask) - 1):
            end = i if m else i - 1
            best = max(best, axis[end] - axis[start])
            start = None
    return best


def test_criterion_1_thermal_endpoint(report_line):
    t0 = time.perf_counter()
    worst = 0.0
    for name in PRESETS:
        run = load_preset(name)
        for case in run.sweep.cases:
            row = converge_nmax(point_params(run.params, run.sweep.axis, 0.0), case, run.sweep, 0.0)
            o = row.observables
            worst = max(worst, abs(o.mean_n_over_nbar - 1), abs(o.g2 - 2))
    dt = time.perf_counter() - t0
    verdict(report_line, 1, worst < 1e-3 and dt < 10, f"max deviation {worst:.2e}, {dt:.1f} s")


def test_criterion_2_analytic_emitter(report_line):
    t0 = time.perf_counter()
    theta = np.linspace(-1.4, 1.4, 50)
    axis = list(np.sqrt(2.0) * np.tan(theta))  # omega23 / (2 Omega0) at each mixing angle
    worst = 0.0
    for name in ("fig2", "fig3"):
        base = load_preset(name).params.replace(g=0.0)
        cfg = SweepConfig(base=base, grid=sorted(axis), case="both", n_max_cap=1024)
        for row in run_sweep(cfg):
            want = emitter_only_columns(point_params(base, cfg.axis, row.axis))
            o = row.observables
            worst = max(worst, abs(o.pop1 - want["pop1_g0"]), abs(o.pop2 - want["pop2_g0"]),
                        abs(o.pop3 - want["pop3_g0"]))
    dt = time.perf_counter() - t0
    verdict(report_line, 2, worst < 1e-10 and dt < 30, f"max deviation {worst:.2e}, {dt:.1f} s")


def test_criterion_3_oracle_equivalence(report_line):
    t0 = time.perf_counter()
    out = equivalence_suite(draws=5, n_max=12)
    dt = time.perf_counter() - t0
    dev = max(d["max_deviation"] for d in out["draws"])
    bound = max(d["boundary_occupation"] for d in out["draws"])
    ok = out["passed"] and dev < 1e-8 and bound < 1e-10 and dt < 300
    verdict(report_line, 3, ok, f"{len(out['draws'])} draws, max deviation {dev:.2e}, "
                                f"max boundary {bound:.1e}, {dt:.1f} s")


def test_criterion_4_lasing(report_line):
    run, rows, dt = preset_sweep("fig2")
    r, g = ratio(rows), g2s(rows)
    i = int(np.nanargmax(r))
    ok = r[i] > 1 and abs(g[i] - 1) < 0.3 and dt < 120
    verdict(report_line, 4, ok, f"max <n>/nbar {r[i]:.4g} at axis {rows[i].axis:.3g}, g2 {g[i]:.4f}, {dt:.1f} s")


def test_criterion_5_cooling(report_line):
    run, rows, dt = preset_sweep("fig3")
    r, g = ratio(rows), g2s(rows)
    i = int(np.nanargmin(r))
    ok = r[i] < 1 and g[i] > 2 and dt < 300
    verdict(report_line, 5, ok, f"min <n>/nbar {r[i]:.4g} at axis {rows[i].axis:.3g}, g2 {g[i]:.4f}, {dt:.1f} s")


def test_criterion_6_case2_enhancement(report_line):
    t = 0.0
    mins = {}
    for name in ("fig3", "fig5"):
        _, rows, dt = preset_sweep(name)
        mins[name] = float(np.nanmin(ratio(rows)))
        t += dt
    widths = {}
    for name in ("fig2", "fig4"):
        _, rows, dt = preset_sweep(name)
        widths[name] = longest_run([r.axis for r in rows], np.abs(g2s(rows) - 1) < 0.1)
        t += dt
    ok = mins["fig5"] < mins["fig3"] and widths["fig4"] > widths["fig2"] and t < 600
    verdict(report_line, 6, ok, f"min ratio case II {mins['fig5']:.4g} vs case I {mins['fig3']:.4g}; "
                                f"plateau width case II {widths['fig4']:.3g} vs case I {widths['fig2']:.3g}; {t:.1f} s")


def test_criterion_7_no_cooling_condition(report_line):
    t0 = time.perf_counter()
    run = load_preset("fig3")
    base = run.params.replace(gamma2=1.0, gamma3=1.0, gamma=0.0)

    def sweep(p):
        cfg = SweepConfig(base=p, grid=run.sweep.grid, case="both", conv_tol=run.sweep.conv_tol,
                          n_max_cap=run.sweep.n_max_cap)
        return [r for r in run_sweep(cfg) if r.converged]

    flat = sweep(base)
    lowest = float(min(r.observables.mean_n_over_nbar for r in flat))
    tilted = sweep(base.replace(gamma=0.5 * base.gamma2))
    lowest_tilted = float(min(r.observables.mean_n_over_nbar for r in tilted))
    dt = time.perf_counter() - t0
    ok = lowest >= 1 - 1e-3 and lowest_tilted < 1 and dt < 600
    verdict(report_line, 7, ok, f"gamma=0: min ratio {lowest:.6f} over {len(flat)} converged rows; "
                                f"gamma=0.5: min ratio {lowest_tilted:.4f}; {dt:.1f} s")


def test_criterion_8_conservation(report_line):
    t0 = time.perf_counter()
    worst_tf = worst_res = worst_db = 0.0
    normalized = True
    for name in PRESETS:
        run = load_preset(name)
        for x in np.linspace(0.0, 2.0, 5):
            p = point_params(run.params, run.sweep.axis, x)
            for case in (1, 2):
                n_max = 64
                m = assemble(p, case, n_max)
                scale = np.max(np.abs(m.matrix.data))
                tf = trace_functional(m).reshape(N_BLOCKS[case], n_max + 1)
                worst_tf = max(worst_tf, np.max(np.abs(tf[:, : n_max - 2])) / scale)
            for case in run.sweep.cases:
                row = converge_nmax(p, case, run.sweep, x)
                big = assemble(p, case, row.n_max_used)
                res = steady_state(big)
                worst_res = max(worst_res, res.residual / np.max(np.abs(big.matrix.data)))
                normalized &= row.converged and abs(res.state.blocks[0].sum() - 1) < 1e-12
        p0 = point_params(run.params.replace(g=0.0), run.sweep.axis, 0.5)
        for case in (1, 2):
            P = steady_state(assemble(p0, case, 400)).state.blocks[0]
            q = p0.nbar / (p0.nbar + 1)
            k = np.nonzero(P > 1e-200)[0][:-1][: 120]
            worst_db = max(worst_db, float(np.max(np.abs(P[k + 1] - q * P[k]) / P[k].max())))
    dt = time.perf_counter() - t0
    ok = worst_tf <= 1e-13 and worst_res <= 1e-9 and worst_db < 1e-10 and normalized and dt < 10
    verdict(report_line, 8, ok, f"trace functional {worst_tf:.1e}, residual/max|L| {worst_res:.1e}, "
                                f"detailed balance {worst_db:.1e}, {dt:.1f} s")


def test_criterion_9_regime_ladder(report_line):
    t0 = time.perf_counter()
    ladders = [regime_ladder(case, (1.0, 2.0, 4.0), 12) for case in (1, 2)]
    dt = time.perf_counter() - t0
    ok = all(l["monotone"] for l in ladders) and dt < 300
    text = "; ".join(f"case {l['case']}: " + " > ".join(f"{r['discrepancy']:.2e}" for r in l["rows"])
                     for l in ladders)
    verdict(report_line, 9, ok, f"{text}; {dt:.1f} s")
