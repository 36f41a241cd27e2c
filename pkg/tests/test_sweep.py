import math

import numpy as np
import pytest

from lambda_osc.params import PhysicalParams
from lambda_osc.sweep import (CSV_COLUMNS, SweepConfig, SweepFailed, converge_nmax, parse_case, point_params,
                              rows_to_csv, run_sweep)

FIG2 = PhysicalParams(omega=50.0, omega23=0.0, Omega0=20.0, g=4.0, gamma2=1.0, gamma3=0.1, gamma=0.0,
                      kappa=1e-3, nbar=1.0)
FIG3 = FIG2.replace(gamma2=0.1, gamma3=1.0, nbar=15.0)


def test_thermal_converges_quickly():
    p = FIG2.replace(g=0.0)
    row = converge_nmax(p, 1, SweepConfig(base=p))
    assert row.converged
    assert row.n_max_used <= 64
    assert row.observables.mean_n == pytest.approx(1.0, abs=1e-6)


def test_cooling_point():
    p = point_params(FIG3, "omega23_over_2Omega0", 0.7)
    row = converge_nmax(p, 1, SweepConfig(base=FIG3, n_max_cap=4096))
    assert row.converged and row.observables.mean_n_over_nbar < 1


def test_tolerance_controls_accuracy():
    p = point_params(FIG2, "omega23_over_2Omega0", 0.5)
    loose = converge_nmax(p, 1, SweepConfig(base=FIG2, conv_tol=1e-2))
    tight = converge_nmax(p, 1, SweepConfig(base=FIG2, conv_tol=1e-6))
    assert abs(loose.observables.mean_n - tight.observables.mean_n) < 1e-2 * tight.observables.mean_n


def test_cap_gives_unconverged_row():
    row = converge_nmax(FIG2, 2, SweepConfig(base=FIG2, n_max_cap=4))
    assert not row.converged
    assert row.n_max_used == 4
    assert row.error


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(base=FIG2, grid=[])
    with pytest.raises(ValueError):
        SweepConfig(base=FIG2, grid=[1.0, 0.0])
    with pytest.raises(ValueError):
        SweepConfig(base=FIG2, axis="nope")
    with pytest.raises(ValueError):
        SweepConfig(base=FIG2, conv_tol=0.0)
    with pytest.raises(ValueError):
        parse_case("3")
    assert parse_case("II") == (2,) and parse_case("both") == (1, 2)


def test_all_points_failing():
    cfg = SweepConfig(base=FIG3, grid=[0.2, 0.4], case="2", n_max_cap=3)
    with pytest.raises(SweepFailed):
        run_sweep(cfg)


def test_rows_sorted_and_reproducible():
    cfg = SweepConfig(base=FIG2, grid=list(np.linspace(0, 1, 5)), case="both")
    rows = run_sweep(cfg)
    assert [(r.case, r.axis) for r in rows] == sorted((r.case, r.axis) for r in rows)
    assert len(rows) == 10
    text = rows_to_csv(rows)
    assert text == rows_to_csv(run_sweep(cfg))
    cfg.jobs = 2
    assert text == rows_to_csv(run_sweep(cfg))


def test_generic_axis():
    cfg = SweepConfig(base=FIG2.replace(omega23=20.0), axis="g", grid=[0.0, 1.0, 2.0])
    rows = run_sweep(cfg)
    assert rows[0].observables.mean_n_over_nbar == pytest.approx(1.0, abs=1e-6)
    assert point_params(FIG2, "kappa", 0.5).kappa == 0.5


def test_csv_layout():
    rows = run_sweep(SweepConfig(base=FIG2, grid=[0.0]))
    lines = rows_to_csv(rows).splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    fields = dict(zip(CSV_COLUMNS, lines[1].split(",")))
    assert fields["case"] == "1" and fields["converged"] == "true"
    assert float(fields["g2"]) == pytest.approx(2.0, abs=1e-3)
    failed = converge_nmax(FIG2, 2, SweepConfig(base=FIG2, n_max_cap=4))
    row = rows_to_csv([failed]).splitlines()[1].split(",")
    assert row[2] == "" and math.isnan(failed.as_dict()["mean_n"])
