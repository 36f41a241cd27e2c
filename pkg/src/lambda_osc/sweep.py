"""Parameter scans with automatic Fock-truncation control."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .generator import assemble
from .observables import Observables, emitter_steady_analytic, reduce
from .params import PhysicalParams, derive_dressed
from .rates import base_rates, emitter_rates
from .solver import NonPhysical, ResidualTooLarge, SolverError, steady_state

DEFAULT_AXIS = "omega23_over_2Omega0"
AXES = (DEFAULT_AXIS,) + tuple(f.name for f in fields(PhysicalParams))

CSV_COLUMNS = ("axis", "case", "mean_n", "mean_n_over_nbar", "g2", "Rz", "pop1", "pop2", "pop3",
               "n_max_used", "converged", "residual")
CSV_SCHEMA_VERSION = 1


class SweepFailed(RuntimeError):
    pass


def parse_case(case) -> tuple[int, ...]:
    key = str(case).strip().lower()
    table = {"1": (1,), "i": (1,), "2": (2,), "ii": (2,), "both": (1, 2)}
    if key not in table:
        raise ValueError(f"case must be 1, 2 or both, got {case!r}")
    return table[key]


def default_grid() -> list[float]:
    return list(np.linspace(0.0, 2.0, 201))


@dataclass
class SweepConfig:
    base: PhysicalParams
    axis: str = DEFAULT_AXIS
    grid: list = field(default_factory=default_grid)
    case: str = "1"
    conv_tol: float = 1e-6
    n_max_start: int | None = None
    n_max_cap: int = 512
    reading: str = "corrected"
    jobs: int = 1

    def __post_init__(self):
        self.grid = [float(x) for x in self.grid]
        if not self.grid:
            raise ValueError("sweep grid is empty")
        if any(b < a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("sweep grid must be sorted")
        if self.axis not in AXES:
            raise ValueError(f"unknown sweep axis {self.axis!r}; choose from {AXES}")
        if not self.conv_tol > 0:
            raise ValueError("conv_tol must be > 0")
        parse_case(self.case)

    @property
    def cases(self) -> tuple[int, ...]:
        return parse_case(self.case)

    def start_for(self, p: PhysicalParams) -> int:
        if self.n_max_start is not None:
            return int(self.n_max_start)
        return int(math.ceil(8 * (p.nbar + 1)))


@dataclass
class SweepRow:
    axis: float
    case: int
    observables: Observables | None
    n_max_used: int
    converged: bool
    residual: float
    error: str | None = None

    def as_dict(self) -> dict:
        out = {"axis": self.axis, "case": self.case}
        if self.observables is None:
            out.update({k: math.nan for k in CSV_COLUMNS[2:9]})
        else:
            out.update(self.observables.as_dict())
        out.update(n_max_used=self.n_max_used, converged=self.converged, residual=self.residual)
        return out


def point_params(base: PhysicalParams, axis: str, value: float) -> PhysicalParams:
    if axis == DEFAULT_AXIS:
        return base.replace(omega23=2.0 * base.Omega0 * value)
    return base.replace(**{axis: value})


def _close(a: float, b: float, tol: float) -> bool:
    if math.isnan(a) and math.isnan(b):
        return True
    return abs(a - b) <= tol * max(abs(a), abs(b))


def converge_nmax(p: PhysicalParams, case: int, cfg: SweepConfig, axis_value: float = math.nan) -> SweepRow:
    """Double n_max until ``mean_n`` and ``g2`` settle to ``cfg.conv_tol``.

    Truncation diagnostics (negative populations, leakage residual) just
    trigger the next doubling. The last step is clamped to the cap; a
    row that never settles is returned with ``converged=False``.
    """
    floor = 2 if case == 2 else 1
    cap = max(int(cfg.n_max_cap), floor)
    n = min(max(cfg.start_for(p), floor), cap)
    prev = None
    last = None
    err = None
    while True:
        try:
            res = steady_state(assemble(p, case, n, cfg.reading))
            obs = reduce(res.state, p.nbar)
            last = SweepRow(axis_value, case, obs, n, False, res.residual)
            err = None
            if prev is not None and _close(obs.mean_n, prev.mean_n, cfg.conv_tol) \
                    and _close(obs.g2, prev.g2, cfg.conv_tol):
                last.converged = True
                return last
            prev = obs
        except (NonPhysical, ResidualTooLarge) as exc:
            prev = None
            err = f"{type(exc).__name__}: {exc}"
        except SolverError as exc:
            return SweepRow(axis_value, case, None, n, False, math.nan, f"{type(exc).__name__}: {exc}")
        if n >= cap:
            break
        n = min(2 * n, cap)
    if last is None:
        return SweepRow(axis_value, case, None, n, False, math.nan, err or "no solution")
    last.error = err or "not converged at n_max_cap"
    return last


def _run_point(args) -> SweepRow:
    cfg, case, x = args
    return converge_nmax(point_params(cfg.base, cfg.axis, x), case, cfg, x)


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """One row per (case, grid value), ordered by case then axis value."""
    tasks = [(cfg, case, x) for case in cfg.cases for x in cfg.grid]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_run_point, tasks, chunksize=4))
    else:
        rows = [_run_point(t) for t in tasks]
    rows.sort(key=lambda r: (r.case, r.axis))
    if all(r.observables is None for r in rows):
        raise SweepFailed("every sweep point failed: " + (rows[0].error or ""))
    return rows


def emitter_only_columns(p: PhysicalParams, reading: str = "corrected") -> dict:
    """Analytic g=0 populations for the same emitter parameters."""
    d = derive_dressed(p)
    er = emitter_rates(base_rates(d, p.gamma2, p.gamma3, p.gamma), d, p.gamma, reading)
    pop1, pop2, pop3 = emitter_steady_analytic(er)
    return {"Rz_g0": pop2 - pop3, "pop1_g0": pop1, "pop2_g0": pop2, "pop3_g0": pop3}


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    return repr(v)


def rows_to_csv(rows: list[SweepRow], extra=None) -> str:
    """CSV text with the fixed column order; ``extra(row) -> dict`` appends columns."""
    cols = list(CSV_COLUMNS)
    extras = [extra(r) for r in rows] if extra else None
    if extras:
        cols += list(extras[0])
    lines = [",".join(cols)]
    for k, r in enumerate(rows):
        d = r.as_dict()
        if extras:
            d.update(extras[k])
        lines.append(",".join(format_value(d[c]) for c in cols))
    return "\n".join(lines) + "\n"
