"""Cross-checks of the rate-equation generator against the operator-level oracles."""
from __future__ import annotations

import os
import time

import numpy as np

from .generator import N_BLOCKS, assemble
from .observables import reduce
from .oracle import (build_bare_liouvillian, build_secular_liouvillian, oracle_steady,
                     project_to_blocks)
from .params import PhysicalParams, derive_dressed, generalized_rabi
from .solver import steady_state

SEED_ENV = "LAMBDA_OSC_SEED"
DEFAULT_SEED = 20240611
BOUNDARY_TOL = 1e-10


def resolve_seed(seed=None) -> int:
    """Explicit seed, else ``$LAMBDA_OSC_SEED``, else a fixed default."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(SEED_ENV, "").strip()
    return int(env) if env else DEFAULT_SEED


def draw_secular_params(rng: np.random.Generator, case: int) -> PhysicalParams:
    """Random point deep in the secular regime, near the case's resonance."""
    Omega0 = rng.uniform(15.0, 25.0)
    omega23 = 2.0 * Omega0 * rng.uniform(0.1, 1.5)
    Omega = generalized_rabi(omega23, Omega0)
    centre = 2.0 * Omega if case == 1 else Omega
    return PhysicalParams(
        omega=centre + rng.uniform(-1.0, 1.0),
        omega23=omega23,
        Omega0=Omega0,
        g=rng.uniform(0.3, 1.5),
        gamma2=rng.uniform(0.05, 1.0),
        gamma3=rng.uniform(0.05, 1.0),
        gamma=rng.uniform(0.0, 0.5),
        kappa=rng.uniform(0.5, 1.5),
        nbar=rng.uniform(0.02, 0.2),
    )


def oracle_blocks(p: PhysicalParams, case: int, n_max: int) -> tuple[np.ndarray, float]:
    """Projected oracle steady state and its boundary occupation."""
    rho = oracle_steady(build_secular_liouvillian(p, None, case, n_max))
    blocks = project_to_blocks(rho, case).reshape(N_BLOCKS[case], n_max + 1)
    return blocks, float(abs(blocks[0, -1]))


def equivalence(p: PhysicalParams, case: int, n_max: int = 16, reading: str = "corrected",
                max_n_max: int = 48) -> dict:
    """Blockwise max deviation between generator and projected oracle steady states.

    ``n_max`` grows in steps of 8 until the oracle's boundary occupation
    drops below ``BOUNDARY_TOL``.
    """
    while True:
        ref, boundary = oracle_blocks(p, case, n_max)
        if boundary < BOUNDARY_TOL or n_max >= max_n_max:
            break
        n_max += 8
    res = steady_state(assemble(p, case, n_max, reading), residual_tol=np.inf, negative_tol=np.inf)
    dev = np.abs(res.state.blocks - ref).max(axis=1)
    return {"case": case, "n_max": n_max, "boundary_occupation": boundary,
            "max_deviation": float(dev.max()),
            "per_block": {f"P{i}": float(dev[i]) for i in range(N_BLOCKS[case])},
            "params": p.as_dict()}


def equivalence_suite(draws: int = 5, n_max: int = 16, seed=None, tolerance: float = 1e-8,
                      reading: str = "corrected", cases=(1, 2)) -> dict:
    rng = np.random.default_rng(resolve_seed(seed))
    out = []
    for case in cases:
        for _ in range(draws):
            r = equivalence(draw_secular_params(rng, case), case, n_max, reading)
            r["passed"] = bool(r["max_deviation"] < tolerance and r["boundary_occupation"] < BOUNDARY_TOL)
            out.append(r)
    return {"seed": resolve_seed(seed), "tolerance": tolerance, "draws": out,
            "passed": all(r["passed"] for r in out)}


def ladder_params(case: int, scale: float) -> PhysicalParams:
    """Fixed couplings with the dressing scaled; the oscillator tracks the resonance."""
    Omega0 = 5.0 * scale
    omega23 = Omega0  # omega23 / (2 Omega0) = 0.5
    Omega = generalized_rabi(omega23, Omega0)
    return PhysicalParams(omega=2.0 * Omega if case == 1 else Omega, omega23=omega23, Omega0=Omega0,
                          g=1.0, gamma2=1.0, gamma3=0.1, gamma=0.2, kappa=0.3, nbar=0.2)


def _rho_moments(rho: np.ndarray, n_max: int) -> tuple[float, float]:
    nf = n_max + 1
    d = np.real(np.diag(rho))
    p0 = d[:nf] + d[nf:2 * nf] + d[2 * nf:]
    n = np.arange(nf)
    mean = float(n @ p0)
    return mean, float((n * (n - 1)) @ p0) / mean ** 2


def regime_ladder(case: int, scales=(1.0, 2.0, 4.0), n_max: int = 12) -> dict:
    """Bare-model versus secular-pipeline discrepancy along a dressing ladder.

    The discrepancy is the larger of the relative errors in ``<n>`` and g2.
    """
    rows = []
    for scale in scales:
        p = ladder_params(case, scale)
        t0 = time.perf_counter()
        mb, gb = _rho_moments(oracle_steady(build_bare_liouvillian(p, n_max)), n_max)
        obs = reduce(steady_state(assemble(p, case, 4 * n_max)).state, p.nbar)
        rows.append({"scale": scale, "Omega": derive_dressed(p).Omega, "bare_mean_n": mb,
                     "secular_mean_n": obs.mean_n, "bare_g2": gb, "secular_g2": obs.g2,
                     "discrepancy": max(abs(mb - obs.mean_n) / obs.mean_n, abs(gb - obs.g2) / obs.g2),
                     "seconds": time.perf_counter() - t0})
    d = [r["discrepancy"] for r in rows]
    return {"case": case, "n_max": n_max, "rows": rows,
            "monotone": bool(all(b < a for a, b in zip(d, d[1:])))}
