"""Damped quantum oscillator coupled to a laser-dressed three-level emitter.

Rate-equation generators for the two resonance situations, steady-state
and transient solvers, observables, operator-level oracles and sweeps.
"""
try:
    from importlib.metadata import PackageNotFoundError, version

    __version__ = version("lambda-osc")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0+src"

from .generator import BlockVector, RateMatrix, assemble, trace_functional
from .observables import Observables, emitter_steady_analytic, reduce
from .params import DressedParams, PhysicalParams, derive_dressed, thermal_occupancy, validate_regime
from .rates import base_rates, case1_rates, case2_rates, emitter_rates
from .solver import SolverError, evolve, steady_state
from .sweep import SweepConfig, SweepRow, converge_nmax, run_sweep

__all__ = [
    "BlockVector", "DressedParams", "Observables", "PhysicalParams", "RateMatrix", "SolverError",
    "SweepConfig", "SweepRow", "assemble", "base_rates", "case1_rates", "case2_rates", "converge_nmax",
    "derive_dressed", "emitter_rates", "emitter_steady_analytic", "evolve", "reduce", "run_sweep",
    "steady_state", "thermal_occupancy", "trace_functional", "validate_regime",
]
