"""Reported quantities of a steady state, and the emitter-only steady state."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from . import _kernels
from .generator import BlockVector
from .rates import EmitterRates

MEAN_FLOOR = 1e-150  # mean**2 must stay representable


class ZeroDenominator(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class Observables:
    mean_n: float
    mean_n_over_nbar: float
    g2: float  # nan when the mean occupation is numerically zero
    Rz: float
    pop1: float
    pop2: float
    pop3: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def fock_moments(p0: np.ndarray) -> tuple[float, float]:
    """``(<n>, g2(0))`` of a Fock distribution; g2 is nan if ``<n>`` underflows."""
    total, s1, s2 = _kernels.moments(np.asarray(p0, dtype=float))
    mean = s1 / total
    if abs(mean) < MEAN_FLOOR:
        return mean, math.nan
    return mean, (s2 / total) / (mean * mean)


def reduce(state: BlockVector, nbar: float) -> Observables:
    """Oscillator moments and dressed populations from block sums."""
    B = state.blocks
    mean, g2 = fock_moments(B[0])
    s0 = B[0].sum()
    s1 = B[1].sum() / s0
    s2 = B[2].sum() / s0
    pop2 = 0.5 * (s1 + s2)
    pop3 = 0.5 * (s1 - s2)
    return Observables(
        mean_n=mean,
        mean_n_over_nbar=mean / nbar if nbar > 0 else math.nan,
        g2=g2,
        Rz=s2,
        pop1=1.0 - s1,
        pop2=pop2,
        pop3=pop3,
    )


def emitter_steady_analytic(r: EmitterRates) -> tuple[float, float, float]:
    """Closed-form dressed populations ``(R11, R22, R33)`` without the oscillator."""
    den = (r.g11_plus * (r.g22_minus + r.g33_minus)
           + r.g22_plus * (r.g11_minus + r.g22_minus)
           + r.g33_plus * (r.g11_minus - r.g33_minus))
    if den == 0:
        raise ZeroDenominator("all emitter rates vanish")
    pop2 = (r.g11_plus * r.g22_minus + r.g11_minus * r.g33_plus) / den
    pop3 = (r.g11_minus * r.g22_plus + r.g11_plus * r.g33_minus) / den
    return 1.0 - pop2 - pop3, pop2, pop3
