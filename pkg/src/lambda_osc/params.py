"""Model parameters and dressed-state quantities.

All rates are dimensionless multiples of one reference decay rate, so hbar
never appears.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields


@dataclass(frozen=True)
class PhysicalParams:
    """Raw inputs of the emitter + oscillator model, in reference-rate units."""

    omega: float
    omega23: float
    Omega0: float
    g: float
    gamma2: float
    gamma3: float
    gamma: float
    kappa: float
    nbar: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"{f.name} must be finite, got {v!r}")
        for name in ("g", "gamma2", "gamma3", "gamma", "nbar"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa!r}")
        if self.Omega0 <= 0:
            raise ValueError(f"Omega0 must be > 0, got {self.Omega0!r}")

    def replace(self, **changes) -> "PhysicalParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return PhysicalParams(**values)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class DressedParams:
    sin_theta: float
    cos_theta: float
    Omega: float
    delta_bar: float
    delta_tilde: float
    g_bar: float
    g_tilde: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def generalized_rabi(omega23: float, Omega0: float) -> float:
    return math.sqrt(2.0 * Omega0 * Omega0 + 0.25 * omega23 * omega23)


def derive_dressed(p: PhysicalParams) -> DressedParams:
    """Mixing angle, generalized Rabi frequency, detunings and effective couplings.

    The angle is kept as its (sin, cos) pair; cos is nonnegative because
    ``Omega0 > 0``.
    """
    Omega = generalized_rabi(p.omega23, p.Omega0)
    s = p.omega23 / (2.0 * Omega)
    c = math.sqrt(2.0) * p.Omega0 / Omega
    return DressedParams(
        sin_theta=s,
        cos_theta=c,
        Omega=Omega,
        delta_bar=p.omega - 2.0 * Omega,
        delta_tilde=p.omega - Omega,
        g_bar=p.g * c * c / 2.0,
        g_tilde=p.g * s * c / math.sqrt(2.0),
    )


def thermal_occupancy(omega: float, T: float, hbar_over_kB: float = 7.638232577577646e-12) -> float:
    """Bose-Einstein occupancy ``1 / (exp(hbar*omega / (kB*T)) - 1)``.

    ``omega`` in rad/s and ``T`` in kelvin with the default constant
    (hbar/kB in K*s). Returns 0 at ``T == 0`` and underflows to 0 instead
    of overflowing for very cold baths.
    """
    if omega <= 0:
        raise ValueError("omega must be > 0")
    if T < 0:
        raise ValueError("T must be >= 0")
    if T == 0:
        return 0.0
    x = hbar_over_kB * omega / T
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def occupancy_from_ratio(x: float) -> float:
    """Occupancy for a given ``hbar*omega/(kB*T)``."""
    if x == math.inf or x > 700.0:
        return 0.0 if x == math.inf else math.exp(-x)
    return 1.0 / math.expm1(x)


def validate_regime(p: PhysicalParams, d: DressedParams, threshold: float = 5.0) -> list[str]:
    """Warn where the generalized Rabi frequency fails to dominate a rate.

    One message per offending ratio ``Omega/x < threshold``; zero rates are
    skipped.
    """
    warnings = []
    for name in ("g", "gamma", "gamma2", "gamma3"):
        x = getattr(p, name)
        if x > 0 and d.Omega / x < threshold:
            warnings.append(f"Omega/{name} = {d.Omega / x:.3g} < {threshold:g}: secular approximation questionable")
    return warnings
