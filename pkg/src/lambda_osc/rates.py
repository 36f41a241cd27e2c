"""Damping and pumping coefficients of the projected equations of motion.

Each coefficient is a polynomial in (sin_theta, cos_theta, gamma2, gamma3,
gamma). Names follow the subscript/superscript pattern of the
coefficients they stand for, e.g. ``g2_1`` is gamma^(2)_1 and ``t3_7`` is
tilde-gamma^(3)_7.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

from .params import DressedParams


class _Table:
    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class BaseRates(_Table):
    gamma_plus: float
    gamma_minus: float
    Gamma_plus: float
    Gamma_minus: float
    gamma0_plus: float
    gamma0_minus: float
    gamma00: float


@dataclass(frozen=True)
class CaseIRates(_Table):
    g1_0: float
    g1_1: float
    g2_0: float
    g2_1: float
    g2_2: float
    g3_3: float
    g4_4: float
    g5_5: float
    g6_6: float


@dataclass(frozen=True)
class CaseIIRates(_Table):
    t1_0: float
    t1_1: float
    t1_2: float
    t2_0: float
    t2_1: float
    t2_2: float
    t3_3: float
    t3_7: float
    t4_4: float
    t4_8: float
    t5_5: float
    t5_9: float
    t6_6: float
    t6_10: float
    t7_3: float
    t7_7: float
    t8_4: float
    t8_8: float
    t9_5: float
    t9_9: float
    t10_6: float
    t10_10: float
    t11_11: float
    t12_12: float
    t13_13: float
    t14_14: float
    t15_15: float
    t16_16: float


@dataclass(frozen=True)
class EmitterRates(_Table):
    g11_plus: float
    g11_minus: float
    g22_plus: float
    g22_minus: float
    g33_plus: float
    g33_minus: float


def base_rates(d: DressedParams, gamma2: float, gamma3: float, gamma: float) -> BaseRates:
    s, c = d.sin_theta, d.cos_theta
    c2 = c * c
    # gamma^(+-)
    gp = gamma2 * (1 + s) ** 2 + gamma3 * (1 - s) ** 2
    gm = gamma2 * (1 - s) ** 2 + gamma3 * (1 + s) ** 2
    return BaseRates(
        gamma_plus=gp,
        gamma_minus=gm,
        # Gamma^(+-)
        Gamma_plus=gp * c2 / 8 + gamma * (1 - s) ** 4 / 16,
        Gamma_minus=gm * c2 / 8 + gamma * (1 + s) ** 4 / 16,
        # gamma^(+-)_0
        gamma0_plus=(gamma3 * (1 - s) - gamma2 * (1 + s)) * s * c2 / 2,
        gamma0_minus=-(gamma3 * (1 + s) - gamma2 * (1 - s)) * s * c2 / 2,
        # gamma^(0)_0
        gamma00=(gamma2 + gamma3) * c2 * c2 / 4,
    )


def _common_diagonal(b: BaseRates, s: float, c2: float, gamma2: float, gamma3: float, gamma: float) -> float:
    # gamma^(3)_3 of case I, identical to tilde-gamma^(11)_11 of case II
    return ((gamma2 + gamma3) * c2 / 2 + 2 * b.gamma00 + b.Gamma_minus + b.Gamma_plus
            + gamma * c2 * (1 + s * s) / 4)


def case1_rates(b: BaseRates, d: DressedParams, gamma2: float, gamma3: float, gamma: float) -> CaseIRates:
    s, c = d.sin_theta, d.cos_theta
    c2, s2 = c * c, s * s
    gsum = b.gamma_minus + b.gamma_plus
    gdif = b.gamma_plus - b.gamma_minus
    g33 = _common_diagonal(b, s, c2, gamma2, gamma3, gamma)
    return CaseIRates(
        g1_0=(gsum * s2 + gamma * c2 * (1 + s2)) / 2,
        g1_1=2 * b.gamma00 + gsum * s2 / 2 + 3 * gamma * c2 * (1 + s2) / 4,
        g2_0=(gdif * s2 - 2 * gamma * s * c2) / 2,
        g2_1=2 * (b.Gamma_minus - b.Gamma_plus) + gdif * s2 / 2 - gamma * s * c2 / 2,
        g2_2=2 * (b.gamma00 + b.Gamma_minus + b.Gamma_plus + gamma * c2 * (1 + s2) / 8),
        g3_3=g33,
        g4_4=g33,
        g5_5=g33,
        g6_6=g33,
    )


def case2_rates(b: BaseRates, d: DressedParams, gamma2: float, gamma3: float, gamma: float) -> CaseIIRates:
    s, c = d.sin_theta, d.cos_theta
    c2 = c * c
    r1 = case1_rates(b, d, gamma2, gamma3, gamma)
    gsum = b.gamma_plus + b.gamma_minus
    # tilde-gamma^(3)_3
    t33 = (gamma2 * c2 * (1 + 3 * s) ** 2 / 8 + gamma3 * c2 * (1 - 3 * s) ** 2 / 8
           + gsum * s * s / 4 + b.gamma00 + b.Gamma_minus + 9 * gamma * c2 * c2 / 16
           + gamma * c2 * ((1 + s) ** 2 + (1 - s) ** 2 / 2) / 4)
    # tilde-gamma^(5)_5
    t55 = (gamma2 * c2 * (1 - 3 * s) ** 2 / 8 + gamma3 * c2 * (1 + 3 * s) ** 2 / 8
           + gsum * s * s / 4 + b.gamma00 + b.Gamma_plus + 9 * gamma * c2 * c2 / 16
           + gamma * c2 * ((1 - s) ** 2 + (1 + s) ** 2 / 2) / 4)
    # tilde-gamma^(3)_7 and tilde-gamma^(5)_9
    t37 = b.gamma0_plus + gamma * c2 * (1 - s) ** 2 / 4
    t59 = b.gamma0_minus + gamma * c2 * (1 + s) ** 2 / 4
    t11 = _common_diagonal(b, s, c2, gamma2, gamma3, gamma)
    return CaseIIRates(
        t1_0=r1.g1_0,
        t1_1=r1.g1_1,
        t1_2=gamma * s * c2 / 2,
        t2_0=r1.g2_0,
        t2_1=-r1.g2_1,
        t2_2=r1.g2_2,
        t3_3=t33, t3_7=t37,
        t4_4=t33, t4_8=t37,
        t5_5=t55, t5_9=t59,
        t6_6=t55, t6_10=t59,
        t7_3=t59, t7_7=t55,
        t8_4=t59, t8_8=t55,
        t9_5=t37, t9_9=t33,
        t10_6=t37, t10_10=t33,
        t11_11=t11, t12_12=t11, t13_13=t11, t14_14=t11, t15_15=t11, t16_16=t11,
    )


def emitter_rates(b: BaseRates, d: DressedParams, gamma: float, reading: str = "corrected") -> EmitterRates:
    """Rates of the two-population emitter-only equations.

    The ``"literal"`` reading weights Gamma^(-+) by 1/2 in gamma^(+-)_22;
    the default weight 2 is the one the g=0 generator reproduces.
    """
    if reading not in ("corrected", "literal"):
        raise ValueError(f"unknown reading {reading!r}")
    s, c = d.sin_theta, d.cos_theta
    c2 = c * c
    w = 0.5 if reading == "literal" else 2.0
    return EmitterRates(
        g11_plus=b.gamma_plus * s * s / 2 + gamma * c2 * (1 - s) ** 2 / 4,
        g11_minus=b.gamma_minus * s * s / 2 + gamma * c2 * (1 + s) ** 2 / 4,
        g22_plus=2 * b.gamma00 + w * b.Gamma_minus + gamma * c2 * (1 + s) ** 2 / 4,
        g22_minus=2 * b.gamma00 + w * b.Gamma_plus + gamma * c2 * (1 - s) ** 2 / 4,
        g33_plus=b.gamma_plus * c2 / 4 + gamma * (1 - s) ** 4 / 8,
        g33_minus=b.gamma_minus * c2 / 4 + gamma * (1 + s) ** 4 / 8,
    )
