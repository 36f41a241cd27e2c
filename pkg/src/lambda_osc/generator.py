"""Sparse generator ``dP/dt = L P`` of the projected equations of motion.

Variables are the Fock-diagonal elements ``P[i, n] = <n| rho^(i) |n>`` of
7 (case 1) or 17 (case 2) emitter-block combinations, stored block-major:
``index(i, n) = i * (n_max + 1) + n``.

Everything is real. Blocks built as ``X - X^dagger`` have purely imaginary
Fock-diagonal elements; they are stored divided by ``i`` (see
``IMAG_BLOCKS``), which turns every ``i g`` and ``i delta`` coupling into a
signed real coefficient.

Each equation is written as a list of terms ``(i, j, k, a, b)`` meaning
``dP[i, n] += (a + b n) P[j, n + k]`` with complex ``a, b`` exactly as the
equations read; indices outside ``[0, n_max]`` are treated as zero.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .params import DressedParams, PhysicalParams, derive_dressed
from .rates import base_rates, case1_rates, case2_rates

N_BLOCKS = {1: 7, 2: 17}
IMAG_BLOCKS = {1: (3, 5), 2: (3, 5, 7, 9, 12, 14, 16)}
READINGS = ("corrected", "literal")

I = 1j


@dataclass
class BlockVector:
    case: int
    n_max: int
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        want = N_BLOCKS[self.case] * (self.n_max + 1)
        if self.data.shape != (want,):
            raise ValueError(f"expected {want} entries for case {self.case}, n_max={self.n_max}; got {self.data.shape}")

    @property
    def blocks(self) -> np.ndarray:
        """View of shape (B, n_max+1)."""
        return self.data.reshape(N_BLOCKS[self.case], self.n_max + 1)

    def block(self, i: int) -> np.ndarray:
        return self.blocks[i]

    def index(self, i: int, n: int) -> int:
        return i * (self.n_max + 1) + n

    @classmethod
    def vacuum(cls, case: int, n_max: int) -> "BlockVector":
        """Oscillator vacuum with the emitter in dressed state 1."""
        v = cls(case, n_max, np.zeros(N_BLOCKS[case] * (n_max + 1)))
        v.data[0] = 1.0
        return v


@dataclass(frozen=True)
class RateMatrix:
    matrix: sp.csr_matrix
    case: int
    n_max: int
    fingerprint: str = ""
    reading: str = "corrected"
    terms: tuple = field(default=(), repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_blocks(self) -> int:
        return N_BLOCKS[self.case]


def _fingerprint(case, n_max, p: PhysicalParams, reading) -> str:
    key = repr((case, n_max, reading, tuple(sorted(p.as_dict().items()))))
    return hashlib.sha1(key.encode()).hexdigest()[:16]


def _population_ladder(i, K0, K1):
    # thermal birth-death chain on a Fock-diagonal block
    return [(i, i, 0, -2 * K0, -2 * (K0 + K1)), (i, i, -1, 0, 2 * K0), (i, i, 1, 2 * K1, 2 * K1)]


def _lower_ladder(i, partner, K0, K1):
    # blocks of the form b^dag X (+-) X^dag b
    return [(i, i, 0, K1 - K0, -2 * (K0 + K1)), (i, i, 1, 2 * K1, 2 * K1), (i, i, -1, 0, 2 * K0),
            (i, partner, 0, -2 * K1, 0)]


def _upper_ladder(i, partner, K0, K1):
    # blocks of the form X b^dag (+-) b X^dag
    return [(i, i, 0, -K1 - 3 * K0, -2 * (K0 + K1)), (i, i, 1, 2 * K1, 2 * K1), (i, i, -1, 0, 2 * K0),
            (i, partner, 0, 2 * K0, 0)]


def case1_terms(p: PhysicalParams, d: DressedParams, r, reading: str = "corrected") -> list:
    """Terms of the resonant (omega ~ 2 Omega) system, blocks 0..6."""
    K0, K1 = p.kappa * p.nbar, p.kappa * (1 + p.nbar)
    g, dl = d.g_bar, d.delta_bar
    t = []
    # populations: P0 total, P1 = R22 + R33, P2 = R22 - R33
    t += [(0, 5, 0, I * g, 0), (0, 3, 0, -I * g, 0)] + _population_ladder(0, K0, K1)
    t += [(1, 5, 0, I * g, 0), (1, 3, 0, -I * g, 0)] + _population_ladder(1, K0, K1)
    t += [(1, 0, 0, r.g1_0, 0), (1, 1, 0, -r.g1_1, 0)]
    if reading == "corrected":
        s, c = d.sin_theta, d.cos_theta
        t += [(1, 2, 0, -p.gamma * s * c * c / 2, 0)]
    t += [(2, 5, 0, I * g, 0), (2, 3, 0, I * g, 0)] + _population_ladder(2, K0, K1)
    t += [(2, 0, 0, r.g2_0, 0), (2, 1, 0, -r.g2_1, 0), (2, 2, 0, -r.g2_2, 0)]
    # P3 = b^dag rho23 - rho32 b,  P4 = b^dag rho23 + rho32 b
    t += [(3, 4, 0, I * dl, 0),
          (3, 1, 0, 0, -I * g), (3, 2, 0, 0, I * g), (3, 1, -1, 0, I * g), (3, 2, -1, 0, I * g)]
    t += _lower_ladder(3, 5, K0, K1) + [(3, 3, 0, -r.g3_3, 0)]
    t += [(4, 3, 0, I * dl, 0)] + _lower_ladder(4, 6, K0, K1) + [(4, 4, 0, -r.g4_4, 0)]
    # P5 = rho23 b^dag - b rho32,  P6 = rho23 b^dag + b rho32
    t += [(5, 6, 0, I * dl, 0),
          (5, 1, 0, I * g, I * g), (5, 2, 0, I * g, I * g), (5, 1, 1, -I * g, -I * g), (5, 2, 1, I * g, I * g)]
    t += _upper_ladder(5, 3, K0, K1) + [(5, 5, 0, -r.g5_5, 0)]
    t += [(6, 5, 0, I * dl, 0)] + _upper_ladder(6, 4, K0, K1) + [(6, 6, 0, -r.g6_6, 0)]
    return t


def case2_terms(p: PhysicalParams, d: DressedParams, r, reading: str = "corrected") -> list:
    """Terms of the resonant (omega ~ Omega) system, blocks 0..16."""
    K0, K1 = p.kappa * p.nbar, p.kappa * (1 + p.nbar)
    g, dl = d.g_tilde, d.delta_tilde
    lit = reading == "literal"
    t = []
    t += [(0, 3, 0, I * g, 0), (0, 5, 0, -I * g, 0), (0, 9, 0, -I * g, 0), (0, 7, 0, I * g, 0)]
    t += _population_ladder(0, K0, K1)
    t += [(1, 7, 0, I * g, 0), (1, 9, 0, -I * g, 0)] + _population_ladder(1, K0, K1)
    t += [(1, 0, 0, r.t1_0, 0), (1, 1, 0, -r.t1_1, 0), (1, 2, 0, -r.t1_2, 0)]
    t += [(2, 9, 0, -I * g, 0), (2, 7, 0, -I * g, 0)] + _population_ladder(2, K0, K1)
    t += [(2, 0, 0, r.t2_0, 0), (2, 1, 0, r.t2_1, 0), (2, 2, 0, -r.t2_2, 0)]
    # P3 = b^dag rho21 - rho12 b,  P4 = b^dag rho21 + rho12 b
    t += [(3, 4, 0, I * dl, 0), (3, 3, 0, -r.t3_3, 0), (3, 7, 0, r.t3_7, 0),
          (3, 0, 0, 0, 2 * I * g), (3, 1, -1, 0, -I * g), (3, 2, -1, 0, -I * g)]
    if lit:
        t += [(3, 1, 0, -I * g, -2 * I * g)]
    else:
        t += [(3, 1, 0, 0, -2 * I * g), (3, 11, 0, -I * g, 0)]
    t += _lower_ladder(3, 9, K0, K1)
    t += [(4, 3, 0, I * dl, 0), (4, 12, 0, -I * g, 0)] + _lower_ladder(4, 10, K0, K1)
    t += [(4, 4, 0, -r.t4_4, 0), (4, 8, 0, r.t4_8, 0)]
    # P5 = rho13 b^dag - b rho31,  P6 = rho13 b^dag + b rho31
    t += [(5, 6, 0, I * dl, 0), (5, 11, 0, I * g, 0), (5, 1, 1, I * g, I * g), (5, 2, 1, -I * g, -I * g),
          (5, 0, 0, -2 * I * g, -2 * I * g), (5, 1, 0, 2 * I * g, 2 * I * g)]
    t += _upper_ladder(5, 7, K0, K1) + [(5, 5, 0, -r.t5_5, 0), (5, 9, 0, r.t5_9, 0)]
    t += [(6, 5, 0, I * dl, 0), (6, 12, 0, I * g, 0)] + _upper_ladder(6, 8, K0, K1)
    t += [(6, 6, 0, -r.t6_6, 0), (6, 10, 0, r.t6_10, 0)]
    # P7 = b^dag rho13 - rho31 b,  P8 = b^dag rho13 + rho31 b
    t += [(7, 8, 0, I * dl, 0), (7, 13, 0, I * g, 0), (7, 1, 0, 0, I * g), (7, 2, 0, 0, -I * g),
          (7, 0, -1, 0, -2 * I * g), (7, 1, -1, 0, 2 * I * g)]
    t += _lower_ladder(7, 5, K0, K1) + [(7, 3, 0, r.t7_3, 0), (7, 7, 0, -r.t7_7, 0)]
    t += [(8, 7, 0, I * dl, 0), (8, 14, 0, I * g, 0)] + _lower_ladder(8, 6, K0, K1)
    t += [(8, 4, 0, r.t8_4, 0), (8, 8, 0, -r.t8_8, 0)]
    # P9 = rho21 b^dag - b rho12,  P10 = rho21 b^dag + b rho12
    t += [(9, 10, 0, I * dl, 0), (9, 0, 1, 2 * I * g, 2 * I * g), (9, 1, 1, -2 * I * g, -2 * I * g),
          (9, 1, 0, -I * g, -I * g), (9, 2, 0, -I * g, -I * g), (9, 15, 0, -I * g, 0)]
    t += _upper_ladder(9, 3, K0, K1) + [(9, 5, 0, r.t9_5, 0), (9, 9, 0, -r.t9_9, 0)]
    t += [(10, 9, 0, I * dl, 0), (10, 16, 0, -I * g, 0)] + _upper_ladder(10, 4, K0, K1)
    t += [(10, 6, 0, r.t10_6, 0), (10, 10, 0, -r.t10_10, 0)]
    # P11/P12 = b^dag rho23 b^dag +- b rho32 b
    for i, j, a5, a3, up, dn, rate in ((11, 12, 5, 3, 15, 13, r.t11_11), (12, 11, 6, 4, 16, 14, r.t12_12)):
        t += [(i, j, 0, 2 * I * dl, 0), (i, a5, 0, 0, I * g), (i, a3, 0, -I * g, -I * g)]
        t += [(i, i, 0, -2 * K0, -2 * (K0 + K1)), (i, i, 1, 2 * K1, 2 * K1), (i, i, -1, 0, 2 * K0),
              (i, up, 0, -2 * K1, 0), (i, dn, 0, 2 * K0, 0), (i, i, 0, -rate, 0)]
    # P13/P14 = b^dag^2 rho23 +- rho32 b^2
    for i, j, a7, a3, mid, rate in ((13, 14, 7, 3, 11, r.t13_13), (14, 13, 8, 4, 12, r.t14_14)):
        t += [(i, j, 0, 2 * I * dl, 0), (i, a7, 0, -I * g, I * g), (i, a3, -1, 0, -I * g)]
        t += [(i, i, 0, 2 * K1, -2 * (K0 + K1)), (i, i, 1, 2 * K1, 2 * K1), (i, i, -1, 0, 2 * K0),
              (i, mid, 0, -4 * K1, 0), (i, i, 0, -rate, 0)]
    # P15/P16 = rho23 b^dag^2 +- b^2 rho32
    for i, j, a5, k5, a9, mid, rate in ((15, 16, 5, 0 if lit else 1, 9, 11, r.t15_15),
                                        (16, 15, 6, 1, 10, 12, r.t16_16)):
        t += [(i, j, 0, 2 * I * dl, 0), (i, a5, k5, I * g, I * g), (i, a9, 0, -2 * I * g, -I * g)]
        t += [(i, i, 0, -2 * K1 - 4 * K0, -2 * (K0 + K1)), (i, i, 1, 2 * K1, 2 * K1), (i, i, -1, 0, 2 * K0),
              (i, mid, 0, 4 * K0, 0), (i, i, 0, -rate, 0)]
    return t


def realify(terms, case: int):
    """Convert complex terms to real arrays under the stored-divided-by-i convention."""
    imag = set(IMAG_BLOCKS[case])
    tgt, src, off, av, bv = [], [], [], [], []
    for i, j, k, a, b in terms:
        f = (1j if j in imag else 1.0) / (1j if i in imag else 1.0)
        ra, rb = complex(a) * f, complex(b) * f
        if abs(ra.imag) > 1e-12 * max(1.0, abs(ra)) or abs(rb.imag) > 1e-12 * max(1.0, abs(rb)):
            raise ValueError(f"term {(i, j, k)} does not map to a real coefficient")
        tgt.append(i)
        src.append(j)
        off.append(k)
        av.append(ra.real)
        bv.append(rb.real)
    return (np.array(tgt, np.int64), np.array(src, np.int64), np.array(off, np.int64),
            np.array(av, float), np.array(bv, float))


def assemble_from_terms(terms, case: int, n_max: int) -> sp.csr_matrix:
    nf = n_max + 1
    dim = N_BLOCKS[case] * nf
    rows, cols, vals = _kernels.fill_triplets(*realify(terms, case), nf)
    m = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    m.sum_duplicates()
    return m


def assemble_case1(p: PhysicalParams, d: DressedParams | None = None, r=None, n_max: int = 40,
                   reading: str = "corrected") -> RateMatrix:
    if n_max < 1:
        raise ValueError("case 1 needs n_max >= 1")
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    d = derive_dressed(p) if d is None else d
    if r is None:
        r = case1_rates(base_rates(d, p.gamma2, p.gamma3, p.gamma), d, p.gamma2, p.gamma3, p.gamma)
    terms = case1_terms(p, d, r, reading)
    return RateMatrix(assemble_from_terms(terms, 1, n_max), 1, n_max,
                      _fingerprint(1, n_max, p, reading), reading, tuple(terms))


def assemble_case2(p: PhysicalParams, d: DressedParams | None = None, r=None, n_max: int = 40,
                   reading: str = "corrected") -> RateMatrix:
    if n_max < 2:
        raise ValueError("case 2 needs n_max >= 2")
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    d = derive_dressed(p) if d is None else d
    if r is None:
        r = case2_rates(base_rates(d, p.gamma2, p.gamma3, p.gamma), d, p.gamma2, p.gamma3, p.gamma)
    terms = case2_terms(p, d, r, reading)
    return RateMatrix(assemble_from_terms(terms, 2, n_max), 2, n_max,
                      _fingerprint(2, n_max, p, reading), reading, tuple(terms))


def assemble(p: PhysicalParams, case: int, n_max: int, reading: str = "corrected") -> RateMatrix:
    if case == 1:
        return assemble_case1(p, n_max=n_max, reading=reading)
    if case == 2:
        return assemble_case2(p, n_max=n_max, reading=reading)
    raise ValueError(f"case must be 1 or 2, got {case!r}")


# Pairs (i, j, shift) with P[i, n] == P[j, n + shift] as functionals of rho.
ALIASES = {
    1: ((5, 3, 1), (6, 4, 1)),
    2: ((9, 3, 1), (10, 4, 1), (5, 7, 1), (6, 8, 1), (11, 13, 1), (12, 14, 1), (15, 13, 2), (16, 14, 2)),
}


# leading Fock entries that vanish identically, e.g. <0|b^dag X|0> = 0
STRUCTURAL_ZEROS = {
    1: ((3, 1), (4, 1)),
    2: ((3, 1), (4, 1), (7, 1), (8, 1), (11, 1), (12, 1), (13, 2), (14, 2)),
}


def fold_aliases(row: np.ndarray, case: int, n_max: int) -> np.ndarray:
    """Move the weight of redundant variables onto their canonical partner.

    Several block variables are the same Fock element under another label
    (e.g. ``P5[n] == P3[n+1]`` in case 1). A linear functional is only
    meaningful modulo these identities; this maps it to canonical
    coordinates. Weight whose partner index falls beyond ``n_max`` stays
    where it is, since it is a truncation-boundary term. Weight on
    structurally zero entries is dropped.
    """
    nf = n_max + 1
    out = np.array(row, dtype=float).reshape(N_BLOCKS[case], nf)
    for i, j, shift in ALIASES[case]:
        w = out[i, : nf - shift].copy()
        out[j, shift:] += w
        out[i, : nf - shift] = 0.0
    for i, count in STRUCTURAL_ZEROS[case]:
        out[i, :count] = 0.0
    return out.reshape(-1)


def trace_functional(m: RateMatrix, fold: bool = True) -> np.ndarray:
    """Row vector ``1_{P0}^T L``: the rate of change of total probability.

    With ``fold`` the result is reduced modulo the variable aliases, so
    that interior entries vanish identically for an exact system.
    """
    nf = m.n_max + 1
    ind = np.zeros(m.dimension)
    ind[:nf] = 1.0
    row = np.asarray(m.matrix.T @ ind).ravel()
    return fold_aliases(row, m.case, m.n_max) if fold else row
