"""Operator-level reference models.

Two independent Liouvillians on the full emitter (x) truncated-Fock space:

* the secular dressed-basis master equation with the resonant effective
  Hamiltonian of either case, built term by term from explicit matrices;
* the bare-basis master equation of the driven Lambda system, with no
  secular or rotating-wave simplification beyond the laser frame.

Density matrices are vectorized column-major, ``vec(A X B) = (B^T kron A) vec(X)``.
Projection onto the block variables lets the steady states be compared
with the projected rate equations element by element.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .params import DressedParams, PhysicalParams, derive_dressed
from .rates import base_rates

IMAG_BLOCKS = {
    1: (3, 5),
    2: (3, 5, 7, 9, 12, 14, 16),
}


class DegenerateNullSpace(RuntimeError):
    pass


class ImaginaryResidue(ValueError):
    pass


@dataclass(frozen=True)
class SuperOperator:
    matrix: sp.csr_matrix
    n_max: int
    basis: str  # "dressed" or "bare"

    @property
    def hilbert_dim(self) -> int:
        return 3 * (self.n_max + 1)


def dressed_transform(d: DressedParams) -> np.ndarray:
    """Real orthogonal ``T`` with ``|k> = sum_a T[k, a] |Psi_a>``.

    Rows are bare levels 1, 2, 3 and columns dressed states 1, 2, 3.
    """
    s, c = d.sin_theta, d.cos_theta
    r = c / math.sqrt(2.0)
    return np.array([
        [s, -r, -r],
        [r, 0.5 * (1 + s), -0.5 * (1 - s)],
        [-r, 0.5 * (1 - s), -0.5 * (1 + s)],
    ])


def _annihilation(n_max: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1, format="csr")


class _Ops:
    """Explicit matrices on emitter (x) Fock, emitter index slow."""

    def __init__(self, n_max: int):
        self.n_max = n_max
        self.nf = n_max + 1
        self.dim = 3 * self.nf
        self.idf = sp.identity(self.nf, format="csr")
        a = _annihilation(n_max)
        self.b = sp.kron(sp.identity(3), a, format="csr")
        self.bd = self.b.T.tocsr()
        self.num = (self.bd @ self.b).tocsr()

    def level(self, m: np.ndarray) -> sp.csr_matrix:
        return sp.kron(sp.csr_matrix(m), self.idf, format="csr")

    def R(self, a: int, bb: int) -> sp.csr_matrix:
        m = np.zeros((3, 3))
        m[a - 1, bb - 1] = 1.0
        return self.level(m)


def _spre(A):
    return sp.kron(sp.identity(A.shape[0]), A, format="csr")


def _spost(B):
    return sp.kron(B.T, sp.identity(B.shape[0]), format="csr")


def _hamiltonian_part(H) -> sp.csr_matrix:
    return (-1j * (_spre(H) - _spost(H))).tocsr()


def _commutator_term(c: complex, A, B) -> sp.csr_matrix:
    """Superoperator of ``-c [A, B rho] + H.c.``."""
    Ad = A.conj().T
    Bd = B.conj().T
    AB = (A @ B)
    op = -c * (_spre(AB) - _spre(B) @ _spost(A))
    op = op - np.conj(c) * (_spost(Bd @ Ad) - _spre(Ad) @ _spost(Bd))
    return op.tocsr()


def _oscillator_damping(o: _Ops, kappa: float, nbar: float) -> sp.csr_matrix:
    return (_commutator_term(kappa * (1 + nbar), o.bd, o.b)
            + _commutator_term(kappa * nbar, o.b, o.bd))


def secular_dissipator_terms(d: DressedParams, gamma2: float, gamma3: float, gamma: float):
    """(coefficient, A, B) triples of the dressed secular emitter dissipator.

    Operators are 3x3 emitter matrices; each triple contributes
    ``-c [A, B rho] + H.c.``.
    """
    s, c = d.sin_theta, d.cos_theta
    br = base_rates(d, gamma2, gamma3, gamma)
    E = np.eye(3)

    def R(a, b):
        return np.outer(E[a - 1], E[b - 1])

    k = 1.0 / (2.0 * math.sqrt(2.0))
    Rp = 2 * s * c * k * R(1, 1) - c * (1 + s) * k * R(2, 2) + c * (1 - s) * k * R(3, 3)
    Rm = 2 * s * c * k * R(1, 1) + c * (1 - s) * k * R(2, 2) - c * (1 + s) * k * R(3, 3)
    D = 0.5 * (R(2, 2) + R(3, 3)) - R(1, 1)
    up = R(1, 2) + R(3, 1)
    dn = R(2, 1) + R(1, 3)
    return [
        (gamma2, Rp, Rp),
        (gamma3, Rm, Rm),
        (s * s * br.gamma_plus / 4, R(1, 2), R(2, 1)),
        (s * s * br.gamma_minus / 4, R(1, 3), R(3, 1)),
        (br.gamma00, R(2, 1), R(1, 2)),
        (br.gamma00, R(3, 1), R(1, 3)),
        (br.Gamma_plus, R(3, 2), R(2, 3)),
        (br.Gamma_minus, R(2, 3), R(3, 2)),
        (br.gamma0_plus / 2, R(1, 2), R(1, 3)),
        (br.gamma0_plus / 2, R(3, 1), R(2, 1)),
        (br.gamma0_minus / 2, R(2, 1), R(3, 1)),
        (br.gamma0_minus / 2, R(1, 3), R(1, 2)),
        (gamma * c ** 4 / 4, D, D),
        (gamma * c * c * (1 - s) ** 2 / 8, up, dn),
        (gamma * c * c * (1 + s) ** 2 / 8, dn, up),
    ]


def secularized_bare_dissipator_terms(d: DressedParams, gamma2: float, gamma3: float, gamma: float):
    """Secular limit of the bare emitter dissipator, derived numerically.

    Each bare lowering operator is rotated into the dressed basis and split
    into its components oscillating at the dressed Bohr frequencies
    (0, +-Omega, +-2 Omega); only equal-frequency products survive. Used to
    cross-check :func:`secular_dissipator_terms`.
    """
    T = dressed_transform(d)
    energies = np.array([0.0, 1.0, -1.0])  # units of Omega

    def bare(k, l):
        return np.outer(T[k - 1], T[l - 1])

    out = []
    for rate, low in ((gamma2, bare(2, 1)), (gamma3, bare(3, 1)), (gamma, bare(3, 2))):
        freq = energies[:, None] - energies[None, :]
        for w in np.unique(freq):
            comp = np.where(freq == w, low, 0.0)
            if np.any(comp):
                out.append((rate, comp.conj().T, comp))
    return out


def _emitter_dissipator(o: _Ops, terms) -> sp.csr_matrix:
    L = sp.csr_matrix((o.dim ** 2, o.dim ** 2), dtype=complex)
    for coef, A, B in terms:
        if coef == 0:
            continue
        L = L + _commutator_term(coef, o.level(A), o.level(B))
    return L


def effective_hamiltonian(o: _Ops, d: DressedParams, case: int) -> sp.csr_matrix:
    if case == 1:
        H = d.delta_bar * o.num + d.g_bar * (o.R(3, 2) @ o.bd + o.b @ o.R(2, 3))
    elif case == 2:
        H = d.delta_tilde * o.num - d.g_tilde * ((o.R(1, 2) + o.R(3, 1)) @ o.bd
                                                 + o.b @ (o.R(2, 1) + o.R(1, 3)))
    else:
        raise ValueError(f"case must be 1 or 2, got {case!r}")
    return H.tocsr()


def build_secular_liouvillian(p: PhysicalParams, d: DressedParams | None, case: int, n_max: int,
                              terms=None) -> SuperOperator:
    """Dressed-basis secular Liouvillian with the resonant Hamiltonian of ``case``.

    ``terms`` overrides the emitter dissipator (default: the explicit
    secular form of :func:`secular_dissipator_terms`).
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    d = derive_dressed(p) if d is None else d
    o = _Ops(n_max)
    if terms is None:
        terms = secular_dissipator_terms(d, p.gamma2, p.gamma3, p.gamma)
    L = (_hamiltonian_part(effective_hamiltonian(o, d, case))
         + _emitter_dissipator(o, terms)
         + _oscillator_damping(o, p.kappa, p.nbar))
    return SuperOperator(L.tocsr(), n_max, "dressed")


def bare_hamiltonian(o: _Ops, p: PhysicalParams) -> sp.csr_matrix:
    E = np.eye(3)

    def S(a, b):
        return o.level(np.outer(E[a - 1], E[b - 1]))

    H = (p.omega * o.num + 0.5 * p.omega23 * (S(2, 2) - S(3, 3))
         + p.g * S(1, 1) @ (o.b + o.bd)
         - p.Omega0 * (S(1, 2) + S(2, 1) + S(1, 3) + S(3, 1)))
    return H.tocsr()


def build_bare_liouvillian(p: PhysicalParams, n_max: int) -> SuperOperator:
    """Full laser-frame master equation in the bare level basis."""
    o = _Ops(n_max)
    E = np.eye(3)

    def S(a, b):
        return np.outer(E[a - 1], E[b - 1])

    terms = [(p.gamma2, S(1, 2), S(2, 1)), (p.gamma3, S(1, 3), S(3, 1)), (p.gamma, S(2, 3), S(3, 2))]
    L = (_hamiltonian_part(bare_hamiltonian(o, p))
         + _emitter_dissipator(o, terms)
         + _oscillator_damping(o, p.kappa, p.nbar))
    return SuperOperator(L.tocsr(), n_max, "bare")


def apply(s: SuperOperator, rho: np.ndarray) -> np.ndarray:
    n = rho.shape[0]
    return (s.matrix @ rho.reshape(-1, order="F")).reshape(n, n, order="F")


def oracle_steady(s: SuperOperator, check_nullity: bool = False) -> np.ndarray:
    """Trace-one null vector of the Liouvillian via trace-row replacement."""
    n = s.hilbert_dim
    L = s.matrix.tolil(copy=True)
    trace_row = np.zeros(n * n, dtype=complex)
    trace_row[np.arange(n) * (n + 1)] = 1.0
    L[0, :] = trace_row
    rhs = np.zeros(n * n, dtype=complex)
    rhs[0] = 1.0
    x = spla.spsolve(L.tocsc(), rhs)
    if not np.all(np.isfinite(x)):
        raise DegenerateNullSpace("trace-replaced Liouvillian is singular")
    if check_nullity:
        sv = scipy.linalg.svdvals(s.matrix.toarray())
        scale = sv[0]
        if np.sum(sv < 1e-10 * scale) > 1:
            raise DegenerateNullSpace("null space dimension > 1")
    rho = x.reshape(n, n, order="F")
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def _emitter_blocks(rho: np.ndarray, n_max: int) -> dict:
    nf = n_max + 1
    return {(a, b): rho[(a - 1) * nf:a * nf, (b - 1) * nf:b * nf]
            for a in (1, 2, 3) for b in (1, 2, 3)}


def _block_operators(rho: np.ndarray, n_max: int, case: int) -> list:
    r = _emitter_blocks(rho, n_max)
    a = _annihilation(n_max).toarray()
    ad = a.T
    out = [r[1, 1] + r[2, 2] + r[3, 3], r[2, 2] + r[3, 3], r[2, 2] - r[3, 3]]
    if case == 1:
        out += [
            ad @ r[2, 3] - r[3, 2] @ a,
            ad @ r[2, 3] + r[3, 2] @ a,
            r[2, 3] @ ad - a @ r[3, 2],
            r[2, 3] @ ad + a @ r[3, 2],
        ]
    else:
        a2, ad2 = a @ a, ad @ ad
        out += [
            ad @ r[2, 1] - r[1, 2] @ a,
            ad @ r[2, 1] + r[1, 2] @ a,
            r[1, 3] @ ad - a @ r[3, 1],
            r[1, 3] @ ad + a @ r[3, 1],
            ad @ r[1, 3] - r[3, 1] @ a,
            ad @ r[1, 3] + r[3, 1] @ a,
            r[2, 1] @ ad - a @ r[1, 2],
            r[2, 1] @ ad + a @ r[1, 2],
            ad @ r[2, 3] @ ad + a @ r[3, 2] @ a,
            ad @ r[2, 3] @ ad - a @ r[3, 2] @ a,
            ad2 @ r[2, 3] + r[3, 2] @ a2,
            ad2 @ r[2, 3] - r[3, 2] @ a2,
            r[2, 3] @ ad2 + a2 @ r[3, 2],
            r[2, 3] @ ad2 - a2 @ r[3, 2],
        ]
    return out


def project_complex(rho: np.ndarray, case: int) -> np.ndarray:
    """Diagonal Fock elements of every block combination, shape (B, n_max+1)."""
    n_max = rho.shape[0] // 3 - 1
    return np.array([np.diag(X) for X in _block_operators(rho, n_max, case)])


def project_to_blocks(rho: np.ndarray, case: int, tol: float = 1e-8) -> np.ndarray:
    """Real block variables; anti-Hermitian combinations are divided by ``i``.

    Returns a flat block-major vector of length ``B * (n_max + 1)``.
    """
    P = project_complex(rho, case).astype(complex)
    for i in IMAG_BLOCKS[case]:
        P[i] = P[i] / 1j
    worst = float(np.max(np.abs(P.imag)))
    if worst > tol:
        raise ImaginaryResidue(f"projected block variables carry imaginary part {worst:.3g}")
    return P.real.reshape(-1)
