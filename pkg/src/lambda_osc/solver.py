"""Steady states and transients of a :class:`RateMatrix`."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .generator import BlockVector, RateMatrix

NEGATIVE_TOL = 1e-8
RESIDUAL_TOL = 1e-9


class SolverError(RuntimeError):
    """Base class for solver failures."""


class SingularSystem(SolverError):
    pass


class NonPhysical(SolverError):
    """A Fock population came out clearly negative; n_max is too small."""


class ResidualTooLarge(SolverError):
    """The normalized solution does not satisfy L P = 0 to tolerance.

    With hard truncation this is the probability leaking through n_max, so
    it also means n_max is too small.
    """


class StepFailure(SolverError):
    pass


@dataclass
class SteadyStateResult:
    state: BlockVector
    residual: float
    condition_hint: float
    method: str  # "replace-row" or "least-squares"


def _normalization_row(m: RateMatrix) -> np.ndarray:
    row = np.zeros(m.dimension)
    row[: m.n_max + 1] = 1.0
    return row


def _replace_row_solve(m: RateMatrix, row_index: int):
    L = m.matrix.tocsr(copy=True).tolil()
    L[row_index, :] = _normalization_row(m)
    A = L.tocsc()
    rhs = np.zeros(m.dimension)
    rhs[row_index] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        lu = spla.splu(A)
    x = lu.solve(rhs)
    du = np.abs(lu.U.diagonal())
    cond = float(du.max() / du.min()) if du.min() > 0 else np.inf
    if not np.all(np.isfinite(x)) or not np.isfinite(cond) or cond > 1e15:
        raise SingularSystem(f"row-replaced system is singular (pivot ratio {cond:.3g})")
    return x, cond


def _least_squares_solve(m: RateMatrix):
    A = sp.vstack([m.matrix, sp.csr_matrix(_normalization_row(m))]).tocsr()
    rhs = np.zeros(m.dimension + 1)
    rhs[-1] = 1.0
    if m.dimension <= 4000:
        x, _, rank, sv = np.linalg.lstsq(A.toarray(), rhs, rcond=None)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        if rank < m.dimension:
            raise SingularSystem(f"stacked system rank {rank} < {m.dimension}")
        return x, cond
    out = spla.lsqr(A, rhs, atol=1e-15, btol=1e-15, iter_lim=50 * m.dimension)
    if out[1] not in (1, 2, 4, 5):
        raise SingularSystem(f"lsqr did not converge (istop={out[1]})")
    return out[0], float(out[6])


def steady_state(m: RateMatrix, row_index: int | None = None, method: str = "auto",
                 residual_tol: float = RESIDUAL_TOL, negative_tol: float = NEGATIVE_TOL) -> SteadyStateResult:
    """Null vector of ``L`` normalized to ``sum_n P0[n] = 1``.

    The default replaces the ``P0[n_max]`` row by the normalization
    functional and solves the square system with sparse LU; a stacked
    least-squares solve is the fallback. Raises :class:`ResidualTooLarge`
    if ``max|L P| > residual_tol * max|L|`` and :class:`NonPhysical` on
    populations below ``-negative_tol``.
    """
    if row_index is None:
        row_index = m.n_max
    used = "replace-row"
    x = cond = None
    if method in ("auto", "replace-row"):
        try:
            x, cond = _replace_row_solve(m, row_index)
        except (SingularSystem, RuntimeError, spla.MatrixRankWarning):
            if method == "replace-row":
                raise SingularSystem("row-replaced system is singular") from None
    if x is None:
        x, cond = _least_squares_solve(m)
        used = "least-squares"
    nf = m.n_max + 1
    total = x[:nf].sum()
    if not np.isfinite(total) or total == 0:
        raise SingularSystem("solution has zero norm on the population block")
    x = x / total
    residual = float(np.max(np.abs(m.matrix @ x)))
    scale = float(np.max(np.abs(m.matrix.data))) if m.matrix.nnz else 0.0
    state = BlockVector(m.case, m.n_max, x)
    worst = float(x[:nf].min())
    if worst < -negative_tol:
        raise NonPhysical(f"P0 has entry {worst:.3g} < -{negative_tol:g}; increase n_max")
    if residual > residual_tol * scale:
        raise ResidualTooLarge(f"residual {residual:.3g} exceeds {residual_tol:g} * max|L| = {residual_tol * scale:.3g}")
    return SteadyStateResult(state, residual, cond, used)


def evolve(m: RateMatrix, p0: BlockVector, t_end: float, rtol: float = 1e-10, atol: float = 1e-13,
           method: str = "Radau", max_step: float = np.inf) -> BlockVector:
    """Integrate ``dP/dt = L P`` from ``p0`` to ``t_end``.

    ``method`` is any :func:`scipy.integrate.solve_ivp` method; the implicit
    ones get the sparse Jacobian. BDF can stall on the weakly damped
    coherences, hence the Radau default.
    """
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if p0.case != m.case or p0.n_max != m.n_max:
        raise ValueError("initial state does not match the generator layout")
    if t_end == 0:
        return BlockVector(p0.case, p0.n_max, p0.data.copy())
    L = m.matrix.tocsr()
    kw = {"jac": L} if method in ("BDF", "Radau", "LSODA") else {}
    sol = scipy.integrate.solve_ivp(lambda t, y: L @ y, (0.0, t_end), p0.data, method=method,
                                    rtol=rtol, atol=atol, max_step=max_step, **kw)
    if not sol.success:
        raise StepFailure(sol.message)
    return BlockVector(m.case, m.n_max, sol.y[:, -1])
