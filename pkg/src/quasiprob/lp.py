"""Dense linear programming for minimal-L1 decompositions.

The reference solver is a primal simplex on the standard form
``min c.x  s.t.  A x = b, x >= 0`` with Bland's anti-cycling rule.  The
instances here are small (at most tens of equality rows and a few hundred
columns), so the basis matrix is refactorized every iteration; robustness
matters more than per-pivot cost at this size.

:class:`L1Solver` specializes the split formulation of
``min ||p||_1  s.t.  A p = b`` for a fixed matrix ``A`` and many right-hand
sides: feasible starting bases come for free from a pivoted-QR column
subset of ``A``, and callers can warm start from a previous optimal basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .validation import InfeasibleError, ValidationError

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-10
RANK_TOL = 1e-8

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"
SINGULAR = "singular"


@dataclass(frozen=True)
class LPProblem:
    """Equality-form LP with nonnegativity bounds on every variable."""

    objective: np.ndarray
    equality_matrix: np.ndarray
    equality_rhs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        a = np.asarray(self.equality_matrix, dtype=float)
        b = np.asarray(self.equality_rhs, dtype=float)
        if a.ndim != 2 or c.ndim != 1 or b.ndim != 1:
            raise ValidationError("LPProblem needs a matrix and two vectors")
        if a.shape != (b.size, c.size):
            raise ValidationError(
                f"inconsistent LP shapes: A {a.shape}, b {b.shape}, c {c.shape}"
            )
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "equality_matrix", a)
        object.__setattr__(self, "equality_rhs", b)


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray | None
    objective: float
    status: str
    basis: np.ndarray | None = None
    iterations: int = 0


def _default_maxiter(m: int, n: int) -> int:
    return 500 + 20 * (m + n)


def _primal_simplex(a, b, c, basis, *, maxiter, bland_after=30):
    """Run the primal simplex from a feasible basis.

    Pivoting uses Dantzig's rule, switching permanently to Bland's rule
    after a run of degenerate steps so cycling cannot occur.  Returns
    ``(x_basic, basis, status, iterations)``.
    """
    m = a.shape[0]
    basis = np.array(basis, dtype=int)
    bland = False
    stall = 0
    x_basic = None
    for it in range(maxiter):
        try:
            lu = scipy.linalg.lu_factor(a[:, basis], check_finite=False)
        except (ValueError, np.linalg.LinAlgError):
            return None, basis, SINGULAR, it
        x_basic = scipy.linalg.lu_solve(lu, b, check_finite=False)
        y = scipy.linalg.lu_solve(lu, c[basis], trans=1, check_finite=False)
        if not (np.isfinite(x_basic).all() and np.isfinite(y).all()):
            return None, basis, SINGULAR, it
        reduced = c - y @ a
        reduced[basis] = 0.0
        if bland:
            candidates = np.flatnonzero(reduced < -OPT_TOL)
            if candidates.size == 0:
                return x_basic, basis, OPTIMAL, it
            enter = int(candidates[0])
        else:
            enter = int(np.argmin(reduced))
            if reduced[enter] >= -OPT_TOL:
                return x_basic, basis, OPTIMAL, it
        direction = scipy.linalg.lu_solve(lu, a[:, enter], check_finite=False)
        positive = direction > PIVOT_TOL
        if not positive.any():
            return None, basis, UNBOUNDED, it
        safe_x = np.maximum(x_basic, 0.0)
        ratios = np.full(m, np.inf)
        ratios[positive] = safe_x[positive] / direction[positive]
        step = ratios.min()
        ties = np.flatnonzero(ratios <= step + 1e-12)
        leave = int(ties[np.argmin(basis[ties])])
        if step <= 1e-12:
            stall += 1
            if stall > bland_after:
                bland = True
        else:
            stall = 0
        basis[leave] = enter
    return x_basic, basis, ITERATION_LIMIT, maxiter


def _expand_solution(n, basis, x_basic):
    x = np.zeros(n)
    x[basis] = np.maximum(x_basic, 0.0)
    return x


def _independent_rows(a, b):
    """Reduce ``A x = b`` to independent rows; None signals inconsistency."""
    m = a.shape[0]
    scale = max(np.abs(a).max(), 1.0)
    sv = scipy.linalg.svdvals(a)
    rank = int(np.count_nonzero(sv > RANK_TOL * scale))
    if rank == m:
        return a, b
    augmented = np.hstack([a, b[:, None]])
    sv_aug = scipy.linalg.svdvals(augmented)
    rank_aug = int(np.count_nonzero(sv_aug > RANK_TOL * max(scale, np.abs(b).max(), 1.0)))
    if rank_aug > rank:
        return None
    _, _, piv = scipy.linalg.qr(a.T, mode="economic", pivoting=True)
    rows = np.sort(piv[:rank])
    return a[rows], b[rows]


def lp_solve(problem: LPProblem, *, method: str = "simplex", maxiter: int | None = None) -> LPResult:
    """Solve an equality-form LP.

    ``method="simplex"`` is the deterministic reference path (two-phase
    primal simplex).  ``method="interior-point"`` delegates to SciPy's
    HiGHS interior-point solver; it serves as a cross-check and must agree
    with the reference within 1e-6 in objective.
    """
    if method == "interior-point":
        return _scipy_solve(problem)
    if method != "simplex":
        raise ValidationError(f"unknown LP method {method!r}")
    c = problem.objective
    reduced = _independent_rows(problem.equality_matrix, problem.equality_rhs)
    if reduced is None:
        return LPResult(None, np.nan, INFEASIBLE)
    a, b = reduced
    a = a.copy()
    b = b.copy()
    m, n = a.shape
    if maxiter is None:
        maxiter = _default_maxiter(m, n)

    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    # Phase 1: artificial variables give the trivial feasible basis.
    a1 = np.hstack([a, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = np.arange(n, n + m)
    x_basic, basis, status, it1 = _primal_simplex(a1, b, c1, basis, maxiter=maxiter)
    if status != OPTIMAL:
        return LPResult(None, np.nan, status, None, it1)
    if float(np.maximum(x_basic, 0.0)[basis >= n].sum()) > 1e-7:
        return LPResult(None, np.nan, INFEASIBLE, None, it1)

    # Drive leftover zero-valued artificials out of the basis; a pivot
    # column always exists because the rows are independent.
    for pos in np.flatnonzero(basis >= n):
        lu = scipy.linalg.lu_factor(a1[:, basis], check_finite=False)
        unit = np.zeros(m)
        unit[pos] = 1.0
        row = scipy.linalg.lu_solve(lu, unit, trans=1, check_finite=False) @ a
        candidates = np.flatnonzero((np.abs(row) > 1e-9) & ~np.isin(np.arange(n), basis))
        if candidates.size == 0:
            return LPResult(None, np.nan, SINGULAR, None, it1)
        basis[pos] = int(candidates[0])

    x_basic, basis, status, it2 = _primal_simplex(a, b, c, basis, maxiter=maxiter)
    if status != OPTIMAL:
        return LPResult(None, np.nan, status, None, it1 + it2)
    x = _expand_solution(n, basis, x_basic)
    return LPResult(x, float(c @ x), OPTIMAL, basis, it1 + it2)


def _scipy_solve(problem: LPProblem) -> LPResult:
    import scipy.optimize

    res = scipy.optimize.linprog(
        problem.objective,
        A_eq=problem.equality_matrix,
        b_eq=problem.equality_rhs,
        bounds=(0, None),
        method="highs-ipm",
    )
    if res.status == 2:
        return LPResult(None, np.nan, INFEASIBLE)
    if not res.success:
        return LPResult(None, np.nan, ITERATION_LIMIT)
    return LPResult(res.x, float(res.fun), OPTIMAL)


@dataclass(frozen=True)
class L1Result:
    coeffs: np.ndarray | None
    norm: float
    status: str
    basis: np.ndarray | None
    iterations: int = 0


class L1Solver:
    """Repeated ``min ||p||_1 s.t. A p = b`` solves against one matrix ``A``.

    The split variables ``p = p+ - p-`` turn the problem into standard form
    over ``[A, -A]``.  When ``A`` has full row rank, any right-hand side is
    feasible and a starting basis is read off a fixed independent column
    subset (chosen once by pivoted QR), so phase 1 is never needed.
    """

    def __init__(self, a: np.ndarray):
        a = np.ascontiguousarray(a, dtype=float)
        if a.ndim != 2:
            raise ValidationError("expansion matrix must be 2-D")
        self.a = a
        self.rows, self.cols = a.shape
        self.stacked = np.hstack([a, -a])
        self.cost = np.ones(2 * self.cols)
        _, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
        diag = np.abs(np.diag(r))
        scale = diag[0] if diag.size and diag[0] > 0 else 1.0
        self.rank = int(np.count_nonzero(diag > RANK_TOL * scale))
        self.full_row_rank = self.rank == self.rows
        self.subset = np.sort(piv[: self.rows]) if self.full_row_rank else None
        self.maxiter = _default_maxiter(self.rows, 2 * self.cols)

    def _cold_basis(self, b):
        coeffs = np.linalg.solve(self.a[:, self.subset], b)
        return np.where(coeffs >= 0, self.subset, self.subset + self.cols)

    def _hint_feasible(self, basis, b):
        if basis is None or len(basis) != self.rows:
            return False
        basis = np.asarray(basis, dtype=int)
        if basis.min() < 0 or basis.max() >= 2 * self.cols or np.unique(basis).size != self.rows:
            return False
        try:
            x = np.linalg.solve(self.stacked[:, basis], b)
        except np.linalg.LinAlgError:
            return False
        return bool(np.isfinite(x).all() and x.min() >= -FEAS_TOL)

    def solve(self, b: np.ndarray, hint: np.ndarray | None = None) -> L1Result:
        b = np.asarray(b, dtype=float)
        if b.shape != (self.rows,):
            raise ValidationError(f"right-hand side must have shape ({self.rows},)")
        if not self.full_row_rank:
            return self._solve_generic(b)
        if hint is not None and self._hint_feasible(hint, b):
            basis = np.asarray(hint, dtype=int)
        else:
            basis = self._cold_basis(b)
        x_basic, basis, status, its = _primal_simplex(
            self.stacked, b, self.cost, basis, maxiter=self.maxiter
        )
        if status == SINGULAR and hint is not None:
            basis = self._cold_basis(b)
            x_basic, basis, status, its = _primal_simplex(
                self.stacked, b, self.cost, basis, maxiter=self.maxiter
            )
        if status != OPTIMAL:
            return L1Result(None, np.nan, status, None, its)
        x = _expand_solution(2 * self.cols, basis, x_basic)
        p = x[: self.cols] - x[self.cols :]
        residual = np.max(np.abs(self.a @ p - b))
        if residual > 1e-8:
            return L1Result(None, np.nan, "numerical-failure", None, its)
        return L1Result(p, float(x.sum()), OPTIMAL, basis, its)

    def _solve_generic(self, b):
        result = lp_solve(LPProblem(self.cost, self.stacked, b))
        if result.status != OPTIMAL:
            return L1Result(None, np.nan, result.status, None, result.iterations)
        p = result.x[: self.cols] - result.x[self.cols :]
        return L1Result(p, result.objective, OPTIMAL, result.basis, result.iterations)


def solve_l1(a: np.ndarray, b: np.ndarray) -> L1Result:
    """One-shot minimal-L1 solve; prefer :class:`L1Solver` for repeated use."""
    return L1Solver(a).solve(b)


def require_optimal(result, context: str):
    if result.status == INFEASIBLE:
        raise InfeasibleError(f"{context}: target lies outside the frame span")
    if result.status != OPTIMAL:
        raise InfeasibleError(f"{context}: LP failed with status {result.status}")
    return result
