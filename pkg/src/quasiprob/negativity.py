"""Logarithmic negativity functionals and minimal-negativity decompositions.

Negativity values are reported in bits (log base 2).  The minimal
decompositions are L1-minimization linear programs over the frame span;
``min_l1_by_enumeration`` is an independent oracle that enumerates basic
solutions instead of pivoting.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .frames import SynthesisMap, expansion_matrix, measurement_matrix
from .lp import INFEASIBLE, OPTIMAL, L1Solver
from .operators import KrausChannel, POVM, apply_channel, expand, expand_many
from .validation import SizeCapError, ValidationError, check_hermitian

LN2 = math.log(2.0)
CLAMP_TOL = 1e-9


def vector_negativity(q) -> float:
    """log2 of the L1 norm; zero for proper probability distributions."""
    return float(np.log2(np.abs(np.asarray(q, dtype=float)).sum()))


def matrix_negativity(s) -> float:
    """log2 of the max column L1 norm; zero for stochastic matrices."""
    return float(np.log2(np.abs(np.asarray(s, dtype=float)).sum(axis=0).max()))


def observable_negativity(w) -> float:
    """log2 of the max absolute entry; nonpositive for entries in [-1, 1]."""
    return float(np.log2(np.abs(np.asarray(w, dtype=float)).max()))


def _clamp(value: float) -> float:
    return 0.0 if -CLAMP_TOL < value < 0.0 else value


@dataclass(frozen=True)
class NegativityResult:
    """Outcome of a minimal-negativity decomposition.

    ``witness`` is a coefficient vector for states and a quasistochastic
    matrix for channels/measurements; when optima are degenerate any
    optimal vertex may be returned and only the value is contractual.
    """

    value_log2: float
    value_ln: float
    witness: np.ndarray | None
    status: str
    column_values_log2: np.ndarray | None = None
    failed_column: int | None = None


def _from_norm(norm: float, witness, **extra) -> NegativityResult:
    value_ln = _clamp(math.log(norm))
    return NegativityResult(
        value_log2=_clamp(value_ln / LN2),
        value_ln=value_ln,
        witness=witness,
        status=OPTIMAL,
        **extra,
    )


def _failure(status: str, column: int | None = None) -> NegativityResult:
    if status not in (INFEASIBLE,):
        status = "numerical-failure"
    return NegativityResult(math.nan, math.nan, None, status, failed_column=column)


def state_negativity(
    frame: SynthesisMap,
    rho: np.ndarray,
    *,
    solver: L1Solver | None = None,
    validate: bool = True,
) -> NegativityResult:
    """Minimal negativity over all coefficient vectors representing ``rho``.

    ``rho`` must be Hermitian with unit trace but may fail positivity;
    channel columns are decomposed through this same path.
    """
    if validate:
        rho = check_hermitian(rho, name="state")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > 1e-9:
            raise ValidationError(f"state must have unit trace, got {tr:.12g}")
        if rho.shape[0] != frame.dim:
            raise ValidationError("state dimension does not match the frame")
    if solver is None:
        solver = L1Solver(expansion_matrix(frame))
    result = solver.solve(expand(rho, validate=False))
    if result.status != OPTIMAL:
        return _failure(result.status)
    return _from_norm(result.norm, result.coeffs)


def channel_negativity(
    frame: SynthesisMap,
    channel: KrausChannel,
    *,
    solver: L1Solver | None = None,
) -> NegativityResult:
    """Minimal negativity of a channel: per-column decompositions, worst column wins.

    The witness is the quasistochastic matrix whose m-th column is the
    minimal decomposition of the channel applied to the m-th frame operator.
    """
    if channel.dim != frame.dim:
        raise ValidationError("channel dimension does not match the frame")
    if solver is None:
        solver = L1Solver(expansion_matrix(frame))
    rhs = expand_many(np.stack([apply_channel(channel, op) for op in frame.ops]))
    return _channel_from_rhs(solver, rhs)


def _channel_from_rhs(solver: L1Solver, rhs: np.ndarray, hints=None) -> NegativityResult:
    m_cols = rhs.shape[0]
    witness = np.empty((solver.cols, m_cols))
    norms = np.empty(m_cols)
    prev = None
    for m in range(m_cols):
        hint = hints[m] if hints is not None and hints[m] is not None else prev
        res = solver.solve(rhs[m], hint=hint)
        if res.status != OPTIMAL:
            return _failure(res.status, column=m)
        witness[:, m] = res.coeffs
        norms[m] = res.norm
        prev = res.basis
        if hints is not None:
            hints[m] = res.basis
    col_bits = np.array([_clamp(v / LN2) for v in np.log(norms)])
    worst = int(np.argmax(norms))
    out = _from_norm(float(norms[worst]), witness)
    return NegativityResult(
        value_log2=out.value_log2,
        value_ln=out.value_ln,
        witness=witness,
        status=OPTIMAL,
        column_values_log2=col_bits,
    )


def measurement_negativity(frame: SynthesisMap, povm: POVM) -> NegativityResult:
    """Negativity of a POVM: matrix norm of its outcome matrix, no LP.

    The outcome matrix is quasistochastic (columns sum to one), so its
    norm is the worst column L1 norm; it is 1 exactly when every frame
    operator assigns proper probabilities to all outcomes.
    """
    v = measurement_matrix(frame, povm)
    value_ln = _clamp(math.log(float(np.abs(v).sum(axis=0).max())))
    return NegativityResult(_clamp(value_ln / LN2), value_ln, v, OPTIMAL)


def min_l1_by_enumeration(
    frame: SynthesisMap,
    rho: np.ndarray,
    *,
    max_subsets: int = 200_000,
) -> float:
    """Minimal L1 norm by enumerating basic solutions; the LP test oracle.

    Every vertex of the feasible set is supported on linearly independent
    frame expansions, so scanning all full-rank column subsets of size d*d
    finds the optimum.  Intended for small frames (the subset count is
    capped).
    """
    a = expansion_matrix(frame)
    d2, m = a.shape
    n_subsets = math.comb(m, d2)
    if n_subsets > max_subsets:
        raise SizeCapError(f"enumeration over {n_subsets} column subsets exceeds the cap")
    b = expand(check_hermitian(rho, name="state"))
    best = math.inf
    for subset in itertools.combinations(range(m), d2):
        block = a[:, subset]
        try:
            coeffs = np.linalg.solve(block, b)
        except np.linalg.LinAlgError:
            continue
        if not np.isfinite(coeffs).all():
            continue
        if np.max(np.abs(block @ coeffs - b)) > 1e-9:
            continue
        best = min(best, float(np.abs(coeffs).sum()))
    if not math.isfinite(best):
        raise ValidationError("state lies outside the span of the frame")
    return best
