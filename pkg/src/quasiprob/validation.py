"""Input validation helpers and the package's exception hierarchy."""

from __future__ import annotations

import numpy as np

# Tolerances used by the whole package.  Operators handled here are
# dimensionless with entries O(1), so absolute tolerances are appropriate.
HERMITIAN_TOL = 1e-12
OPERATOR_TOL = 1e-10
DISTRIBUTION_TOL = 1e-9


class QuasiprobError(Exception):
    """Base class for all package errors."""


class ValidationError(QuasiprobError, ValueError):
    """An input violates a documented invariant (bad shape, trace, ...)."""


class InfeasibleError(QuasiprobError, RuntimeError):
    """A decomposition problem has no solution (target outside the frame span)."""


class SizeCapError(QuasiprobError, RuntimeError):
    """A dense computation would exceed the supported problem size."""


def check_dimension(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValidationError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def as_square_matrix(a, name: str = "operator") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def check_hermitian(a, tol: float = HERMITIAN_TOL, name: str = "operator") -> np.ndarray:
    """Validate Hermiticity via the Frobenius norm of the anti-Hermitian part."""
    a = as_square_matrix(a, name)
    dev = np.linalg.norm(a - a.conj().T)
    if dev > tol:
        raise ValidationError(f"{name} is not Hermitian (anti-Hermitian norm {dev:.3e})")
    return a


def check_unit_trace(a, tol: float = OPERATOR_TOL, name: str = "operator") -> np.ndarray:
    a = as_square_matrix(a, name)
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"{name} must have unit trace, got {tr:.12g}")
    return a


def check_quasidistribution(p, tol: float = DISTRIBUTION_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValidationError(f"quasidistribution must be a vector, got shape {p.shape}")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise ValidationError(f"quasidistribution must sum to 1, got {total:.12g}")
    return p


def check_quasistochastic(s, tol: float = DISTRIBUTION_TOL) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim != 2:
        raise ValidationError(f"quasistochastic matrix must be 2-D, got shape {s.shape}")
    sums = s.sum(axis=0)
    worst = np.max(np.abs(sums - 1.0))
    if worst > tol:
        raise ValidationError(f"columns of a quasistochastic matrix must sum to 1 (max deviation {worst:.3e})")
    return s


def check_probability(x: float, name: str = "p") -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {x}")
    return x


def freeze(a: np.ndarray) -> np.ndarray:
    """Mark an array read-only so shared values stay immutable."""
    a.setflags(write=False)
    return a
