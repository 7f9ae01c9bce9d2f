"""Frame catalog and frame-based translation of states, channels, and POVMs.

A synthesis map turns a real coefficient vector into a unit-trace Hermitian
operator; an analysis map does the reverse.  Minimal informationally
complete (MIC) frames carry both directions; overcomplete frames are
synthesis-only and leave room to optimize the coefficients.
"""

from __future__ import annotations

import itertools
import math
from collections import namedtuple
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg

from .operators import (
    KrausChannel,
    POVM,
    PAULIS,
    apply_channel,
    expand_many,
    hermitian_basis,
    ket_density,
)
from .validation import (
    OPERATOR_TOL,
    ValidationError,
    check_hermitian,
    check_quasidistribution,
    freeze,
)

IC_RANK_TOL = 1e-8


def _stack_ops(ops) -> np.ndarray:
    arr = np.stack([np.asarray(o, dtype=complex) for o in ops])
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValidationError("frame operators must be a stack of square matrices")
    return arr


@dataclass(frozen=True)
class SynthesisMap:
    """Frame of trace-one Hermitian operators defining a representation."""

    ops: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = _stack_ops(self.ops)
        for i, op in enumerate(arr):
            check_hermitian(op, name=f"synthesis operator {i}")
            tr = complex(np.trace(op))
            if abs(tr - 1.0) > OPERATOR_TOL:
                raise ValidationError(f"synthesis operator {i} must have trace 1, got {tr:.12g}")
        object.__setattr__(self, "ops", freeze(arr))

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    @property
    def size(self) -> int:
        return self.ops.shape[0]


@dataclass(frozen=True)
class AnalysisMap:
    """Dual frame of Hermitian operators summing to the identity."""

    ops: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = _stack_ops(self.ops)
        for i, op in enumerate(arr):
            check_hermitian(op, name=f"analysis operator {i}")
        d = arr.shape[1]
        if np.linalg.norm(arr.sum(axis=0) - np.eye(d)) > OPERATOR_TOL:
            raise ValidationError("analysis operators must sum to the identity")
        object.__setattr__(self, "ops", freeze(arr))

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    @property
    def size(self) -> int:
        return self.ops.shape[0]


def _pauli_combo(weights) -> np.ndarray:
    out = np.eye(2, dtype=complex)
    for w, sigma in zip(weights, PAULIS):
        out = out + w * sigma
    return out


_WOOTTERS_SIGNS = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
_SIC_SIGNS = ((-1, 1, 1), (1, -1, 1), (1, 1, -1), (-1, -1, -1))


def wootters_frame():
    """Qubit phase-space MIC frame built from Pauli sign patterns."""
    syn = [0.5 * _pauli_combo(s) for s in _WOOTTERS_SIGNS]
    ana = [0.25 * _pauli_combo(s) for s in _WOOTTERS_SIGNS]
    return SynthesisMap(syn, "wootters"), AnalysisMap(ana, "wootters")


def sic_frame():
    """MIC frame dual to the tetrahedral SIC-POVM."""
    root3 = math.sqrt(3)
    syn = [0.5 * _pauli_combo(tuple(root3 * x for x in s)) for s in _SIC_SIGNS]
    ana = [0.25 * _pauli_combo(tuple(x / root3 for x in s)) for s in _SIC_SIGNS]
    return SynthesisMap(syn, "sic"), AnalysisMap(ana, "sic")


def stabilizer_frame():
    """The six single-qubit stabilizer states, ordered +, -, +i, -i, 0, 1."""
    labels = ("+", "-", "+i", "-i", "0", "1")
    return SynthesisMap([ket_density(l) for l in labels], "stabilizer1q"), None


def bloch_cube_frame():
    """Eight quasistates on the vertices of the cube enclosing the Bloch ball."""
    ops = [
        0.5 * _pauli_combo(s)
        for s in itertools.product((1, -1), repeat=3)
    ]
    return SynthesisMap(ops, "lambda_cube"), None


def _is_odd_prime(d: int) -> bool:
    if d < 3 or d % 2 == 0:
        return False
    return all(d % k for k in range(3, math.isqrt(d) + 1, 2))


def wigner_frame(d: int):
    """Discrete phase-space MIC frame for odd prime qudit dimension.

    Built from shift/clock displacement operators; the phase-point
    operators satisfy ``Tr(A_u A_v) = d * delta_uv`` and are independent of
    the displacement operators' global phase.  Index order is row-major in
    the (clock, shift) exponents.
    """
    if not _is_odd_prime(d):
        raise ValidationError(f"the discrete phase-space frame needs an odd prime dimension, got {d}")
    omega = np.exp(2j * math.pi / d)
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    inv2 = pow(2, -1, d)
    displacements = {}
    for uz in range(d):
        for ux in range(d):
            phase = omega ** ((-inv2 * uz * ux) % d)
            displacements[uz, ux] = phase * np.linalg.matrix_power(clock, uz) @ np.linalg.matrix_power(shift, ux)
    a0 = sum(displacements.values()) / d
    ops = []
    for uz in range(d):
        for ux in range(d):
            t = displacements[uz, ux]
            a = t @ a0 @ t.conj().T
            ops.append((a + a.conj().T) / 2)
    label = f"wigner{d}"
    return SynthesisMap(ops, label), AnalysisMap([op / d for op in ops], label)


FRAME_NAMES = ("sic", "wootters", "stabilizer1q", "lambda_cube", "wigner")

_QUBIT_FRAMES = {
    "sic": sic_frame,
    "wootters": wootters_frame,
    "stabilizer1q": stabilizer_frame,
    "lambda_cube": bloch_cube_frame,
}


def catalog_frame(name: str, d: int | None = None):
    """Look up a catalog frame by name.

    Returns ``(synthesis, analysis)``; ``analysis`` is None for the
    synthesis-only overcomplete frames (stabilizer1q, lambda_cube).
    """
    key = name.lower()
    if key == "wigner":
        return wigner_frame(3 if d is None else d)
    if key not in _QUBIT_FRAMES:
        raise ValidationError(f"unknown frame {name!r}; expected one of {FRAME_NAMES}")
    if d not in (None, 2):
        raise ValidationError(f"frame {name!r} is defined for qubits only")
    return _QUBIT_FRAMES[key]()


def product_frame(parts) -> SynthesisMap:
    """Tensor-product frame; multi-indices are row-major, first factor slowest."""
    parts = list(parts)
    if not parts:
        raise ValidationError("product_frame needs at least one factor")
    if len(parts) == 1:
        return parts[0]
    ops = [
        reduce(np.kron, combo)
        for combo in itertools.product(*[p.ops for p in parts])
    ]
    label = "*".join(p.label or "frame" for p in parts)
    return SynthesisMap(ops, label)


def analyze(analysis: AnalysisMap, rho: np.ndarray, *, validate: bool = True) -> np.ndarray:
    """Coefficient vector ``Tr(rho E_m)`` of a unit-trace operator."""
    if validate:
        rho = check_hermitian(rho, name="state")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > 1e-9:
            raise ValidationError(f"state must have unit trace, got {tr:.12g}")
    if rho.shape[0] != analysis.dim:
        raise ValidationError("state dimension does not match the frame")
    return np.einsum("ij,mji->m", np.asarray(rho, dtype=complex), analysis.ops).real


def synthesize(synthesis: SynthesisMap, p) -> np.ndarray:
    """Operator ``sum_m p_m e_m`` represented by a coefficient vector."""
    p = np.asarray(p, dtype=float)
    if p.shape != (synthesis.size,):
        raise ValidationError(
            f"coefficient vector has length {p.size}, frame has {synthesis.size} operators"
        )
    return np.tensordot(p, synthesis.ops, axes=1)


def expansion_matrix(synthesis: SynthesisMap) -> np.ndarray:
    """(d*d, M) real matrix whose columns are basis expansions of the frame ops."""
    return expand_many(synthesis.ops).T


IcReport = namedtuple("IcReport", ["rank", "smallest_singular_value"])


def check_ic(synthesis: SynthesisMap) -> IcReport:
    """Rank diagnostics of the frame; informationally complete iff rank == d*d."""
    a = expansion_matrix(synthesis)
    sv = scipy.linalg.svdvals(a)
    d2 = synthesis.dim ** 2
    rank = int(np.count_nonzero(sv > IC_RANK_TOL))
    smallest = float(sv[d2 - 1]) if sv.size >= d2 else 0.0
    return IcReport(rank, smallest)


def dual_consistency(synthesis: SynthesisMap, analysis: AnalysisMap, tol: float = 1e-10) -> bool:
    """True when ``Tr(e_k E_l) = delta_kl``, i.e. the pair is a MIC frame."""
    if synthesis.size != analysis.size or synthesis.dim != analysis.dim:
        return False
    gram = np.einsum("kij,lji->kl", synthesis.ops, analysis.ops).real
    return bool(np.max(np.abs(gram - np.eye(synthesis.size))) <= tol)


def mic_channel_matrix(analysis: AnalysisMap, synthesis: SynthesisMap, channel: KrausChannel) -> np.ndarray:
    """Unique matrix of a channel in a MIC frame: ``S_kl = Tr(E_k Phi[e_l])``."""
    if not dual_consistency(synthesis, analysis):
        raise ValidationError("mic_channel_matrix needs a consistent MIC synthesis/analysis pair")
    if channel.dim != synthesis.dim:
        raise ValidationError("channel dimension does not match the frame")
    mapped = np.stack([apply_channel(channel, op) for op in synthesis.ops])
    return np.einsum("kij,lji->kl", analysis.ops, mapped).real


def measurement_matrix(synthesis: SynthesisMap, povm: POVM) -> np.ndarray:
    """Outcome matrix ``V_kl = Tr(F_k e_l)``; maps state coefficients to Born probabilities."""
    if povm.dim != synthesis.dim:
        raise ValidationError("POVM dimension does not match the frame")
    effects = np.stack(povm.effects)
    return np.einsum("kij,lji->kl", effects, synthesis.ops).real
