"""Dense Hermitian operator algebra: orthonormal bases, gates, noise channels.

Everything operates on plain complex ndarrays.  States, effects, and frame
operators are (d, d) Hermitian matrices; channels are Kraus-operator bundles.
All values are immutable after construction and every operation is pure.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .validation import (
    OPERATOR_TOL,
    ValidationError,
    as_square_matrix,
    check_dimension,
    check_hermitian,
    check_probability,
    freeze,
)

PAULI_1 = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_1, PAULI_2, PAULI_3)

#: Single-qubit kets addressable by label in circuit descriptions.
KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
    "+i": np.array([1, 1j], dtype=complex) / math.sqrt(2),
    "-i": np.array([1, -1j], dtype=complex) / math.sqrt(2),
}


def ket_density(label: str) -> np.ndarray:
    """Rank-one density matrix of a labelled single-qubit ket."""
    if label not in KETS:
        raise ValidationError(f"unknown state label {label!r}; expected one of {sorted(KETS)}")
    v = KETS[label]
    return np.outer(v, v.conj())


@functools.lru_cache(maxsize=None)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian basis of the d x d operator space.

    Returns a (d*d, d, d) array ``B`` with ``Tr(B[i] B[j]) = delta_ij``.
    ``B[0]`` is proportional to the identity; the remaining elements are
    traceless, ordered as symmetric off-diagonal, antisymmetric
    off-diagonal, then diagonal (generalized Gell-Mann ordering).  The
    ordering is fixed so flattened operator equations are reproducible.
    """
    d = check_dimension(d)
    mats = [np.eye(d, dtype=complex) / math.sqrt(d)]
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = m[j, i] = 1.0 / math.sqrt(2)
            mats.append(m)
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[i, j] = -1j / math.sqrt(2)
            m[j, i] = 1j / math.sqrt(2)
            mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag).astype(complex) / math.sqrt(l * (l + 1)))
    return freeze(np.stack(mats))


def expand(a: np.ndarray, *, validate: bool = True) -> np.ndarray:
    """Real coefficient vector of a Hermitian operator in the orthonormal basis."""
    if validate:
        a = check_hermitian(a)
    else:
        a = np.asarray(a, dtype=complex)
    basis = hermitian_basis(a.shape[0])
    return np.einsum("ij,kji->k", a, basis).real


def expand_many(ops: np.ndarray) -> np.ndarray:
    """Expand a stack of operators at once; returns an (n_ops, d*d) array."""
    ops = np.asarray(ops, dtype=complex)
    basis = hermitian_basis(ops.shape[-1])
    return np.einsum("mij,kji->mk", ops, basis).real


def reconstruct(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`expand`."""
    coeffs = np.asarray(coeffs, dtype=float)
    d = math.isqrt(coeffs.size)
    if d * d != coeffs.size:
        raise ValidationError(f"coefficient vector length {coeffs.size} is not a perfect square")
    return np.tensordot(coeffs, hermitian_basis(d), axes=1)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the first factor carries the slow (row-major) index."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive trace-preserving map in Kraus form.

    The operator-sum representation is validated at construction:
    ``sum_i K_i^dag K_i = 1`` within 1e-10.
    """

    kraus: tuple

    def __post_init__(self):
        ops = tuple(freeze(as_square_matrix(k, "Kraus operator").copy()) for k in self.kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise ValidationError("all Kraus operators must share one dimension")
        total = sum(k.conj().T @ k for k in ops)
        if np.linalg.norm(total - np.eye(d)) > OPERATOR_TOL:
            raise ValidationError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]


def apply_channel(channel: KrausChannel, a: np.ndarray) -> np.ndarray:
    """Apply a channel to any Hermitian operator (positivity is not assumed)."""
    a = as_square_matrix(a)
    if a.shape[0] != channel.dim:
        raise ValidationError(
            f"dimension mismatch: channel acts on dim {channel.dim}, operator has dim {a.shape[0]}"
        )
    out = np.zeros_like(a)
    for k in channel.kraus:
        out += k @ a @ k.conj().T
    return out


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d, dtype=complex),))


def unitary_channel(u: np.ndarray) -> KrausChannel:
    return KrausChannel((u,))


def compose_channels(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Channel applying ``first`` then ``second``."""
    return KrausChannel(tuple(a @ b for a in second.kraus for b in first.kraus))


def tensor_channels(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    return KrausChannel(tuple(np.kron(x, y) for x in a.kraus for y in b.kraus))


@dataclass(frozen=True)
class POVM:
    """Positive operator-valued measurement: effects summing to the identity."""

    effects: tuple

    def __post_init__(self):
        ops = tuple(freeze(check_hermitian(f, 1e-10, "effect").copy()) for f in self.effects)
        if not ops:
            raise ValidationError("a POVM needs at least one effect")
        d = ops[0].shape[0]
        if any(f.shape != (d, d) for f in ops):
            raise ValidationError("all effects must share one dimension")
        for i, f in enumerate(ops):
            eigs = np.linalg.eigvalsh(f)
            if eigs[0] < -1e-10 or eigs[-1] > 1 + 1e-10:
                raise ValidationError(f"effect {i} has eigenvalues outside [0, 1]")
        if np.linalg.norm(sum(ops) - np.eye(d)) > OPERATOR_TOL:
            raise ValidationError("effects do not sum to the identity")
        object.__setattr__(self, "effects", ops)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self) -> int:
        return len(self.effects)


def zbasis_povm() -> POVM:
    return POVM((ket_density("0"), ket_density("1")))


def trivial_povm(d: int) -> POVM:
    return POVM((np.eye(d, dtype=complex),))


GATE_NAMES = ("H", "S", "T", "CX", "CZ", "Rx", "Rz")
_ROTATION_GATES = {"rx", "rz"}


def gate_unitary(name: str, theta: float | None = None) -> np.ndarray:
    """Unitary matrix of a catalog gate.

    ``theta`` (radians) is required exactly for the rotations Rx and Rz.
    """
    key = name.lower().replace("+", "")
    if key in _ROTATION_GATES:
        if theta is None:
            raise ValidationError(f"gate {name} requires an angle")
        half = 0.5 * float(theta)
        if key == "rx":
            return np.array(
                [[math.cos(half), -1j * math.sin(half)], [-1j * math.sin(half), math.cos(half)]]
            )
        return np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]])
    if theta is not None:
        raise ValidationError(f"gate {name} takes no angle")
    if key == "h":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if key == "s":
        return np.array([[1, 0], [0, 1j]], dtype=complex)
    if key == "t":
        return np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]])
    if key == "cx":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if key == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    raise ValidationError(f"unknown gate {name!r}; expected one of {GATE_NAMES}")


def gate_arity(name: str) -> int:
    return 2 if name.lower() in ("cx", "cz") else 1


NOISE_KINDS = ("depol", "deph", "damp")


def noise_channel(kind: str, p: float) -> KrausChannel:
    """Single-qubit decoherence channel of strength ``p`` in [0, 1].

    ``depol`` mixes towards the maximally mixed state with four Kraus
    operators, ``deph`` randomly flips the phase, and ``damp`` is amplitude
    damping towards the ground state.
    """
    p = check_probability(p)
    kind = kind.lower()
    eye = np.eye(2, dtype=complex)
    if kind == "depol":
        ops = [math.sqrt(1 - 3 * p / 4) * eye]
        ops += [math.sqrt(p / 4) * sigma for sigma in PAULIS]
        return KrausChannel(tuple(ops))
    if kind == "deph":
        return KrausChannel(
            (math.sqrt(1 - p / 2) * eye, math.sqrt(p / 2) * PAULI_3)
        )
    if kind == "damp":
        k1 = np.array([[1, 0], [0, math.sqrt(1 - p)]], dtype=complex)
        k2 = np.array([[0, math.sqrt(p)], [0, 0]], dtype=complex)
        return KrausChannel((k1, k2))
    raise ValidationError(f"unknown noise kind {kind!r}; expected one of {NOISE_KINDS}")


def joint_depolarizing(p: float) -> KrausChannel:
    """Two-qubit depolarization towards I/4: every nonidentity Pauli
    component of the joint state contracts by the same factor 1 - p."""
    p = check_probability(p)
    singles = [np.eye(2, dtype=complex), *PAULIS]
    ops = []
    for i, a in enumerate(singles):
        for j, b in enumerate(singles):
            weight = math.sqrt(1 - 15 * p / 16) if i == j == 0 else math.sqrt(p / 16)
            ops.append(weight * np.kron(a, b))
    return KrausChannel(tuple(ops))


def noisy_gate(u: np.ndarray, noise: KrausChannel, arity: int | None = None) -> KrausChannel:
    """Gate followed by independent single-qubit decoherence on every wire."""
    u = as_square_matrix(u, "gate")
    if noise.dim != 2:
        raise ValidationError("decoherence channels are single-qubit")
    if arity is None:
        arity = 1 if u.shape[0] == 2 else 2
    if u.shape[0] != 2**arity or arity not in (1, 2):
        raise ValidationError(f"gate of dimension {u.shape[0]} does not match arity {arity}")
    if arity == 1:
        return KrausChannel(tuple(a @ u for a in noise.kraus))
    return KrausChannel(
        tuple(np.kron(a, b) @ u for a in noise.kraus for b in noise.kraus)
    )
