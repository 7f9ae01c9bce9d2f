"""Circuit elements, multiset ledgers, and the circuit negativity functional.

A ledger counts how many times each distinct state, channel, and POVM
appears in a circuit; its negativity under a single-qudit frame is the
multiplicity-weighted sum of per-element minimal negativities, with
two-qudit elements evaluated under the tensor-square of the frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .frames import SynthesisMap, expansion_matrix, product_frame
from .lp import L1Solver
from .negativity import (
    NegativityResult,
    _channel_from_rhs,
    measurement_negativity,
    state_negativity,
)
from .operators import (
    KrausChannel,
    POVM,
    apply_channel,
    compose_channels,
    expand,
    expand_many,
    gate_arity,
    gate_unitary,
    joint_depolarizing,
    ket_density,
    noise_channel,
    noisy_gate,
    trivial_povm,
    unitary_channel,
    zbasis_povm,
)
from .validation import InfeasibleError, ValidationError

ANGLE_DECIMALS = 12  # canonical angle rounding for element deduplication


@dataclass(frozen=True)
class CircuitElement:
    """One circuit ingredient: a state, a channel, or a POVM."""

    kind: str
    payload: object
    arity: int
    label: str
    key: tuple

    def __post_init__(self):
        if self.kind not in ("state", "channel", "povm"):
            raise ValidationError(f"unknown element kind {self.kind!r}")


@dataclass(frozen=True)
class CircuitLedger:
    """Multiset of circuit elements with multiplicities."""

    d: int
    entries: tuple  # ((CircuitElement, multiplicity), ...)

    def multiplicity(self, label: str) -> int:
        return sum(s for el, s in self.entries if el.label == label)

    def __len__(self) -> int:
        return len(self.entries)


class LedgerBuilder:
    def __init__(self, d: int = 2):
        self.d = d
        self._order: list = []
        self._counts: dict = {}
        self._elements: dict = {}

    def add(self, element: CircuitElement, count: int = 1):
        if count < 1:
            raise ValidationError("multiplicities must be positive")
        if element.key not in self._counts:
            self._order.append(element.key)
            self._elements[element.key] = element
            self._counts[element.key] = 0
        self._counts[element.key] += count
        return self

    def build(self) -> CircuitLedger:
        entries = tuple((self._elements[k], self._counts[k]) for k in self._order)
        return CircuitLedger(self.d, entries)


def _noise_key(noise):
    if noise is None:
        return None
    kind, p = noise
    return (kind, round(float(p), ANGLE_DECIMALS))


def state_element(label: str) -> CircuitElement:
    return CircuitElement("state", ket_density(label), 1, f"rho_{label}", ("state", label))


def gate_channel(name: str, theta: float | None = None, noise=None) -> KrausChannel:
    """Gate channel with the block noise convention applied after the unitary.

    Depolarization of a two-qubit gate acts on the joint system; dephasing
    and damping act independently per wire.
    """
    arity = gate_arity(name)
    unitary = gate_unitary(name, theta)
    if noise is None:
        return unitary_channel(unitary)
    if arity == 2 and noise[0] == "depol":
        return compose_channels(joint_depolarizing(noise[1]), unitary_channel(unitary))
    return noisy_gate(unitary, noise_channel(*noise), arity)


def gate_element(name: str, theta: float | None = None, noise=None) -> CircuitElement:
    arity = gate_arity(name)
    channel = gate_channel(name, theta, noise)
    canonical = name.upper() if arity == 2 else name.capitalize() if name.lower().startswith("r") else name.upper()
    label = canonical if theta is None else f"{canonical}({theta:.6f})"
    if noise is not None:
        label += f"+{noise[0]}({noise[1]:g})"
    key = ("channel", canonical, None if theta is None else round(float(theta), ANGLE_DECIMALS), _noise_key(noise))
    return CircuitElement("channel", channel, arity, label, key)


def measurement_element(d: int = 2, measured: bool = True) -> CircuitElement:
    if measured:
        return CircuitElement("povm", zbasis_povm(), 1, "F_z", ("povm", "z"))
    return CircuitElement("povm", trivial_povm(d), 1, "trivial", ("povm", "trivial"))


BLOCK_GATES = {
    "c1q": ("H", "S"),
    "c1q_t": ("H", "S", "T"),
    "c2q": ("H", "S", "CX"),
    "c2q_t": ("H", "S", "T", "CX"),
}


def normalize_block_name(name: str) -> str:
    key = name.lower().replace("+", "_").replace("-", "_")
    if key not in BLOCK_GATES:
        raise ValidationError(f"unknown block {name!r}; expected one of {sorted(BLOCK_GATES)}")
    return key


def block(name: str, noise=None) -> CircuitLedger:
    """Gate-set ledger of a Clifford(+T) block.

    Contains the standard initial state, the listed gate channels (noisy
    when requested), and the computational-basis measurement.  State
    preparation and measurement never carry noise.
    """
    key = normalize_block_name(name)
    builder = LedgerBuilder(2)
    builder.add(state_element("0"))
    for gate in BLOCK_GATES[key]:
        builder.add(gate_element(gate, noise=noise))
    builder.add(measurement_element())
    return builder.build()


def variational_gateset(b: int = 10, noise=None) -> CircuitLedger:
    """Gate ledger of one layer family of a variational circuit.

    A grid of ``b`` rotation angles on [-pi, pi) for both rotation axes,
    plus ``b`` copies of the two-qubit controlled-phase gate.  SPAM
    operations are intentionally absent.
    """
    if b < 1:
        raise ValidationError("the grid size must be a positive integer")
    builder = LedgerBuilder(2)
    thetas = [-math.pi + 2 * math.pi * k / b for k in range(b)]
    for theta in thetas:
        builder.add(gate_element("Rx", theta, noise=noise))
    for theta in thetas:
        builder.add(gate_element("Rz", theta, noise=noise))
    builder.add(gate_element("CZ", noise=noise), count=b)
    return builder.build()


@dataclass(frozen=True)
class GateSpec:
    name: str
    targets: tuple
    theta: float | None = None


@dataclass(frozen=True)
class CircuitDescription:
    """Feedback-free circuit: initial product state, gate list, final measurement."""

    n: int
    initial: tuple
    gates: tuple
    noise: tuple | None = None
    measure: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("a circuit needs at least one qubit")
        if len(self.initial) != self.n:
            raise ValidationError("one initial-state label per qubit is required")
        for g in self.gates:
            arity = gate_arity(g.name)
            if len(g.targets) != arity:
                raise ValidationError(f"gate {g.name} expects {arity} target(s), got {g.targets}")
            if len(set(g.targets)) != len(g.targets):
                raise ValidationError(f"gate {g.name} has repeated targets {g.targets}")
            if any(t < 0 or t >= self.n for t in g.targets):
                raise ValidationError(f"gate {g.name} targets {g.targets} out of range")
        for q in self.measure:
            if q < 0 or q >= self.n:
                raise ValidationError(f"measured qubit {q} out of range")

    def measured_qubits(self) -> list:
        return sorted(q for q, basis in self.measure.items() if basis is not None)


def circuit_to_ledger(desc: CircuitDescription) -> CircuitLedger:
    """Count identical elements of a circuit into a multiset ledger.

    Unmeasured qubits contribute the trivial single-outcome POVM, which has
    zero negativity but keeps the per-qubit bookkeeping explicit.
    """
    builder = LedgerBuilder(2)
    for label in desc.initial:
        builder.add(state_element(label))
    for g in desc.gates:
        builder.add(gate_element(g.name, g.theta, noise=desc.noise))
    for q in range(desc.n):
        builder.add(measurement_element(measured=desc.measure.get(q) is not None))
    return builder.build()


@dataclass(frozen=True)
class EntryReport:
    label: str
    kind: str
    arity: int
    multiplicity: int
    value_log2: float


@dataclass(frozen=True)
class LedgerReport:
    total_log2: float
    entries: tuple
    frame_label: str

    def value_of(self, label: str) -> float:
        for e in self.entries:
            if e.label == label:
                return e.value_log2
        raise KeyError(label)


class LedgerEvaluator:
    """Evaluates ledger negativities for many frames against one ledger.

    Per-element LP warm-start bases are kept in ``self.cache`` so repeated
    evaluations under slightly different frames (finite-difference sweeps)
    reuse previous optimal bases.
    """

    def __init__(self, ledger: CircuitLedger, softmax_temp: float | None = None):
        self.ledger = ledger
        self.softmax_temp = softmax_temp
        self.cache: dict = {}

    def evaluate(self, frame: SynthesisMap) -> LedgerReport:
        if frame.dim != self.ledger.d:
            raise ValidationError("frame dimension does not match the ledger")
        frames = {1: frame}
        solvers = {}
        reports = []
        values = []
        for idx, (element, mult) in enumerate(self.ledger.entries):
            arity = element.arity
            if arity not in frames:
                frames[arity] = product_frame([frame] * arity)
            if arity not in solvers:
                solvers[arity] = L1Solver(expansion_matrix(frames[arity]))
            value = self._element_value(idx, element, frames[arity], solvers[arity])
            reports.append(EntryReport(element.label, element.kind, arity, mult, value))
            values.append(value)
        mults = np.array([s for _, s in self.ledger.entries], dtype=float)
        total = float(np.dot(mults, np.array(values))) if values else 0.0
        return LedgerReport(total, tuple(reports), frame.label)

    def _element_value(self, idx, element, frame, solver) -> float:
        if element.kind == "state":
            res = solver.solve(expand(element.payload, validate=False))
            if res.status != "optimal":
                raise InfeasibleError(f"element {element.label}: LP status {res.status}")
            return _clamped_bits(res.norm)
        if element.kind == "povm":
            return measurement_negativity(frame, element.payload).value_log2
        rhs = expand_many(
            np.stack([apply_channel(element.payload, op) for op in frame.ops])
        )
        hints = self.cache.setdefault(idx, [None] * rhs.shape[0])
        result = _channel_from_rhs(solver, rhs, hints=hints)
        if result.status != "optimal":
            raise InfeasibleError(
                f"element {element.label}: LP status {result.status}"
                + (f" in column {result.failed_column}" if result.failed_column is not None else "")
            )
        cols = result.column_values_log2
        if self.softmax_temp and self.softmax_temp > 0:
            t = self.softmax_temp
            return float(t * np.log2(np.sum(np.exp2(cols / t))))
        return float(cols.max())


def _clamped_bits(norm: float) -> float:
    bits = math.log2(norm)
    return 0.0 if -1e-9 < bits < 0.0 else bits


def ledger_negativity(frame: SynthesisMap, ledger: CircuitLedger) -> LedgerReport:
    """Total and per-element negativity of a ledger under a single-qudit frame."""
    return LedgerEvaluator(ledger).evaluate(frame)


def element_negativity(frame: SynthesisMap, element: CircuitElement) -> NegativityResult:
    """Minimal negativity of one element under the arity-matched product frame."""
    from .negativity import channel_negativity

    full = product_frame([frame] * element.arity)
    if element.kind == "state":
        return state_negativity(full, element.payload)
    if element.kind == "channel":
        return channel_negativity(full, element.payload)
    return measurement_negativity(full, element.payload)
