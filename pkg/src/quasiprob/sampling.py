"""Monte Carlo estimation of circuit outcome probabilities.

A sampling plan splits quasiprobability data into sign, weight, and proper
stochastic parts; trajectories through the phase space are then sampled as
a Markov chain and the signed weight of each trajectory averages to the
true outcome probability.  A dense density-matrix simulator provides the
exact oracle for small circuits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .circuits import CircuitDescription, gate_channel
from .frames import SynthesisMap, product_frame
from .lp import L1Solver
from .negativity import channel_negativity
from .frames import expansion_matrix, measurement_matrix
from .operators import expand, gate_arity, ket_density, zbasis_povm
from .validation import SizeCapError, ValidationError, check_quasistochastic, freeze

_CHUNK = 65536
EXACT_QUBIT_CAP = 4
PLAN_INDEX_CAP = 2048


@dataclass(frozen=True)
class LayerPlan:
    """Sign/weight/stochastic decomposition of one quasistochastic layer."""

    probs: np.ndarray       # stochastic matrix, columns sum to 1
    signs: np.ndarray
    col_norms: np.ndarray   # L1 norm of each original column (>= 1)
    cdf: np.ndarray


@dataclass(frozen=True)
class SamplingPlan:
    p_probs: np.ndarray
    p_signs: np.ndarray
    p_norm: float
    p_cdf: np.ndarray
    layers: tuple
    v: np.ndarray
    total_negativity_ln: float


@dataclass(frozen=True)
class EstimateReport:
    q_est: float
    n_samples: int
    total_negativity_ln: float
    hoeffding_bound: float  # uniform bound on |chi| for every trajectory
    max_abs_chi: float


def build_plan(p, layers, v) -> SamplingPlan:
    """Exact sign x norm x stochastic decomposition of quasiprobability data."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValidationError("the initial quasidistribution must be a vector")
    v = np.asarray(v, dtype=float).ravel()
    layer_plans = []
    size = p.size
    total_ln = 0.0
    for s in layers:
        s = check_quasistochastic(s)
        if s.shape[1] != size:
            raise ValidationError(
                f"layer expects input length {s.shape[1]}, previous stage produces {size}"
            )
        col_norms = np.abs(s).sum(axis=0)
        probs = np.abs(s) / col_norms
        layer_plans.append(
            LayerPlan(
                freeze(probs),
                freeze(np.where(s >= 0, 1.0, -1.0)),
                freeze(col_norms.copy()),
                freeze(np.cumsum(probs, axis=0)),
            )
        )
        total_ln += math.log(col_norms.max())
        size = s.shape[0]
    if v.size != size:
        raise ValidationError(f"effect row has length {v.size}, final stage produces {size}")
    p_norm = float(np.abs(p).sum())
    p_probs = np.abs(p) / p_norm
    total_ln += math.log(p_norm) + math.log(np.abs(v).max())
    return SamplingPlan(
        freeze(p_probs),
        freeze(np.where(p >= 0, 1.0, -1.0)),
        p_norm,
        freeze(np.cumsum(p_probs)),
        tuple(layer_plans),
        freeze(v.copy()),
        total_ln,
    )


def _uniform_block(seed: int, start_word: int, shape) -> np.ndarray:
    """Uniforms from a counter-based stream, addressed by absolute position.

    Trajectory j owns the words [j * w, (j+1) * w) of the stream keyed by
    ``seed``; sampling is therefore reproducible and independent of how
    trajectories are chunked across workers.
    """
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(start_word)
    return np.random.Generator(bitgen).random(shape)


def estimate(plan: SamplingPlan, n: int, seed: int = 0) -> EstimateReport:
    """Average the signed trajectory weight over ``n`` sampled trajectories."""
    if n < 1:
        raise ValidationError("need at least one sample")
    words = len(plan.layers) + 1
    chunk = max(256, min(_CHUNK, (1 << 22) // max(plan.v.size, 1)))
    partials = []
    max_abs = 0.0
    for start in range(0, n, chunk):
        count = min(chunk, n - start)
        u = _uniform_block(seed, start * words, (count, words))
        idx = np.searchsorted(plan.p_cdf, u[:, 0], side="right")
        idx = np.minimum(idx, plan.p_probs.size - 1)
        sign = plan.p_signs[idx]
        weight = np.full(count, plan.p_norm)
        for l, layer in enumerate(plan.layers):
            cols = layer.cdf[:, idx]
            nxt = (cols <= u[:, l + 1]).sum(axis=0)
            nxt = np.minimum(nxt, layer.probs.shape[0] - 1)
            sign = sign * layer.signs[nxt, idx]
            weight = weight * layer.col_norms[idx]
            idx = nxt
        chi = sign * weight * plan.v[idx]
        partials.append(chi.sum())
        if chi.size:
            max_abs = max(max_abs, float(np.abs(chi).max()))
    q_est = float(np.sum(partials) / n)
    return EstimateReport(
        q_est=q_est,
        n_samples=n,
        total_negativity_ln=plan.total_negativity_ln,
        hoeffding_bound=math.exp(plan.total_negativity_ln),
        max_abs_chi=max_abs,
    )


def enumerate_expectation(plan: SamplingPlan) -> float:
    """Exact expectation over every trajectory; the estimator's unbiasedness oracle."""
    sizes = [plan.p_probs.size] + [layer.probs.shape[0] for layer in plan.layers]
    total = 0.0
    for path in itertools.product(*(range(s) for s in sizes)):
        prob = plan.p_probs[path[0]]
        sign = plan.p_signs[path[0]]
        weight = plan.p_norm
        for l, layer in enumerate(plan.layers):
            prev, nxt = path[l], path[l + 1]
            prob *= layer.probs[nxt, prev]
            sign *= layer.signs[nxt, prev]
            weight *= layer.col_norms[prev]
        total += prob * sign * weight * plan.v[path[-1]]
    return float(total)


def hoeffding_samples(total_negativity_ln: float, eps: float, delta: float) -> int:
    """Sample count guaranteeing precision ``eps`` with probability 1 - delta."""
    if eps <= 0:
        raise ValidationError("eps must be positive")
    if not 0 < delta < 1:
        raise ValidationError("delta must lie in (0, 1)")
    bound = math.exp(2 * total_negativity_ln) * (2 / eps**2) * math.log(2 / delta)
    return int(math.ceil(bound))


def _embed_matrix(op: np.ndarray, targets, n: int, base: int) -> np.ndarray:
    """Embed an operator on ``targets`` into an n-site row-major index space."""
    k = len(targets)
    rest = [q for q in range(n) if q not in targets]
    order = list(targets) + rest
    perm = [order.index(q) for q in range(n)]
    full = np.kron(op, np.eye(base ** (n - k), dtype=op.dtype))
    shaped = full.reshape([base] * (2 * n))
    shaped = shaped.transpose(perm + [n + q for q in perm])
    return shaped.reshape(base**n, base**n)


def exact_probability(desc: CircuitDescription, outcome: int = 0) -> float:
    """Dense density-matrix simulation of the circuit's outcome probability.

    ``outcome`` indexes the measured qubits' bit string row-major (first
    measured qubit most significant).  Capped at 4 qubits.
    """
    if desc.n > EXACT_QUBIT_CAP:
        raise SizeCapError(f"dense simulation supports up to {EXACT_QUBIT_CAP} qubits")
    rho = reduce(np.kron, [ket_density(l) for l in desc.initial])
    for gate in desc.gates:
        channel = gate_channel(gate.name, gate.theta, desc.noise)
        kraus = [_embed_matrix(k, list(gate.targets), desc.n, 2) for k in channel.kraus]
        rho = sum(k @ rho @ k.conj().T for k in kraus)
    effect = _outcome_effect(desc, outcome)
    return float(np.real(np.trace(effect @ rho)))


def _outcome_effect(desc: CircuitDescription, outcome: int) -> np.ndarray:
    measured = desc.measured_qubits()
    n_outcomes = 2 ** len(measured)
    if not 0 <= outcome < n_outcomes:
        raise ValidationError(f"outcome {outcome} out of range for {len(measured)} measured qubits")
    bits = {}
    for pos, q in enumerate(measured):
        shift = len(measured) - 1 - pos
        bits[q] = (outcome >> shift) & 1
    factors = []
    for q in range(desc.n):
        if q in bits:
            factors.append(ket_density(str(bits[q])))
        else:
            factors.append(np.eye(2, dtype=complex))
    return reduce(np.kron, factors)


def circuit_plan(desc: CircuitDescription, frame: SynthesisMap, outcome: int = 0) -> SamplingPlan:
    """Sampling plan for a circuit under a single-qubit frame.

    Initial-state coefficients and per-gate layer matrices come from the
    minimal-negativity LP decompositions; each gate is one layer, embedded
    into the n-fold product index space.
    """
    if frame.dim != 2:
        raise ValidationError("circuit sampling uses single-qubit frames")
    m = frame.size
    if m**desc.n > PLAN_INDEX_CAP:
        raise SizeCapError(
            f"product phase space of size {m}^{desc.n} exceeds the cap {PLAN_INDEX_CAP}"
        )
    solver1 = L1Solver(expansion_matrix(frame))
    p_parts = []
    for label in desc.initial:
        res = solver1.solve(expand(ket_density(label), validate=False))
        if res.status != "optimal":
            raise ValidationError(f"initial state {label!r} is outside the frame span")
        p_parts.append(res.coeffs)
    p = reduce(np.kron, p_parts)

    frames = {1: frame, 2: product_frame([frame, frame])}
    witness_cache = {}
    layers = []
    for gate in desc.gates:
        key = (gate.name.lower(), None if gate.theta is None else round(gate.theta, 12))
        if key not in witness_cache:
            arity = gate_arity(gate.name)
            channel = gate_channel(gate.name, gate.theta, desc.noise)
            result = channel_negativity(frames[arity], channel)
            if result.status != "optimal":
                raise ValidationError(f"gate {gate.name}: LP status {result.status}")
            witness_cache[key] = result.witness
        layers.append(_embed_matrix(witness_cache[key], list(gate.targets), desc.n, m))

    v_row = measurement_matrix(frame, zbasis_povm())
    measured = desc.measured_qubits()
    n_outcomes = 2 ** len(measured)
    if not 0 <= outcome < n_outcomes:
        raise ValidationError(f"outcome {outcome} out of range for {len(measured)} measured qubits")
    rows = []
    for q in range(desc.n):
        if q in measured:
            shift = len(measured) - 1 - measured.index(q)
            rows.append(v_row[(outcome >> shift) & 1])
        else:
            rows.append(np.ones(m))
    v = reduce(np.kron, rows)
    return build_plan(p, layers, v)
