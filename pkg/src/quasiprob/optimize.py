"""Frame optimization: minimize a circuit ledger's negativity over frames.

The frame operators are parametrized by their traceless coordinates, so a
frame of size M on a d-level system has (d*d - 1) * M free parameters and
trace-one holds by construction.  Minimization runs SLSQP on
central-difference gradients from many starts (catalog warm starts plus
random draws) and keeps the best result.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .circuits import CircuitLedger, LedgerEvaluator
from .frames import SynthesisMap, catalog_frame, check_ic
from .operators import hermitian_basis
from .validation import QuasiprobError, ValidationError

PENALTY = 1e3
IC_FLOOR = 1e-6


def frame_from_params(theta: np.ndarray, d: int = 2, label: str = "") -> SynthesisMap:
    """Frame whose m-th operator has traceless coordinates ``theta[m]``.

    ``theta`` has shape (M, d*d - 1) or is the flattened equivalent.  Each
    operator is ``(I + sqrt(d) * sum_j theta_mj B_j) / d`` over the traceless
    orthonormal basis elements, hence trace one but not necessarily
    positive.  For qubits the coordinates are plain Bloch vectors.
    """
    theta = np.asarray(theta, dtype=float)
    n_coord = d * d - 1
    if theta.ndim == 1:
        if theta.size % n_coord:
            raise ValidationError(
                f"parameter vector length {theta.size} is not a multiple of {n_coord}"
            )
        theta = theta.reshape(-1, n_coord)
    if theta.shape[1] != n_coord:
        raise ValidationError(f"expected {n_coord} coordinates per operator, got {theta.shape[1]}")
    basis = hermitian_basis(d)[1:]
    eye = np.eye(d, dtype=complex)
    ops = (eye + math.sqrt(d) * np.tensordot(theta, basis, axes=1)) / d
    return SynthesisMap(ops, label or f"optimized-M{theta.shape[0]}")


def params_from_frame(frame: SynthesisMap) -> np.ndarray:
    """Inverse of :func:`frame_from_params`; shape (M, d*d - 1)."""
    d = frame.dim
    basis = hermitian_basis(d)[1:]
    return math.sqrt(d) * np.einsum("mij,kji->mk", frame.ops, basis).real


def padded_params(frame: SynthesisMap, m_new: int, jitter: float = 1e-8) -> np.ndarray:
    """Pad a frame's parameters to a larger size with near-identity operators.

    The extra operators sit at the maximally mixed point plus a tiny
    deterministic offset that keeps the columns distinct; the enlarged
    frame reproduces the original objective value up to LP tolerance.
    """
    theta = params_from_frame(frame)
    m_old, n_coord = theta.shape
    if m_new < m_old:
        raise ValidationError("cannot pad a frame to a smaller size")
    pad = np.zeros((m_new - m_old, n_coord))
    for i in range(pad.shape[0]):
        pad[i, i % n_coord] = jitter * (1 + i)
    return np.vstack([theta, pad])


def ledger_objective(
    theta: np.ndarray,
    ledger: CircuitLedger,
    *,
    evaluator: LedgerEvaluator | None = None,
    softmax_temp: float | None = None,
) -> float:
    """Ledger negativity of the parametrized frame, with a penalty outside IC.

    Frames whose smallest frame singular value drops below 1e-6 are not
    informationally complete enough for stable LPs; those (and LP failures)
    return a penalty of at least 1e3 instead of raising.
    """
    frame = frame_from_params(np.asarray(theta, dtype=float), ledger.d)
    smallest = check_ic(frame).smallest_singular_value
    if smallest <= IC_FLOOR:
        return PENALTY * (1.0 + (IC_FLOOR - smallest) / IC_FLOOR)
    if evaluator is None:
        evaluator = LedgerEvaluator(ledger, softmax_temp=softmax_temp)
    try:
        return evaluator.evaluate(frame).total_log2
    except QuasiprobError:
        return PENALTY


def _central_gradient(fun, x, step):
    grad = np.empty_like(x)
    for i in range(x.size):
        shift = np.zeros_like(x)
        shift[i] = step
        grad[i] = (fun(x + shift) - fun(x - shift)) / (2 * step)
    return grad


@dataclass(frozen=True)
class RestartRecord:
    index: int
    start: str
    value: float
    status: str
    iterations: int


def _catalog_starts(m: int, d: int):
    """Catalog frames of matching size, as (name, theta) warm starts."""
    if d != 2:
        return []
    by_size = {4: ("wootters", "sic"), 6: ("stabilizer1q",), 8: ("lambda_cube",)}
    starts = []
    for name in by_size.get(m, ()):
        syn, _ = catalog_frame(name)
        starts.append((name, params_from_frame(syn)))
    return starts


def _run_restart(task):
    (index, start_kind, theta0, ledger, softmax_temp, max_iters, ftol, box, fd_step) = task
    evaluator = LedgerEvaluator(ledger, softmax_temp=softmax_temp)

    def fun(x):
        return ledger_objective(x, ledger, evaluator=evaluator)

    def jac(x):
        return _central_gradient(fun, x, fd_step)

    x0 = np.clip(theta0.ravel(), -box, box)
    bounds = [(-box, box)] * x0.size
    try:
        res = scipy.optimize.minimize(
            fun,
            x0,
            jac=jac,
            bounds=bounds,
            method="SLSQP",
            options={"maxiter": max_iters, "ftol": ftol},
        )
        best_x = np.clip(res.x, -box, box)
        value = fun(best_x)
        start_value = fun(x0)
        if start_value < value:  # SLSQP occasionally ends above its start
            best_x, value = x0, start_value
        record = RestartRecord(index, start_kind, float(value), "ok", int(res.nit))
        return record, best_x
    except Exception as exc:  # noqa: BLE001 - failed restarts are recorded, not fatal
        record = RestartRecord(index, start_kind, math.inf, f"failed: {exc}", 0)
        return record, None


class FrameOptimizer:
    """Multi-start frame optimizer with a scikit-learn style interface.

    Parameters are stored verbatim; :meth:`fit` consumes a
    :class:`~quasiprob.circuits.CircuitLedger` and exposes the result as
    ``best_frame_``, ``best_value_``, and ``trace_``.

    Restart k draws every operator's coordinates uniformly from the ball
    of radius sqrt(3) (the circumscribed-cube vertex radius) using a
    stream seeded by (seed, k); the first restarts are warm starts at
    catalog frames of matching size and at any ``warm_frames`` supplied,
    so the fitted value never exceeds the best warm-start value.
    """

    def __init__(
        self,
        m_ops: int,
        *,
        restarts: int = 30,
        seed: int = 0,
        max_iters: int = 200,
        ftol: float = 1e-7,
        param_box: float = 3.0,
        fd_step: float = 1e-4,
        softmax_temp: float | None = None,
        warm_frames: tuple = (),
        n_jobs: int = 1,
    ):
        self.m_ops = m_ops
        self.restarts = restarts
        self.seed = seed
        self.max_iters = max_iters
        self.ftol = ftol
        self.param_box = param_box
        self.fd_step = fd_step
        self.softmax_temp = softmax_temp
        self.warm_frames = warm_frames
        self.n_jobs = n_jobs

    _param_names = (
        "m_ops",
        "restarts",
        "seed",
        "max_iters",
        "ftol",
        "param_box",
        "fd_step",
        "softmax_temp",
        "warm_frames",
        "n_jobs",
    )

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params):
        for name, value in params.items():
            if name not in self._param_names:
                raise ValidationError(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self

    def _starts(self, d: int):
        if self.m_ops < d * d:
            raise ValidationError(f"need at least {d * d} frame operators, got {self.m_ops}")
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        n_coord = d * d - 1
        warm = list(_catalog_starts(self.m_ops, d))
        for frame in self.warm_frames:
            theta = params_from_frame(frame) if isinstance(frame, SynthesisMap) else np.asarray(frame, float)
            if theta.shape[0] != self.m_ops:
                raise ValidationError("warm frames must match the requested frame size")
            warm.append((f"warm:{getattr(frame, 'label', 'frame')}", theta))
        starts = []
        for k in range(self.restarts):
            if k < len(warm):
                starts.append((k, warm[k][0], warm[k][1]))
                continue
            rng = np.random.default_rng([self.seed, k])
            direction = rng.normal(size=(self.m_ops, n_coord))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            radius = math.sqrt(3) * rng.random(self.m_ops) ** (1.0 / n_coord)
            starts.append((k, "random", direction * radius[:, None]))
        return starts

    def fit(self, ledger: CircuitLedger):
        tasks = [
            (
                k,
                kind,
                theta0,
                ledger,
                self.softmax_temp,
                self.max_iters,
                self.ftol,
                self.param_box,
                self.fd_step,
            )
            for k, kind, theta0 in self._starts(ledger.d)
        ]
        if self.n_jobs and self.n_jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=self.n_jobs) as pool:
                outcomes = list(pool.map(_run_restart, tasks))
        else:
            outcomes = [_run_restart(t) for t in tasks]

        records = [rec for rec, _ in outcomes]
        best_idx = min(
            range(len(outcomes)),
            key=lambda i: (records[i].value, records[i].index),
        )
        best_record, best_theta = outcomes[best_idx]
        if best_theta is None:
            raise QuasiprobError("every optimization restart failed")
        self.trace_ = tuple(records)
        self.best_value_ = best_record.value
        self.best_params_ = best_theta.reshape(self.m_ops, ledger.d**2 - 1)
        self.best_frame_ = frame_from_params(self.best_params_, ledger.d)
        return self


def optimize(ledger: CircuitLedger, m_ops: int, **params):
    """Functional wrapper: returns ``(best_frame, best_value, trace)``."""
    opt = FrameOptimizer(m_ops, **params).fit(ledger)
    return opt.best_frame_, opt.best_value_, opt.trace_
