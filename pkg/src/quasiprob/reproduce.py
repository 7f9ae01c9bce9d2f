"""Benchmark tables: negativity of gate-set ledgers under standard frames.

Baseline columns evaluate the catalog frames deterministically; optimized
columns run the multi-start frame optimizer and are therefore stochastic
(seeded) and substantially slower.
"""

from __future__ import annotations

from .circuits import block, ledger_negativity, variational_gateset
from .frames import catalog_frame
from .optimize import FrameOptimizer, padded_params

NOISE_ROWS = (
    ("Ideal", None),
    ("Depol p=0.1", ("depol", 0.1)),
    ("Depol p=0.2", ("depol", 0.2)),
    ("Depol p=0.4", ("depol", 0.4)),
    ("Deph p=0.1", ("deph", 0.1)),
    ("Deph p=0.2", ("deph", 0.2)),
    ("Deph p=0.4", ("deph", 0.4)),
    ("Damp p=0.1", ("damp", 0.1)),
    ("Damp p=0.2", ("damp", 0.2)),
    ("Damp p=0.4", ("damp", 0.4)),
)

BASELINE_COLUMNS = (
    ("Wootters", "wootters"),
    ("SIC-POVM", "sic"),
    ("Stabilizers", "stabilizer1q"),
    ("Lambda-polytope", "lambda_cube"),
)

FRAME_SIZE_OF_COLUMN = {"Wootters": 4, "SIC-POVM": 4, "Stabilizers": 6, "Lambda-polytope": 8}


def _ledger_for(kind: str, noise):
    if kind == "c2q_t":
        return block("c2q_t", noise=noise)
    if kind == "variational":
        return variational_gateset(10, noise=noise)
    raise ValueError(kind)


def baseline_cell(kind: str, noise, frame_name: str) -> float:
    frame, _ = catalog_frame(frame_name)
    return ledger_negativity(frame, _ledger_for(kind, noise)).total_log2


def baseline_rows(kind: str):
    """Long-format rows (row_label, column_label, value_bits) for one table."""
    rows = []
    for row_label, noise in NOISE_ROWS:
        for col_label, frame_name in BASELINE_COLUMNS:
            rows.append((row_label, col_label, baseline_cell(kind, noise, frame_name)))
    return rows


def table1_baseline():
    return baseline_rows("c2q_t")


def table2_baseline():
    return baseline_rows("variational")


def optimized_rows(kind: str, sizes=(4, 6, 8), *, restarts=30, seed=0, max_iters=200, n_jobs=1):
    rows = []
    for row_label, noise in NOISE_ROWS:
        ledger = _ledger_for(kind, noise)
        for m in sizes:
            opt = FrameOptimizer(
                m, restarts=restarts, seed=seed, max_iters=max_iters, n_jobs=n_jobs
            ).fit(ledger)
            rows.append((row_label, f"Optimized M={m}", opt.best_value_))
    return rows


def block_size_sweep(block_names, sizes, noise=None, *, restarts=30, seed=0, max_iters=200, n_jobs=1):
    """Optimized negativity per block over frame sizes, with warm-start inheritance."""
    rows = []
    for name in block_names:
        ledger = block(name, noise=noise)
        previous = None
        for m in sizes:
            warm = () if previous is None else (padded_params(previous, m),)
            opt = FrameOptimizer(
                m,
                restarts=restarts,
                seed=seed,
                max_iters=max_iters,
                warm_frames=warm,
                n_jobs=n_jobs,
            ).fit(ledger)
            rows.append((name, str(m), opt.best_value_))
            previous = opt.best_frame_
    return rows


def variational_size_sweep(noises, sizes, *, restarts=30, seed=0, max_iters=200, n_jobs=1):
    rows = []
    for row_label, noise in noises:
        ledger = variational_gateset(10, noise=noise)
        previous = None
        for m in sizes:
            warm = () if previous is None else (padded_params(previous, m),)
            opt = FrameOptimizer(
                m,
                restarts=restarts,
                seed=seed,
                max_iters=max_iters,
                warm_frames=warm,
                n_jobs=n_jobs,
            ).fit(ledger)
            rows.append((row_label, str(m), opt.best_value_))
            previous = opt.best_frame_
    return rows
