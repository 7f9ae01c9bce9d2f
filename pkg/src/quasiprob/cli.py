"""Command-line interface.

Subcommands: ``frames`` (catalog export/import), ``negativity`` (per-element
breakdown of a block or circuit), ``optimize`` (frame optimization runs),
``simulate`` (Monte Carlo estimation with the exact oracle when feasible),
and ``reproduce`` (benchmark tables as CSV).

Exit codes: 0 success, 2 validation error, 3 infeasible decomposition,
4 size cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .circuits import block, circuit_to_ledger, ledger_negativity, normalize_block_name, variational_gateset
from .frames import FRAME_NAMES, catalog_frame, check_ic
from .optimize import FrameOptimizer
from .sampling import (
    EXACT_QUBIT_CAP,
    circuit_plan,
    estimate,
    exact_probability,
    hoeffding_samples,
)
from .serialization import (
    Stopwatch,
    frame_to_dict,
    ledger_fingerprint,
    load_circuit,
    load_frame,
    run_manifest,
    save_frame,
    write_csv,
)
from .validation import InfeasibleError, SizeCapError, ValidationError

LN2 = math.log(2)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_SIZE_CAP = 4


def _parse_noise(spec: str | None):
    if spec is None:
        return None
    try:
        kind, p = spec.split(":")
        return (kind, float(p))
    except ValueError as exc:
        raise ValidationError(f"noise must look like KIND:P, got {spec!r}") from exc


def _resolve_frame(name_or_path: str):
    if name_or_path.lower() in FRAME_NAMES:
        frame, _ = catalog_frame(name_or_path.lower())
        return frame
    if Path(name_or_path).exists():
        return load_frame(name_or_path)
    raise ValidationError(
        f"{name_or_path!r} is neither a catalog frame ({', '.join(FRAME_NAMES)}) nor a file"
    )


def _ledger_from_args(args):
    if getattr(args, "block", None):
        return block(normalize_block_name(args.block), noise=_parse_noise(args.noise))
    if getattr(args, "circuit", None):
        desc = load_circuit(args.circuit)
        if _parse_noise(args.noise) is not None:
            raise ValidationError("set noise inside the circuit file, not on the command line")
        return circuit_to_ledger(desc)
    if getattr(args, "gateset", None):
        if args.gateset != "variational":
            raise ValidationError(f"unknown gate set {args.gateset!r}")
        return variational_gateset(args.grid, noise=_parse_noise(args.noise))
    raise ValidationError("one of --block, --circuit, or --gateset is required")


def _display_base(value_bits: float, dim: int) -> float:
    if dim == 2:
        return value_bits
    return value_bits * LN2 / math.log(dim)


def cmd_frames(args) -> int:
    if args.frames_action == "list":
        for name in FRAME_NAMES:
            if name == "wigner":
                print(f"{name:14s} d odd prime, M = d^2 (MIC)")
                continue
            syn, ana = catalog_frame(name)
            kind = "MIC" if ana is not None else "overcomplete"
            print(f"{name:14s} d = {syn.dim}, M = {syn.size} ({kind})")
        return EXIT_OK
    if args.frames_action == "export":
        frame, _ = catalog_frame(args.name, args.dim)
        save_frame(frame, args.out)
        print(f"wrote {args.out}")
        return EXIT_OK
    frame = load_frame(args.path)
    report = check_ic(frame)
    ic = "yes" if report.rank == frame.dim**2 else "no"
    print(
        f"frame {frame.label!r}: dim {frame.dim}, M {frame.size}, "
        f"rank {report.rank} (IC: {ic}), smallest singular value {report.smallest_singular_value:.3e}"
    )
    return EXIT_OK


def cmd_negativity(args) -> int:
    ledger = _ledger_from_args(args)
    frame = _resolve_frame(args.frame)
    report = ledger_negativity(frame, ledger)
    rows = [
        (e.label, e.arity, e.multiplicity, f"{_display_base(e.value_log2, frame.dim):.4f}", "")
        for e in report.entries
    ]
    rows.append(("TOTAL", "", "", "", f"{_display_base(report.total_log2, frame.dim):.4f}"))
    header = ("element", "arity", "multiplicity", "negativity_bits", "total")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if args.out:
        write_csv(args.out, header, rows)
    return EXIT_OK


def cmd_optimize(args) -> int:
    ledger = _ledger_from_args(args)
    optimizer = FrameOptimizer(
        args.m_ops,
        restarts=args.restarts,
        seed=args.seed,
        max_iters=args.max_iters,
        n_jobs=args.threads,
    )
    with Stopwatch() as clock:
        optimizer.fit(ledger)
    print("restart,start,value_bits,status,iterations")
    for rec in optimizer.trace_:
        print(f"{rec.index},{rec.start},{rec.value:.6f},{rec.status},{rec.iterations}")
    print(f"best_value_bits,{optimizer.best_value_:.6f}")
    if args.out:
        manifest = run_manifest(
            "optimize",
            {
                "M": args.m_ops,
                "restarts": args.restarts,
                "max_iters": args.max_iters,
                "block": getattr(args, "block", None),
                "gateset": getattr(args, "gateset", None),
                "noise": args.noise,
            },
            args.seed,
            clock.seconds,
            [str(args.out)],
        )
        metadata = {
            "ledger_hash": ledger_fingerprint(ledger),
            "M": args.m_ops,
            "seed": args.seed,
            "restarts": args.restarts,
            "best_value": optimizer.best_value_,
            "manifest": manifest,
        }
        save_frame(optimizer.best_frame_, args.out, metadata)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    desc = load_circuit(args.circuit)
    frame = _resolve_frame(args.frame)
    plan = circuit_plan(desc, frame, outcome=args.outcome)
    n = hoeffding_samples(plan.total_negativity_ln, args.eps, args.delta)
    report = estimate(plan, n, seed=args.seed)
    lines = {
        "q_est": f"{report.q_est:.6f}",
        "n_samples": str(report.n_samples),
        "total_negativity_bits": f"{report.total_negativity_ln / LN2:.4f}",
        "chi_bound": f"{report.hoeffding_bound:.6f}",
    }
    exact = None
    if desc.n <= EXACT_QUBIT_CAP:
        exact = exact_probability(desc, outcome=args.outcome)
        lines["q_exact"] = f"{exact:.6f}"
        lines["abs_error"] = f"{abs(report.q_est - exact):.6f}"
    for key, value in lines.items():
        print(f"{key}: {value}")
    if args.out:
        manifest = run_manifest(
            "simulate",
            {"circuit": args.circuit, "frame": args.frame, "eps": args.eps, "delta": args.delta,
             "outcome": args.outcome},
            args.seed,
            0.0,
            [str(args.out)],
        )
        payload = {
            "q_est": report.q_est,
            "n_samples": report.n_samples,
            "total_negativity_ln": report.total_negativity_ln,
            "q_exact": exact,
            "manifest": manifest,
        }
        Path(args.out).write_text(json.dumps(payload, indent=1) + "\n")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    from . import reproduce

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = ("row_label", "column_label", "value_bits")
    written = []

    def emit(name, rows):
        path = out_dir / f"{name}.csv"
        write_csv(path, header, [(r, c, f"{v:.6f}") for r, c, v in rows])
        written.append(path)

    if args.target == "table1":
        emit("table1_baseline", reproduce.table1_baseline())
        if args.optimized:
            emit(
                "table1_optimized",
                reproduce.optimized_rows(
                    "c2q_t", restarts=args.restarts, seed=args.seed,
                    max_iters=args.max_iters, n_jobs=args.threads,
                ),
            )
    elif args.target == "table2":
        emit("table2_baseline", reproduce.table2_baseline())
        if args.optimized:
            emit(
                "table2_optimized",
                reproduce.optimized_rows(
                    "variational", restarts=args.restarts, seed=args.seed,
                    max_iters=args.max_iters, n_jobs=args.threads,
                ),
            )
    elif args.target == "fig3":
        sizes = tuple(range(4, 10))
        emit(
            "fig3a_blocks",
            reproduce.block_size_sweep(
                ("c1q", "c1q_t", "c2q", "c2q_t"), sizes,
                restarts=args.restarts, seed=args.seed, max_iters=args.max_iters,
                n_jobs=args.threads,
            ),
        )
        rows = []
        for label, noise in reproduce.NOISE_ROWS:
            swept = reproduce.block_size_sweep(
                ("c2q_t",), sizes, noise=noise,
                restarts=args.restarts, seed=args.seed, max_iters=args.max_iters,
                n_jobs=args.threads,
            )
            rows.extend((label, m, v) for _, m, v in swept)
        emit("fig3b_noisy_c2q_t", rows)
    elif args.target == "fig5":
        emit(
            "fig5_variational",
            reproduce.variational_size_sweep(
                reproduce.NOISE_ROWS, tuple(range(4, 10)),
                restarts=args.restarts, seed=args.seed, max_iters=args.max_iters,
                n_jobs=args.threads,
            ),
        )
    else:
        raise ValidationError(f"unknown reproduction target {args.target!r}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _add_source_options(parser, *, gateset: bool = False):
    parser.add_argument("--block", help="gate-set block name, e.g. c2q+t")
    parser.add_argument("--circuit", help="path to a circuit JSON file")
    if gateset:
        parser.add_argument("--gateset", help="named gate set (variational)")
        parser.add_argument("--B", dest="grid", type=int, default=10,
                            help="rotation-angle grid size for the variational set")
    parser.add_argument("--noise", help="decoherence as KIND:P, e.g. depol:0.1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasiprob",
        description="Minimal-negativity quasiprobability representations of quantum circuits",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    frames = sub.add_parser("frames", help="catalog frames: list, export, import")
    frames_sub = frames.add_subparsers(dest="frames_action", required=True)
    frames_sub.add_parser("list", help="list catalog frames")
    exp = frames_sub.add_parser("export", help="write a catalog frame to a file")
    exp.add_argument("--name", required=True)
    exp.add_argument("--dim", type=int, default=None)
    exp.add_argument("--out", required=True)
    imp = frames_sub.add_parser("import", help="validate a frame file")
    imp.add_argument("--path", required=True)
    frames.set_defaults(func=cmd_frames)

    neg = sub.add_parser("negativity", help="per-element negativity breakdown")
    _add_source_options(neg, gateset=True)
    neg.add_argument("--frame", required=True, help="catalog frame name or frame file path")
    neg.add_argument("--out", help="also write the CSV here")
    neg.set_defaults(func=cmd_negativity)

    opt = sub.add_parser("optimize", help="optimize a frame for a ledger")
    _add_source_options(opt, gateset=True)
    opt.add_argument("--M", dest="m_ops", type=int, required=True, help="frame size")
    opt.add_argument("--restarts", type=int, default=30)
    opt.add_argument("--max-iters", type=int, default=200)
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--threads", type=int, default=1)
    opt.add_argument("--out", help="write the optimized frame file here")
    opt.set_defaults(func=cmd_optimize)

    sim = sub.add_parser("simulate", help="Monte Carlo outcome estimation")
    sim.add_argument("--circuit", required=True)
    sim.add_argument("--frame", required=True)
    sim.add_argument("--eps", type=float, default=0.02)
    sim.add_argument("--delta", type=float, default=0.05)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--outcome", type=int, default=0,
                     help="measured-qubit bit string, row-major, as an integer")
    sim.add_argument("--out", help="write a JSON report here")
    sim.set_defaults(func=cmd_simulate)

    rep = sub.add_parser("reproduce", help="emit benchmark tables as CSV")
    rep.add_argument("target", choices=("table1", "table2", "fig3", "fig5"))
    rep.add_argument("--out", required=True, help="output directory")
    rep.add_argument("--optimized", action="store_true",
                     help="also run the (slow) optimized columns for table1/table2")
    rep.add_argument("--restarts", type=int, default=30)
    rep.add_argument("--max-iters", type=int, default=200)
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--threads", type=int, default=1)
    rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SizeCapError as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP


if __name__ == "__main__":
    sys.exit(main())
