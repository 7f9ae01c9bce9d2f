"""File formats: frame files, circuit files, CSV output, run manifests.

Frame and circuit documents are JSON.  Matrices serialize as nested
[re, im] pairs in row-major order; floats use Python's shortest
round-trip representation, so export -> import -> export is bit-exact.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from pathlib import Path

import numpy as np

from . import __version__
from .circuits import CircuitDescription, CircuitLedger, GateSpec
from .frames import SynthesisMap, check_ic
from .operators import KETS
from .validation import ValidationError


def _matrix_to_pairs(op: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in op]


def _matrix_from_pairs(data, where: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: expected nested [re, im] arrays ({exc})") from exc
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
        raise ValidationError(f"{where}: expected shape (d, d, 2), got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def frame_to_dict(frame: SynthesisMap, metadata: dict | None = None) -> dict:
    doc = {
        "label": frame.label,
        "dim": frame.dim,
        "M": frame.size,
        "ops": [_matrix_to_pairs(op) for op in frame.ops],
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def frame_from_dict(doc: dict) -> SynthesisMap:
    for field in ("label", "dim", "M", "ops"):
        if field not in doc:
            raise ValidationError(f"frame document is missing field {field!r}")
    ops = doc["ops"]
    if len(ops) != doc["M"]:
        raise ValidationError(f"ops: expected {doc['M']} matrices, found {len(ops)}")
    matrices = []
    for i, data in enumerate(ops):
        op = _matrix_from_pairs(data, f"ops[{i}]")
        if op.shape[0] != doc["dim"]:
            raise ValidationError(f"ops[{i}]: dimension {op.shape[0]} != dim {doc['dim']}")
        tr = complex(np.trace(op))
        if abs(tr - 1.0) > 1e-10:
            raise ValidationError(f"ops[{i}]: trace must be 1, got {tr.real:.12g}")
        matrices.append(op)
    try:
        return SynthesisMap(matrices, doc["label"])
    except ValidationError as exc:
        raise ValidationError(f"ops: {exc}") from exc


def save_frame(frame: SynthesisMap, path, metadata: dict | None = None) -> None:
    Path(path).write_text(json.dumps(frame_to_dict(frame, metadata), indent=1) + "\n")


def load_frame(path) -> SynthesisMap:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    return frame_from_dict(doc)


def circuit_from_dict(doc: dict) -> CircuitDescription:
    for field in ("n", "initial", "gates"):
        if field not in doc:
            raise ValidationError(f"circuit document is missing field {field!r}")
    for i, label in enumerate(doc["initial"]):
        if label not in KETS:
            raise ValidationError(f"initial[{i}]: unknown state label {label!r}")
    gates = []
    for i, g in enumerate(doc["gates"]):
        if "name" not in g or "targets" not in g:
            raise ValidationError(f"gates[{i}]: needs 'name' and 'targets'")
        theta = g.get("theta")
        gates.append(GateSpec(g["name"], tuple(int(t) for t in g["targets"]), theta))
    noise = None
    if doc.get("noise") is not None:
        block = doc["noise"]
        if "kind" not in block or "p" not in block:
            raise ValidationError("noise: needs 'kind' and 'p'")
        noise = (block["kind"], float(block["p"]))
    measure = {}
    for key, basis in (doc.get("measure") or {}).items():
        if basis not in ("Z", None):
            raise ValidationError(f"measure[{key}]: only 'Z' or null is supported")
        measure[int(key)] = basis
    return CircuitDescription(
        n=int(doc["n"]),
        initial=tuple(doc["initial"]),
        gates=tuple(gates),
        noise=noise,
        measure=measure,
    )


def circuit_to_dict(desc: CircuitDescription) -> dict:
    doc = {
        "n": desc.n,
        "initial": list(desc.initial),
        "gates": [
            {"name": g.name, "targets": list(g.targets), **({"theta": g.theta} if g.theta is not None else {})}
            for g in desc.gates
        ],
    }
    if desc.noise is not None:
        doc["noise"] = {"kind": desc.noise[0], "p": desc.noise[1]}
    doc["measure"] = {str(q): basis for q, basis in desc.measure.items()}
    return doc


def load_circuit(path) -> CircuitDescription:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    return circuit_from_dict(doc)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def ledger_fingerprint(ledger: CircuitLedger) -> str:
    """Stable hash of a ledger's element keys and multiplicities."""
    canon = [[list(map(str, el.key)), s] for el, s in ledger.entries]
    blob = json.dumps([ledger.d, canon], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


class Stopwatch:
    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self._start


def run_manifest(command: str, parameters: dict, seed, wall_time_s: float, outputs) -> dict:
    return {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "tool_version": __version__,
        "wall_time_s": round(wall_time_s, 3),
        "outputs": list(outputs),
    }
