"""JSON file formats for states, matrices, channels, protocols and codes.

Complex numbers are stored as two-element ``[re, im]`` arrays; matrices
are stored row-major.  Every file carries a ``schema_version`` field.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .envcode import EnvCode, KrausChannel
from .flatten import FlatteningResult
from .linalg import StateVector
from .synthesis import Protocol, TruncatedMessagePlan

SCHEMA_VERSION = 1


def _pairs(values: np.ndarray) -> list[list[float]]:
    flat = np.asarray(values, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _unpairs(raw: Any, name: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise ValueError(f"{name} must be a list of [re, im] pairs")
    out = np.empty(len(raw), dtype=np.complex128)
    for idx, item in enumerate(raw):
        if not isinstance(item, list) or len(item) != 2:
            raise ValueError(f"{name}[{idx}] is not a [re, im] pair")
        out[idx] = complex(float(item[0]), float(item[1]))
    return out


def _read(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("top-level JSON value must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {version!r}")
    return doc


def _write(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def save_state(path: str, state: StateVector) -> None:
    _write(
        path,
        {
            "schema_version": SCHEMA_VERSION,
            "dims": list(state.dims),
            "amplitudes": _pairs(state.amplitudes),
        },
    )


def load_state(path: str) -> StateVector:
    doc = _read(path)
    dims = doc.get("dims")
    if not isinstance(dims, list) or not dims:
        raise ValueError("state file needs a non-empty dims list")
    state = StateVector(tuple(int(d) for d in dims), _unpairs(doc.get("amplitudes"), "amplitudes"))
    state.require_normalized()
    return state


def save_matrix(path: str, matrix: np.ndarray) -> None:
    m = np.asarray(matrix, dtype=np.complex128)
    _write(
        path,
        {
            "schema_version": SCHEMA_VERSION,
            "rows": m.shape[0],
            "cols": m.shape[1],
            "entries": _pairs(m),
        },
    )


def load_matrix(path: str) -> np.ndarray:
    doc = _read(path)
    rows = int(doc.get("rows", 0))
    cols = int(doc.get("cols", 0))
    if rows < 1 or cols < 1:
        raise ValueError("matrix file needs positive rows and cols")
    entries = _unpairs(doc.get("entries"), "entries")
    if entries.size != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {entries.size}")
    return entries.reshape(rows, cols)


def load_channel(path: str) -> KrausChannel:
    doc = _read(path)
    d_a = int(doc.get("input_dim", 0))
    d_b = int(doc.get("output_dim", 0))
    raw_kraus = doc.get("kraus")
    if not isinstance(raw_kraus, list) or not raw_kraus:
        raise ValueError("channel file needs a non-empty kraus list")
    ops = []
    for idx, raw in enumerate(raw_kraus):
        flat = _unpairs(raw, f"kraus[{idx}]")
        if flat.size != d_b * d_a:
            raise ValueError(f"kraus[{idx}] must have {d_b * d_a} entries, got {flat.size}")
        ops.append(flat.reshape(d_b, d_a))
    return KrausChannel(input_dim=d_a, output_dim=d_b, kraus=tuple(ops))


def save_channel(path: str, channel: KrausChannel) -> None:
    _write(
        path,
        {
            "schema_version": SCHEMA_VERSION,
            "input_dim": channel.input_dim,
            "output_dim": channel.output_dim,
            "kraus": [_pairs(k) for k in channel.kraus],
        },
    )


def _protocol_doc(protocol: Protocol, plan: TruncatedMessagePlan | None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "padded_dim_a": protocol.padded_dim_a,
        "original_dim_a": protocol.original_dim_a,
        "dim_b": protocol.dim_b,
        "swapped": protocol.swapped,
        "alice_vectors": _pairs(protocol.alice_vectors),
        "bob_projectors": [None if b is None else _pairs(b) for b in protocol.bob_projectors],
        "outcome_probs_psi": [float(p) for p in protocol.outcome_probs_psi],
        "outcome_probs_phi": [float(p) for p in protocol.outcome_probs_phi],
        "input_overlap": [protocol.input_overlap.real, protocol.input_overlap.imag],
        "flatten_residual": protocol.flatten_residual,
    }
    if plan is not None:
        doc["truncation"] = {
            "kept_outcomes": list(plan.kept_outcomes),
            "epsilon": plan.epsilon,
            "bits": plan.bits,
            "retained_prob_psi": plan.retained_prob_psi,
            "retained_prob_phi": plan.retained_prob_phi,
        }
    return doc


def save_protocol(path: str, protocol: Protocol, plan: TruncatedMessagePlan | None = None) -> None:
    _write(path, _protocol_doc(protocol, plan))


def load_protocol(path: str) -> tuple[Protocol, TruncatedMessagePlan | None]:
    doc = _read(path)
    d_pad = int(doc["padded_dim_a"])
    d_a = int(doc["original_dim_a"])
    d_b = int(doc["dim_b"])
    alice = _unpairs(doc["alice_vectors"], "alice_vectors")
    if alice.size != d_pad * d_pad:
        raise ValueError(f"alice_vectors must have {d_pad * d_pad} entries, got {alice.size}")
    raw_bobs = doc["bob_projectors"]
    if not isinstance(raw_bobs, list) or len(raw_bobs) != d_pad:
        raise ValueError(f"bob_projectors must list {d_pad} outcomes")
    bobs = []
    for idx, raw in enumerate(raw_bobs):
        if raw is None:
            bobs.append(None)
            continue
        b = _unpairs(raw, f"bob_projectors[{idx}]")
        if b.size != d_b:
            raise ValueError(f"bob_projectors[{idx}] must have {d_b} entries, got {b.size}")
        bobs.append(b)
    overlap_pair = doc.get("input_overlap", [0.0, 0.0])
    protocol = Protocol(
        alice_vectors=alice.reshape(d_pad, d_pad),
        bob_projectors=tuple(bobs),
        outcome_probs_psi=np.asarray(doc["outcome_probs_psi"], dtype=np.float64),
        outcome_probs_phi=np.asarray(doc["outcome_probs_phi"], dtype=np.float64),
        padded_dim_a=d_pad,
        original_dim_a=d_a,
        dim_b=d_b,
        swapped=bool(doc.get("swapped", False)),
        input_overlap=complex(float(overlap_pair[0]), float(overlap_pair[1])),
        flatten_residual=float(doc.get("flatten_residual", 0.0)),
    )
    plan = None
    raw_plan = doc.get("truncation")
    if raw_plan is not None:
        plan = TruncatedMessagePlan(
            kept_outcomes=tuple(int(i) for i in raw_plan["kept_outcomes"]),
            epsilon=float(raw_plan["epsilon"]),
            bits=int(raw_plan["bits"]),
            retained_prob_psi=float(raw_plan["retained_prob_psi"]),
            retained_prob_phi=float(raw_plan["retained_prob_phi"]),
        )
    return protocol, plan


def save_flattening(path: str, result: FlatteningResult) -> None:
    _write(
        path,
        {
            "schema_version": SCHEMA_VERSION,
            "original_dim": result.original_dim,
            "padded_dim": result.padded_dim,
            "residual": result.residual,
            "unitary": _pairs(result.unitary),
        },
    )


def save_env_code(path: str, code: EnvCode) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "encoder_states": [_pairs(e) for e in code.encoder_states],
        "error_prob": code.error_prob,
        "protocol": _protocol_doc(code.protocol, None),
    }
    _write(path, doc)
