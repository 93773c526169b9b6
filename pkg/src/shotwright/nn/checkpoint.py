"""Versioned checkpoint files: named float64 entries, byte-exact round trip.

Layout (text, newline-separated)::

    shotwright-ckpt v1
    meta <key> <value>            # zero or more
    param <name> <d0,d1,...>      # shape; scalars use the empty string "-"
    <little-endian float64 bytes as lowercase hex>
    ...
    end
"""

from __future__ import annotations

import numpy as np

CHECKPOINT_HEADER = "shotwright-ckpt v1"


class CheckpointError(ValueError):
    """A checkpoint file is malformed or does not match the consumer."""


def write_entries(path: str, meta: dict[str, str], entries: dict[str, np.ndarray]) -> None:
    """Write named arrays in insertion order; values are stored exactly."""
    lines: list[str] = [CHECKPOINT_HEADER]
    for key in meta:
        if " " in key:
            raise CheckpointError(f"meta key {key!r} must not contain spaces")
        lines.append(f"meta {key} {meta[key]}")
    for name, array in entries.items():
        if " " in name:
            raise CheckpointError(f"parameter name {name!r} must not contain spaces")
        # np.ascontiguousarray promotes 0-d input to 1-d, which would lose
        # the scalar shape, so only apply it to arrays with dimensions.
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim:
            arr = np.ascontiguousarray(arr)
        shape = ",".join(str(d) for d in arr.shape) if arr.ndim else "-"
        lines.append(f"param {name} {shape}")
        lines.append(arr.tobytes().hex())
    lines.append("end")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_entries(path: str) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0] != CHECKPOINT_HEADER:
        found = lines[0] if lines else ""
        raise CheckpointError(
            f"bad checkpoint header: expected {CHECKPOINT_HEADER!r}, found {found!r}"
        )
    meta: dict[str, str] = {}
    entries: dict[str, np.ndarray] = {}
    i = 1
    ended = False
    while i < len(lines):
        line = lines[i]
        if line == "":
            i += 1
            continue
        if line == "end":
            ended = True
            break
        if line.startswith("meta "):
            parts = line.split(" ", 2)
            if len(parts) != 3:
                raise CheckpointError(f"line {i + 1}: malformed meta line")
            meta[parts[1]] = parts[2]
            i += 1
            continue
        if line.startswith("param "):
            parts = line.split(" ")
            if len(parts) != 3:
                raise CheckpointError(f"line {i + 1}: malformed param line")
            name, shape_text = parts[1], parts[2]
            if name in entries:
                raise CheckpointError(f"line {i + 1}: duplicate parameter {name!r}")
            shape = () if shape_text == "-" else tuple(int(d) for d in shape_text.split(","))
            if i + 1 >= len(lines):
                raise CheckpointError(f"truncated checkpoint: no data for {name!r}")
            try:
                raw = bytes.fromhex(lines[i + 1])
            except ValueError as exc:
                raise CheckpointError(f"line {i + 2}: invalid hex data for {name!r}") from exc
            expected = int(np.prod(shape)) if shape else 1
            if len(raw) != expected * 8:
                raise CheckpointError(
                    f"parameter {name!r}: expected {expected * 8} bytes, got {len(raw)}"
                )
            entries[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
            i += 2
            continue
        raise CheckpointError(f"line {i + 1}: unrecognized line {line[:40]!r}")
    if not ended:
        raise CheckpointError("truncated checkpoint: missing end marker")
    return meta, entries
