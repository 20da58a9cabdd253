"""Machine files and numeric block exports.

Machine files are JSON (or YAML, chosen by extension)::

    {"name": "golden mean",
     "alphabet": ["0", "1"],
     "states": ["A", "B"],
     "transitions": [{"from": "A", "symbol": "0", "to": "A", "prob": 0.5}, ...]}

Exports are CSV blocks, each introduced by a header line
``# block: <name> shape=<r>x<c>`` and followed by its rows; ``# key: value``
lines before the first block carry metadata.
"""
from __future__ import annotations

import json
import os
import re
from pathlib import Path

import numpy as np

from .errors import InputError
from .machine import EpsilonMachine
from . import zoo


class MachineFileError(InputError):
    pass


def _load_document(path: Path):
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml

        return yaml.safe_load(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MachineFileError(f"{path}: not valid JSON ({exc})") from None


def machine_from_document(doc, default_name: str = "") -> EpsilonMachine:
    if not isinstance(doc, dict):
        raise MachineFileError("machine document must be a mapping")
    for key in ("alphabet", "states", "transitions"):
        if key not in doc:
            raise MachineFileError(f"missing key {key!r}")
    alphabet = [str(a) for a in doc["alphabet"]]
    states = [str(s) for s in doc["states"]]
    sym = {a: i for i, a in enumerate(alphabet)}
    st = {s: i for i, s in enumerate(states)}
    T = np.zeros((len(alphabet), len(states), len(states)))
    seen = set()
    for n, rec in enumerate(doc["transitions"]):
        try:
            k, x, j = st[str(rec["from"])], sym[str(rec["symbol"])], st[str(rec["to"])]
            p = float(rec["prob"])
        except KeyError as exc:
            raise MachineFileError(f"transition #{n}: unresolved or missing field {exc}") from None
        except (TypeError, ValueError):
            raise MachineFileError(f"transition #{n}: probability is not a number") from None
        if (k, x, j) in seen:
            raise MachineFileError(f"transition #{n}: duplicate edge {rec['from']} -{rec['symbol']}-> {rec['to']}")
        seen.add((k, x, j))
        T[x, k, j] = p
    return EpsilonMachine(alphabet, states, T, name=str(doc.get("name", default_name)))


def read_machine(path) -> EpsilonMachine:
    path = Path(path)
    return machine_from_document(_load_document(path), default_name=path.stem)


def load_machine(source: str) -> EpsilonMachine:
    """Machine from a file path or a zoo shorthand such as ``renewal{4}``."""
    if not os.path.exists(source) and zoo.is_shorthand(source):
        return zoo.from_shorthand(source)
    return read_machine(source)


def machine_to_document(machine: EpsilonMachine, zero_tol: float = 0.0) -> dict:
    T = machine.transitions
    transitions = [
        {"from": machine.states[k], "symbol": machine.alphabet[x], "to": machine.states[j], "prob": float(T[x, k, j])}
        for k in range(machine.n_states)
        for x in range(machine.n_symbols)
        for j in range(machine.n_states)
        if T[x, k, j] > zero_tol
    ]
    return {"name": machine.name, "alphabet": list(machine.alphabet), "states": list(machine.states),
            "transitions": transitions}


def write_machine(machine: EpsilonMachine, path) -> None:
    Path(path).write_text(json.dumps(machine_to_document(machine), indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# CSV blocks

_BLOCK = re.compile(r"^#\s*block:\s*(\S+)\s+shape=(\d+)(?:x(\d+))?\s*$")
_META = re.compile(r"^#\s*([\w.-]+):\s*(.*)$")


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_blocks(path, blocks: dict, meta: dict | None = None) -> None:
    """Write named 1-D/2-D arrays as CSV blocks (17 significant digits)."""
    lines = [f"# {k}: {v}" for k, v in (meta or {}).items()]
    for name, arr in blocks.items():
        arr = np.asarray(arr, dtype=float)
        if arr.ndim == 1:
            lines.append(f"# block: {name} shape={arr.shape[0]}")
            lines.extend(fmt(v) for v in arr)
        elif arr.ndim == 2:
            lines.append(f"# block: {name} shape={arr.shape[0]}x{arr.shape[1]}")
            lines.extend(",".join(fmt(v) for v in row) for row in arr)
        else:
            raise ValueError(f"block {name!r} must be 1-D or 2-D")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_blocks(path):
    """Inverse of :func:`write_blocks`; returns ``(blocks, meta)``."""
    blocks, meta = {}, {}
    name, shape, rows = None, None, []

    def flush():
        if name is not None:
            data = np.array(rows, dtype=float).reshape(shape) if rows else np.zeros(shape)
            blocks[name] = data

    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        m = _BLOCK.match(line)
        if m:
            flush()
            name = m.group(1)
            shape = (int(m.group(2)),) if m.group(3) is None else (int(m.group(2)), int(m.group(3)))
            rows = []
            continue
        if line.startswith("#"):
            mm = _META.match(line)
            if mm and name is None:
                meta[mm.group(1)] = mm.group(2)
            continue
        rows.append([float(v) for v in line.split(",")])
    flush()
    return blocks, meta
