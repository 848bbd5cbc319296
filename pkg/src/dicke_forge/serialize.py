"""JSON and OpenQASM 2.0 text formats for circuits."""
from __future__ import annotations

import json

from .ir import Block, Circuit, Gate, Kind, require_valid


def _num(v: float) -> str:
    # 17 significant digits round-trips any float64 exactly
    s = format(float(v), ".17g")
    if s in ("inf", "-inf", "nan"):
        raise ValueError(f"non-finite value {s} cannot be serialized")
    # keep a float marker so that e.g. -0.0 does not come back as the integer 0
    return s if any(ch in s for ch in ".e") else s + ".0"


def _ints(xs) -> str:
    return "[" + ", ".join(str(int(v)) for v in xs) + "]"


def _gate_json(g: Gate) -> str:
    parts = [f'"kind": {json.dumps(g.kind.value)}',
             f'"controls": {_ints(g.controls)}',
             f'"targets": {_ints(g.targets)}']
    if g.angle is not None:
        parts.append(f'"angle": {_num(g.angle)}')
    if g.matrix is not None:
        rows = ", ".join(
            "[" + ", ".join(f"[{_num(z.real)}, {_num(z.imag)}]" for z in row) + "]"
            for row in g.matrix)
        parts.append(f'"matrix": [{rows}]')
    if g.name:
        parts.append(f'"name": {json.dumps(g.name, ensure_ascii=False)}')
    return "{" + ", ".join(parts) + "}"


def to_json(circuit: Circuit) -> str:
    """Deterministic JSON text; ``from_json(to_json(c))`` re-emits byte-identically."""
    lines = ["{",
             f'  "n": {int(circuit.n)},',
             f'  "label": {json.dumps(circuit.label, ensure_ascii=False)},']
    if circuit.blocks:
        blocks = ", ".join(f"[{b.start}, {b.stop}, {json.dumps(b.label, ensure_ascii=False)}]"
                           for b in circuit.blocks)
        lines.append(f'  "blocks": [{blocks}],')
    if circuit.meta:
        lines.append(f'  "meta": {json.dumps(circuit.meta, sort_keys=True, ensure_ascii=False)},')
    if circuit.gates:
        lines.append('  "gates": [')
        body = [f"    {_gate_json(g)}" for g in circuit.gates]
        lines.append(",\n".join(body))
        lines.append("  ]")
    else:
        lines.append('  "gates": []')
    lines.append("}")
    return "\n".join(lines) + "\n"


def from_json(text: str) -> Circuit:
    data = json.loads(text)
    try:
        n = int(data["n"])
        raw = data["gates"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed circuit JSON: missing {exc}") from None
    gates = []
    for i, d in enumerate(raw):
        try:
            kind = Kind(d["kind"])
        except (KeyError, ValueError):
            raise ValueError(f"gate {i}: unknown kind {d.get('kind')!r}") from None
        matrix = None
        if "matrix" in d:
            matrix = tuple(tuple(complex(re, im) for re, im in row) for row in d["matrix"])
        gates.append(Gate(kind, tuple(d.get("controls", ())), tuple(d.get("targets", ())),
                          d.get("angle"), matrix, d.get("name", "")))
    blocks = tuple(Block(int(s), int(e), str(lab)) for s, e, lab in data.get("blocks", ()))
    circuit = Circuit(n, tuple(gates), str(data.get("label", "")), blocks, dict(data.get("meta", {})))
    require_valid(circuit)
    return circuit


_QASM_NAMES = {Kind.X: "x", Kind.RY: "ry", Kind.PHASE: "u1", Kind.CNOT: "cx", Kind.SWAP: "swap"}


def to_qasm(circuit: Circuit) -> str:
    """OpenQASM 2.0 text; abstract gates must be transpiled away first."""
    require_valid(circuit)
    out = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.n}];"]
    for i, g in enumerate(circuit.gates):
        name = _QASM_NAMES.get(g.kind)
        if name is None:
            raise ValueError(f"gate {i}: {g.kind.value} has no QASM form; transpile to cnot_ry first")
        args = ",".join(f"q[{w - 1}]" for w in g.wires)
        head = f"{name}({_num(g.angle)})" if g.angle is not None else name
        out.append(f"{head} {args};")
    return "\n".join(out) + "\n"
