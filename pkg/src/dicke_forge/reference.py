"""Quadratic-depth one-hot mapping used as a comparison baseline, plus tracing.

The baseline scans the register in rounds a = 2..n and keeps a one-hot
counter of the excited qubits seen so far in the first a wires. Its gates are
small explicit unitaries fixed by a handful of basis mappings; the remaining
columns are completed deterministically.
"""
from __future__ import annotations

import math
import re

import numpy as np

from .dicke import build_unk
from .ir import Circuit, compose, invert, unitary
from .sim import StateVector, apply_gates


def _vec(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits))
    v[int(bits, 2)] = 1.0
    return v


def _complement(vecs: list[np.ndarray], dim: int) -> list[np.ndarray]:
    """Orthonormal completion by Gram-Schmidt over the standard basis, in order."""
    basis = [v / np.linalg.norm(v) for v in vecs]
    extra = []
    for i in range(dim):
        if len(basis) == dim:
            break
        e = np.zeros(dim)
        e[i] = 1.0
        for b in basis:
            e = e - np.dot(b, e) * b
        if np.linalg.norm(e) > 1e-9:
            e = e / np.linalg.norm(e)
            basis.append(e)
            extra.append(e)
    return extra


def mapping_unitary(pairs: list[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Real orthogonal matrix sending each input vector to its output vector."""
    dim = len(pairs[0][0])
    ins = [a for a, _ in pairs]
    outs = [b for _, b in pairs]
    u = sum(np.outer(b, a) for a, b in zip(ins, outs))
    for a, b in zip(_complement(ins, dim), _complement(outs, dim)):
        u = u + np.outer(b, a)
    return u


def gate_one() -> np.ndarray:
    h = math.sqrt(0.5)
    return mapping_unitary([
        (_vec("00"), _vec("00")),
        (_vec("11"), _vec("01")),
        (h * _vec("01") + h * _vec("10"), _vec("10")),
    ])


def gate_two(a: int, b: int) -> np.ndarray:
    """Counter step on wires (b, b+1, a): move the marker from b to b+1 if qubit a is set."""
    moved = math.sqrt((b + 1) / a) * _vec("101") + math.sqrt((a - b - 1) / a) * _vec("010")
    return mapping_unitary([
        (_vec("000"), _vec("000")),
        (_vec("100"), _vec("100")),
        (_vec("001"), _vec("001")),
        (_vec("011"), _vec("011")),
        (moved, _vec("010")),
    ])


def gate_three(a: int) -> np.ndarray:
    """Wrap-around step on wires (1, a-1, a): the first excitation found in round a."""
    first = math.sqrt(1 / a) * _vec("001") + math.sqrt((a - 1) / a) * _vec("100")
    return mapping_unitary([
        (_vec("000"), _vec("000")),
        (_vec("010"), _vec("010")),
        (_vec("011"), _vec("001")),
        (first, _vec("100")),
    ])


def build_plesch_buzek(n: int) -> Circuit:
    """Maps D(n, l) to the one-hot state |0^(l-1) 1 0^(n-l)> (and |0^n> to itself)."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    parts = [Circuit(n, (unitary(gate_one(), (1, 2), "I"),), "I[2]").as_block()]
    for a in range(3, n + 1):
        for b in range(1, a - 1):
            g = unitary(gate_two(a, b), (b, b + 1, a), f"II[{a},{b}]")
            parts.append(Circuit(n, (g,), f"II[{a},{b}]").as_block())
        g = unitary(gate_three(a), (1, a - 1, a), f"III[{a}]")
        parts.append(Circuit(n, (g,), f"III[{a}]").as_block())
    return compose(parts, n, f"PB[{n}]")


def onehot_frontend(n: int) -> Circuit:
    """The staircase front end of compression: D(n, l) -> |0^(n-l) 1^l>."""
    return invert(build_unk(n, n))


# -- tracing ------------------------------------------------------------------

def trace_states(circuit: Circuit, state: StateVector, by: str = "block") -> list[StateVector]:
    """State after every block boundary (``by="block"``) or after every gate."""
    if by not in ("block", "gate"):
        raise ValueError(f"trace granularity must be 'block' or 'gate', got {by!r}")
    cuts = (sorted({b.stop for b in circuit.blocks}) if by == "block"
            else list(range(1, len(circuit.gates) + 1)))
    out, cur, done = [], state, 0
    for cut in cuts:
        cur = apply_gates(cur, circuit.gates[done:cut])
        done = cut
        out.append(cur)
    return out


_SCS_LABEL = re.compile(r"SCS\[(\d+),(\d+)\]/(i|ii_(\d+))†?$")
_PB_LABEL = re.compile(r"(I|II|III)\[(\d+)(?:,(\d+))?\]$")


def step_name(label: str) -> tuple[str, str]:
    """(gate type, "a b") column entries for a block label."""
    m = _SCS_LABEL.match(label)
    if m:
        a = int(m.group(1))
        if m.group(3) == "i":
            return "i", f"{a}"
        return "ii", f"{a} {a - int(m.group(4))}"
    m = _PB_LABEL.match(label)
    if m:
        kind, a, b = m.group(1), m.group(2), m.group(3)
        return kind, f"{a} {b}" if b else a
    return label, ""


def format_terms(state: StateVector, scale: float, tol: float = 1e-9) -> str:
    """``sqrt(N)|bits>`` terms for a state multiplied by ``scale``."""
    terms = []
    for bits, z in sorted(state.nonzero(tol).items(), key=lambda kv: kv[0]):
        c = z * scale
        mag2 = abs(c) ** 2
        sign = "-" if c.real < -tol else ""
        r = round(mag2)
        if abs(mag2 - r) < 1e-6:
            coef = "" if r == 1 else f"√{r}"
        else:
            coef = f"{abs(c):.6g}"
        terms.append(f"{sign}{coef}|{bits}>")
    return " + ".join(terms).replace("+ -", "- ") or "0"


def trace_table(n: int, k: int) -> list[tuple[str, str, str, str]]:
    """Side-by-side rows (gate, a b, ours, baseline) for input D(n, k), scaled by sqrt(C(n,k))."""
    from .sim import dicke_oracle

    start = dicke_oracle(n, k)
    scale = math.sqrt(math.comb(n, k))
    ours, base = onehot_frontend(n), build_plesch_buzek(n)
    so, sb = trace_states(ours, start), trace_states(base, start)
    rows = [("init", "", format_terms(start, scale), format_terms(start, scale))]
    for bo, bb, xo, xb in zip(ours.blocks, base.blocks, so, sb):
        to, ab = step_name(bo.label)
        tb, _ = step_name(bb.label)
        rows.append((f"{to}/{tb}", ab, format_terms(xo, scale), format_terms(xb, scale)))
    return rows


def render_table(rows) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    head = ("gate", "a b", "staircase", "one-hot baseline")
    widths = [max(w, len(h)) for w, h in zip(widths, head)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*head), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*r).rstrip() for r in rows]
    return "\n".join(lines) + "\n"
