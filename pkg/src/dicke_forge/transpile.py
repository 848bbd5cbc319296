"""Lowering of controlled rotations and multi-controlled X to CNOT + 1-qubit gates.

Output gate set of ``transpile(..., "cnot_ry")`` is {X, Ry, PhaseShift, CNOT, SWAP}.
"""
from __future__ import annotations

import bisect
import math
from typing import Sequence

from .ir import ABSTRACT, Block, Circuit, Gate, Kind, cnot, phase, require_valid, ry, x

GATESETS = ("abstract", "cnot_ry")


def _expect(gate: Gate, kind: Kind) -> None:
    if gate.kind is not kind:
        raise ValueError(f"expected a {kind.value} gate, got {gate.kind.value}")


def decompose_cry(gate: Gate) -> list[Gate]:
    """CRy(2t) = CNOT . Ry(-t) . CNOT . Ry(t) (time order: Ry(t) first)."""
    _expect(gate, Kind.CRY)
    (c,), (t,) = gate.controls, gate.targets
    half = gate.angle / 2
    return [ry(half, t), cnot(c, t), ry(-half, t), cnot(c, t)]


def decompose_ccry(gate: Gate) -> list[Gate]:
    """Four CNOTs interleaved with Ry(+-angle/4) on the target.

    The target sees the parity of the controls flip four times; the signed
    quarter-rotations add up to the full angle only when both controls are 1.
    """
    _expect(gate, Kind.CCRY)
    (c1, c2), (t,) = gate.controls, gate.targets
    q = gate.angle / 4
    return [cnot(c1, t), ry(-q, t), cnot(c2, t), ry(q, t),
            cnot(c1, t), ry(-q, t), cnot(c2, t), ry(q, t)]


def decompose_ccry_line(gate: Gate) -> list[Gate]:
    """CCRy on three consecutive wires with the target at one end, using only adjacent CNOTs.

    The control next to the target carries the parity: CNOTs from the far
    control toggle it between c and c xor f, so the target sees the parities
    c, f, c xor f, 0 in turn, each followed by a quarter rotation.
    """
    _expect(gate, Kind.CCRY)
    (c1, c2), (t,) = gate.controls, gate.targets
    near, far = (c1, c2) if abs(c1 - t) == 1 else (c2, c1)
    if abs(near - t) != 1 or abs(far - near) != 1 or abs(far - t) != 2:
        raise ValueError(f"wires {gate.wires} are not a line with the target at one end")
    q = gate.angle / 4
    out = []
    for s in (-q, -q, q, q):
        out += [cnot(near, t), ry(s, t), cnot(far, near)]
    return out


def _hadamard(t: int) -> list[Gate]:
    return [ry(math.pi / 2, t), x(t)]


def toffoli(c1: int, c2: int, t: int) -> list[Gate]:
    """Six-CNOT Toffoli with T = PhaseShift(pi/4)."""
    T, Td = math.pi / 4, -math.pi / 4
    return [*_hadamard(t),
            cnot(c2, t), phase(Td, t), cnot(c1, t), phase(T, t),
            cnot(c2, t), phase(Td, t), cnot(c1, t), phase(T, c2), phase(T, t),
            *_hadamard(t),
            cnot(c1, c2), phase(T, c1), phase(Td, c2), cnot(c1, c2)]


def _v_chain(cs: Sequence[int], anc: Sequence[int], t: int) -> list[Gate]:
    """MCX with m >= 3 controls using m-2 dirty ancillas (4(m-2) Toffolis)."""
    k = len(cs)
    top = toffoli(cs[k - 1], anc[k - 3], t)
    base = toffoli(cs[0], cs[1], anc[0])
    down = [g for i in range(k - 4, -1, -1) for g in toffoli(cs[i + 2], anc[i], anc[i + 1])]
    up = [g for i in range(k - 3) for g in toffoli(cs[i + 2], anc[i], anc[i + 1])]
    half = top + down + base + up
    return half + half


def _mcx(cs: Sequence[int], t: int, scratch: Sequence[int]) -> list[Gate]:
    m = len(cs)
    if m == 1:
        return [cnot(cs[0], t)]
    if m == 2:
        return toffoli(cs[0], cs[1], t)
    if len(scratch) >= m - 2:
        return _v_chain(cs, scratch[: m - 2], t)
    if scratch:
        # split the controls around one borrowed wire; each half then has
        # enough idle wires (the other half) for a V-chain
        a = scratch[0]
        h = (m + 1) // 2
        A, B = list(cs[:h]), list(cs[h:])
        x1 = _mcx(A, a, B + [t])
        x2 = _mcx(B + [a], t, A)
        return x1 + x2 + x1 + x2
    return _mcx_no_scratch(list(cs), t)


def _crz(beta: float, c: int, q: int) -> list[Gate]:
    return [phase(beta / 2, q), cnot(c, q), phase(-beta / 2, q), cnot(c, q)]


def _mc_rz(cs: list[int], q: int, alpha: float) -> list[Gate]:
    if len(cs) == 1:
        return _crz(alpha, cs[0], q)
    c, rest = cs[-1], cs[:-1]
    flip = _mcx(rest, q, [c])
    return flip + _crz(-alpha / 2, c, q) + flip + _crz(alpha / 2, c, q)


def _mc_phase(qs: list[int], alpha: float) -> list[Gate]:
    """Phase e^(i alpha) on the all-ones pattern of ``qs``."""
    if len(qs) == 1:
        return [phase(alpha, qs[0])]
    if len(qs) == 2:
        a, b = qs
        return [phase(alpha / 2, a), phase(alpha / 2, b), cnot(a, b), phase(-alpha / 2, b), cnot(a, b)]
    return _mc_rz(qs[:-1], qs[-1], alpha) + _mc_phase(qs[:-1], alpha / 2)


def _mcx_no_scratch(cs: list[int], t: int) -> list[Gate]:
    # X = Ry(pi) Z: a multi-controlled Z, then a multi-controlled Ry(pi)
    # built from two (m-1)-control X gates that borrow the last control
    last, rest = cs[-1], cs[:-1]
    flip = _mcx(rest, t, [last])
    half = math.pi / 2
    return (_mc_phase(cs + [t], math.pi)
            + flip + decompose_cry(Gate(Kind.CRY, (last,), (t,), -half))
            + flip + decompose_cry(Gate(Kind.CRY, (last,), (t,), half)))


def decompose_mcx(gate: Gate, scratch: Sequence[int] = ()) -> list[Gate]:
    """Exact lowering of an m-control X.

    ``scratch`` lists idle wires that may be borrowed in any state and are
    returned unchanged. With at least one such wire the cost is linear in m;
    without any, a quadratic-size phase construction is used.
    """
    _expect(gate, Kind.MCX)
    used = set(gate.wires)
    free = [w for w in scratch if w not in used]
    return _mcx(gate.controls, gate.targets[0], free)


# -- peephole passes ----------------------------------------------------------

def _rearrange(gates: list[Gate], tags: list[int]) -> tuple[list[Gate], list[int]]:
    """Replace CNOT(a,t) .. CNOT(b,t) .. CNOT(a,b) by CNOT(a,b) CNOT(b,t).

    Valid when nothing between the first two touches a, b or t and nothing
    between the last two touches a or b: the first pair equals
    CNOT(a,b) CNOT(b,t) CNOT(a,b), whose trailing CNOT(a,b) cancels.
    """
    gates, tags = list(gates), list(tags)
    j = 0
    while j < len(gates):
        g = gates[j]
        j += 1
        if g.kind is not Kind.CNOT:
            continue
        jj = j - 1
        (b,), (t,) = g.controls, g.targets
        i = jj - 1
        while i >= 0 and b not in gates[i].wires and t not in gates[i].wires:
            i -= 1
        if i < 0:
            continue
        gi = gates[i]
        if gi.kind is not Kind.CNOT or gi.targets != (t,):
            continue
        a = gi.controls[0]
        if any(a in gates[p].wires for p in range(i + 1, jj)):
            continue
        h = jj + 1
        while h < len(gates) and a not in gates[h].wires and b not in gates[h].wires:
            h += 1
        if h == len(gates) or gates[h] != cnot(a, b):
            continue
        tag = tags[jj]
        gates = gates[:i] + gates[i + 1:jj] + [cnot(a, b), cnot(b, t)] + gates[jj + 1:h] + gates[h + 1:]
        tags = tags[:i] + tags[i + 1:jj] + [tag, tag] + tags[jj + 1:h] + tags[h + 1:]
        j = jj + 1
    return gates, tags


def _cancel(gates: Sequence[Gate], tags: Sequence[int],
            kinds=(Kind.CNOT,)) -> tuple[list[Gate], list[int]]:
    """Remove identical self-inverse pairs with nothing on their wires in between."""
    alive = [True] * len(gates)
    stacks: dict[int, list[int]] = {}
    for idx, g in enumerate(gates):
        if g.kind in kinds:
            tops = {stacks[w][-1] if stacks.get(w) else -1 for w in g.wires}
            if len(tops) == 1:
                p = tops.pop()
                if p >= 0 and gates[p] == g:
                    alive[p] = alive[idx] = False
                    for w in g.wires:
                        stacks[w].pop()
                    continue
        for w in g.wires:
            stacks.setdefault(w, []).append(idx)
    keep = [i for i, ok in enumerate(alive) if ok]
    return [gates[i] for i in keep], [tags[i] for i in keep]


def _retag_blocks(blocks: Sequence[Block], tags: list[int]) -> tuple[Block, ...]:
    out = []
    for b in blocks:
        out.append(Block(bisect.bisect_left(tags, b.start), bisect.bisect_left(tags, b.stop), b.label))
    return tuple(out)


def _monotone(tags: list[int]) -> list[int]:
    # rewrites can place a gate slightly out of source order; clamp for bisect
    out, hi = [], -1
    for t in tags:
        hi = max(hi, t)
        out.append(hi)
    return out


def cancel_adjacent_cnots(circuit: Circuit) -> Circuit:
    """Drop pairs of identical CNOTs with nothing on their wires in between."""
    tags = list(range(len(circuit.gates)))
    gates, tags = _cancel(circuit.gates, tags)
    return Circuit(circuit.n, tuple(gates), circuit.label,
                   _retag_blocks(circuit.blocks, _monotone(tags)), dict(circuit.meta))


def rearrange_cnots(circuit: Circuit) -> Circuit:
    tags = list(range(len(circuit.gates)))
    gates, tags = _rearrange(circuit.gates, tags)
    return Circuit(circuit.n, tuple(gates), circuit.label,
                   _retag_blocks(circuit.blocks, _monotone(tags)), dict(circuit.meta))


def lower_gate(g: Gate, n: int) -> list[Gate]:
    if g.kind is Kind.CRY:
        return decompose_cry(g)
    if g.kind is Kind.CCRY:
        return decompose_ccry(g)
    if g.kind is Kind.MCX:
        used = set(g.wires)
        return decompose_mcx(g, [w for w in range(1, n + 1) if w not in used])
    if g.kind is Kind.UNITARY:
        raise ValueError("explicit unitaries have no cnot_ry lowering")
    return [g]


def transpile(circuit: Circuit, gateset: str = "cnot_ry", cancel: bool = True) -> Circuit:
    """Lower abstract gates, then apply the CNOT rearrangement and cancellation."""
    if gateset not in GATESETS:
        raise ValueError(f"unknown gate set {gateset!r}; choose from {GATESETS}")
    require_valid(circuit)
    if gateset == "abstract":
        return circuit
    gates: list[Gate] = []
    tags: list[int] = []
    for idx, g in enumerate(circuit.gates):
        low = lower_gate(g, circuit.n)
        gates.extend(low)
        tags.extend([idx] * len(low))
    if cancel:
        gates, tags = _rearrange(gates, tags)
        gates, tags = _cancel(gates, tags)
    blocks = _retag_blocks(circuit.blocks, _monotone(tags))
    return Circuit(circuit.n, tuple(gates), circuit.label, blocks, dict(circuit.meta))


def is_lowered(circuit: Circuit) -> bool:
    return not any(g.kind in ABSTRACT or g.kind is Kind.UNITARY for g in circuit.gates)
