"""Linear-nearest-neighbour routing of the Dicke-state circuits.

The SCS blocks are processed in groups of k. Inside a group the bottom
qubit of each SCS is sifted upwards one wire at a time so that every
three-qubit block lands on consecutive wires, then parked near the top of the
group's 2k-wire window. After a full group an odd-even transposition network
of SWAP layers restores the identity layout. The last group parks its qubits
at the very top and is never sorted back; the resulting layout is recorded in
``meta["final_permutation"]`` (``perm[w-1]`` = logical qubit on wire w).
"""
from __future__ import annotations

from typing import Sequence
from dataclasses import dataclass

from .dicke import resolve_complement, scs_angle, scs_sequence
from .ir import Block, Circuit, Gate, Kind, ResourceReport, ccry, cnot, count_gates, cry, swap, x
from .transpile import _cancel, decompose_ccry_line, transpile


# -- adjacency checks ---------------------------------------------------------

def lnn_violations(circuit: Circuit) -> list[tuple[int, str]]:
    """(gate index, reason) for every multi-wire gate off the line topology."""
    out = []
    for i, g in enumerate(circuit.gates):
        ws = sorted(g.wires)
        if len(ws) < 2:
            continue
        consecutive = ws[-1] - ws[0] == len(ws) - 1
        if len(ws) == 2 and consecutive:
            continue
        if len(ws) == 3 and consecutive:
            out.append((i, "needs local decomposition"))
        else:
            out.append((i, f"wires {ws} not adjacent"))
    return out


def check_lnn(circuit: Circuit) -> bool:
    return not lnn_violations(circuit)


# -- wire bookkeeping ---------------------------------------------------------

@dataclass
class WirePermutation:
    """``perm[w-1]`` is the logical qubit currently on wire w."""

    n: int
    perm: list

    @classmethod
    def identity(cls, n: int) -> WirePermutation:
        return cls(n, list(range(1, n + 1)))

    def __post_init__(self):
        if sorted(self.perm) != list(range(1, self.n + 1)):
            raise ValueError(f"not a permutation of 1..{self.n}: {self.perm}")
        self.pos = [0] * (self.n + 1)
        for w, q in enumerate(self.perm, start=1):
            self.pos[q] = w

    def wire(self, qubit: int) -> int:
        return self.pos[qubit]

    def swap(self, w: int) -> None:
        """Exchange the qubits on wires w and w+1."""
        a, b = self.perm[w - 1], self.perm[w]
        self.perm[w - 1], self.perm[w] = b, a
        self.pos[a], self.pos[b] = w + 1, w

    def is_identity(self) -> bool:
        return self.perm == list(range(1, self.n + 1))


class _Emitter:
    def __init__(self, n: int):
        self.n = n
        self.gates: list[Gate] = []
        self.blocks: list[Block] = []
        self.layout = WirePermutation.identity(n)

    def block(self, label: str, gates) -> None:
        start = len(self.gates)
        self.gates.extend(gates)
        if len(self.gates) > start:
            self.blocks.append(Block(start, len(self.gates), label))

    def sift_up(self, qubit: int, to_wire: int, label: str = "sift") -> None:
        gates = []
        w = self.layout.wire(qubit)
        while w > to_wire:
            gates.append(swap(w - 1, w))
            self.layout.swap(w - 1)
            w -= 1
        self.block(label, gates)

    def sort_window(self, lo: int, hi: int, key=None) -> None:
        """Odd-even transposition sort of wires lo..hi by ``key`` (default: back to identity).

        Only strictly out-of-order neighbours are exchanged, so equal keys keep
        their relative order.
        """
        key = key or (lambda q: q)
        perm = self.layout.perm
        for rnd in range(hi - lo + 1):
            gates = []
            for w in range(lo + rnd % 2, hi, 2):
                if key(perm[w - 1]) > key(perm[w]):
                    gates.append(swap(w, w + 1))
                    self.layout.swap(w)
            self.block("sift-down", gates)

    def scs(self, m: int, kk: int, park: int | None) -> None:
        """SCS_{m,kk} with qubit m sifted into place, then parked at wire ``park`` (None: left where it is)."""
        lay = self.layout
        lo, hi = lay.wire(m - 1), lay.wire(m)
        assert hi == lo + 1, "block (i) operands must be adjacent"
        self.block(f"SCS[{m},{kk}]/i",
                   [cnot(lo, hi), cry(scs_angle(1, m), hi, lo), cnot(lo, hi)])
        for l in range(2, kk + 1):
            # qubit m goes directly above the target m-l, which then sits in the
            # middle of the triple: every CNOT of the lowered block is adjacent
            self.sift_up(m, lay.wire(m - l))
            p = lay.wire(m)
            assert lay.wire(m - l) == p + 1 and lay.wire(m - l + 1) == p + 2, "block (ii) operands must be consecutive"
            self.block(f"SCS[{m},{kk}]/ii_{l}",
                       [cnot(p + 1, p), ccry(scs_angle(l, m), p, p + 2, p + 1), cnot(p + 1, p)])
        if park is not None:
            self.sift_up(m, park)


def _inversions(seq, key) -> int:
    keys = [key(q) for q in seq]
    return sum(a > b for i, a in enumerate(keys) for b in keys[i + 1:])


def group_units(n: int, k: int) -> list[list[tuple[int, int]]]:
    """SCS units of ``build_unk(n, k)`` split into the routing groups."""
    units = scs_sequence(n, k)
    full = max(n // k - 1, 0)
    groups = [units[g * k:(g + 1) * k] for g in range(full)]
    rest = units[full * k:]
    if rest:
        groups.append(rest)
    return groups


def route_unk_lnn(n: int, k: int) -> Circuit:
    """Nearest-neighbour version of ``build_unk(n, k)`` (3-qubit blocks on consecutive wires)."""
    groups = group_units(n, k)
    em = _Emitter(n)
    for gi, units in enumerate(groups):
        final = gi == len(groups) - 1
        top = units[0][0]
        if final:
            # finished qubits only need to clear the way: either lift them above
            # the remaining ones (which stay in order) or sort back to identity,
            # whichever takes fewer exchanges
            hi = max(em.layout.wire(q) for q in range(1, top + 1))
            lift = lambda q: 0 if q > top else q
            window = em.layout.perm[:hi]
            if _inversions(window, lift) < _inversions(window, lambda q: q):
                em.sort_window(1, hi, key=lift)
            else:
                em.sort_window(1, hi)
            base = em.layout.wire(1)
        else:
            base = top - 2 * k + 1
        for j, (m, kk) in enumerate(units):
            last = final and j == len(units) - 1
            em.scs(m, kk, None if last else base + j)
        if not final and gi < len(groups) - 2:
            em.sort_window(base, top)
            assert em.layout.is_identity()
    # the sift chain can leave back-to-back SWAPs on the same pair
    gates, tags = _cancel(em.gates, list(range(len(em.gates))), kinds=(Kind.SWAP,))
    blocks = _reblock(em.blocks, tags)
    meta = {"final_permutation": list(em.layout.perm), "groups": [len(u) for u in groups]}
    return Circuit(n, tuple(gates), f"U[{n},{k}]/lnn", blocks, meta)


def _reblock(blocks, tags) -> tuple[Block, ...]:
    import bisect

    out = []
    for b in blocks:
        s, e = bisect.bisect_left(tags, b.start), bisect.bisect_left(tags, b.stop)
        if e > s:
            out.append(Block(s, e, b.label))
    return tuple(out)


def route_dicke_lnn(n: int, k: int, use_complement: bool | None = None) -> Circuit:
    """Nearest-neighbour Dicke preparation from |0...0>."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k exceeds n (n={n}, k={k})" if k > n else f"negative weight {k}")
    flip = resolve_complement(n, k, use_complement)
    w = n - k if flip else k
    gates = [x(q) for q in range(n - w + 1, n + 1)]
    blocks = [Block(0, len(gates), "init")] if gates else []
    meta = {"final_permutation": list(range(1, n + 1)), "groups": []}
    if w > 0:
        body = route_unk_lnn(n, w)
        off = len(gates)
        blocks += [Block(b.start + off, b.stop + off, b.label) for b in body.blocks]
        gates += body.gates
        meta = dict(body.meta)
    if flip:
        blocks.append(Block(len(gates), len(gates) + n, "flip"))
        gates += [x(q) for q in range(1, n + 1)]
    return Circuit(n, tuple(gates), f"D[{n},{k}]/lnn", tuple(blocks), meta)


# -- local decomposition ------------------------------------------------------

def _bridge_cnot(c: int, t: int) -> list[Gate]:
    d = abs(c - t)
    if d <= 1:
        return [cnot(c, t)]
    step = 1 if t > c else -1
    if d == 2:
        mid = c + step
        return [cnot(c, mid), cnot(mid, t), cnot(c, mid), cnot(mid, t)]
    # walk the control next to the target and back
    hops = [swap(w, w + step) if step > 0 else swap(w + step, w) for w in range(c, t - step, step)]
    return hops + [cnot(t - step, t)] + hops[::-1]


def _bridge_swap(a: int, b: int) -> list[Gate]:
    lo, hi = min(a, b), max(a, b)
    if hi - lo <= 1:
        return [swap(lo, hi)]
    path = [swap(w, w + 1) for w in range(lo, hi - 1)]
    return path + [swap(hi - 1, hi)] + path[::-1]


def _neighbour_on(gates: Sequence[Gate], i: int, step: int) -> Gate | None:
    """The nearest gate before (step=-1) or after (step=1) index i sharing a wire with gates[i]."""
    wires = set(gates[i].wires)
    j = i + step
    while 0 <= j < len(gates):
        if wires & set(gates[j].wires):
            return gates[j]
        j += step
    return None


def _absorb_swaps(gates: list[Gate]) -> list[Gate]:
    """Write a SWAP as three CNOTs when a CNOT on the same pair borders it.

    The triple is oriented so that its end CNOT repeats the bordering one;
    the cancel pass then removes the pair, and a SWAP next to a CNOT pair in
    both directions collapses to a single CNOT.
    """
    out = []
    for i, g in enumerate(gates):
        if g.kind is Kind.SWAP:
            pair = set(g.targets)
            after, before = _neighbour_on(gates, i, 1), _neighbour_on(gates, i, -1)
            if after is not None and after.kind is Kind.CNOT and set(after.wires) == pair:
                u, v = after.controls[0], after.targets[0]
                out += [cnot(u, v), cnot(v, u), cnot(u, v)]
                continue
            if before is not None and before.kind is Kind.CNOT and set(before.wires) == pair:
                u, v = before.controls[0], before.targets[0]
                out += [cnot(u, v), cnot(v, u), cnot(u, v)]
                continue
        out.append(g)
    return out


def localize(circuit: Circuit) -> Circuit:
    """Lower to CNOT + 1-qubit gates with every 2-qubit gate on adjacent wires."""
    pre = []
    for g in circuit.gates:
        line = g.kind is Kind.CCRY and max(g.wires) - min(g.wires) == 2 and \
            g.targets[0] in (min(g.wires), max(g.wires))
        pre.extend(decompose_ccry_line(g) if line else [g])
    low = transpile(Circuit(circuit.n, tuple(pre)), "cnot_ry")
    gates: list[Gate] = []
    for g in low.gates:
        if g.kind is Kind.CNOT:
            gates.extend(_bridge_cnot(g.controls[0], g.targets[0]))
        elif g.kind is Kind.SWAP:
            gates.extend(_bridge_swap(*g.targets))
        else:
            gates.append(g)
    gates, _ = _cancel(gates, list(range(len(gates))), kinds=(Kind.CNOT, Kind.SWAP))
    gates = _absorb_swaps(gates)
    gates, _ = _cancel(gates, list(range(len(gates))), kinds=(Kind.CNOT, Kind.SWAP))
    return Circuit(circuit.n, tuple(gates), circuit.label, (), dict(circuit.meta))


def lnn_resources(n: int, k: int) -> ResourceReport:
    """Counts and depth of the nearest-neighbour Dicke circuit after local decomposition."""
    return count_gates(localize(route_dicke_lnn(n, k)))
