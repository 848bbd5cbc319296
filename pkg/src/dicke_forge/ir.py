"""Gate-level circuit representation.

Wires are numbered 1..n from the top. A ``Circuit`` is an immutable gate list
plus optional block boundaries (used for tracing) and free-form metadata
(used by the LNN router to record the final wire permutation).
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class Kind(str, Enum):
    X = "X"
    RY = "Ry"
    PHASE = "PhaseShift"
    CNOT = "CNOT"
    CRY = "CRy"
    CCRY = "CCRy"
    SWAP = "SWAP"
    MCX = "MCX"
    # explicit small unitary, simulated natively (reference constructions only)
    UNITARY = "Unitary"


ROTATIONS = frozenset({Kind.RY, Kind.CRY, Kind.CCRY})
ANGLED = ROTATIONS | {Kind.PHASE}
ABSTRACT = frozenset({Kind.CRY, Kind.CCRY, Kind.MCX})
PRIMITIVE = frozenset({Kind.X, Kind.RY, Kind.PHASE, Kind.CNOT, Kind.SWAP})

# (controls, targets) arity; None = "at least one"
_ARITY = {
    Kind.X: (0, 1),
    Kind.RY: (0, 1),
    Kind.PHASE: (0, 1),
    Kind.CNOT: (1, 1),
    Kind.CRY: (1, 1),
    Kind.CCRY: (2, 1),
    Kind.SWAP: (0, 2),
    Kind.MCX: (None, 1),
    Kind.UNITARY: (0, None),
}


def _dagger(name: str) -> str:
    return name[:-1] if name.endswith("†") else name + "†"


@dataclass(frozen=True)
class Gate:
    kind: Kind
    controls: tuple[int, ...] = ()
    targets: tuple[int, ...] = ()
    angle: float | None = None
    # UNITARY only: row-major complex matrix over ``targets`` (first target = MSB)
    matrix: tuple[tuple[complex, ...], ...] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    @property
    def wires(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def unitary(self) -> np.ndarray:
        """Matrix of the target action (controls excluded)."""
        if self.kind in (Kind.X, Kind.CNOT, Kind.MCX):
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind in ROTATIONS:
            c, s = math.cos(self.angle / 2), math.sin(self.angle / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if self.kind is Kind.PHASE:
            return np.diag([1.0, np.exp(1j * self.angle)])
        if self.kind is Kind.SWAP:
            return np.eye(4, dtype=complex)[[0, 2, 1, 3]]
        return np.array(self.matrix, dtype=complex)

    def inverse(self) -> Gate:
        if self.kind is Kind.PHASE:
            return replace(self, angle=_norm_phase(-self.angle))
        if self.kind in ROTATIONS:
            return replace(self, angle=-self.angle)
        if self.kind is Kind.UNITARY:
            m = np.array(self.matrix, dtype=complex).conj().T
            return replace(self, matrix=_freeze(m), name=_dagger(self.name))
        return self

    def __str__(self) -> str:
        head = self.kind.value if not self.name else f"{self.kind.value}[{self.name}]"
        if self.angle is not None:
            head += f"({self.angle:.6g})"
        ctl = ",".join(map(str, self.controls))
        tgt = ",".join(map(str, self.targets))
        return f"{head} {ctl}->{tgt}" if ctl else f"{head} {tgt}"


def _norm_phase(psi: float) -> float:
    psi = math.fmod(psi, TWO_PI)
    if psi < 0:
        psi += TWO_PI
    return 0.0 if psi >= TWO_PI else psi


def _freeze(m) -> tuple[tuple[complex, ...], ...]:
    return tuple(tuple(complex(v) for v in row) for row in np.asarray(m))


# -- constructors -------------------------------------------------------------

def x(t: int) -> Gate:
    return Gate(Kind.X, (), (t,))


def ry(angle: float, t: int) -> Gate:
    return Gate(Kind.RY, (), (t,), angle)


def phase(angle: float, t: int) -> Gate:
    return Gate(Kind.PHASE, (), (t,), _norm_phase(angle))


def cnot(c: int, t: int) -> Gate:
    return Gate(Kind.CNOT, (c,), (t,))


def cry(angle: float, c: int, t: int) -> Gate:
    return Gate(Kind.CRY, (c,), (t,), angle)


def ccry(angle: float, c1: int, c2: int, t: int) -> Gate:
    return Gate(Kind.CCRY, (c1, c2), (t,), angle)


def swap(a: int, b: int) -> Gate:
    return Gate(Kind.SWAP, (), (min(a, b), max(a, b)))


def mcx(controls: Iterable[int], t: int) -> Gate:
    return Gate(Kind.MCX, tuple(controls), (t,))


def unitary(matrix, wires: Sequence[int], name: str = "") -> Gate:
    return Gate(Kind.UNITARY, (), tuple(wires), matrix=_freeze(matrix), name=name)


# -- circuits -----------------------------------------------------------------

class Block(NamedTuple):
    start: int
    stop: int
    label: str


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = ()
    label: str = ""
    blocks: tuple[Block, ...] = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "blocks", tuple(Block(*b) for b in self.blocks))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def as_block(self, label: str | None = None) -> Circuit:
        """The same circuit with its whole gate list marked as one block."""
        lab = self.label if label is None else label
        return replace(self, blocks=(Block(0, len(self.gates), lab),) if self.gates else ())

    def widen(self, n: int) -> Circuit:
        if n < self.n:
            raise ValueError(f"cannot narrow a {self.n}-wire circuit to {n} wires")
        return replace(self, n=n)


def compose(parts: Iterable[Circuit | Gate], n: int, label: str = "", meta: dict | None = None) -> Circuit:
    """Concatenate circuits and loose gates, keeping block boundaries."""
    gates: list[Gate] = []
    blocks: list[Block] = []
    for part in parts:
        if isinstance(part, Gate):
            gates.append(part)
            continue
        if part.n > n:
            raise ValueError(f"part '{part.label}' has {part.n} wires, more than {n}")
        off = len(gates)
        blocks.extend(Block(b.start + off, b.stop + off, b.label) for b in part.blocks)
        gates.extend(part.gates)
    return Circuit(n, tuple(gates), label, tuple(blocks), dict(meta or {}))


# -- validation ---------------------------------------------------------------

class ValidationError(ValueError):
    pass


def _gate_violations(g: Gate, n: int) -> list[str]:
    out = []
    want_c, want_t = _ARITY[g.kind]
    nc, nt = len(g.controls), len(g.targets)
    if (want_c is None and nc < 1) or (want_c is not None and nc != want_c):
        out.append(f"{g.kind.value} expects {want_c or '>=1'} controls, got {nc}")
    if (want_t is None and nt < 1) or (want_t is not None and nt != want_t):
        out.append(f"{g.kind.value} expects {want_t or '>=1'} targets, got {nt}")
    if any(w < 1 or w > n for w in g.wires):
        out.append("wire out of range")
    if len(set(g.wires)) != len(g.wires):
        out.append("operands not disjoint")
    if g.kind in ANGLED:
        if g.angle is None or not math.isfinite(g.angle):
            out.append("angle missing or not finite")
        elif g.kind is Kind.PHASE and not 0.0 <= g.angle < TWO_PI:
            out.append("phase angle outside [0, 2pi)")
    elif g.angle is not None:
        out.append(f"{g.kind.value} takes no angle")
    if g.kind is Kind.UNITARY:
        dim = 2 ** nt
        m = None if g.matrix is None else np.array(g.matrix, dtype=complex)
        if m is None or m.shape != (dim, dim):
            out.append("matrix shape does not match target count")
        elif not np.allclose(m.conj().T @ m, np.eye(dim), atol=1e-10):
            out.append("matrix not unitary")
    return out


def validate(circuit: Circuit) -> list[str]:
    """All invariant violations, as ``"gate <i>: <rule>"`` strings."""
    out = []
    if circuit.n < 1:
        out.append("circuit: wire count must be positive")
    for i, g in enumerate(circuit.gates):
        out.extend(f"gate {i}: {v}" for v in _gate_violations(g, circuit.n))
    for b in circuit.blocks:
        if not 0 <= b.start <= b.stop <= len(circuit.gates):
            out.append(f"block '{b.label}': bounds {b.start}..{b.stop} outside gate list")
    return out


def require_valid(circuit: Circuit) -> None:
    bad = validate(circuit)
    if bad:
        raise ValidationError("validation failed: " + "; ".join(bad[:5]))


# -- scheduling and resources -------------------------------------------------

def schedule_layers(circuit: Circuit) -> list[int]:
    """ASAP layer (0-based) of every gate, in list order."""
    require_valid(circuit)
    front = [0] * (circuit.n + 1)
    layers = []
    for g in circuit.gates:
        layer = max(front[w] for w in g.wires)
        for w in g.wires:
            front[w] = layer + 1
        layers.append(layer)
    return layers


def schedule_depth(circuit: Circuit) -> int:
    layers = schedule_layers(circuit)
    return max(layers) + 1 if layers else 0


def block_depth(circuit: Circuit) -> int:
    """ASAP depth with every block collapsed into one gate on the union of its wires.

    Gates outside any block count individually; blocks must not overlap.
    """
    require_valid(circuit)
    starts = {b.start: b for b in circuit.blocks if b.stop > b.start}
    front = [0] * (circuit.n + 1)
    depth, i = 0, 0
    while i < len(circuit.gates):
        b = starts.get(i)
        stop = b.stop if b else i + 1
        wires = {w for g in circuit.gates[i:stop] for w in g.wires}
        layer = max(front[w] for w in wires) + 1
        for w in wires:
            front[w] = layer
        depth = max(depth, layer)
        i = stop
    return depth


@dataclass(frozen=True)
class ResourceReport:
    counts: dict
    depth: int
    lnn_valid: bool
    n: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, kind: Kind | str) -> int:
        return self.counts[Kind(kind).value]

    def to_dict(self) -> dict:
        return {"n": self.n, "depth": self.depth, "lnn_valid": self.lnn_valid,
                "total": self.total, "counts": dict(self.counts)}


def count_gates(circuit: Circuit) -> ResourceReport:
    from .lnn import check_lnn

    depth = schedule_depth(circuit)
    tally = Counter(g.kind.value for g in circuit.gates)
    counts = {k.value: tally.get(k.value, 0) for k in Kind}
    return ResourceReport(counts, depth, check_lnn(circuit), circuit.n)


# -- inversion ----------------------------------------------------------------

_META_FLIP = {"final_permutation": "initial_permutation",
              "initial_permutation": "final_permutation"}


def invert(circuit: Circuit) -> Circuit:
    """Reverse the gate list and invert each gate.

    Block ranges are mirrored and labels toggle a trailing dagger, so that
    ``invert(invert(c)) == c``. Permutation metadata swaps initial/final.
    """
    require_valid(circuit)
    m = len(circuit.gates)
    gates = tuple(g.inverse() for g in reversed(circuit.gates))
    blocks = tuple(Block(m - b.stop, m - b.start, _dagger(b.label)) for b in reversed(circuit.blocks))
    meta = {_META_FLIP.get(k, k): v for k, v in circuit.meta.items()}
    return Circuit(circuit.n, gates, _dagger(circuit.label) if circuit.label else "", blocks, meta)
