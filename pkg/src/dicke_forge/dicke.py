"""Split-and-cyclic-shift blocks and the inductive Dicke-state unitary.

``build_unk(n, k)`` maps every |0^(n-l) 1^l> with l <= k to the Dicke state
D(n, l). It is a product of SCS_{m,k} blocks, each acting on the trailing
k+1 wires of the active m-wire prefix of the register.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .ir import Block, Circuit, ccry, cnot, compose, cry, x


@dataclass(frozen=True)
class ScsBlockSpec:
    """Block l of SCS_{n,k}; l = 1 is the two-qubit block, l >= 2 three-qubit."""

    n: int
    k: int
    l: int

    def __post_init__(self):
        if not 1 <= self.l <= self.k < self.n:
            raise ValueError(f"need 1 <= l <= k < n, got n={self.n}, k={self.k}, l={self.l}")

    @property
    def label(self) -> str:
        tail = "i" if self.l == 1 else f"ii_{self.l}"
        return f"SCS[{self.n},{self.k}]/{tail}"


def scs_angle(l: int, n: int) -> float:
    """Ry angle sending |0> to sqrt(l/n)|0> + sqrt((n-l)/n)|1>."""
    return 2.0 * math.acos(math.sqrt(l / n))


def build_block(spec: ScsBlockSpec) -> Circuit:
    n, l = spec.n, spec.l
    theta = scs_angle(l, n)
    if l == 1:
        gates = (cnot(n - 1, n), cry(theta, n, n - 1), cnot(n - 1, n))
    else:
        gates = (cnot(n - l, n), ccry(theta, n - l + 1, n, n - l), cnot(n - l, n))
    return Circuit(n, gates, spec.label).as_block()


def _check_nk(n: int, k: int, strict: bool) -> None:
    ok = 1 <= k < n if strict else 1 <= k <= n
    if not ok:
        rel = "<" if strict else "<="
        raise ValueError(f"need 1 <= k {rel} n, got n={n}, k={k}")


def build_scs(n: int, k: int) -> Circuit:
    """SCS_{n,k} on wires n-k..n: block (i) then (ii)_l for increasing l."""
    _check_nk(n, k, strict=True)
    parts = [build_block(ScsBlockSpec(n, k, l)) for l in range(1, k + 1)]
    return compose(parts, n, f"SCS[{n},{k}]")


def scs_sequence(n: int, k: int) -> list[tuple[int, int]]:
    """(m, k') of every SCS_{m,k'} in ``build_unk(n, k)``, in circuit order."""
    _check_nk(n, k, strict=False)
    return [(m, k) for m in range(n, k, -1)] + [(m, m - 1) for m in range(k, 1, -1)]


def build_unk(n: int, k: int) -> Circuit:
    parts = [build_scs(m, kk) for m, kk in scs_sequence(n, k)]
    return compose(parts, n, f"U[{n},{k}]")


def resolve_complement(n: int, k: int, use_complement: bool | None) -> bool:
    if use_complement is None:
        return k > n - k
    return bool(use_complement) and k > 0


def prepare_dicke(n: int, k: int, use_complement: bool | None = None) -> Circuit:
    """Circuit taking |0...0> to D(n, k).

    With the complement path, D(n, n-k) is prepared and then every wire is
    flipped. ``None`` picks whichever weight is smaller.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k exceeds n (n={n}, k={k})" if k > n else f"negative weight {k}")
    flip = resolve_complement(n, k, use_complement)
    w = n - k if flip else k
    prep = Circuit(n, tuple(x(q) for q in range(n - w + 1, n + 1)), "init")
    parts = [prep.as_block()]
    if w > 0:
        parts.append(build_unk(n, w))
    if flip:
        parts.append(Circuit(n, tuple(x(q) for q in range(1, n + 1)), "flip").as_block())
    return compose(parts, n, f"D[{n},{k}]")


def block_counts(circuit: Circuit) -> dict[str, int]:
    """Number of two-qubit (i) and three-qubit (ii) SCS blocks in a circuit."""
    out = {"i": 0, "ii": 0}
    for b in circuit.blocks:
        tail = b.label.rsplit("/", 1)[-1].rstrip("†")
        if tail == "i":
            out["i"] += 1
        elif tail.startswith("ii_"):
            out["ii"] += 1
    return out


def expected_block_counts(n: int, k: int) -> dict[str, int]:
    return {"i": n - 1, "ii": (n - k) * (k - 1) + sum(i - 2 for i in range(3, k + 1))}


def scs_blocks(circuit: Circuit) -> list[Block]:
    return [b for b in circuit.blocks if "/" in b.label]
