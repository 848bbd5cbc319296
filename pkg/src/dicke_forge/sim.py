"""Dense statevector simulation and analytic reference states.

Amplitude index convention: wire 1 is the most significant bit, so the ket
string of an index reads wire 1 first, exactly as the circuits are drawn.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .ir import Circuit, Gate, Kind, require_valid

DEFAULT_MAX_QUBITS = 24
ATOL = 1e-9


def max_qubits() -> int:
    raw = os.environ.get("DICKE_FORGE_MAX_QUBITS")
    return int(raw) if raw else DEFAULT_MAX_QUBITS


@dataclass
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= max_qubits():
            raise ValueError(f"qubit count {self.n} outside 1..{max_qubits()}")
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (2 ** self.n,):
            raise ValueError(f"expected {2 ** self.n} amplitudes, got shape {self.amps.shape}")

    def copy(self) -> StateVector:
        return StateVector(self.n, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def allclose(self, other: StateVector, atol: float = ATOL) -> bool:
        return self.n == other.n and bool(np.allclose(self.amps, other.amps, rtol=0, atol=atol))

    def nonzero(self, tol: float = 1e-12) -> dict[str, complex]:
        idx = np.flatnonzero(np.abs(self.amps) > tol)
        return {format(int(i), f"0{self.n}b"): complex(self.amps[i]) for i in idx}

    def __add__(self, other: StateVector) -> StateVector:
        _same_n(self, other)
        return StateVector(self.n, self.amps + other.amps)

    def __mul__(self, c: complex) -> StateVector:
        return StateVector(self.n, self.amps * c)

    __rmul__ = __mul__


def _same_n(a: StateVector, b: StateVector) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n} qubits")


def basis_state(n: int, bits: str) -> StateVector:
    if len(bits) != n or set(bits) - {"0", "1"}:
        raise ValueError(f"expected a {n}-character binary string, got {bits!r}")
    amps = np.zeros(2 ** n, dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return StateVector(n, amps)


def zero_state(n: int) -> StateVector:
    return basis_state(n, "0" * n)


def ket(bits: str) -> StateVector:
    return basis_state(len(bits), bits)


def tensor(*states: StateVector) -> StateVector:
    amps = np.ones(1, dtype=np.complex128)
    for s in states:
        amps = np.kron(amps, s.amps)
    return StateVector(sum(s.n for s in states), amps)


def weight_indices(n: int, k: int) -> np.ndarray:
    """Amplitude indices of all n-bit strings with exactly k ones."""
    return np.array([sum(1 << (n - 1 - p) for p in pos) for pos in combinations(range(n), k)],
                    dtype=np.int64)


def dicke_oracle(n: int, k: int) -> StateVector:
    if not 0 <= k <= n:
        raise ValueError(f"weight {k} outside 0..{n}")
    amps = np.zeros(2 ** n, dtype=np.complex128)
    amps[weight_indices(n, k)] = 1.0 / math.sqrt(math.comb(n, k))
    return StateVector(n, amps)


def check_dicke_recursion(n: int, l: int, atol: float = 1e-12) -> bool:
    """D(n,l) == sqrt(l/n) D(n-1,l-1)|1> + sqrt((n-l)/n) D(n-1,l)|0>."""
    if not 1 <= l <= n - 1:
        raise ValueError(f"need 1 <= l <= n-1, got n={n}, l={l}")
    one, zero = ket("1"), ket("0")
    rhs = (math.sqrt(l / n) * tensor(dicke_oracle(n - 1, l - 1), one)
           + math.sqrt((n - l) / n) * tensor(dicke_oracle(n - 1, l), zero))
    return dicke_oracle(n, l).allclose(rhs, atol)


def fidelity(a: StateVector, b: StateVector) -> float:
    _same_n(a, b)
    return float(min(1.0, abs(np.vdot(a.amps, b.amps))))


# -- gate kernel --------------------------------------------------------------

def _apply_inplace(psi: np.ndarray, n: int, g: Gate) -> None:
    """Update ``psi`` (shape [2]*n) in place. Axis w-1 is wire w."""
    sel: list = [slice(None)] * n
    for c in g.controls:
        sel[c - 1] = 1
    if g.kind is Kind.SWAP:
        a, b = g.targets
        s01, s10 = list(sel), list(sel)
        s01[a - 1], s01[b - 1] = 0, 1
        s10[a - 1], s10[b - 1] = 1, 0
        s01, s10 = tuple(s01), tuple(s10)
        tmp = psi[s01].copy()
        psi[s01] = psi[s10]
        psi[s10] = tmp
        return
    if g.kind is Kind.UNITARY:
        k = len(g.targets)
        axes = [t - 1 for t in g.targets]
        view = np.moveaxis(psi, axes, range(k))
        flat = view.reshape(2 ** k, -1)
        flat[...] = np.asarray(g.matrix, dtype=np.complex128) @ flat
        # reshape of a moved view may copy; write back explicitly
        np.moveaxis(psi, axes, range(k))[...] = flat.reshape(view.shape)
        return
    t = g.targets[0] - 1
    s0, s1 = list(sel), list(sel)
    s0[t], s1[t] = 0, 1
    s0, s1 = tuple(s0), tuple(s1)
    if g.kind in (Kind.X, Kind.CNOT, Kind.MCX):
        tmp = psi[s0].copy()
        psi[s0] = psi[s1]
        psi[s1] = tmp
    elif g.kind is Kind.PHASE:
        psi[s1] *= np.exp(1j * g.angle)
    else:
        c, s = math.cos(g.angle / 2), math.sin(g.angle / 2)
        a0 = psi[s0].copy()
        a1 = psi[s1]
        psi[s0] = c * a0 - s * a1
        psi[s1] = s * a0 + c * a1


def _check_wires(g: Gate, n: int) -> None:
    if any(w < 1 or w > n for w in g.wires):
        raise ValueError(f"gate {g} touches a wire outside 1..{n}")


def apply(state: StateVector, gate: Gate) -> StateVector:
    _check_wires(gate, state.n)
    out = state.amps.copy()
    _apply_inplace(out.reshape([2] * state.n), state.n, gate)
    return StateVector(state.n, out)


def apply_gates(state: StateVector, gates: Iterable[Gate]) -> StateVector:
    out = state.amps.copy()
    psi = out.reshape([2] * state.n)
    for g in gates:
        _check_wires(g, state.n)
        _apply_inplace(psi, state.n, g)
    return StateVector(state.n, out)


def simulate(circuit: Circuit, state: StateVector | None = None) -> StateVector:
    """Run the circuit on ``state`` (default |0...0>)."""
    require_valid(circuit)
    if state is None:
        state = zero_state(circuit.n)
    if state.n != circuit.n:
        raise ValueError(f"dimension mismatch: circuit has {circuit.n} wires, state {state.n} qubits")
    return apply_gates(state, circuit.gates)


def simulate_matrix(circuit: Circuit, columns: np.ndarray | None = None) -> np.ndarray:
    """Images of basis states as columns (all 2^n by default, else the given indices)."""
    n = circuit.n
    dim = 2 ** n
    cols = np.arange(dim) if columns is None else np.asarray(columns)
    block = np.zeros((dim, len(cols)), dtype=np.complex128)
    block[cols, np.arange(len(cols))] = 1.0
    psi = block.reshape([2] * n + [len(cols)])
    for g in circuit.gates:
        _check_wires(g, n)
        _apply_inplace(psi, n + 1, g)
    return block


def unpermute(state: StateVector, perm) -> StateVector:
    """Undo a wire permutation: ``perm[w-1]`` is the logical qubit sitting on wire w."""
    perm = list(perm)
    if sorted(perm) != list(range(1, state.n + 1)):
        raise ValueError(f"not a permutation of 1..{state.n}: {perm}")
    psi = state.amps.reshape([2] * state.n)
    out = np.moveaxis(psi, range(state.n), [p - 1 for p in perm])
    return StateVector(state.n, np.ascontiguousarray(out).reshape(-1))


def dump_state(state: StateVector, tol: float = 1e-12) -> str:
    rows = [f"{bits}\t{z.real:.17g}\t{z.imag:.17g}" for bits, z in sorted(state.nonzero(tol).items())]
    return "\n".join(rows) + ("\n" if rows else "")
