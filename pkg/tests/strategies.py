"""Hypothesis strategies for random gates and circuits."""
import math

from hypothesis import strategies as st

from dicke_forge.ir import Circuit, ccry, cnot, cry, mcx, phase, ry, swap, x

N = 5


@st.composite
def gates(draw, n=N, with_phase=True):
    kinds = ["X", "Ry", "CNOT", "CRy", "CCRy", "SWAP", "MCX"] + (["PhaseShift"] if with_phase else [])
    kind = draw(st.sampled_from(kinds))
    wires = draw(st.permutations(range(1, n + 1)))
    angle = draw(st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False))
    if kind == "X":
        return x(wires[0])
    if kind == "Ry":
        return ry(angle, wires[0])
    if kind == "PhaseShift":
        return phase(angle, wires[0])
    if kind == "CNOT":
        return cnot(wires[0], wires[1])
    if kind == "CRy":
        return cry(angle, wires[0], wires[1])
    if kind == "CCRy":
        return ccry(angle, wires[0], wires[1], wires[2])
    if kind == "SWAP":
        return swap(wires[0], wires[1])
    m = draw(st.integers(1, n - 1))
    return mcx(wires[:m], wires[m])


def circuits(with_phase=True):
    return st.lists(gates(with_phase=with_phase), max_size=25).map(lambda gs: Circuit(N, tuple(gs)))
