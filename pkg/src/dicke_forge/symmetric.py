"""Preparation and compression of permutation-symmetric pure states.

A symmetric state is sum_l e^(i phi_l) alpha_l D(n, l). Preparation loads the
weights onto the staircase states |0^(n-l) 1^l> with a chain of controlled Ry
rotations and phase shifts, then runs ``build_unk(n, n)``. Compression runs
that unitary backwards, turns the staircase into a one-hot marker and encodes
the marker position in binary on the bottom ceil(log2(n+1)) wires.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dicke import build_unk
from .ir import TWO_PI, Circuit, Gate, cnot, compose, cry, invert, mcx, phase, ry, swap
from .lnn import WirePermutation, localize, route_unk_lnn
from .sim import StateVector, dicke_oracle
from .transpile import decompose_mcx

NORM_TOL = 1e-12


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class SymmetricSpec:
    n: int
    alphas: tuple
    phis: tuple

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "phis", tuple(float(p) for p in self.phis))
        n = self.n
        if n < 1:
            raise SpecError(f"need n >= 1, got {n}")
        if len(self.alphas) != n + 1 or len(self.phis) != n + 1:
            raise SpecError(f"need {n + 1} magnitudes and phases, got {len(self.alphas)} and {len(self.phis)}")
        if any(not 0.0 <= a <= 1.0 for a in self.alphas):
            raise SpecError("magnitudes must lie in [0, 1]")
        if any(not 0.0 <= p < TWO_PI for p in self.phis):
            raise SpecError("phases must lie in [0, 2pi)")
        if self.phis[0] != 0.0:
            raise SpecError("phase of the all-zero weight must be 0")
        residual = abs(math.fsum(a * a for a in self.alphas) - 1.0)
        if residual > NORM_TOL:
            raise SpecError(f"squared magnitudes sum to 1 + {residual:.3g} (tolerance {NORM_TOL:g})")

    @classmethod
    def from_json(cls, text: str) -> SymmetricSpec:
        try:
            d = json.loads(text)
            n, alphas = int(d["n"]), d["alphas"]
        except (ValueError, KeyError, TypeError) as exc:
            raise SpecError(f"malformed spec: {exc}") from None
        phis = d.get("phis", [0.0] * len(alphas))
        return cls(n, tuple(alphas), tuple(phis))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "alphas": list(self.alphas), "phis": list(self.phis)})

    @classmethod
    def dicke(cls, n: int, k: int) -> SymmetricSpec:
        alphas = [0.0] * (n + 1)
        alphas[k] = 1.0
        return cls(n, tuple(alphas), (0.0,) * (n + 1))

    @classmethod
    def product(cls, n: int, t: float) -> SymmetricSpec:
        """(cos t |0> + sin t |1>)^n, for 0 <= t <= pi/2."""
        a, b = math.cos(t), math.sin(t)
        alphas = [a ** (n - l) * b ** l * math.sqrt(math.comb(n, l)) for l in range(n + 1)]
        return cls(n, tuple(alphas), (0.0,) * (n + 1))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> SymmetricSpec:
        raw = np.abs(rng.normal(size=n + 1))
        alphas = raw / np.sqrt(np.sum(raw * raw))
        phis = rng.uniform(0.0, TWO_PI, size=n + 1)
        phis[0] = 0.0
        return cls(n, tuple(np.minimum(alphas, 1.0)), tuple(phis))

    def target(self) -> StateVector:
        amps = sum(a * np.exp(1j * p) * dicke_oracle(self.n, l).amps
                   for l, (a, p) in enumerate(zip(self.alphas, self.phis)))
        return StateVector(self.n, amps)


@dataclass(frozen=True)
class AngleSchedule:
    betas: tuple
    psis: tuple


def coeffs_to_angles(spec: SymmetricSpec) -> AngleSchedule:
    """beta_l = alpha_l / sqrt(remaining mass), psi_l = phi_l - phi_(l-1)."""
    sq = [a * a for a in spec.alphas]
    betas = []
    for l, a in enumerate(spec.alphas):
        # summing the tail directly avoids cancellation in 1 - (head sum)
        tail = math.fsum(sq[l:])
        betas.append(min(1.0, a / math.sqrt(tail)) if tail > 0.0 else 0.0)
    psis = [0.0] + [spec.phis[l] - spec.phis[l - 1] for l in range(1, spec.n + 1)]
    return AngleSchedule(tuple(betas), tuple(psis))


def angles_to_coeffs(sched: AngleSchedule) -> tuple[list[float], list[float]]:
    alphas, carry = [], 1.0
    for b in sched.betas:
        alphas.append(b * carry)
        carry *= math.sqrt(max(0.0, 1.0 - b * b))
    phis = list(np.cumsum(sched.psis))
    return alphas, phis


def build_symmetric_prep(spec: SymmetricSpec) -> Circuit:
    n = spec.n
    sched = coeffs_to_angles(spec)
    load = [ry(2.0 * math.acos(sched.betas[0]), n)]
    load += [cry(2.0 * math.acos(sched.betas[l]), n - l + 1, n - l) for l in range(1, n)]
    phases = [phase(sched.psis[l], n - l + 1) for l in range(1, n + 1)]
    phases = [g for g in phases if g.angle != 0.0]
    parts = [Circuit(n, tuple(load), "load").as_block()]
    if phases:
        parts.append(Circuit(n, tuple(phases), "phases").as_block())
    parts.append(build_unk(n, n))
    return compose(parts, n, f"Sym[{n}]")


# -- compression --------------------------------------------------------------

def register_size(n: int) -> int:
    """ceil(log2(n + 1)): qubits needed to hold a weight 0..n."""
    return n.bit_length()


def build_onehot_stair(n: int) -> Circuit:
    """|0^(n-l) 1^l> -> one-hot marker on wire n-l+1."""
    gates = tuple(cnot(n - l, n - l + 1) for l in range(1, n))
    return Circuit(n, gates, "stair").as_block()


def _encoder_wires(n: int, l: int) -> list[int]:
    """Register wires holding the set bits of l (wire n is the least significant bit)."""
    return [n - i for i in range(register_size(n)) if l >> i & 1]


def build_binary_encoder(n: int, lnn: bool = False) -> Circuit:
    """One-hot marker on wire n-l+1 -> |0...0>|l> with l in binary on the bottom wires.

    For each l (increasing) the marker fans out into the bits of l and is then
    cleared by a multi-controlled X on those bits. Markers that already sit on
    the single bit encoding their own l are left alone.

    With ``lnn`` the marker wire is always adjacent to the top of the register:
    after each step above the register the cleared wire is swapped down through
    it, so the register climbs one wire. Multi-controlled X gates are lowered on
    the spot, borrowing only wires inside that window.
    """
    m = register_size(n)
    reg_top = n - m + 1
    layout = WirePermutation.identity(n)
    gates: list[Gate] = []
    blocks = []
    for l in range(1, n + 1):
        p = n - l + 1
        bits = _encoder_wires(n, l)
        if bits == [p]:
            continue
        start = len(gates)
        phys_p = layout.wire(p)
        phys_bits = [layout.wire(w) for w in bits]
        gates += [cnot(phys_p, w) for w in phys_bits]
        gate = mcx(phys_bits, phys_p)
        if lnn:
            lo = max(1, min(phys_bits + [phys_p]) - 1)
            hi = max(phys_bits + [phys_p])
            gates += decompose_mcx(gate, range(lo, hi + 1))
            if p < reg_top:
                assert min(layout.wire(w) for w in range(reg_top, n + 1)) == phys_p + 1
                for _ in range(m):
                    w = layout.wire(p)
                    gates.append(swap(w, w + 1))
                    layout.swap(w)
        else:
            gates.append(gate)
        blocks.append((start, len(gates), f"encode[{l}]"))
    meta = {}
    if lnn:
        meta["final_permutation"] = list(layout.perm)
    return Circuit(n, tuple(gates), "encoder", tuple(blocks), meta)


def build_compression(n: int, lnn: bool = False) -> Circuit:
    """Symmetric n-qubit state -> |0^(n-m)> (x) weight register on the bottom m wires.

    The nearest-neighbour variant leaves the register on the top m wires; the
    layout is in ``meta["final_permutation"]``.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not lnn:
        parts = [invert(build_unk(n, n)), build_onehot_stair(n), build_binary_encoder(n)]
        return compose(parts, n, f"Compress[{n}]")
    # the routed unitary differs from build_unk only by a wire permutation of its
    # output, which is invisible on symmetric inputs
    front = invert(route_unk_lnn(n, n))
    enc = build_binary_encoder(n, lnn=True)
    body = compose([front, build_onehot_stair(n), enc], n, f"Compress[{n}]/lnn",
                   {"final_permutation": enc.meta["final_permutation"]})
    return localize(body)


def build_decompression(n: int, lnn: bool = False) -> Circuit:
    return invert(build_compression(n, lnn))


def compressed_state(n: int, coeffs) -> StateVector:
    """|0^(n-m)> (x) sum_l c_l |l>: the expected compression output."""
    amps = np.zeros(2 ** n, dtype=np.complex128)
    for l, c in enumerate(coeffs):
        amps[l] = c
    return StateVector(n, amps)
