import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dicke_forge.dicke import build_unk, prepare_dicke
from dicke_forge.ir import ABSTRACT, Circuit, Kind, ccry, cnot, count_gates, cry, mcx, ry, x
from dicke_forge.sim import basis_state, ket, simulate, simulate_matrix
from dicke_forge.symmetric import build_compression
from dicke_forge.transpile import (cancel_adjacent_cnots, decompose_ccry, decompose_ccry_line, decompose_cry,
                                   decompose_mcx, rearrange_cnots, toffoli, transpile)
from oracles import gate_matrix

# measured over n <= 20, k <= n/2; maxima at (n, k) = (20, 1)
CNOT_C = Fraction(-6, 5)
RY_C = Fraction(-21, 10)


def as_matrix(gates, n):
    return simulate_matrix(Circuit(n, tuple(gates)))


class TestCry:
    @pytest.mark.parametrize("angle", [0.0, 2 * math.acos(math.sqrt(0.5)), 1.234, -0.7, math.pi])
    def test_exhaustive(self, angle):
        g = cry(angle, 1, 2)
        assert np.allclose(as_matrix(decompose_cry(g), 2), gate_matrix(g, 2), atol=1e-12)

    def test_shape(self):
        low = decompose_cry(cry(0.8, 2, 1))
        assert [g.kind for g in low] == [Kind.RY, Kind.CNOT, Kind.RY, Kind.CNOT]
        assert low[0].angle == pytest.approx(0.4) and low[2].angle == pytest.approx(-0.4)

    def test_zero_is_identity(self):
        assert np.allclose(as_matrix(decompose_cry(cry(0.0, 1, 2)), 2), np.eye(4), atol=1e-15)

    def test_control_on(self):
        th = 0.37
        out = simulate(Circuit(2, tuple(decompose_cry(cry(2 * th, 1, 2)))), ket("10"))
        assert np.allclose(out.amps, [0, 0, math.cos(th), math.sin(th)], atol=1e-12)

    def test_wrong_kind(self):
        with pytest.raises(ValueError):
            decompose_cry(ry(0.1, 1))


class TestCcry:
    @pytest.mark.parametrize("angle", [0.0, 0.5, 2 * math.acos(math.sqrt(1 / 3)), math.pi, -2.1])
    @pytest.mark.parametrize("wires", [(1, 2, 3), (3, 1, 2), (2, 3, 1)])
    def test_exhaustive(self, angle, wires):
        g = ccry(angle, *wires)
        assert np.allclose(as_matrix(decompose_ccry(g), 3), gate_matrix(g, 3), atol=1e-12)

    def test_template(self):
        low = decompose_ccry(ccry(1.0, 1, 2, 3))
        assert [(g.kind, g.wires) for g in low] == [
            (Kind.CNOT, (1, 3)), (Kind.RY, (3,)), (Kind.CNOT, (2, 3)), (Kind.RY, (3,)),
            (Kind.CNOT, (1, 3)), (Kind.RY, (3,)), (Kind.CNOT, (2, 3)), (Kind.RY, (3,))]
        assert [g.angle for g in low if g.kind is Kind.RY] == [-0.25, 0.25, -0.25, 0.25]

    def test_both_controls_on(self):
        th = 0.9
        out = simulate(Circuit(3, tuple(decompose_ccry(ccry(2 * th, 1, 2, 3)))), ket("110"))
        want = math.cos(th) * ket("110").amps + math.sin(th) * ket("111").amps
        assert np.allclose(out.amps, want, atol=1e-12)

    def test_wrong_kind(self):
        with pytest.raises(ValueError):
            decompose_ccry(cry(0.1, 1, 2))


class TestCcryLine:
    @pytest.mark.parametrize("angle", [0.0, 0.5, math.pi, -2.1])
    @pytest.mark.parametrize("wires", [(1, 2, 3), (2, 1, 3), (3, 2, 1), (2, 3, 1)])
    def test_exhaustive(self, angle, wires):
        g = ccry(angle, *wires)
        assert np.allclose(as_matrix(decompose_ccry_line(g), 3), gate_matrix(g, 3), atol=1e-12)

    def test_adjacent_only(self):
        low = decompose_ccry_line(ccry(0.3, 3, 2, 1))
        assert all(abs(g.wires[0] - g.wires[1]) == 1 for g in low if g.kind is Kind.CNOT)

    @pytest.mark.parametrize("wires", [(1, 3, 2), (1, 2, 4)])
    def test_rejects_other_layouts(self, wires):
        with pytest.raises(ValueError):
            decompose_ccry_line(ccry(0.3, *wires))


class TestMcx:
    def test_m1(self):
        assert decompose_mcx(mcx((2,), 1)) == [cnot(2, 1)]

    def test_toffoli_truth_table(self):
        low = toffoli(1, 2, 3)
        assert sum(g.kind is Kind.CNOT for g in low) == 6
        for idx in range(8):
            bits = format(idx, "03b")
            want = bits[:2] + (str(1 - int(bits[2])) if bits[:2] == "11" else bits[2])
            out = simulate(Circuit(3, tuple(low)), ket(bits))
            assert np.allclose(out.amps, ket(want).amps, atol=1e-12), bits

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    @pytest.mark.parametrize("n_scratch", [0, 1, 2])
    def test_exhaustive_small(self, m, n_scratch):
        n = m + 1 + n_scratch
        g = mcx(tuple(range(1, m + 1)), m + 1)
        scratch = list(range(m + 2, n + 1))
        low = decompose_mcx(g, scratch)
        assert all(h.kind not in ABSTRACT for h in low)
        assert np.allclose(as_matrix(low, n), gate_matrix(g, n), atol=1e-12)

    def test_scattered_wires(self):
        g = mcx((5, 1, 3), 2)
        for scratch in ([], [4], [4, 6]):
            assert np.allclose(as_matrix(decompose_mcx(g, scratch), 6), gate_matrix(g, 6), atol=1e-12)

    @pytest.mark.parametrize("m", [5, 6, 7, 8])
    @pytest.mark.parametrize("n_scratch", [0, 1, 8])
    def test_random_basis_larger(self, m, n_scratch, rng):
        n_scratch = min(n_scratch, m - 2)
        n = m + 1 + n_scratch
        g = mcx(tuple(range(2, m + 2)), 1)
        low = Circuit(n, tuple(decompose_mcx(g, list(range(m + 2, n + 1)))))
        cols = list(rng.integers(0, 2 ** n, size=40)) + [2 ** n - 1, 2 ** (n - 1) - 1]
        got = simulate_matrix(low, cols)
        for j, idx in enumerate(cols):
            want = simulate(Circuit(n, (g,)), basis_state(n, format(int(idx), f"0{n}b")))
            assert np.allclose(got[:, j], want.amps, atol=1e-9)

    def test_linear_with_scratch(self):
        def cnots(m, s):
            return sum(h.kind is Kind.CNOT for h in decompose_mcx(mcx(tuple(range(1, m + 1)), m + 1),
                                                                  list(range(m + 2, m + 2 + s))))
        assert [cnots(m, 1) for m in range(5, 30)] == [48 * (m - 3) for m in range(5, 30)]
        assert [cnots(m, m - 2) for m in range(3, 30)] == [24 * (m - 2) for m in range(3, 30)]

    def test_scratch_overlapping_gate_ignored(self):
        g = mcx((1, 2, 3), 4)
        low = decompose_mcx(g, [1, 4])
        assert np.allclose(as_matrix(low, 4), gate_matrix(g, 4), atol=1e-12)


class TestCancel:
    def test_pair(self):
        c = Circuit(2, (cnot(1, 2), cnot(1, 2)))
        assert len(cancel_adjacent_cnots(c)) == 0

    def test_disjoint_interposer(self):
        c = Circuit(3, (cnot(1, 2), ry(0.3, 3), cnot(1, 2)))
        assert cancel_adjacent_cnots(c).gates == (ry(0.3, 3),)

    def test_blocking_interposer(self):
        c = Circuit(3, (cnot(1, 2), ry(0.3, 2), cnot(1, 2)))
        assert cancel_adjacent_cnots(c) == c

    def test_reversed_pair_not_cancelled(self):
        c = Circuit(2, (cnot(1, 2), cnot(2, 1)))
        assert cancel_adjacent_cnots(c) == c

    def test_nested(self):
        c = Circuit(3, (cnot(1, 2), cnot(2, 3), cnot(2, 3), cnot(1, 2)))
        assert len(cancel_adjacent_cnots(c)) == 0

    def test_odd_run(self):
        c = Circuit(2, (cnot(1, 2),) * 3)
        assert cancel_adjacent_cnots(c).gates == (cnot(1, 2),)

    def test_rearrangement(self):
        # CNOT(a,t) . CNOT(b,t) . CNOT(a,b)  ->  CNOT(a,b) . CNOT(b,t)
        c = Circuit(3, (cnot(1, 3), cnot(2, 3), cnot(1, 2)))
        r = rearrange_cnots(c)
        assert r.gates == (cnot(1, 2), cnot(2, 3))
        assert np.allclose(simulate_matrix(r), simulate_matrix(c), atol=1e-12)

    def test_unk_5_3_strictly_fewer(self):
        with_c = count_gates(transpile(build_unk(5, 3)))["CNOT"]
        without = count_gates(transpile(build_unk(5, 3), cancel=False))["CNOT"]
        assert with_c < without
        assert without == 2 * 4 + 4 * 5 + 2 * 9
        assert with_c == 4 * 4 + 5 * 5

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(1, 5), st.integers(1, 5), st.booleans(), st.floats(-3, 3)),
                    max_size=30))
    def test_monotone_and_sound(self, spec):
        gates = []
        for a, b, is_cnot, th in spec:
            if is_cnot and a != b:
                gates.append(cnot(a, b))
            else:
                gates.append(ry(th, a))
        c = Circuit(5, tuple(gates))
        for p in (cancel_adjacent_cnots, rearrange_cnots):
            out = p(c)
            assert len(out) <= len(c)
            assert np.allclose(simulate_matrix(out), simulate_matrix(c), atol=1e-9)

    @pytest.mark.parametrize("n", [9, 10, 11, 12])
    def test_random_basis_large(self, n, rng):
        c = transpile(build_unk(n, n // 2), cancel=False)
        cols = rng.integers(0, 2 ** n, size=50)
        ref = simulate_matrix(c, cols)
        for p in (cancel_adjacent_cnots, rearrange_cnots,
                  lambda z: cancel_adjacent_cnots(rearrange_cnots(z))):
            assert np.allclose(simulate_matrix(p(c), cols), ref, atol=1e-9)


class TestTranspile:
    def test_abstract_identity(self):
        c = build_unk(5, 3)
        assert transpile(c, "abstract") is c

    def test_unknown_gateset(self):
        with pytest.raises(ValueError):
            transpile(build_unk(3, 1), "clifford_t")

    @pytest.mark.parametrize("c", [build_unk(6, 3), prepare_dicke(7, 5), build_compression(6),
                                   Circuit(4, (mcx((1, 2, 3), 4), x(1), ccry(0.2, 4, 1, 2)))],
                             ids=["unk63", "dicke75", "compress6", "mixed"])
    def test_closure_and_equivalence(self, c):
        t = transpile(c)
        assert {g.kind for g in t.gates} <= {Kind.X, Kind.RY, Kind.PHASE, Kind.CNOT, Kind.SWAP}
        assert np.allclose(simulate_matrix(t), simulate_matrix(c), atol=1e-9)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_exhaustive_equivalence(self, n):
        for k in range(1, n + 1):
            c = build_unk(n, k)
            assert np.allclose(simulate_matrix(transpile(c)), simulate_matrix(c), atol=1e-9), (n, k)

    def test_blocks_survive(self):
        c = build_unk(6, 3)
        t = transpile(c)
        assert [b.label for b in t.blocks] == [b.label for b in c.blocks]
        assert all(0 <= b.start <= b.stop <= len(t) for b in t.blocks)

    def test_exact_counts(self):
        for n in range(2, 16):
            for k in range(1, n + 1):
                bc = count_gates(build_unk(n, k))
                r = count_gates(transpile(build_unk(n, k)))
                assert r["CNOT"] == 4 * bc["CRy"] + 5 * bc["CCRy"], (n, k)
                assert r["Ry"] == 2 * bc["CRy"] + 4 * bc["CCRy"], (n, k)

    def test_count_bounds(self):
        worst_c = worst_r = Fraction(-10 ** 9)
        for n in range(2, 21):
            for k in range(1, n // 2 + 1):
                r = count_gates(transpile(build_unk(n, k)))
                assert r["CNOT"] <= 5 * k * n + CNOT_C * n
                assert r["Ry"] <= 4 * k * n + RY_C * n
                worst_c = max(worst_c, Fraction(r["CNOT"] - 5 * k * n, n))
                worst_r = max(worst_r, Fraction(r["Ry"] - 4 * k * n, n))
        assert (worst_c, worst_r) == (CNOT_C, RY_C)
        assert CNOT_C <= 10
