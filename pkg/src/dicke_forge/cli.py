"""Command-line front end.

Circuits go to stdout (or ``--output``); verification results and resource
reports go to stderr. Exit status: 0 success, 1 verification failure,
2 usage or validation error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .dicke import prepare_dicke
from .ir import Circuit, ValidationError, block_depth, count_gates, schedule_depth, validate
from .lnn import localize, route_dicke_lnn
from .reference import build_plesch_buzek, onehot_frontend, render_table, trace_table
from .serialize import from_json, to_json, to_qasm
from .sim import dicke_oracle, fidelity, max_qubits, simulate, unpermute
from .symmetric import (SpecError, SymmetricSpec, build_compression, build_decompression,
                        build_symmetric_prep, compressed_state)
from .transpile import is_lowered, transpile

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2
MAX_BUILD_QUBITS = 64
FID_TOL = 1e-9


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(circuit: Circuit, args) -> None:
    if args.emit_format == "qasm":
        if not is_lowered(circuit):
            raise UsageError("QASM output needs a lowered circuit; add --transpile")
        text = to_qasm(circuit)
    else:
        text = to_json(circuit)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(circuit: Circuit) -> None:
    _err("resources: " + json.dumps(count_gates(circuit).to_dict()))


def _check_sim_size(n: int) -> None:
    cap = max_qubits()
    if n > cap:
        raise UsageError(f"verification simulates {n} qubits, above the cap of {cap} "
                         "(set DICKE_FORGE_MAX_QUBITS to raise it)")


def _logical(circuit: Circuit, state):
    perm = circuit.meta.get("final_permutation")
    return unpermute(state, perm) if perm else state


def _finish(circuit: Circuit, fid: float | None) -> int:
    bad = validate(circuit)
    for v in bad:
        _err(f"invalid: {v}")
    if fid is not None:
        _err(f"fidelity: {fid:.15f}")
    _report(circuit)
    ok = not bad and (fid is None or fid >= 1.0 - FID_TOL)
    return EXIT_OK if ok else EXIT_VERIFY


def _lower(circuit: Circuit, args) -> Circuit:
    if not args.transpile:
        return circuit
    return localize(circuit) if getattr(args, "lnn", False) else transpile(circuit, "cnot_ry")


# -- commands -----------------------------------------------------------------

def cmd_dicke(args) -> int:
    n, k = args.n, args.k
    if n < 1:
        raise UsageError(f"n must be positive, got {n}")
    if k < 0:
        raise UsageError(f"k must be non-negative, got {k}")
    if k > n:
        raise UsageError(f"k exceeds n ({k} > {n})")
    if n > MAX_BUILD_QUBITS:
        raise UsageError(f"n above the supported maximum of {MAX_BUILD_QUBITS}")
    if args.verify:
        _check_sim_size(n)
    comp = False if args.no_complement else None
    circuit = route_dicke_lnn(n, k, comp) if args.lnn else prepare_dicke(n, k, comp)
    circuit = _lower(circuit, args)
    _emit(circuit, args)
    fid = None
    if args.verify:
        fid = fidelity(_logical(circuit, simulate(circuit)), dicke_oracle(n, k))
    return _finish(circuit, fid)


def _load_spec(args) -> SymmetricSpec:
    if args.random is not None:
        if args.random < 1:
            raise UsageError("--random needs a positive qubit count")
        return SymmetricSpec.random(args.random, np.random.default_rng(args.seed))
    if not args.specfile:
        raise UsageError("give a spec file or --random N")
    try:
        with open(args.specfile, encoding="utf-8") if args.specfile != "-" else sys.stdin as fh:
            return SymmetricSpec.from_json(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read spec: {exc}") from None
    except SpecError as exc:
        raise UsageError(f"invalid spec: {exc}") from None


def cmd_symmetric(args) -> int:
    spec = _load_spec(args)
    if args.verify:
        _check_sim_size(spec.n)
    circuit = _lower(build_symmetric_prep(spec), args)
    _emit(circuit, args)
    fid = fidelity(simulate(circuit), spec.target()) if args.verify else None
    return _finish(circuit, fid)


def _compression_fidelity(n: int, decompress: bool, lnn: bool, circuit: Circuit) -> float:
    """Worst fidelity over all Dicke inputs plus a round trip on a product state."""
    enc = circuit if not decompress else build_compression(n, lnn)
    dec = circuit if decompress else build_decompression(n, lnn)
    worst = 1.0
    for l in range(n + 1):
        packed = compressed_state(n, [0] * l + [1])
        if not decompress:
            out = _logical(enc, simulate(enc, dicke_oracle(n, l)))
            worst = min(worst, fidelity(out, packed))
        elif not lnn:
            worst = min(worst, fidelity(simulate(dec, packed), dicke_oracle(n, l)))
    spec = SymmetricSpec.product(n, 0.6)
    back = simulate(dec, simulate(enc, spec.target()))
    return min(worst, fidelity(back, spec.target()))


def cmd_compress(args) -> int:
    n = args.n
    if n < 1:
        raise UsageError(f"n must be positive, got {n}")
    if n > MAX_BUILD_QUBITS:
        raise UsageError(f"n above the supported maximum of {MAX_BUILD_QUBITS}")
    if args.verify or args.trace:
        _check_sim_size(n)
        if n > 20:
            raise UsageError("compression verification is limited to n <= 20")
    if args.trace:
        k = n // 2 if args.input_dicke is None else args.input_dicke
        if not 0 <= k <= n:
            raise UsageError(f"--input-dicke must lie in 0..{n}")
        if n < 2:
            raise UsageError("tracing needs n >= 2")
        sys.stdout.write(render_table(trace_table(n, k)))
    if args.pb_compare:
        if n < 2:
            raise UsageError("comparison needs n >= 2")
        sys.stdout.write(_pb_table(n))
    circuit = (build_decompression if args.decompress else build_compression)(n, args.lnn)
    if args.transpile and not args.lnn:
        circuit = transpile(circuit, "cnot_ry")
    if not (args.trace or args.pb_compare) or args.output:
        _emit(circuit, args)
    fid = _compression_fidelity(n, args.decompress, args.lnn, circuit) if args.verify else None
    return _finish(circuit, fid)


def _pb_table(n: int) -> str:
    ours, base = onehot_frontend(n), build_plesch_buzek(n)
    full = transpile(build_compression(n), "cnot_ry")
    rows = [("one-hot front end", "staircase", "baseline"),
            ("depth (one unit per 2/3-qubit step)", str(block_depth(ours)), str(block_depth(base))),
            ("steps", str(len(ours.blocks)), str(len(base.blocks))),
            ("depth (gates)", str(schedule_depth(ours)), str(schedule_depth(base))),
            ("full compression depth (cnot_ry)", str(schedule_depth(full)), "-")]
    w = [max(len(r[i]) for r in rows) for i in range(3)]
    return "\n".join(f"{a:<{w[0]}}  {b:>{w[1]}}  {c:>{w[2]}}" for a, b, c in rows) + "\n"


def _read_circuit(path: str) -> Circuit:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        return from_json(text)
    except OSError as exc:
        raise UsageError(f"cannot read circuit: {exc}") from None
    except (ValueError, ValidationError) as exc:
        raise UsageError(f"invalid circuit: {exc}") from None


def cmd_stats(args) -> int:
    circuit = _read_circuit(args.file)
    sys.stdout.write(json.dumps(count_gates(circuit).to_dict()) + "\n")
    return EXIT_OK


def cmd_emit(args) -> int:
    _emit(_read_circuit(args.file), args)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, lnn: bool = True) -> None:
    p.add_argument("--transpile", action="store_true", help="lower to CNOT + single-qubit gates")
    p.add_argument("--emit-format", choices=("json", "qasm"), default="json")
    p.add_argument("--output", "-o", help="write the circuit here instead of stdout")
    p.add_argument("--verify", action="store_true", help="simulate and check against the exact state")
    if lnn:
        p.add_argument("--lnn", action="store_true", help="nearest-neighbour routed variant")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dicke-forge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dicke", help="Dicke state D(n,k) preparation")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--no-complement", action="store_true", help="never prepare D(n,n-k) and flip")
    _common(p)
    p.set_defaults(func=cmd_dicke)

    p = sub.add_parser("symmetric", help="symmetric pure-state preparation")
    p.add_argument("specfile", nargs="?", help='JSON {"n", "alphas", "phis"}; "-" for stdin')
    p.add_argument("--random", type=int, metavar="N", help="use a random spec on N qubits")
    p.add_argument("--seed", type=int, default=0)
    _common(p, lnn=False)
    p.set_defaults(func=cmd_symmetric)

    p = sub.add_parser("compress", help="symmetric-state compression circuit")
    p.add_argument("n", type=int)
    p.add_argument("--decompress", action="store_true")
    p.add_argument("--pb-compare", action="store_true", help="depth table against the one-hot baseline")
    p.add_argument("--trace", action="store_true", help="step-by-step state table for a Dicke input")
    p.add_argument("--input-dicke", type=int, metavar="K")
    _common(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("stats", help="resource report for a JSON circuit")
    p.add_argument("file", help='circuit JSON, "-" for stdin')
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("emit", help="re-emit a JSON circuit as JSON or QASM")
    p.add_argument("file", help='circuit JSON, "-" for stdin')
    p.add_argument("--emit-format", choices=("json", "qasm"), default="json")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_emit)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE
    except (ValueError, ValidationError) as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
