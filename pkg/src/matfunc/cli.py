"""Command-line front end: ``gen``, ``estimate``, ``verify``, ``route``, ``bench``.

Exit codes: 0 ok, 1 verify failure, 2 usage error, 3 hard-regime refusal,
4 dense oracle unavailable.
"""

from __future__ import annotations

import argparse
import io as _io
import json
import sys
import time

import numpy as np

from . import dense as oracle
from .access import Metadata, PauliAccess, SparseOracle, audit_oracle
from .clocks import FAMILIES, Circuit, build_instance
from .config import CapExceeded
from .estimators import (ALGORITHMS, EstimateRequest, HardRegime, PreconditionError, Target,
                         estimate, route)
from .io import LoadedInstance, dumps, load_instance, read_json, write_text
from .pauli import PauliOperator
from .polynomials import FunctionSpec
from .projector import Projector

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_HARD, EXIT_ORACLE = 0, 1, 2, 3, 4
STOCHASTIC = ("mc_sparse", "mc_pauli", "sketch")
# oracle-vs-prediction tolerance; Peres weights are irrational so this is not machine epsilon
PREDICTION_TOL = 1e-7
EXACT_TOL = 1e-9


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument handling


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matfunc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("--instance", help="instance envelope JSON file")
        sp.add_argument("--family", help=f"generator family: {', '.join(FAMILIES)}")
        sp.add_argument("--circuit", help="gate list JSON, e.g. '[[\"H\", 0]]'")
        sp.add_argument("--encoding", choices=("compact", "unary"), default="compact")
        sp.add_argument("--scale", type=float, default=1.0)
        sp.add_argument("--m", type=int, help="janzing power (default M^3)")

    def request(sp):
        sp.add_argument("--target", help="entry:i,j | lm:i | nlm:i")
        sp.add_argument("--projector", help="bit:SHIFT=VALUE | half | all (default: instance or half)")
        sp.add_argument("--function", help="monomial:m=5 | chebyshev:m=3 | inverse:kappa=2 | timeevo:t=1")
        sp.add_argument("--eps", type=float, default=0.05)
        sp.add_argument("--delta", type=float, default=0.05)
        sp.add_argument("--g", type=float)
        sp.add_argument("--eta", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
        sp.add_argument("--workers", type=int, default=1)

    def output(sp):
        sp.add_argument("--format", choices=("json", "tsv"), default="json")
        sp.add_argument("--out", help="output file (default stdout)")

    g = sub.add_parser("gen", help="generate a clock-construction instance")
    source(g)
    output(g)
    for name, hlp in (("estimate", "estimate a target"), ("verify", "compare estimate, oracle and prediction"),
                      ("route", "print the algorithm the router would pick")):
        sp = sub.add_parser(name, help=hlp)
        source(sp)
        request(sp)
        output(sp)
    b = sub.add_parser("bench", help="sweep an algorithm and report cost and error as TSV")
    b.add_argument("--sweep", choices=("mc_pauli", "mc_sparse", "exact_path"), required=True)
    b.add_argument("--values", default="", help="comma-separated sweep values (lambda or degree)")
    b.add_argument("--m", type=int, default=2, help="power for the mc sweeps")
    b.add_argument("--n", type=int, default=3, help="qubits (mc_pauli) or log2 dimension")
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--delta", type=float, default=0.05)
    b.add_argument("--seeds", default="0", help="comma-separated seeds")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out")
    return p


def _circuit(text: str) -> Circuit:
    try:
        return Circuit.from_json(text)
    except (ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad --circuit: {exc}") from exc


def _load(args) -> LoadedInstance:
    if args.instance and args.family:
        raise UsageError("give either --instance or --family, not both")
    if args.instance:
        try:
            return load_instance(read_json(args.instance))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise UsageError(f"cannot read instance: {exc}") from exc
    if not args.family:
        raise UsageError("an instance (--instance) or a family (--family with --circuit) is required")
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}; expected one of {', '.join(FAMILIES)}")
    if not args.circuit:
        raise UsageError("--family needs --circuit")
    inst = build_instance(args.family, _circuit(args.circuit), args.scale, args.encoding, args.m)
    return load_instance(inst.to_json())


def _projector(text: str | None, default: Projector | None) -> Projector:
    if text is None:
        return default or Projector.first_half()
    if text == "half":
        return Projector.first_half()
    if text == "all":
        return Projector.identity()
    if text.startswith("bit:"):
        shift, _, value = text[4:].partition("=")
        return Projector.bit(int(shift), int(value or 1))
    raise UsageError(f"bad --projector {text!r}")


def _request(args, inst: LoadedInstance) -> EstimateRequest:
    if args.target:
        default = inst.target.projector if inst.target is not None else None
        target = Target.parse(args.target, _projector(args.projector, default))
    elif inst.target is not None:
        target = inst.target
        if args.projector:
            target = Target(target.kind, target.i, target.j, _projector(args.projector, None))
    else:
        raise UsageError("--target is required for this instance")
    if args.function:
        function = FunctionSpec.parse(args.function)
    elif inst.function is not None:
        function = inst.function
    else:
        raise UsageError("--function is required for this instance")
    g = args.g if args.g is not None else inst.g
    return EstimateRequest(target, function, args.eps, args.delta, g, args.seed or 0,
                           args.algorithm, args.workers, args.eta)


def _resolve_algorithm(args, inst: LoadedInstance, req: EstimateRequest) -> str:
    alg = req.algorithm if req.algorithm != "auto" else route(inst.access, req)
    if alg in STOCHASTIC and args.seed is None:
        raise UsageError(f"algorithm {alg} is randomized; --seed is required")
    return alg


def _estimate_row(e) -> dict:
    d = e.to_json()
    return {"value_re": d["value"]["re"], "value_im": d["value"]["im"], "half_width": d["half_width"],
            "samples": d["samples"], "algorithm": d["algorithm"], "decision": d.get("decision", "")}


def _tsv(rows: list[dict], columns: list[str]) -> str:
    buf = _io.StringIO()
    buf.write("\t".join(columns) + "\n")
    for r in rows:
        buf.write("\t".join(_cell(r.get(c, "")) for c in columns) + "\n")
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    if args.instance:
        raise UsageError("gen takes --family and --circuit, not --instance")
    inst = _load(args)
    env = inst.clock.to_json()
    if args.format == "tsv":
        row = {"family": inst.clock.family, "N": env["N"], "predicted_re": inst.predicted.real,
               "predicted_im": inst.predicted.imag, "formula": inst.clock.formula}
        write_text(_tsv([row], list(row)), args.out)
    else:
        write_text(dumps(env), args.out)
    return EXIT_OK


def cmd_estimate(args) -> int:
    inst = _load(args)
    req = _request(args, inst)
    alg = _resolve_algorithm(args, inst, req)
    e = estimate(inst.access, EstimateRequest(**{**req.__dict__, "algorithm": alg}))
    if args.format == "tsv":
        row = _estimate_row(e)
        write_text(_tsv([row], list(row)), args.out)
    else:
        write_text(dumps(e.to_json()), args.out)
    return EXIT_OK


def cmd_route(args) -> int:
    inst = _load(args)
    req = _request(args, inst)
    alg = route(inst.access, req)
    if args.format == "tsv":
        write_text(_tsv([{"algorithm": alg}], ["algorithm"]), args.out)
    else:
        write_text(dumps({"algorithm": alg}), args.out)
    return EXIT_OK


def _oracle_value(d: np.ndarray, req: EstimateRequest) -> complex:
    f = req.function.scalar
    t = req.target
    if t.kind == "entry":
        return complex(oracle.exact_entry(d, f, t.i, t.j))
    if t.kind == "lm":
        return complex(oracle.exact_lm(d, f, t.i, t.projector))
    return complex(oracle.exact_normalized_lm(d, f, t.i, t.projector))


def _same_request(inst: LoadedInstance, req: EstimateRequest) -> bool:
    return inst.target == req.target and inst.function == req.function


def cmd_verify(args) -> int:
    inst = _load(args)
    req = _request(args, inst)
    report: dict = {"N": inst.dim, "target": req.target.to_json(), "function": req.function.to_json()}
    try:
        alg = _resolve_algorithm(args, inst, req)
        e = estimate(inst.access, EstimateRequest(**{**req.__dict__, "algorithm": alg}))
        report["estimate"] = e.to_json()
    except HardRegime as exc:
        e = None
        report["estimate"] = {"refused": str(exc)}
    status = EXIT_OK
    checks: list[bool] = []
    try:
        d = inst.dense()
    except CapExceeded as exc:
        report["oracle"] = {"unavailable": str(exc)}
        report["pass"] = None
        write_text(dumps(report), args.out)
        return EXIT_ORACLE
    truth = _oracle_value(d, req)
    report["oracle"] = {"re": truth.real, "im": truth.imag}
    if e is not None:
        err = abs(e.value - truth)
        exact = e.samples_used == 0 and e.half_width == 0.0
        ok = err <= (EXACT_TOL if exact else e.half_width + EXACT_TOL)
        report["abs_error"] = err
        report["half_width"] = e.half_width
        report["estimate_pass"] = ok
        checks.append(ok)
    if inst.predicted is not None and _same_request(inst, req):
        diff = abs(inst.predicted - truth)
        ok = diff <= PREDICTION_TOL * max(1.0, abs(truth))
        report["predicted"] = {"re": inst.predicted.real, "im": inst.predicted.imag}
        report["prediction_error"] = diff
        report["prediction_pass"] = ok
        checks.append(ok)
    if isinstance(inst.access, SparseOracle):
        a = audit_oracle(inst.access)
        report["audit"] = {"ok": a.ok, "problems": a.problems}
        checks.append(a.ok)
    report["pass"] = all(checks)
    if not report["pass"]:
        status = EXIT_VERIFY
    if args.format == "tsv":
        row = {"N": inst.dim, "abs_error": report.get("abs_error", ""),
               "half_width": report.get("half_width", ""),
               "prediction_error": report.get("prediction_error", ""), "pass": report["pass"]}
        write_text(_tsv([row], list(row)), args.out)
    else:
        write_text(dumps(report), args.out)
    return status


def _bench_pauli(n: int, lam: float) -> PauliOperator:
    """Fixed 4-term Hermitian operator rescaled to Pauli norm ``lam``."""
    rng = np.random.default_rng(12345)
    words = ["".join("IXYZ"[k] for k in rng.integers(0, 4, size=n)) for _ in range(4)]
    c = rng.normal(size=4)
    c = c / np.sum(np.abs(c)) * lam
    return PauliOperator.from_words(zip(c.tolist(), words))


def _bench_sparse(n: int, scale: float) -> SparseOracle:
    """Fixed random real symmetric 3-sparse matrix on ``2^n`` indices, one-norm ``scale``."""
    rng = np.random.default_rng(54321)
    N = 1 << n
    d = np.zeros((N, N))
    for i in range(N):
        d[i, i] = rng.normal()
        j = (i + 1) % N
        v = rng.normal()
        d[i, j] = v
        d[j, i] = v
    d *= scale / np.max(np.sum(np.abs(d), axis=0))
    return SparseOracle.from_dense(d, Metadata(s=3, one_norm=scale))


def cmd_bench(args) -> int:
    columns = ["sweep", "param", "algorithm", "seed", "samples", "wall_time", "error"]
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"bad sweep values: {exc}") from exc
    rows = []
    for v in values:
        for seed in seeds:
            if args.sweep == "mc_pauli":
                access = PauliAccess(_bench_pauli(args.n, v))
                fn, alg = FunctionSpec.monomial(args.m), "mc_pauli"
            elif args.sweep == "mc_sparse":
                access = _bench_sparse(args.n, v)
                fn, alg = FunctionSpec.monomial(args.m), "mc_sparse"
            else:
                access = _bench_sparse(args.n, 1.0)
                fn, alg = FunctionSpec.monomial(int(v)), "exact_path"
            req = EstimateRequest(Target.entry(0, 0), fn, args.eps, args.delta, seed=seed,
                                  algorithm=alg, workers=args.workers)
            t0 = time.perf_counter()
            e = estimate(access, req)
            wall = time.perf_counter() - t0
            d = access.to_dense() if isinstance(access, SparseOracle) else \
                load_instance({"model": "pauli", "N": access.dim,
                               "payload": access.operator.to_json()}).dense()
            truth = oracle.exact_entry(d, fn.scalar, 0, 0)
            # the path recursion draws no samples; report the s^m path count it enumerates
            samples = e.samples_used if alg != "exact_path" else access.sparsity ** int(v)
            rows.append({"sweep": args.sweep, "param": v, "algorithm": alg, "seed": seed,
                         "samples": samples, "wall_time": wall, "error": abs(e.value - truth)})
    write_text(_tsv(rows, columns), args.out)
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "estimate": cmd_estimate, "verify": cmd_verify,
            "route": cmd_route, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except HardRegime as exc:
        print(f"matfunc: {exc}", file=sys.stderr)
        return EXIT_HARD
    except (UsageError, PreconditionError, CapExceeded, ValueError, IndexError) as exc:
        print(f"matfunc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
