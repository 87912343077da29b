"""``commdim`` command line.

Exit codes: 0 success / YES / pass, 1 NO / fail, 2 UNKNOWN, 64 usage error,
65 bad input data.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds as bnd
from . import formats
from .ensembles import GATES, antidist_matrix, gate_matrix
from .errors import CommDimError, FormatError, InvalidParams, InvalidRange, InvalidSize, UnknownName
from .factor import NMFConfig, a7_explicit, nmf, verify_factorization
from .majorize import Answer, MajorizeConfig, uw_leq, uw_leq_identity
from .matcore import DEFAULT_TOL, numerical_rank, reduce, validate
from .quantum import gram, qubit_implementation, verify_ensemble
from .shared import block_factorization, min_coordinated_actions, mix

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_DATA = 65

_USAGE_ERRORS = (InvalidRange, InvalidSize, UnknownName, InvalidParams)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _rplus_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None


# ---------------------------------------------------------------- output


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        print(human)


def _kv(d: dict) -> str:
    return "\n".join(f"{k}: {v}" for k, v in d.items())


def _load(path, args, tol) -> np.ndarray:
    arr = formats.read_matrix(path, getattr(args, "format", None))
    try:
        return validate(arr, tol).entries
    except InvalidParams as exc:
        # malformed file contents are a data problem, not a usage problem
        raise FormatError(str(exc)) from None


def _write_or_print(args, M, out) -> None:
    if out:
        formats.write_matrix(out, M, getattr(args, "format", None))
    else:
        sys.stdout.write(formats.dumps_matrix(M, getattr(args, "format", None) or "json"))


def _nmf_config(args) -> NMFConfig:
    return NMFConfig(max_iter=args.max_iter, restarts=args.restarts, seed=args.seed, workers=args.workers)


# --------------------------------------------------------------- commands


def cmd_gen(args, tol):
    if args.kind == "antidist":
        M, name = antidist_matrix(args.n), f"ANTIDIST({args.n})"
    else:
        M, name = gate_matrix(args.name), args.name.upper()
    _write_or_print(args, M.entries, args.out)
    if args.out:
        _emit(args, {"name": name, "rows": M.n, "cols": M.m, "out": args.out},
              f"wrote {name} ({M.n}x{M.m}) to {args.out}")
    return EXIT_OK


def cmd_quantum(args, tol):
    ens = qubit_implementation(args.n)
    if args.action == "verify":
        rep = verify_ensemble(ens, tol)
        bad = [s["index"] for s in rep.states if not all(s.values())]
        human = _kv({"n": args.n, "states_ok": not bad, "effects_ok": all(all(e.values()) for e in rep.effects),
                     "povm_complete": rep.povm_complete, "passed": rep.passed})
        _emit(args, {"n": args.n, **rep.to_dict()}, human)
        return EXIT_OK if rep.passed else EXIT_FAIL
    G = gram(ens, tol)
    _write_or_print(args, G.entries, args.out)
    if args.out:
        _emit(args, {"n": args.n, "out": args.out}, f"wrote Gram matrix of the n={args.n} ensemble to {args.out}")
    return EXIT_OK


def cmd_rank(args, tol):
    C = _load(args.inp, args, tol)
    r = numerical_rank(C, tol)
    _emit(args, {"rank": r, "rows": C.shape[0], "cols": C.shape[1]}, f"rank: {r}")
    return EXIT_OK


def cmd_reduce(args, tol):
    C = validate(_load(args.inp, args, tol), tol)
    red = reduce(C, tol)
    if args.out:
        formats.write_matrix(args.out, red.reduced.entries, args.format)
    payload = {
        "reduced": formats.matrix_to_obj(red.reduced.entries),
        "kept_rows": [a + 1 for a in red.kept_rows],
        "kept_cols": [b + 1 for b in red.kept_cols],
        "row_selector": formats.matrix_to_obj(red.row_selector),
        "col_injector": formats.matrix_to_obj(red.col_injector),
    }
    human = _kv({"shape": f"{C.n}x{C.m} -> {red.reduced.n}x{red.reduced.m}",
                 "kept_rows": payload["kept_rows"], "kept_cols": payload["kept_cols"]})
    _emit(args, payload, human)
    return EXIT_OK


def _table(args):
    lo, hi = args.rplus
    rows = bnd.table_rows(lo, hi)
    payload = {"rows": [{"r_plus": r, "phi_prime": a, "phi_3": b} for r, a, b in rows]}
    human = "\n".join(["r_+  phi'  phi_3"] + [f"{r:>3} {a:>5} {b:>6}" for r, a, b in rows])
    _emit(args, payload, human)
    return EXIT_OK


def cmd_table(args, tol):
    return _table(args)


def cmd_bounds(args, tol):
    if args.action == "table":
        return _table(args)
    if not args.inp:
        raise UsageError("bounds: --in is required")
    C = _load(args.inp, args, tol)
    cfg = _nmf_config(args) if args.nmf else None
    rep = bnd.classical_dim_bounds(C, tol, cfg)
    lines = [f"rank: {rep.rank}", f"rnrank: {rep.rnrank}"]
    lines += [f"lower {v} ({s})" for v, s in rep.lower_bounds]
    lines += [f"upper {v} ({s})" for v, s in rep.upper_bounds]
    lines += [f"{rep.lb} <= nrank <= {rep.ub}"]
    _emit(args, rep.to_dict(), "\n".join(lines))
    return EXIT_OK


def cmd_nmf(args, tol):
    C = _load(args.inp, args, tol)
    fac = nmf(C, args.r, _nmf_config(args))
    obj = formats.factorization_to_obj(fac.W, fac.H, fac.residual, fac.seed)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(obj, fh)
            fh.write("\n")
    payload = {"success": fac.success, "r": args.r, "residual": fac.residual, "seed": fac.seed,
               "restarts_used": fac.restarts_used, "best_restart": fac.best_restart,
               "iterations": fac.iterations}
    if not args.out:
        payload.update(W=obj["W"], H=obj["H"])
    _emit(args, payload, _kv({k: payload[k] for k in ("success", "r", "residual", "seed", "restarts_used")}))
    return EXIT_OK if fac.success else EXIT_FAIL


def cmd_factor_check_a7(args, tol):
    W, H = a7_explicit()
    chk = verify_factorization(antidist_matrix(7), W, H, tol)
    payload = {**chk.to_dict(), "inner_dim": W.shape[1],
               "min_W": float(W.min()), "min_H": float(H.min())}
    _emit(args, payload, _kv({"passed": chk.passed, "residual": f"{chk.residual:.3e}", "inner_dim": W.shape[1]}))
    return EXIT_OK if chk.passed else EXIT_FAIL


_ANSWER_EXIT = {Answer.YES: EXIT_OK, Answer.NO: EXIT_FAIL, Answer.UNKNOWN: EXIT_UNKNOWN}


def cmd_majorize(args, tol):
    if args.identity is None and not args.d:
        raise UsageError("majorize: give --d FILE or --identity N")
    C = _load(args.c, args, tol)
    if args.identity is not None:
        res = uw_leq_identity(C, args.identity, tol, _nmf_config(args))
    else:
        D = _load(args.d, args, tol)
        res = uw_leq(C, D, tol, MajorizeConfig(seed=args.seed))
    payload = {**res.to_dict(), "seed": args.seed}
    human = _kv({"answer": res.answer.value, "residual": res.residual, **({"reason": res.reason} if res.reason else {})})
    _emit(args, payload, human)
    return _ANSWER_EXIT[res.answer]


def cmd_sr(args, tol):
    if args.action == "witness":
        if args.lb is None or args.d is None:
            raise UsageError("sr witness: --lb and --d are required")
        k = min_coordinated_actions(args.lb, args.d)
        _emit(args, {"nrank_lb": args.lb, "d": args.d, "min_coordinated_actions": k},
              f"at least {k} coordinated actions for nrank >= {args.lb} with d = {args.d}")
        return EXIT_OK
    if not args.protocol:
        raise UsageError(f"sr {args.action}: --protocol is required")
    p = formats.read_protocol(args.protocol)
    C = mix(p, tol)
    if args.action == "mix":
        if args.out:
            formats.write_matrix(args.out, C.entries)
        _emit(args, {"k": p.k, "d": p.d, "matrix": formats.matrix_to_obj(C.entries)},
              formats.dumps_matrix(C.entries, "csv").rstrip())
        return EXIT_OK
    bf = block_factorization(p)
    err = float(np.max(np.abs(bf.product() - C.entries)))
    payload = {"k": p.k, "d": p.d, "inner_dim": bf.inner_dim, "nrank_upper_bound": p.d * p.k,
               "product_residual": err, "L": formats.matrix_to_obj(bf.L), "R": formats.matrix_to_obj(bf.R)}
    _emit(args, payload, _kv({"k": p.k, "d": p.d, "inner_dim": bf.inner_dim,
                              "nrank <=": p.d * p.k, "product_residual": f"{err:.3e}"}))
    return EXIT_OK if err <= tol.recon_tol else EXIT_FAIL


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable JSON output")
    common.add_argument("--tolerances", metavar="FILE", help="JSON file overriding default tolerances")
    common.add_argument("--format", choices=("json", "csv"), help="matrix format (default: from extension)")

    search = _Parser(add_help=False)
    search.add_argument("--seed", type=int, default=42)
    search.add_argument("--restarts", type=int, default=32)
    search.add_argument("--max-iter", type=int, default=5000)
    search.add_argument("--workers", type=int, default=1)

    parser = _Parser(prog="commdim", description="Classical and quantum dimensions of communication matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a named matrix")
    gsub = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    g = gsub.add_parser("antidist", parents=[common])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out")
    g = gsub.add_parser("gate", parents=[common])
    g.add_argument("--name", required=True, type=str.upper, choices=sorted(GATES))
    g.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("quantum", help="qubit implementation of A_n")
    qsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = qsub.add_parser("verify", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q = qsub.add_parser("gram", parents=[common])
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--out")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("rank", parents=[common], help="numerical rank")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("reduce", parents=[common], help="remove zero columns and duplicate rows")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bounds", parents=[common, search], help="nonnegative-rank bounds")
    p.add_argument("action", nargs="?", choices=("report", "table"), default="report")
    p.add_argument("--in", dest="inp")
    p.add_argument("--nmf", action="store_true", help="add an NMF upper bound")
    p.add_argument("--rplus", type=_rplus_range, default=(3, 7), metavar="LO..HI")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("table", parents=[common], help="phi' and phi_3 values")
    p.add_argument("--rplus", type=_rplus_range, default=(3, 7), metavar="LO..HI")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("nmf", parents=[common, search], help="heuristic nonnegative factorization")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_nmf)

    p = sub.add_parser("factor-check-a7", parents=[common], help="verify the built-in A_7 factorization")
    p.set_defaults(func=cmd_factor_check_a7)

    p = sub.add_parser("majorize", parents=[common, search], help="ultraweak majorization")
    p.add_argument("--c", required=True)
    p.add_argument("--d")
    p.add_argument("--identity", type=int)
    p.set_defaults(func=cmd_majorize)

    p = sub.add_parser("sr", help="shared-randomness accounting")
    ssub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("mix", "bound"):
        s = ssub.add_parser(name, parents=[common])
        s.add_argument("--protocol", required=True)
        if name == "mix":
            s.add_argument("--out")
    s = ssub.add_parser("witness", parents=[common])
    s.add_argument("--lb", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_sr)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        tol = DEFAULT_TOL
        if getattr(args, "tolerances", None):
            try:
                tol = formats.read_tolerances(args.tolerances)
            except InvalidParams as exc:
                raise FormatError(str(exc)) from None
        return args.func(args, tol)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except _USAGE_ERRORS as exc:
        print(f"commdim: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CommDimError as exc:
        print(f"commdim: data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
