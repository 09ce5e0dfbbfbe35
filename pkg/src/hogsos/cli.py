"""Command-line front end.

Exit codes: 0 success, 1 verification failure (including undecided
verdicts), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
import time
from pathlib import Path

from . import fpc as F
from . import suites
from .ctx import ctx_preorder_bounded
from .gsos.finite import ModelError, henceforth, is_logical_relation, load_model, resolve_relation
from .gsos.gfp_oracle import gfp_matrix
from .logrel import CheckerConfig, RelationChecker
from .logrel import rel as mutcl_rel
from .mutcl_semantics import _gamma, trace
from .mutcl_syntax import SortedPool, TypeMismatch, parse_query, show, typecheck
from .behavior import shape_name
from .sexpr import SyntaxError as SexprError
from .ty import show_ty


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None


def _is_fpc(path: str) -> bool:
    return path.endswith(".fpc")


def _load_terms(paths: list[str], fpc: bool) -> tuple:
    parse = F.parse_fpc_query if fpc else parse_query
    terms: list = []
    for p in paths:
        terms.extend(parse(_read(p)))
    return tuple(terms)


def _load_pair(paths: list[str], fpc: bool) -> tuple:
    terms = _load_terms(paths, fpc)
    if len(terms) != 2:
        raise UsageError(f"expected two terms (two files or one pair-of form), got {len(terms)}")
    return terms


def _type(t, fpc: bool):
    return F.typecheck_fpc((), t) if fpc else typecheck(t)


# -- commands ---------------------------------------------------------------

def cmd_check(args) -> tuple[dict, int]:
    fpc = any(_is_fpc(p) for p in args.files) or args.command == "fpc"
    rows = []
    for t in _load_terms(args.files, fpc):
        rows.append({"term": str(t), "type": show_ty(_type(t, fpc))})
    return {"terms": rows}, 0


def cmd_trace(args) -> tuple[dict, int]:
    fpc = _is_fpc(args.file)
    terms = _load_terms([args.file], fpc)
    if len(terms) != 1:
        raise UsageError("trace expects a single term")
    t = terms[0]
    _type(t, fpc)
    if fpc:
        res = F.may_terminates(t, args.fuel)
        steps = [str(u) for u in (res.path if res.yes else F.reach(t, args.fuel).terms)]
        return {"steps": steps, "may_terminate": res.status, "explored": res.explored}, 0
    tr = trace(t, args.fuel)
    final = "silent" if tr.truncated else shape_name(_gamma(tr.terms[-1]))
    return {
        "steps": [show(u) for u in tr.terms],
        "complete": tr.complete,
        "cyclic": tr.cyclic,
        "final": final,
    }, 0


def _verdict_code(outcome: str) -> int:
    return 0 if outcome == "holds" else 1


def cmd_logrel(args) -> tuple[dict, int]:
    fpc = any(_is_fpc(p) for p in args.files)
    t, s = _load_pair(args.files, fpc)
    if fpc:
        cfg = F.FpcConfig(n=args.index, pool=F.FpcPool(args.pool_size, args.max_size), fuel=args.fuel)
        v = F.rel_fpc(cfg, (), None, t, s)
        config = {"language": "fpc", "n": args.index, "pool_size": args.pool_size,
                  "pool_nodes": args.max_size, "fuel": args.fuel}
    else:
        cfg = CheckerConfig(args.rel, args.index, SortedPool(args.pool_size, args.max_size), args.fuel)
        checker = RelationChecker(cfg)
        v = mutcl_rel(cfg, None, t, s, checker)
        config = {"language": "mutcl", "relation": args.rel, "n": args.index,
                  "pool_size": args.pool_size, "pool_nodes": args.max_size, "fuel": args.fuel}
        if checker.vacuous_types:
            config["vacuous_argument_types"] = sorted(show_ty(x) for x in checker.vacuous_types)
    out = {"config": config, "left": str(t), "right": str(s), "type": show_ty(_type(t, fpc)),
           **v.to_json()}
    return out, _verdict_code(v.outcome.value)


def cmd_ctx(args) -> tuple[dict, int]:
    fpc = any(_is_fpc(p) for p in args.files) or args.command == "fpc"
    t, s = _load_pair(args.files, fpc)
    backend = F.FpcBackend() if fpc else None
    if fpc:
        v = F.ctx_fpc_bounded(t, s, args.obs, args.max_size, args.fuel)
    else:
        v = ctx_preorder_bounded(t, s, args.obs, args.max_size, args.fuel)
    config = {"language": "fpc" if fpc else "mutcl", "obs": args.obs,
              "max_size": args.max_size, "fuel": args.fuel}
    out = {"config": config, "left": str(t), "right": str(s), **v.to_json(backend)}
    return out, 0 if v.status == "no_counterexample" else 1


def cmd_kernel(args) -> tuple[dict, int]:
    try:
        m = load_model(args.model)
        r = resolve_relation(m, args.rel)
    except (ModelError, KeyError, TypeError, ValueError) as err:
        raise UsageError(f"bad model: {err}") from None
    except json.JSONDecodeError as err:
        raise UsageError(f"bad model json: {err}") from None
    res = henceforth(m, r, args.max)
    limit = sorted([a, b] for a, b in res.limit)
    out = {
        "config": {"model": args.model, "rel": args.rel, "max": args.max},
        "chain_sizes": [len(x) for x in res.chain],
        "nu": res.nu,
        "limit": limit,
        "logical_relation": is_logical_relation(m, res.limit),
    }
    if args.rel == "top":
        oracle, _ = gfp_matrix(m)
        out["oracle_agrees"] = oracle == res.limit
    ok = out["logical_relation"] and out.get("oracle_agrees", True)
    return out, 0 if ok else 1


def cmd_fpc(args) -> tuple[dict, int]:
    if args.fpc_command == "check":
        return cmd_check(args)
    if args.fpc_command == "may":
        (t,) = _load_terms([args.file], True)
        F.typecheck_fpc((), t)
        res = F.may_terminates(t, args.fuel)
        out = {"term": str(t), "status": res.status, "explored": res.explored,
               "path": [str(u) for u in res.path]}
        return out, 0
    if args.fpc_command == "rel":
        t, s = _load_pair(args.files, True)
        cfg = F.FpcConfig(n=args.index, pool=F.FpcPool(args.pool_size, args.max_size), fuel=args.fuel)
        v = F.rel_fpc(cfg, (), None, t, s)
        out = {"config": {"language": "fpc", "n": args.index, "pool_size": args.pool_size,
                          "pool_nodes": args.max_size, "fuel": args.fuel},
               "left": str(t), "right": str(s), **v.to_json()}
        return out, _verdict_code(v.outcome.value)
    return cmd_ctx(args)


_SUITE_ARGS = {
    "seed": "seed",
    "jobs": "jobs",
    "index": "n",
    "pool_size": "pool_size",
    "fuel": "fuel",
    "samples": None,  # mapped per suite below
    "max_size": "max_size",
    "ctx_size": "ctx_size",
}
_SAMPLE_PARAM = {
    "congruence": "per_op",
    "lax-bialgebra": "per_op",
    "soundness-xcheck": "pairs",
    "stabilization": "pairs",
    "henceforth-oracle": "models",
}


def cmd_suite(args) -> tuple[dict, int]:
    fn = {
        "congruence": suites.congruence,
        "fundamental": suites.fundamental,
        "soundness-xcheck": suites.soundness_xcheck,
        "lax-bialgebra": suites.lax_bialgebra,
        "rho-vs-gamma": suites.rho_vs_gamma,
        "henceforth-oracle": suites.henceforth_oracle,
        "stabilization": suites.stabilization,
    }[args.name]
    accepted = set(inspect.signature(fn).parameters)
    kw = {}
    for flag, param in _SUITE_ARGS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if flag == "samples":
            param = _SAMPLE_PARAM.get(args.name)
        if flag == "index" and args.name == "stabilization":
            param = "max_n"
        if param in accepted:
            kw[param] = value
        elif flag != "jobs":
            raise UsageError(f"suite {args.name} does not take --{flag.replace('_', '-')}")
    if "jobs" in accepted and "jobs" not in kw:
        kw["jobs"] = suites.default_jobs()
    report = fn(**kw)
    return report, 0 if report["passed"] else 1


# -- parser -----------------------------------------------------------------

def _common(p: argparse.ArgumentParser, fuel: int = 200) -> None:
    p.add_argument("--fuel", type=int, default=fuel)
    p.add_argument("--json", metavar="PATH", help="also write the report to PATH")
    p.add_argument("--timing", action="store_true", help="include wall-clock time in the report")


def _rel_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--index", type=int, default=4)
    p.add_argument("--pool-size", type=int, default=8)
    p.add_argument("--max-size", type=int, default=4, help="node bound for argument pools")


def _ctx_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--obs", choices=("all", "bool"), default="all")
    p.add_argument("--max-size", type=int, default=5, help="context node bound")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hogsos", description="Semantics workbench for higher-order GSOS.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and typecheck terms")
    p.add_argument("files", nargs="+")
    _common(p)

    p = sub.add_parser("trace", help="print the silent reduction sequence")
    p.add_argument("file")
    _common(p)

    p = sub.add_parser("logrel", help="bounded logical-relation check")
    p.add_argument("files", nargs="+")
    p.add_argument("--rel", choices=("L", "M"), default="L")
    _rel_flags(p)
    _common(p)

    p = sub.add_parser("ctx", help="bounded contextual-preorder search")
    p.add_argument("files", nargs="+")
    _ctx_flags(p)
    _common(p, fuel=500)

    p = sub.add_parser("kernel", help="finite-model kernel operations")
    ksub = p.add_subparsers(dest="kernel_command", required=True)
    k = ksub.add_parser("henceforth", help="step-indexed henceforth chain on a finite model")
    k.add_argument("model")
    k.add_argument("--rel", default="top")
    k.add_argument("--max", type=int, default=1000)
    _common(k)

    p = sub.add_parser("fpc", help="nondeterministic lambda calculus")
    fsub = p.add_subparsers(dest="fpc_command", required=True)
    f = fsub.add_parser("check")
    f.add_argument("files", nargs="+")
    _common(f)
    f = fsub.add_parser("may", help="may-termination")
    f.add_argument("file")
    _common(f, fuel=500)
    f = fsub.add_parser("rel", help="bounded logical relation with substitution closure")
    f.add_argument("files", nargs="+")
    _rel_flags(f)
    f.set_defaults(index=3, pool_size=6, max_size=3)
    _common(f)
    f = fsub.add_parser("ctx", help="bounded contextual preorder (closed-hole contexts)")
    f.add_argument("files", nargs="+")
    _ctx_flags(f)
    f.set_defaults(max_size=4)
    _common(f, fuel=500)

    p = sub.add_parser("suite", help="run a named property suite")
    p.add_argument("name", choices=suites.SUITES)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--index", type=int)
    p.add_argument("--pool-size", type=int)
    p.add_argument("--max-size", type=int)
    p.add_argument("--ctx-size", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--fuel", type=int)
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--timing", action="store_true")
    return ap


_DISPATCH = {
    "check": cmd_check,
    "trace": cmd_trace,
    "logrel": cmd_logrel,
    "ctx": cmd_ctx,
    "kernel": cmd_kernel,
    "fpc": cmd_fpc,
    "suite": cmd_suite,
}


def _render_trace(report: dict) -> str:
    lines = [f"{i:3d}  {s}" for i, s in enumerate(report["steps"])]
    if "final" in report:
        state = "value" if report["complete"] else ("cycle" if report["cyclic"] else "fuel exhausted")
        lines.append(f"final: {report['final']} ({state})")
    else:
        lines.append(f"may-terminate: {report['may_terminate']}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    start = time.perf_counter()
    try:
        result, code = _DISPATCH[args.command](args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (SexprError, TypeMismatch, F.TypeMismatch, F.ContextMismatch, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    report = {"command": ["hogsos"] + argv, **result}
    if getattr(args, "timing", False):
        report["elapsed_seconds"] = round(time.perf_counter() - start, 3)
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
    if args.command == "trace":
        print(_render_trace(result))
    else:
        print(text)
    if getattr(args, "json", None):
        Path(args.json).write_text(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
