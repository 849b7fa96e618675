"""Command-line front end.

Exit codes: 0 true (or success), 1 false, 2 timeout or unknown, 3 error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .decider import decide_mc, decide_succ_nonuniform
from .diagonalizer import SearchConfig, run_construction, verify_defeat
from .functionals import functional_registry, get_functional
from .logic import ParseError, parse, show
from .presentations import FAMILIES, PresentationError, parse_presentation
from .sigma1 import approx_json, eval_sigma1_form, sigma1_form
from .theories import get_theory, registry, verify_qe

EXIT_TRUE, EXIT_FALSE, EXIT_TIMEOUT, EXIT_ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(args, payload: dict):
    payload = {"seed": args.seed, **payload}
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return payload


def _say(args, msg: str):
    if not args.quiet:
        print(msg)


def _check_signature(T, P):
    if set(T.signature.relation_names) != set(P.signature.relation_names):
        raise UsageError(f"presentation {P.spec} does not match the signature of {T.id}")


def cmd_decide(args) -> int:
    T = get_theory(args.theory)
    P = parse_presentation(args.presentation)
    _check_signature(T, P)
    s = parse(args.sentence, T.constants)
    if T.is_model_complete:
        bit, trace = decide_mc(T, P, s, args.max_steps)
    elif T.id == "succ":
        bit, trace = decide_succ_nonuniform(P, s, args.max_steps)
    else:
        raise UsageError(f"no decision procedure for {T.id}")
    payload = {"theory": T.id, "presentation": P.spec, "sentence": show(s), **trace.to_dict()}
    _emit(args, payload)
    if args.trace:
        with open(args.trace, "w") as fh:
            json.dump(trace.to_dict(), fh, indent=2, sort_keys=True)
    _say(args, f"{trace.verdict} ({trace.steps} steps, {len(trace.queries)} queries)")
    return {1: EXIT_TRUE, 0: EXIT_FALSE}.get(bit, EXIT_TIMEOUT)


def cmd_sigma1(args) -> int:
    from .decider import as_functional
    T = get_theory(args.theory)
    alpha = parse(args.alpha, T.constants)
    form = sigma1_form(as_functional(T), alpha, args.stage, T.signature)
    payload = {"theory": T.id, "stage": args.stage, **approx_json(alpha, form)}
    code = EXIT_TRUE
    if args.eval:
        spec, _, tup = args.eval.rpartition(":")
        if not spec:
            raise UsageError("--eval expects <presentation>:<a0,a1,...>")
        P = parse_presentation(spec)
        a = tuple(int(v) for v in tup.split(",") if v != "")
        result = eval_sigma1_form(P, form, a, args.witness_bound)
        payload["eval"] = {"presentation": P.spec, "tuple": list(a),
                           "witness_bound": args.witness_bound, "result": result}
        code = EXIT_TRUE if result is True else EXIT_TIMEOUT
        _say(args, f"{P.spec} {a}: {result}")
    _emit(args, payload)
    for entry in form:
        _say(args, f"pattern {entry.pattern}: {len(entry.approx.disjuncts)} disjuncts")
    return code


def cmd_diagonalize(args) -> int:
    A = parse_presentation(args.base)
    names = [n for n in args.functionals.split(",") if n]
    phis = [get_functional(n) for n in names]
    cfg = SearchConfig(run_cap=args.run_cap, order=args.order)
    res = run_construction(A, phis, args.stages, cfg)
    bp = res.b_prefix()
    payload = res.to_dict()
    payload["functionals"] = names
    for ev, phi, out in zip(res.evidence, phis, payload["evidence"]):
        out["verified"] = verify_defeat(bp, phi, ev, A, res.p, run_cap=cfg.run_cap)
    _emit(args, payload)
    for name, out in zip(names, payload["evidence"]):
        _say(args, f"{name}: {out['kind']} (verified={out['verified']})")
    return EXIT_TRUE


def cmd_list(args) -> int:
    if args.kind == "theories":
        rows = [(T.id, f"{T.name}; model complete: {T.is_model_complete}") for T in registry()]
    elif args.kind == "presentations":
        rows = list(FAMILIES.items())
    elif args.kind == "functionals":
        rows = [(k, f.description) for k, f in functional_registry().items()]
    else:
        raise UsageError(f"unknown kind {args.kind!r}")
    for k, d in rows:
        _say(args, f"{k:16} {d}")
    _emit(args, {"kind": args.kind, "entries": [{"id": k, "description": d} for k, d in rows]})
    return EXIT_TRUE


def cmd_verify_qe(args) -> int:
    T = get_theory(args.theory)
    phi = parse(args.formula, T.constants)
    report = verify_qe(T, phi, args.samples, seed=args.seed)
    _emit(args, report.to_dict())
    _say(args, f"{len(report.mismatches)} mismatches in {args.samples} samples")
    return EXIT_TRUE if report.ok else EXIT_FALSE


def _positive(v):
    n = int(v)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write JSON output here")
    common.add_argument("--quiet", action="store_true")

    ap = argparse.ArgumentParser(prog="modelcomplete", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", parents=[common], help="decide a sentence in a presentation")
    p.add_argument("--theory", required=True)
    p.add_argument("--presentation", required=True)
    p.add_argument("--sentence", required=True)
    p.add_argument("--max-steps", type=_positive, default=10**6)
    p.add_argument("--trace")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("sigma1", parents=[common], help="build Sigma_1 approximations")
    p.add_argument("--theory", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--stage", type=_positive, required=True)
    p.add_argument("--eval", help="<presentation>:<a0,a1,...>")
    p.add_argument("--witness-bound", type=_positive, default=50)
    p.set_defaults(func=cmd_sigma1)

    p = sub.add_parser("diagonalize", parents=[common], help="run the priority construction")
    p.add_argument("--base", required=True)
    p.add_argument("--functionals", default="")
    p.add_argument("--stages", type=_positive, required=True)
    p.add_argument("--run-cap", type=_positive, default=2000)
    p.add_argument("--order", choices=["LRS", "LSR"], default="LRS")
    p.set_defaults(func=cmd_diagonalize)

    p = sub.add_parser("list", parents=[common], help="list registered identifiers")
    p.add_argument("kind", choices=["theories", "presentations", "functionals"])
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify-qe", parents=[common], help="check an elimination on samples")
    p.add_argument("--theory", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--samples", type=_positive, default=100)
    p.set_defaults(func=cmd_verify_qe)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_TRUE
    try:
        return args.func(args)
    except (UsageError, ParseError, PresentationError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
