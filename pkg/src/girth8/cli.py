"""Command-line front end: ``girth8 <subcommand> ...``.

Exit codes: 0 clean, 2 disagreement (engines, classifier vs girth, failed
isomorphism or golden mismatch), 3 hypothesis or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .census import (
    EXIT_DISAGREE,
    EXIT_INPUT,
    EXIT_OK,
    CensusJob,
    GOLDEN_LEMMA2,
    JobError,
    lemma2_diff,
    rows_to_csv,
    run_census,
    write_outputs,
)
from .classify import (
    InvalidInstance,
    SizeConditionError,
    check_size_condition,
    classify,
    parse_instance,
    theorem1_equivalence,
)
from .field import FieldError, arith, parse_field
from .graph import (
    CapExceeded,
    EngineDisagreement,
    GraphSpec,
    delta_girth,
    find_8cycle,
    girth_leq_detail,
)
from .iso import ChainError, chain_to_gamma3, gamma3_8cycle, pullback_cycle, verify_iso
from .poly import PolyParseError, parse_poly

log = logging.getLogger("girth8")


def _fail(msg: str, code: int = EXIT_INPUT) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_field(args) -> int:
    F = parse_field(args.field)
    mod = " + ".join(
        (f"{c}*" if c != 1 else "") + (f"x^{i}" if i > 1 else "x") if i else str(c)
        for i, c in reversed(list(enumerate(F.modulus))) if c
    )
    if args.op is None:
        print(f"field F_{F.name}: p = {F.p}, k = {F.k}, q = {F.q}")
        print(f"modulus: {mod}")
        if args.list:
            print(" ".join(str(e) for e in F.elements()))
        return EXIT_OK
    vals = [F.element(int(a)) for a in args.operands]
    if args.op == "pow":
        vals[-1] = int(args.operands[-1])
    print(arith(args.op, *vals))
    return EXIT_OK


def _spec(args) -> GraphSpec:
    F = parse_field(args.field)
    return GraphSpec(F, parse_poly(args.f2, F), parse_poly(args.f3, F))


def cmd_girth(args) -> int:
    spec = _spec(args)
    if args.engine == "delta":
        length, seed = delta_girth(spec)
        if length is not None and length > args.cap:
            length, seed = None, None
    else:
        length, seed = girth_leq_detail(spec, args.cap)
        if args.engine == "both":
            other, _ = delta_girth(spec)
            if other is not None and other > args.cap:
                other = None
            if other != length:
                return _fail(f"engines disagree: bfs {length}, delta {other}", EXIT_DISAGREE)
    if length is not None:
        print(f"girth = {length}")
        print(f"seed {seed}")
        return EXIT_OK
    if args.cap == 4:
        print("girth >= 6")
        return EXIT_OK
    seed8 = find_8cycle(spec) if spec.q <= 13 else None
    if seed8 is None:
        print("girth >= 8")
    else:
        print("girth = 8")
        print(f"seed {seed8}")
    return EXIT_OK


def cmd_classify(args) -> int:
    inst = parse_instance(args.instance)
    rep = check_size_condition(inst.q, inst.m, inst.n)
    if not rep.size_ok:
        print(f"warning: q = {inst.q} fails the size condition "
              f"q > max{{2mn+3, mn+3n+1, n(n+1)+2}} = max{rep.bounds}", file=sys.stderr)
        if not args.warn_only:
            return EXIT_INPUT
    if args.equivalence:
        v = theorem1_equivalence(inst, engine=args.engine, warn_only=True)
        out = v.to_dict()
        out["classified"] = v.classified
        print(json.dumps(out))
        return EXIT_OK if v.agree else EXIT_DISAGREE
    w = classify(inst, warn_only=True)
    print(json.dumps(w.to_dict()) if w else "no case")
    return EXIT_OK


def cmd_census(args) -> int:
    job = CensusJob.load(args.job)
    res = run_census(job, jobs=args.jobs, timing=not args.no_timing)
    if args.out:
        csv_path, jl_path = write_outputs(res, args.out)
        print(f"wrote {csv_path} and {jl_path}", file=sys.stderr)
    else:
        sys.stdout.write(rows_to_csv(res.rows))
    print(json.dumps(res.summary), file=sys.stderr)
    return res.exit_code


def cmd_iso(args) -> int:
    inst = parse_instance(args.instance)
    w = classify(inst, warn_only=args.warn_only)
    if w is None:
        print("no case: the instance is not isomorphic to Gamma_3")
        return EXIT_OK
    chain = chain_to_gamma3(w, inst)
    print(chain.transcript() or "(empty chain)")
    ok = verify_iso(chain, args.mode, samples=args.samples, seed=args.seed)
    print(f"verify {args.mode}: {'pass' if ok else 'FAIL'}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(chain.dumps() + "\n")
    if not ok:
        return EXIT_DISAGREE
    cyc = pullback_cycle(chain, gamma3_8cycle(chain.target.field))
    print("8-cycle: " + " ".join(str(v) for v in cyc.vertices))
    return EXIT_OK


def cmd_lemma2(args) -> int:
    lines, bad = lemma2_diff(args.golden)
    for line in lines:
        print(line)
    if bad:
        for b in bad:
            print(f"mismatch {b}", file=sys.stderr)
        return EXIT_DISAGREE
    print("golden: match")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="girth8", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("field", help="describe a field or do one arithmetic operation")
    p.add_argument("--field", required=True, help='"p" or "p^k"')
    p.add_argument("--op", choices=("add", "sub", "mul", "neg", "inv", "pow"))
    p.add_argument("operands", nargs="*", help="element encodings (pow: element then exponent)")
    p.add_argument("--list", action="store_true", help="list the elements")
    p.set_defaults(fn=cmd_field)

    p = sub.add_parser("girth", help="girth of Gamma_F(f2, f3) up to 8")
    p.add_argument("--field", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--f3", required=True)
    p.add_argument("--engine", choices=("bfs", "delta", "both"), default="bfs")
    p.add_argument("--cap", type=int, choices=(4, 6), default=6)
    p.set_defaults(fn=cmd_girth)

    p = sub.add_parser("classify", help="match an instance against the normal forms")
    p.add_argument("instance", help='"q=<p^k> m=<int> n=<int> f=<poly> g=<poly> h=<poly>"')
    p.add_argument("--warn-only", action="store_true", help="run even if the size condition fails")
    p.add_argument("--equivalence", action="store_true", help="also decide girth over F_{q^M}")
    p.add_argument("--engine", choices=("bfs", "delta", "both"), default="bfs")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("census", help="run a JSON census job")
    p.add_argument("job")
    p.add_argument("--out", help="CSV path; JSON lines go next to it")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="write millis = 0 for byte-stable output")
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("iso", help="build and verify the chain to Gamma_3")
    p.add_argument("instance")
    p.add_argument("--mode", choices=("full", "sampled"), default="sampled")
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the chain as JSON")
    p.add_argument("--warn-only", action="store_true")
    p.set_defaults(fn=cmd_iso)

    p = sub.add_parser("lemma2-suite", help="small-field girth facts against the golden file")
    p.add_argument("--golden", default=GOLDEN_LEMMA2)
    p.set_defaults(fn=cmd_lemma2)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except PolyParseError as exc:
        return _fail(f"parse error: {exc}")
    except InvalidInstance as exc:
        return _fail("hypothesis violated: " + "; ".join(exc.violations))
    except SizeConditionError as exc:
        return _fail(str(exc))
    except (FieldError, JobError, ValueError) as exc:
        if isinstance(exc, CapExceeded):
            return _fail(f"cap exceeded: {exc}")
        return _fail(str(exc))
    except (EngineDisagreement, ChainError) as exc:
        return _fail(str(exc), EXIT_DISAGREE)
    except OSError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
