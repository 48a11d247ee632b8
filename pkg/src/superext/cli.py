"""Command-line entry point.

Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 capacity refusal.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import export as exporting
from .enumeration import (
    count_mls,
    enumerate_maximal_invariant_linked,
    enumerate_mls,
    upset_mls,
)
from .errors import BudgetExceeded, CapacityError, SpecError
from .groups import group_from_spec, make_cyclic, quotient, subgroup_of
from .hyperspace import parse, render
from .semigroup import (
    check_narist,
    check_rectangular_invariant,
    check_stideal,
    check_upset_left_ideal,
    minimal_left_ideals,
    product,
    superextension,
)
from .suite import load_config, run_verify_all
from .tower import _two_adic, check_tower_coherence, verify_lemma_inj, verify_lemma_l1, verify_minideal_tower

log = logging.getLogger("superext")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _write(args, data: bytes):
    if getattr(args, "output", None):
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.write(data.decode())


def _group(args):
    return group_from_spec(args.group)


def _subgroup(args, g):
    if not args.subgroup:
        raise SpecError("--subgroup is required", axiom="syntax")
    text = args.subgroup.strip()
    try:
        elems = json.loads(text) if text.startswith("[") else [int(x) for x in text.split(",") if x.strip()]
    except (ValueError, json.JSONDecodeError):
        raise SpecError(f"cannot parse subgroup {text!r}", axiom="syntax") from None
    return subgroup_of(g, elems)


def _family(text, n):
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    f = parse(text)
    if f.n != n:
        raise SpecError(f"family lives on {f.n} points, group has {n}", axiom="ground")
    return f


def cmd_enum(args):
    g = _group(args)
    n = g.order
    if args.invariant_max:
        fams = enumerate_maximal_invariant_linked(g)
    elif args.upset:
        fams = upset_mls(_family(args.upset, n), g, limit=args.budget, timeout=args.timeout)
    elif args.count_only:
        if n > 7:
            enumerate_mls(g)  # raises the capacity error
        sys.stdout.write(json.dumps({"group": g.name, "count": count_mls(g, jobs=args.jobs)}) + "\n")
        return 0
    else:
        try:
            fams = enumerate_mls(g, args.budget, jobs=args.jobs, timeout=args.timeout)
        except BudgetExceeded as exc:
            _write(args, exporting.export(exc.partial, args.out))
            raise
    if args.count_only:
        sys.stdout.write(json.dumps({"group": g.name, "count": len(fams)}) + "\n")
        return 0
    _write(args, exporting.export(list(fams), args.out))
    return 0


def cmd_product(args):
    g = _group(args)
    a = _family(args.left, g.order)
    b = _family(args.right, g.order)
    sys.stdout.write(render(product(a, b, g)) + "\n")
    return 0


def cmd_ideals(args):
    g = _group(args)
    strategy = {"brute": "brute", "trace": "seeded", "auto": "auto"}[args.strategy]
    ideals = minimal_left_ideals(g, strategy, timeout=args.timeout)
    if args.report == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ideal", "size", "seeded", "member"])
        for i, ideal in enumerate(ideals):
            for f in ideal.members:
                w.writerow([i, len(ideal), int(ideal.seeded), render(f)])
        _write(args, buf.getvalue().encode())
    else:
        report = {"group": g.name, "strategy": args.strategy, "count": len(ideals),
                  "sizes": [len(i) for i in ideals], "ideals": [i.to_json() for i in ideals]}
        _write(args, (_dump(report) + "\n").encode())
    return 0


def cmd_tower(args):
    report = check_tower_coherence(args.levels, samples=args.samples)
    sys.stdout.write(_dump(report) + "\n")
    return 0 if report["ok"] else 1


def _verify_one(args):
    what = args.what
    g = _group(args)
    if what == "stideal":
        return [check_stideal(g)]
    if what == "rectangular":
        return [check_rectangular_invariant(g)]
    if what == "narist":
        return [check_narist(l0, g) for l0 in enumerate_maximal_invariant_linked(g)]
    if what == "upset":
        return [check_upset_left_ideal(l0, g) for l0 in enumerate_maximal_invariant_linked(g)]
    if what == "lemma-inj":
        return [verify_lemma_inj(g, _subgroup(args, g), samples=args.samples)]
    if what == "l1":
        h = _subgroup(args, g) if args.subgroup else frozenset([g.identity])
        _, pi = quotient(g, h)
        return [verify_lemma_l1(pi)]
    if what == "minideal":
        if g != make_cyclic(g.order):
            raise SpecError("minideal needs a cyclic group given as Cn", axiom="cyclic")
        k, _ = _two_adic(g.order)
        return [verify_minideal_tower(g.order, k, timeout=args.timeout)]
    raise SpecError(f"unknown check {what!r}")


def cmd_verify(args):
    if args.what == "all":
        if args.group:
            cfg = load_config(args.config)
            cfg["groups"] = [args.group]
        else:
            cfg = load_config(args.config)
        status, bundle = run_verify_all(cfg, out_dir=args.out_dir, fixtures=args.fixtures, jobs=args.jobs,
                                        budget=args.timeout)
        if not args.out_dir:
            sys.stdout.write(_dump(bundle) + "\n")
        return status
    if not args.group:
        raise SpecError("--group is required", axiom="syntax")
    reports = _verify_one(args)
    sys.stdout.write(_dump(reports if len(reports) != 1 else reports[0]) + "\n")
    return 0 if all(r.get("ok") for r in reports) else 1


def cmd_export(args):
    g = _group(args)
    what = args.what
    if what == "lambda":
        obj = list(superextension(g).elements) if g.order <= 6 else enumerate_mls(g, jobs=args.jobs)
    elif what == "table":
        obj = superextension(g)
    elif what == "ideals":
        obj = minimal_left_ideals(g)
    elif what == "minideal":
        obj = minimal_left_ideals(g)[:1]
    elif what == "invariant-max":
        obj = enumerate_maximal_invariant_linked(g)
    else:
        raise SpecError(f"unknown export object {what!r}", axiom="export-format")
    _write(args, exporting.export(obj, args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superext", description="Superextensions of finite groups.")
    p.add_argument("--json-errors", action="store_true", help="print errors as JSON on stderr")
    p.add_argument("-v", "--verbose", action="store_true")
    # the global flags are also accepted after the command name
    glob = argparse.ArgumentParser(add_help=False)
    glob.add_argument("--json-errors", action="store_true", default=argparse.SUPPRESS)
    glob.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[glob], **kw)

    sub.add_parser = add_parser

    def common(sp, group_required=True):
        sp.add_argument("--group", required=group_required,
                        help='group spec: "C6", "C2xC2" or JSON such as {"kind":"cyclic","n":6}')
        sp.add_argument("--jobs", type=int, default=None, help="worker processes (default: SUPEREXT_JOBS or 1)")
        sp.add_argument("--timeout", type=float, default=120.0, help="runtime budget in seconds")
        sp.add_argument("--output", help="write to a file instead of stdout")

    e = sub.add_parser("enum", help="enumerate maximal linked systems")
    common(e)
    e.add_argument("--invariant-max", action="store_true", help="maximal invariant linked systems")
    e.add_argument("--upset", metavar="FAMILY", help="systems containing a linked family (JSON or @file)")
    e.add_argument("--count-only", action="store_true")
    e.add_argument("--out", choices=["jsonl", "csv"], default="jsonl")
    e.add_argument("--budget", type=int, default=None, help="stop after this many systems")
    e.set_defaults(func=cmd_enum)

    pr = sub.add_parser("product", help="multiply two families")
    common(pr)
    pr.add_argument("--left", required=True)
    pr.add_argument("--right", required=True)
    pr.set_defaults(func=cmd_product)

    i = sub.add_parser("ideals", help="minimal left ideals")
    common(i)
    i.add_argument("--strategy", choices=["auto", "brute", "trace"], default="auto")
    i.add_argument("--report", choices=["json", "csv"], default="json")
    i.set_defaults(func=cmd_ideals)

    t = sub.add_parser("tower", help="coherence of the stage maps C_2 <- C_4 <- ...")
    t.add_argument("--levels", type=int, required=True)
    t.add_argument("--samples", type=int, default=5)
    t.set_defaults(func=cmd_tower)

    v = sub.add_parser("verify", help="run a check, or all of them")
    common(v, group_required=False)
    v.add_argument("what", choices=["narist", "stideal", "rectangular", "upset", "lemma-inj", "minideal",
                                    "l1", "all"])
    v.add_argument("--subgroup", help="comma-separated elements or a JSON list")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--config", help="JSON config for 'all'")
    v.add_argument("--out-dir", help="directory for per-theorem JSON reports")
    v.add_argument("--fixtures", help="fixture directory: frozen on first run, diffed afterwards")
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("export", help="canonical exports")
    common(x)
    x.add_argument("what", choices=["lambda", "table", "ideals", "minideal", "invariant-max"])
    x.add_argument("--format", choices=["jsonl", "csv", "dot"], default="jsonl")
    x.set_defaults(func=cmd_export)
    return p


def _fail(args, code, exc, payload):
    if args.json_errors:
        payload = dict(payload, exit=code)
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"superext: {exc}\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CapacityError as exc:
        return _fail(args, 3, exc, exc.to_json())
    except SpecError as exc:
        return _fail(args, 2, exc, exc.to_json())
    except (ValueError, OSError) as exc:
        return _fail(args, 2, exc, {"error": type(exc).__name__, "message": str(exc), "axiom": None})


if __name__ == "__main__":
    sys.exit(main())
