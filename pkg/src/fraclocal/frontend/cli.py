"""``fraclocal`` command line: checks over ``.cat`` files and the built-in suites.

Exit status is 0 when every check passes, 1 when one fails (the report carries a
witness) and 2 for usage, parse or resolution errors.  Reports go to stdout,
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Any, NamedTuple, Sequence

from ..bf_fractions import POLICIES, build_choice_table, check_bf_axioms, localize_bicategory
from ..bicat import (
    BICAT_FIXTURES, DEFAULT_CAPS, FinBicategory, SizeCaps, WfpSquare, find_weak_fiber_product,
    wfp_failure,
)
from ..cf_fractions import (
    check_cf_axioms, condition_d_failure, condition_e_failure, localize,
)
from ..fincat import FinCategory, cones, validate_category
from ..wfp_fractions import (
    SUITE_FIXTURES, AbcInput, build_unit_diagram, check_abc, verify_theorem_suite,
)
from .resolve import Environment, resolve
from .syntax import ParseError, QueryDecl, parse

SCHEMA_VERSION = 1
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# witness layouts: o = object, m = 1-cell/morphism, c = 2-cell
CF_LAYOUT = {"cf1": "m", "cf2": "mm", "cf3": "mm", "cf4": "mmm"}
BF_LAYOUT = {"bf1": "m", "bf2": "mm", "bf3": "mm", "bf4a": "mmmc", "bf4b": "mmmcomc",
             "bf4c": "mmmcomcomc", "bf5": "mm"}
ABC_LAYOUT = {"a": "ommc", "b": "ommcc", "c": "ommccomcomc"}


class UsageError(Exception):
    pass


def _names(C, layout: str, ids: Sequence[int]) -> list[str]:
    table = {"o": C.objects, "m": C.morphisms, "c": getattr(C, "cells", None)}
    return [table[k][x] for k, x in zip(layout, ids)]


def _result(check: str, subject: dict, ok: bool, details: dict | None = None,
            witness: dict | None = None) -> dict:
    return {"check": check, "subject": subject, "ok": bool(ok), "details": details or {},
            "witness": None if ok else witness}


def _lookup(C, kind: str, name: str) -> int:
    try:
        return getattr(C, kind)(name)
    except (KeyError, ValueError, IndexError):
        what = {"obj": "object", "mor": "morphism", "cell": "2-cell"}[kind]
        raise UsageError(f"{C.name} has no {what} named {name!r}") from None


# -- individual checks ----------------------------------------------------------------

def _run_cf(C: FinCategory, W, subject: dict) -> dict:
    rep = check_cf_axioms(C, W)
    bad = rep.first_failure()
    witness = None
    if bad:
        witness = {"axiom": bad[0], "cells": _names(C, CF_LAYOUT[bad[0]], bad[1].witness)}
    return _result("cf-axioms", subject, rep.ok,
                   {k: r.ok for k, r in rep.as_dict().items()}, witness)


def _run_bf(B: FinBicategory, W, subject: dict) -> dict:
    rep = check_bf_axioms(B, W)
    bad = rep.first_failure()
    witness = None
    if bad:
        witness = {"axiom": bad[0], "cells": _names(B, BF_LAYOUT[bad[0]], bad[1].witness)}
    return _result("bf-axioms", subject, rep.ok,
                   {k: r.ok for k, r in rep.as_dict().items()}, witness)


def _run_localize(C: FinCategory, W, subject: dict, print_classes: bool, max_objects) -> dict:
    cf = _run_cf(C, W, subject)
    if not cf["ok"]:
        return {**cf, "check": "localize"}
    L = localize(C, W, max_objects=max_objects)
    base = L.base
    valid = validate_category(base).ok
    details: dict[str, Any] = {"objects": base.n_objects, "morphisms": base.n_morphisms,
                               "category": valid}
    if print_classes:
        details["classes"] = [
            {"name": base.morphisms[m], "source": base.objects[base.source(m)],
             "target": base.objects[base.target(m)],
             "spans": sorted(f"({C.objects[s.apex]},{C.morphisms[s.w]},{C.morphisms[s.f]})"
                             for s in L.class_of[m])}
            for m in range(base.n_morphisms)]
    return _result("localize", subject, valid, details, {"reason": "not a category"})


def _run_pullback(C: FinCategory, W, subject: dict, f1: str, f2: str, cand) -> dict:
    cf = _run_cf(C, W, subject)
    if not cf["ok"]:
        return {**cf, "check": "pullback"}
    g1, g2 = _lookup(C, "mor", f1), _lookup(C, "mor", f2)
    if C.target(g1) != C.target(g2):
        raise UsageError(f"{f1} and {f2} do not share a target")
    if cand is None:
        for cone in cones(C, g1, g2):
            c = (cone.apex, cone.p1, cone.p2)
            if condition_d_failure(C, W, g1, g2, c) is None and \
                    condition_e_failure(C, W, g1, g2, c) is None:
                found = {"apex": C.objects[c[0]], "p1": C.morphisms[c[1]], "p2": C.morphisms[c[2]]}
                return _result("pullback", subject, True, {"found": found})
        return _result("pullback", subject, False, {"found": None}, {"reason": "no apex"})
    apex, p1, p2 = _lookup(C, "obj", cand[0]), _lookup(C, "mor", cand[1]), _lookup(C, "mor", cand[2])
    c = (apex, p1, p2)
    try:
        d_bad = condition_d_failure(C, W, g1, g2, c)
    except ValueError as exc:
        raise UsageError(f"candidate ({', '.join(cand)}): {exc}") from None
    e_bad = condition_e_failure(C, W, g1, g2, c)
    details = {"d": d_bad is None, "e": e_bad is None}
    witness = None
    if d_bad is not None:
        witness = {"condition": "d", "cone": _names(C, "omm", d_bad)}
    elif e_bad is not None:
        cone, x, y = e_bad
        witness = {"condition": "e", "cone": _names(C, "omm", cone),
                   "factorizations": [_names(C, "omm", x), _names(C, "omm", y)]}
    return _result("pullback", subject, d_bad is None and e_bad is None, details, witness)


def _abc_input(B: FinBicategory, W, p: dict) -> AbcInput:
    ids = (_lookup(B, "mor", p["f1"]), _lookup(B, "mor", p["f2"]), _lookup(B, "obj", p["apex"]),
           _lookup(B, "mor", p["p1"]), _lookup(B, "mor", p["p2"]), _lookup(B, "cell", p["omega"]))
    try:
        return AbcInput(B, W, *ids)
    except ValueError as exc:
        raise UsageError(f"candidate: {exc}") from None


def _run_abc(B: FinBicategory, W, subject: dict, p: dict, policy: str, caps: SizeCaps) -> dict:
    bf = _run_bf(B, W, subject)
    if not bf["ok"]:
        return {**bf, "check": "abc"}
    inp = _abc_input(B, W, p)
    rep = check_abc(inp)
    details: dict[str, Any] = {k: r.ok for k, r in rep.as_dict().items()}
    loc = localize_bicategory(B, W, build_choice_table(B, W, policy), caps=caps)
    unit = wfp_failure(build_unit_diagram(inp, loc)) is None
    details["localized_wfp"] = unit
    details["agree"] = unit == rep.ok
    witness = None
    bad = rep.first_failure()
    if bad:
        k, r = bad
        witness = {"condition": k, "cells": _names(B, ABC_LAYOUT[k], r.instance or ())}
    return _result("abc", subject, rep.ok, details, witness)


def _run_wfp(B: FinBicategory, subject: dict, p: dict) -> dict:
    g1, g2 = _lookup(B, "mor", p["f1"]), _lookup(B, "mor", p["f2"])
    if B.target(g1) != B.target(g2):
        raise UsageError(f"{p['f1']} and {p['f2']} do not share a target")
    if "apex" not in p:
        sq = find_weak_fiber_product(B, g1, g2)
        if sq is None:
            return _result("wfp", subject, False, {"found": None}, {"reason": "no apex"})
        return _result("wfp", subject, True, {"found": sq.describe()})
    try:
        sq = WfpSquare(B, g1, g2, _lookup(B, "obj", p["apex"]), _lookup(B, "mor", p["p1"]),
                       _lookup(B, "mor", p["p2"]), _lookup(B, "cell", p["omega"]))
    except ValueError as exc:
        raise UsageError(f"candidate: {exc}") from None
    bad = wfp_failure(sq)
    witness = None
    if bad is not None:
        witness = {"condition": bad.condition, "object": B.objects[bad.D],
                   "cells": [B.morphisms[x] for x in bad.cells],
                   "witness": [int(x) for x in bad.witness]}
    return _result("wfp", subject, bad is None, {}, witness)


def _run_suite(fixture: str, policy: str, max_objects) -> dict:
    if fixture not in SUITE_FIXTURES:
        raise UsageError(f"unknown fixture {fixture!r}; known: {', '.join(SUITE_FIXTURES)}")
    n = SUITE_FIXTURES[fixture].bicategory
    if max_objects is not None and BICAT_FIXTURES[n]().n_objects > max_objects:
        raise UsageError(f"fixture {fixture} has more than {max_objects} objects")
    out = verify_theorem_suite(fixture, policy=policy)
    failed = [k for k, v in out["properties"].items() if v["status"] != "pass"]
    witness = None
    if failed:
        witness = {"property": failed[0], **{k: v for k, v in out["properties"][failed[0]].items()
                                             if k in ("witness", "detail")}}
    return _result("suite", {"fixture": fixture, "W": out["W"], "policy": policy}, out["ok"],
                   {"properties": out["properties"]}, witness)


# -- jobs ---------------------------------------------------------------------------

class Job(NamedTuple):
    kind: str
    text: str | None
    params: dict
    options: dict


class _Outcome(NamedTuple):
    result: dict | None
    error: str | None


REQUIRED = {
    "cf": ("category", "class"), "bf": ("bicategory", "class"),
    "localize": ("category", "class"), "pullback": ("category", "class", "f1", "f2"),
    "abc": ("bicategory", "class", "f1", "f2", "apex", "p1", "p2", "omega"),
    "wfp": ("bicategory", "f1", "f2"), "suite": ("fixture",),
}
OPTIONAL = {"pullback": ("apex", "p1", "p2"), "wfp": ("apex", "p1", "p2", "omega")}


# query keys avoid the item keywords, so a query never needs more than one token of lookahead
QUERY_KEYS = {"cat": "category", "bicat": "bicategory", "W": "class"}
_SHORT = {v: k for k, v in QUERY_KEYS.items()}


def _check_params(kind: str, params: dict) -> None:
    missing = [k for k in REQUIRED[kind] if k not in params]
    if missing:
        raise UsageError(f"check {kind} needs {', '.join(_SHORT.get(k, k) for k in missing)}")
    allowed = set(REQUIRED[kind]) | set(OPTIONAL.get(kind, ()))
    extra = sorted(set(params) - allowed)
    if extra:
        raise UsageError(f"check {kind} does not take {', '.join(_SHORT.get(k, k) for k in extra)}")
    opt = [k for k in OPTIONAL.get(kind, ()) if k in params]
    if opt and len(opt) != len(OPTIONAL[kind]):
        raise UsageError(f"check {kind} needs all of {', '.join(OPTIONAL[kind])} or none")


def _load(text: str, max_objects) -> Environment:
    return resolve(parse(text), max_objects=max_objects)


def _category(env: Environment, params: dict):
    try:
        C = env.category(params["category"])
        return C, env.klass(params["class"], params["category"], C)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _bicategory(env: Environment, params: dict):
    try:
        B = env.bicategory(params["bicategory"])
        return B, env.klass(params["class"], params["bicategory"], B) if "class" in params else None
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _execute(job: Job) -> dict:
    kind, p, opt = job.kind, job.params, job.options
    if kind == "suite":
        return _run_suite(p["fixture"], opt["policy"], opt["max_objects"])
    env = _load(job.text, opt["max_objects"])
    subject = {k: p[k] for k in ("category", "bicategory", "class") if k in p}
    if kind in ("cf", "localize", "pullback"):
        C, W = _category(env, p)
        if kind == "cf":
            return _run_cf(C, W, subject)
        if kind == "localize":
            return _run_localize(C, W, subject, opt.get("print_classes", False), opt["max_objects"])
        cand = (p["apex"], p["p1"], p["p2"]) if "apex" in p else None
        return _run_pullback(C, W, subject, p["f1"], p["f2"], cand)
    B, W = _bicategory(env, p)
    if kind == "bf":
        return _run_bf(B, W, subject)
    if kind == "wfp":
        return _run_wfp(B, subject, p)
    return _run_abc(B, W, subject, p, opt["policy"], opt["caps"])


def _safe_execute(job: Job) -> _Outcome:
    try:
        return _Outcome(_execute(job), None)
    except ParseError as exc:
        return _Outcome(None, exc.render())
    except UsageError as exc:
        return _Outcome(None, str(exc))
    except (KeyError, ValueError) as exc:
        # size caps, malformed candidates and similar problems with the input
        return _Outcome(None, str(exc.args[0]) if exc.args else type(exc).__name__)


def run_jobs(jobs: list[Job], n_jobs: int = 1) -> list[_Outcome]:
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(_safe_execute, jobs))
    return [_safe_execute(j) for j in jobs]


# -- reports -------------------------------------------------------------------------

def build_report(command: str, results: list[dict]) -> dict:
    return {"schema": SCHEMA_VERSION, "command": command,
            "ok": all(r["ok"] for r in results), "results": results}


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render_text(report: dict) -> str:
    lines = []
    for r in report["results"]:
        subject = " ".join(f"{k}={v}" for k, v in r["subject"].items())
        lines.append(f"{'PASS' if r['ok'] else 'FAIL'} {r['check']} {subject}")
        details = r["details"]
        if r["check"] == "suite":
            for name, prop in details["properties"].items():
                extra = f" ({prop['checked']} checked)" if "checked" in prop else ""
                lines.append(f"  {name}: {prop['status']}{extra}")
        elif r["check"] == "localize" and "classes" in details:
            lines.append(f"  objects: {details['objects']}")
            lines.append(f"  morphisms: {details['morphisms']}")
            for c in details["classes"]:
                lines.append(f"  {c['name']}: {c['source']} -> {c['target']}  {' '.join(c['spans'])}")
        else:
            for k, v in details.items():
                lines.append(f"  {k}: {_fmt(v)}")
        if r["witness"] is not None:
            lines.append(f"  witness: {_fmt(r['witness'])}")
    lines.append(f"verdict: {'pass' if report['ok'] else 'fail'}")
    return "\n".join(lines) + "\n"


# -- argument parsing ---------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # the flags are accepted before and after the subcommand; only the top level sets defaults
    def d(v):
        return argparse.SUPPRESS if suppress else v
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=d("text"))
    common.add_argument("--max-objects", type=_positive, default=d(None), metavar="N",
                        help="raise or lower the object limit")
    common.add_argument("--seed-choices", choices=POLICIES, default=d("c3"),
                        help="policy for the ambient choices behind a localization")
    common.add_argument("--jobs", type=_positive, default=d(1), metavar="N",
                        help="run independent checks in N processes")
    return common


def make_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    ap = argparse.ArgumentParser(prog="fraclocal", parents=[_global_flags(suppress=False)],
                                 description="Check calculus-of-fractions conditions on finite "
                                             "categories and 2-categories.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def cmd(name: str, help: str, file: bool = True, one: str | None = None, cls: bool = True):
        p = sub.add_parser(name, parents=[common], help=help)
        if file:
            p.add_argument("file", metavar="FILE")
        if one:
            p.add_argument(f"--{one}", required=True, metavar="NAME")
        if cls:
            p.add_argument("--class", dest="klass", required=True, metavar="W")
        return p

    cmd("check-cf", "check the calculus-of-fractions axioms", one="category")
    cmd("check-bf", "check the bicategory-of-fractions axioms", one="bicategory")
    p = cmd("localize", "build C[W^-1]", one="category")
    p.add_argument("--print-classes", action="store_true")
    p = cmd("pullback", "test or search a strong fraction pullback", one="category")
    p.add_argument("--f1", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--candidate", metavar="APEX,P1,P2")
    p = cmd("check-abc", "conditions (a), (b), (c) for a candidate square", one="bicategory")
    for k in ("f1", "f2", "apex", "p1", "p2", "omega"):
        p.add_argument(f"--{k}", required=True)
    p = sub.add_parser("suite", parents=[common], help="run the property suite on fixtures")
    p.add_argument("fixtures", nargs="+", metavar="FIXTURE",
                   help=f"one of {', '.join(SUITE_FIXTURES)}, or 'all'")
    p = sub.add_parser("run", parents=[common], help="run every check query in a file")
    p.add_argument("file", metavar="FILE")
    return ap


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise UsageError(f"{path} is not UTF-8 text") from None


def _jobs_from_args(args: argparse.Namespace, options: dict) -> list[Job]:
    c = args.command
    if c == "suite":
        ids = list(SUITE_FIXTURES) if args.fixtures == ["all"] else args.fixtures
        return [Job("suite", None, {"fixture": f}, options) for f in ids]
    text = _read(args.file)
    doc = parse(text)
    resolve(doc, max_objects=options["max_objects"])
    if c == "run":
        queries = list(doc.of_type(QueryDecl))
        if not queries:
            raise UsageError(f"{args.file} has no check queries")
        jobs = []
        for q in queries:
            params = {QUERY_KEYS.get(k.value, k.value): v.value for k, v in q.params}
            try:
                _check_params(q.kind.value, params)
            except UsageError as exc:
                raise UsageError(f"{args.file}:{q.span.line}:{q.span.column}: {exc}") from None
            jobs.append(Job(q.kind.value, text, params, options))
        return jobs
    params: dict[str, str] = {"class": args.klass}
    if c in ("check-cf", "localize", "pullback"):
        params["category"] = args.category
    else:
        params["bicategory"] = args.bicategory
    if c == "pullback":
        params.update(f1=args.f1, f2=args.f2)
        if args.candidate is not None:
            parts = [s.strip() for s in args.candidate.split(",")]
            if len(parts) != 3 or not all(parts):
                raise UsageError("--candidate takes APEX,P1,P2")
            params.update(apex=parts[0], p1=parts[1], p2=parts[2])
    if c == "check-abc":
        params.update({k: getattr(args, k) for k in ("f1", "f2", "apex", "p1", "p2", "omega")})
    kind = {"check-cf": "cf", "check-bf": "bf", "check-abc": "abc"}.get(c, c)
    if c == "localize":
        options = {**options, "print_classes": args.print_classes}
    return [Job(kind, text, params, options)]


def main(argv: Sequence[str] | None = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    caps = DEFAULT_CAPS
    if args.max_objects is not None:
        caps = SizeCaps(objects=args.max_objects, one_cells=DEFAULT_CAPS.one_cells,
                        two_cells=DEFAULT_CAPS.two_cells)
    options = {"max_objects": args.max_objects, "policy": args.seed_choices, "caps": caps}
    try:
        jobs = _jobs_from_args(args, options)
    except ParseError as exc:
        print(f"fraclocal: {getattr(args, 'file', '')}:{exc.render()}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"fraclocal: {exc}", file=sys.stderr)
        return EXIT_USAGE
    outcomes = run_jobs(jobs, args.jobs)
    errors = list(dict.fromkeys(o.error for o in outcomes if o.error is not None))
    if errors:
        where = f"{args.file}:" if getattr(args, "file", None) else ""
        for e in errors:
            print(f"fraclocal: {where}{e}", file=sys.stderr)
        return EXIT_USAGE
    report = build_report(args.command, [o.result for o in outcomes])
    if args.format == "json":
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
    else:
        sys.stdout.write(render_text(report))
    return EXIT_PASS if report["ok"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
