"""Command-line front end.

Every subcommand loads its inputs, makes one library call and formats the
result.  Exit codes: 0 holds / success, 1 the property fails, 2 bad usage or
input, 3 a search budget ran out.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .algebra import (
    BUILTIN_NAMES,
    AlgebraError,
    FiniteAlgebra,
    builtin_algebra,
    builtin_algebras,
    check_identity,
    from_json,
    load_algebra,
)
from .catalog import UnknownLabel, builtin_catalog
from .congruence import (
    NotEquivalence,
    RelationKind,
    RelationRefused,
    all_congruences,
    as_partition,
    derived_relation,
    is_congruence,
    is_simple,
    monolith,
)
from .proofs import ChainBreak, ScriptError, load_all, load_script, replay
from .search import SearchConfig, enumerate_models, load_corpus, verify_suite
from .terms import TermSyntaxError, fold_comp, format_identity, format_term, parse_conditional
from .variety import (
    DEFAULT_ELEMENT_BUDGET,
    ClosureBudgetExceeded,
    Effort,
    Member,
    NonMember,
    UndecidedPairs,
    all_subsets,
    check_lattice_shape,
    free_algebra,
    in_variety,
    variety_poset,
)

OK, FAILS, USAGE, BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _table(A: FiniteAlgebra) -> str:
    return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in A.rows()) + "]"


def _blocks(p) -> str:
    return " | ".join(" ".join(map(str, b)) for b in p.blocks)


def read_algebra(spec: str) -> FiniteAlgebra:
    """A JSON file, or one of the built-in names 2z 2s 2b 3k 4d."""
    path = Path(spec)
    if path.is_file():
        try:
            return load_algebra(path)
        except json.JSONDecodeError as exc:
            raise InputError(f"{spec}: malformed JSON ({exc})") from None
    if spec in BUILTIN_NAMES:
        return builtin_algebra(spec)
    raise InputError(f"{spec}: no such file or built-in algebra")


def read_identity(text: str):
    cat = builtin_catalog()
    if text in cat:
        return cat[text]
    try:
        return parse_conditional(text)
    except TermSyntaxError as exc:
        raise InputError(f"neither a catalog label nor an identity: {exc}") from None


def read_corpus(path: str) -> list[FiniteAlgebra]:
    """All algebras in a directory (*.json, *.jsonl) or in a single such file."""
    p = Path(path)
    if p.is_dir():
        files = sorted(f for f in p.iterdir() if f.suffix in (".json", ".jsonl"))
    elif p.is_file():
        files = [p]
    else:
        raise InputError(f"{path}: no such corpus")
    out: list[FiniteAlgebra] = []
    for f in files:
        try:
            if f.suffix == ".jsonl":
                out.extend(load_corpus(f.read_text(encoding="utf-8").splitlines()))
            else:
                out.append(from_json(json.loads(f.read_text(encoding="utf-8"))))
        except json.JSONDecodeError as exc:
            raise InputError(f"{f}: malformed JSON ({exc})") from None
    return out


# -- subcommands ------------------------------------------------------------

def cmd_check(args, out):
    A = read_algebra(args.algebra)
    e = read_identity(args.identity)
    r = check_identity(A, e)
    if args.format == "json":
        out.write(_dump({
            "algebra": A.name, "identity": format_identity(e), "holds": r.holds,
            "counterexample": r.counterexample, "lhs": r.lhs_value, "rhs": r.rhs_value,
        }) + "\n")
    else:
        out.write(f"{A.name or args.algebra}: {format_identity(e)}: {r.describe()}\n")
    return OK if r.holds else FAILS


def cmd_enumerate(args, out):
    extra = tuple(args.identity) + (("I20",) if args.i20 else ())
    cfg = SearchConfig(args.n, extra, budget=args.budget, simple_only=args.simple_only)
    corpus = enumerate_models(cfg, workers=max(1, args.threads))
    if args.format == "json":
        out.write(corpus.to_jsonl())
    else:
        for e in corpus:
            flags = " ".join(k for k, v in (("simple", e.simple), ("si", e.subdirectly_irreducible),
                                             ("i20", e.in_i20), ("dm", e.in_dm)) if v)
            out.write(f"{e.algebra.name} {_table(e.algebra)} {flags}".rstrip() + "\n")
        out.write(f"# {len(corpus)} algebras of size {args.n}\n")
    if not corpus.complete:
        sys.stderr.write(f"budget of {args.budget} nodes exhausted; the list is incomplete\n")
        return BUDGET
    return OK


def cmd_congruences(args, out):
    A = read_algebra(args.algebra)
    cons = all_congruences(A)
    if args.format == "json":
        out.write(_dump({"algebra": A.name, "congruences": [p.to_json() for p in cons]}) + "\n")
    else:
        for p in cons:
            out.write(_blocks(p) + "\n")
        out.write(f"# {len(cons)} congruences\n")
    return OK


def cmd_simple(args, out):
    A = read_algebra(args.algebra)
    simple = is_simple(A)
    mono = monolith(A)
    cons = all_congruences(A)
    if args.format == "json":
        out.write(_dump({
            "algebra": A.name, "simple": simple, "congruences": len(cons),
            "monolith": mono.to_json() if mono is not None else None,
        }) + "\n")
    else:
        verdict = "simple" if simple else "not simple"
        tail = f"; monolith {_blocks(mono)}" if mono is not None and not simple else ""
        out.write(f"{A.name or args.algebra}: {verdict} ({len(cons)} congruences{tail})\n")
    return OK if simple else FAILS


def cmd_relation(args, out):
    A = read_algebra(args.algebra)
    try:
        rel = derived_relation(A, args.kind)
    except RelationRefused as exc:
        raise InputError(str(exc)) from None
    try:
        p = as_partition(A.size, rel)
        good, witness = is_congruence(A, p)
        blocks = p.to_json()
        reason = None if good else "not compatible at a~b, c~d with (a,b,c,d)=" + str(witness)
    except NotEquivalence as exc:
        good, witness, blocks, reason = False, None, None, f"not an equivalence: {exc}"
    if args.format == "json":
        out.write(_dump({
            "algebra": A.name, "kind": args.kind, "pairs": sorted(map(list, rel)),
            "blocks": blocks, "congruence": good, "witness": list(witness) if witness else None,
        }) + "\n")
    else:
        out.write(f"{args.kind} on {A.name or args.algebra}: " + (" | ".join(" ".join(map(str, b)) for b in blocks) if blocks else "-") + "\n")
        out.write("congruence\n" if good else reason + "\n")
    return OK if good else FAILS


def cmd_free(args, out):
    K = [read_algebra(s) for s in args.gen]
    try:
        F = free_algebra(K, args.k, budget=args.budget)
    except ClosureBudgetExceeded as exc:
        sys.stderr.write(f"{exc}\n")
        return BUDGET
    if args.format == "json":
        out.write(_dump({
            "generators": [B.name for B in K], "k": args.k, "size": F.algebra.size,
            "free_generators": F.generators, "table": [list(r) for r in F.algebra.rows()],
            "terms": [format_term(fold_comp(t)) for t in F.terms],
        }) + "\n")
    else:
        out.write(f"{F.algebra.name}: {F.algebra.size} elements, generators {F.generators}\n")
        for i, t in enumerate(F.terms):
            out.write(f"  {i}: {format_term(fold_comp(t))}\n")
        out.write(_table(F.algebra) + "\n")
    return OK


def cmd_member(args, out):
    A = read_algebra(args.algebra)
    K = [read_algebra(s) for s in args.within]
    v = in_variety(A, K)
    names = ",".join(B.name or "?" for B in K)
    if isinstance(v, Member):
        doc = {"verdict": "member", "route": v.route, "factors": [B.name for B in v.witness.factors],
               "elements": [list(e) for e in v.witness.elements], "mapping": list(v.witness.mapping)}
        text = f"{A.name} in V({names}): member via {v.route}"
        code = OK
    elif isinstance(v, NonMember):
        doc = {"verdict": "nonmember", "identity": format_identity(v.identity)}
        text = f"{A.name} not in V({names}): separated by {format_identity(v.identity)}"
        code = FAILS
    else:
        doc = {"verdict": "unknown", "reason": v.reason}
        text = f"{A.name} in V({names}): unknown ({v.reason})"
        code = BUDGET
    doc["algebra"] = A.name
    out.write((_dump(doc) if args.format == "json" else text) + "\n")
    return code


def cmd_lattice(args, out):
    whole = args.family == ["all5subsets"]
    if whole:
        families = all_subsets(builtin_algebras())
    else:
        families = [[read_algebra(s) for s in fam.split(",") if s] for fam in args.family]
    try:
        graph = variety_poset(families, Effort())
    except UndecidedPairs as exc:
        sys.stderr.write(f"{exc}\n")
        return BUDGET
    if args.format == "dot":
        out.write(graph.to_dot())
    elif args.format == "json":
        doc = graph.to_json()
        if whole:
            doc["shape"] = check_lattice_shape(graph).reason
        out.write(_dump(doc) + "\n")
    else:
        for i, node in enumerate(graph.nodes):
            below = ", ".join(graph.nodes[j].label for j in node.covers)
            out.write(f"V({node.label}) covers: {below or '-'}\n")
        shape = f"; shape: {check_lattice_shape(graph).reason}" if whole else ""
        out.write(f"# {len(graph.nodes)} varieties{shape}\n")
    return OK


def cmd_replay(args, out):
    text = Path(args.script).read_text(encoding="utf-8")
    lemmas = load_all()
    try:
        script = load_script(text, builtin_catalog(), lemmas)
    except ChainBreak as exc:
        doc = {"script": args.script, "ok": False, "line": exc.line, "message": str(exc)}
        out.write((_dump(doc) if args.format == "json" else f"{args.script}: {exc}") + "\n")
        return FAILS
    lemmas.pop(script.name, None)
    v = replay(script, builtin_catalog(), lemmas)
    if args.format == "json":
        out.write(_dump({
            "script": script.name, "ok": v.ok, "steps": len(script.steps), "failing_step": v.failing_step,
            "message": v.message,
            "expected": str(v.expected) if v.expected is not None else None,
            "actual": str(v.actual) if v.actual is not None else None,
        }) + "\n")
    else:
        out.write(f"{script.name}: {len(script.steps)} steps: {v.describe()}\n")
    return OK if v.ok else FAILS


def cmd_suite(args, out):
    corpus = read_corpus(args.corpus)
    report = verify_suite(corpus, args.labels)
    if args.format == "json":
        out.write(_dump({
            "algebras": len(report.algebras), "labels": report.labels, "checks": len(report.results),
            "failures": [{"algebra": A.name, "label": l, "counterexample": r.counterexample}
                         for A, l, r in report.failures],
        }) + "\n")
    else:
        out.write("\n".join(report.lines()) + "\n")
    return OK if report.ok else FAILS


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("--threads", type=int, default=1, help="worker hint; never changes the output")

    ap = argparse.ArgumentParser(prog="izroupoid", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="does an identity hold in an algebra")
    p.add_argument("algebra")
    p.add_argument("identity", help="catalog label or 'lhs = rhs' (hypotheses as 'h1, h2 |- lhs = rhs')")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", parents=[common], help="all I-zroupoids of one size up to isomorphism")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i20", action="store_true", help="add x'' = x")
    p.add_argument("--simple-only", action="store_true")
    p.add_argument("--identity", action="append", default=[], metavar="LABEL", help="extra catalog identity")
    p.add_argument("--budget", type=int, default=SearchConfig(1).budget, help="search node budget")
    p.set_defaults(func=cmd_enumerate)

    for name, func, what in (("congruences", cmd_congruences, "the congruence lattice"),
                             ("simple", cmd_simple, "is the algebra simple")):
        p = sub.add_parser(name, parents=[common], help=what)
        p.add_argument("algebra")
        p.set_defaults(func=func)

    p = sub.add_parser("relation", parents=[common], help="a derived relation and whether it is a congruence")
    p.add_argument("algebra")
    p.add_argument("--kind", choices=[k.value for k in RelationKind], required=True)
    p.set_defaults(func=cmd_relation)

    p = sub.add_parser("free", parents=[common], help="the free algebra on k generators")
    p.add_argument("--gen", nargs="+", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_ELEMENT_BUDGET)
    p.set_defaults(func=cmd_free)

    p = sub.add_parser("member", parents=[common], help="is A in the variety generated by a family")
    p.add_argument("algebra")
    p.add_argument("--in", dest="within", nargs="+", required=True)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("lattice", parents=[common], help="poset of generated varieties")
    p.add_argument("--family", nargs="+", required=True,
                   help="comma-separated generator lists, one per family, or 'all5subsets'")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("replay", parents=[common], help="check an equational proof script")
    p.add_argument("script")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("suite", parents=[common], help="check catalog identities over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--labels", required=True, help="e.g. 'L3.3.1-L3.3.63' or 'I,DM'")
    p.set_defaults(func=cmd_suite)
    return ap


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    if args.format == "dot" and args.command != "lattice":
        sys.stderr.write("--format dot is only available for 'lattice'\n")
        return USAGE
    try:
        return args.func(args, out)
    except (InputError, AlgebraError, ScriptError, UnknownLabel, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
