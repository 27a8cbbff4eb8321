"""Replay of equational derivations as explicit rewrite chains.

A script proves ``start = end`` by a chain of single rewrites.  Each step
names the identity it uses, the position it rewrites (a path into the term,
where the implicit ``0`` of ``s'`` is child 1), the substitution that
instantiates the identity, and a ``rev`` flag for right-to-left use.  Terms
are always compared modulo ``s' == (s -> 0)``.

Script format::

    proof <name> [assume <identity>; ...] goal <identity>
    start <term>
    = <term> by <label> [at <path>] [with x=<term>, ...] [rev]

The header may be spread over several lines.  A step may also be written
``<term> = <term> by ...`` with its source spelled out, which must then equal
the previous term.  Paths are dotted child indices (``0.1.0``) or ``root``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .algebra import FiniteAlgebra, CheckResult, check_conditional, check_identity
from .catalog import IdentityCatalog, builtin_catalog
from .terms import (
    ConditionalIdentity,
    Identity,
    Term,
    TermSyntaxError,
    Var,
    format_term,
    match,
    normalize_comp,
    parse_identity,
    parse_term,
    positions,
    replace_at,
    subterm,
    substitute,
    variables,
)

DEFCOMP = "defcomp"
_L33 = re.compile(r"^L3\.3\.(\d+)$")
BASE_LABELS = ("I", "I0", "I20", DEFCOMP)


class ScriptError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class ChainBreak(ScriptError):
    def __init__(self, expected: Term, found: Term, line: int | None = None):
        super().__init__(
            f"chain break: previous term {format_term(expected)} but step starts from {format_term(found)}",
            line,
        )
        self.expected = expected
        self.found = found


@dataclass(frozen=True)
class Step:
    source: Term
    target: Term
    label: str
    substitution: Mapping[str, Term] = field(default_factory=dict)
    position: tuple[int, ...] | None = None
    rev: bool = False
    line: int | None = None

    def format(self) -> str:
        out = f"= {format_term(self.target)} by {self.label}"
        if self.position is not None:
            out += " at " + format_path(self.position)
        if self.substitution:
            out += " with " + ", ".join(f"{k}={format_term(v)}" for k, v in sorted(self.substitution.items()))
        if self.rev:
            out += " rev"
        return out


@dataclass(frozen=True)
class ProofScript:
    name: str
    hypotheses: tuple[Identity, ...]
    goal: Identity
    start: Term
    steps: tuple[Step, ...]

    @property
    def end(self) -> Term:
        return self.steps[-1].target if self.steps else self.start

    def citations(self) -> list[str]:
        return [s.label for s in self.steps]

    def format(self) -> str:
        head = f"proof {self.name}"
        lines = [head]
        if self.hypotheses:
            lines.append("  assume " + "; ".join(str(h) for h in self.hypotheses))
        lines.append(f"  goal {self.goal}")
        lines.append(f"start {format_term(self.start)}")
        lines += [s.format() for s in self.steps]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    failing_step: int | None = None
    message: str = ""
    expected: Term | None = None
    actual: Term | None = None

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        where = f"step {self.failing_step}: " if self.failing_step is not None else ""
        out = where + self.message
        if self.expected is not None:
            out += f"\n  expected: {format_term(self.expected)}\n  actual:   {format_term(self.actual)}"
        return out


_OK = Verdict(True)


def format_path(path: Sequence[int]) -> str:
    return ".".join(map(str, path)) if path else "root"


def parse_path(text: str) -> tuple[int, ...]:
    if text == "root":
        return ()
    try:
        path = tuple(int(p) for p in text.split("."))
    except ValueError:
        raise ScriptError(f"bad path {text!r}") from None
    if any(p not in (0, 1) for p in path):
        raise ScriptError(f"bad path {text!r}: child indices are 0 or 1")
    return path


# -- citations --------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    identity: Identity
    hypotheses: tuple[Identity, ...] = ()
    ground: bool = False  # hypotheses of the script itself admit no substitution


class CitationError(ScriptError):
    pass


def resolve(
    label: str,
    catalog: IdentityCatalog,
    hypotheses: Sequence[Identity],
    lemmas: Mapping[str, ProofScript] | None = None,
) -> Rule:
    if label.startswith("hyp:"):
        try:
            i = int(label[4:])
            return Rule(hypotheses[i], ground=True)
        except (ValueError, IndexError):
            raise CitationError(f"unresolvable citation {label!r}: {len(hypotheses)} hypotheses") from None
    if label not in catalog:
        if lemmas and label in lemmas:
            lem = lemmas[label]
            return Rule(lem.goal, tuple(lem.hypotheses))
        raise CitationError(f"unresolvable citation {label!r}")
    entry = catalog[label]
    if isinstance(entry, ConditionalIdentity):
        return Rule(entry.conclusion, tuple(entry.hypotheses))
    return Rule(entry)


def _same_fact(e: Identity, facts: Iterable[Identity]) -> bool:
    l, r = normalize_comp(e.lhs), normalize_comp(e.rhs)
    for f in facts:
        fl, fr = normalize_comp(f.lhs), normalize_comp(f.rhs)
        if (fl, fr) == (l, r) or (fl, fr) == (r, l):
            return True
    return False


def check_step(
    step: Step,
    catalog: IdentityCatalog | None = None,
    hypotheses: Sequence[Identity] = (),
    lemmas: Mapping[str, ProofScript] | None = None,
) -> Verdict:
    """Validate one rewrite.  Only the subterm at ``step.position`` is inspected."""
    catalog = builtin_catalog() if catalog is None else catalog
    src, dst = normalize_comp(step.source), normalize_comp(step.target)
    if step.label == DEFCOMP:
        if src != dst:
            return Verdict(False, message="defcomp step changes the term beyond unfolding x' = x -> 0",
                           expected=src, actual=dst)
        return _OK
    try:
        rule = resolve(step.label, catalog, hypotheses, lemmas)
    except CitationError as exc:
        return Verdict(False, message=str(exc))
    if rule.ground and step.substitution:
        return Verdict(False, message=f"{step.label} is a hypothesis about the proof constants and admits no substitution")
    sigma = dict(step.substitution)
    lhs, rhs = rule.identity.lhs, rule.identity.rhs
    if step.rev:
        lhs, rhs = rhs, lhs
    for h in rule.hypotheses:
        inst = Identity(substitute(h.lhs, sigma), substitute(h.rhs, sigma))
        if not _same_fact(inst, hypotheses):
            return Verdict(False, message=f"{step.label} needs the hypothesis {inst}, which is not assumed")
    if step.position is None:
        return Verdict(False, message="step has no position")
    try:
        here = subterm(src, step.position)
    except IndexError:
        return Verdict(False, message=f"position {format_path(step.position)} invalid in {format_term(src)}")
    want = normalize_comp(substitute(lhs, sigma))
    if here != want:
        return Verdict(False, message=f"instance mismatch at {format_path(step.position)} for {step.label}",
                       expected=want, actual=here)
    result = replace_at(src, step.position, normalize_comp(substitute(rhs, sigma)))
    if result != dst:
        return Verdict(False, message=f"rewrite by {step.label} does not produce the next term",
                       expected=result, actual=dst)
    return _OK


def infer_step(step: Step, catalog: IdentityCatalog, hypotheses: Sequence[Identity],
               lemmas: Mapping[str, ProofScript] | None = None) -> Step | None:
    """Fill in a missing position and/or substitution by matching; first fit in preorder."""
    if step.label == DEFCOMP:
        return step
    try:
        rule = resolve(step.label, catalog, hypotheses, lemmas)
    except CitationError:
        return None
    lhs, rhs = rule.identity.lhs, rule.identity.rhs
    if step.rev:
        lhs, rhs = rhs, lhs
    src, dst = normalize_comp(step.source), normalize_comp(step.target)
    places = [step.position] if step.position is not None else list(positions(src))
    for p in places:
        try:
            here = subterm(src, p)
            there = subterm(dst, p)
        except IndexError:
            continue
        if rule.ground:
            sigma = {} if (normalize_comp(lhs) == here and normalize_comp(rhs) == there) else None
        else:
            sigma = match(lhs, here, dict(step.substitution))
            sigma = match(rhs, there, sigma) if sigma is not None else None
        if sigma is None:
            continue
        if not rule.ground:
            # keep only variables of the rule, so unused bindings stay out of the script
            keep = variables(lhs) | variables(rhs)
            for h in rule.hypotheses:
                keep |= variables(h.lhs) | variables(h.rhs)
            sigma = {k: v for k, v in sigma.items() if k in keep}
        cand = Step(step.source, step.target, step.label, sigma, tuple(p), step.rev, step.line)
        if check_step(cand, catalog, hypotheses, lemmas):
            return cand
    return None


# -- whole scripts ----------------------------------------------------------

def _renaming(goal: Identity, start: Term, end: Term) -> dict[str, Term] | None:
    """Injective renaming of goal variables to variables taking the goal to start = end."""
    for lhs, rhs in ((goal.lhs, goal.rhs), (goal.rhs, goal.lhs)):
        sigma = match(lhs, start)
        sigma = match(rhs, end, sigma) if sigma is not None else None
        if sigma is None:
            continue
        images = list(sigma.values())
        if all(isinstance(v, Var) for v in images) and len(set(images)) == len(images):
            return sigma
    return None


def citation_violations(script: ProofScript, lemmas: Iterable[str] = ()) -> list[str]:
    """Citations that break the acyclic order: an item may only use strictly earlier items."""
    lemmas = set(lemmas)
    own = _L33.match(script.name)
    bad = []
    for label in script.citations():
        if label in BASE_LABELS or label.startswith("hyp:") or label.startswith("L3.1") or label.startswith("L3.2"):
            continue
        m = _L33.match(label)
        if m:
            if own and int(m.group(1)) >= int(own.group(1)):
                bad.append(label)
            continue
        if own or label not in lemmas or label == script.name:
            bad.append(label)
    return bad


def _goal_matches_catalog(script: ProofScript, catalog: IdentityCatalog) -> str | None:
    if script.name not in catalog:
        return None
    entry = catalog[script.name]
    hyps, concl = ((), entry) if isinstance(entry, Identity) else (entry.hypotheses, entry.conclusion)
    sigma = match(concl.lhs, script.goal.lhs)
    sigma = match(concl.rhs, script.goal.rhs, sigma) if sigma is not None else None
    if sigma is None:
        sigma = match(concl.rhs, script.goal.lhs)
        sigma = match(concl.lhs, script.goal.rhs, sigma) if sigma is not None else None
    if sigma is None or not all(isinstance(v, Var) for v in sigma.values()) or len(set(sigma.values())) != len(sigma):
        return f"goal {script.goal} is not a renaming of {script.name}: {entry}"
    for h in hyps:
        inst = Identity(substitute(h.lhs, sigma), substitute(h.rhs, sigma))
        if not _same_fact(inst, script.hypotheses):
            return f"goal drops the hypothesis {inst} of {script.name}"
    return None


def replay(
    script: ProofScript,
    catalog: IdentityCatalog | None = None,
    lemmas: Mapping[str, ProofScript] | None = None,
) -> Verdict:
    """Check chaining, every step, the goal, and the citation order; first failure wins."""
    catalog = builtin_catalog() if catalog is None else catalog
    prev = normalize_comp(script.start)
    for i, step in enumerate(script.steps):
        if normalize_comp(step.source) != prev:
            return Verdict(False, i, "chain break", expected=prev, actual=normalize_comp(step.source))
        v = check_step(step, catalog, script.hypotheses, lemmas)
        if not v.ok:
            return Verdict(False, i, v.message, v.expected, v.actual)
        prev = normalize_comp(step.target)
    if _renaming(script.goal, script.start, script.end) is None:
        last = len(script.steps) - 1 if script.steps else None
        return Verdict(False, last, f"chain proves {format_term(script.start)} = {format_term(script.end)}, not the goal {script.goal}")
    bad = citation_violations(script, lemmas or {})
    if bad:
        return Verdict(False, None, "citations break the proof order: " + ", ".join(bad))
    msg = _goal_matches_catalog(script, catalog)
    if msg:
        return Verdict(False, None, msg)
    return _OK


# -- loading ----------------------------------------------------------------

_HEADER = re.compile(r"^proof\s+(?P<name>\S+)(?:\s+assume\s+(?P<assume>.*?))?\s+goal\s+(?P<goal>.+)$")
_STEP_TAIL = re.compile(
    r"^(?P<label>\S+)(?:\s+at\s+(?P<at>\S+))?(?:\s+with\s+(?P<with>.*?))?(?:\s+(?P<rev>rev))?\s*$"
)


def _parse_with(text: str, line: int) -> dict[str, Term]:
    sigma = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, val = part.partition("=")
        if not sep or not name.strip().isidentifier():
            raise ScriptError(f"bad substitution {part.strip()!r}", line)
        try:
            sigma[name.strip()] = parse_term(val.strip())
        except TermSyntaxError as exc:
            raise ScriptError(str(exc), line) from None
    return sigma


def load_script(
    text: str,
    catalog: IdentityCatalog | None = None,
    lemmas: Mapping[str, ProofScript] | None = None,
) -> ProofScript:
    """Parse a script and check that it chains; step validity is left to `replay`.

    A step without ``at`` or ``with`` is completed by matching when a unique
    first fit exists; otherwise it is kept as written and replay reports it.
    """
    catalog = builtin_catalog() if catalog is None else catalog
    header: list[str] = []
    header_line = None
    start = None
    steps: list[Step] = []
    hyps: tuple[Identity, ...] = ()
    goal = None
    name = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if start is None and not line.startswith("start"):
            if header_line is None:
                header_line = no
            header.append(line)
            continue
        if start is None:
            m = _HEADER.match(" ".join(header))
            if not m:
                raise ScriptError("expected header 'proof <name> [assume ...] goal <identity>'", header_line or no)
            name = m.group("name")
            try:
                goal = parse_identity(m.group("goal"))
                if m.group("assume"):
                    hyps = tuple(parse_identity(h.strip()) for h in m.group("assume").split(";") if h.strip())
                start = parse_term(line[len("start"):].strip())
            except TermSyntaxError as exc:
                raise ScriptError(str(exc), no) from None
            continue
        head, sep, tail = line.partition(" by ")
        if not sep:
            raise ScriptError("step needs 'by <label>'", no)
        m = _STEP_TAIL.match(tail.strip())
        if not m:
            raise ScriptError(f"cannot read justification {tail.strip()!r}", no)
        prev = steps[-1].target if steps else start
        try:
            if head.startswith("="):
                source, target = prev, parse_term(head[1:].strip())
            else:
                left, eq, right = head.rpartition("=")
                if not eq:
                    raise ScriptError("step must start with '='", no)
                source, target = parse_term(left.strip()), parse_term(right.strip())
                if normalize_comp(source) != normalize_comp(prev):
                    raise ChainBreak(prev, source, no)
        except TermSyntaxError as exc:
            raise ScriptError(str(exc), no) from None
        step = Step(
            source,
            target,
            m.group("label"),
            _parse_with(m.group("with"), no) if m.group("with") else {},
            parse_path(m.group("at")) if m.group("at") else None,
            bool(m.group("rev")),
            no,
        )
        if step.label != DEFCOMP and (step.position is None or (not step.substitution and not step.label.startswith("hyp:"))):
            filled = infer_step(step, catalog, hyps, lemmas)
            if filled is not None:
                step = filled
        steps.append(step)
    if start is None:
        raise ScriptError("missing 'start' line")
    return ProofScript(name, hyps, goal, start, tuple(steps))


# -- shipped scripts --------------------------------------------------------

def _proof_dir():
    return resources.files("izroupoid") / "data" / "proofs"


def shipped_script_names() -> list[str]:
    return sorted(p.name[:-4] for p in _proof_dir().iterdir() if p.name.endswith(".prf"))


def shipped_script_text(name: str) -> str:
    return (_proof_dir() / f"{name}.prf").read_text(encoding="utf-8")


def _script_sort_key(name: str):
    m = _L33.match(name)
    return (0, int(m.group(1)), name) if m else (1, 0, name)


def load_all(texts: Mapping[str, str] | None = None, catalog: IdentityCatalog | None = None) -> dict[str, ProofScript]:
    """Load scripts in an order where every cited lemma precedes its users."""
    catalog = builtin_catalog() if catalog is None else catalog
    if texts is None:
        texts = {n: shipped_script_text(n) for n in shipped_script_names()}
    pending = dict(texts)
    loaded: dict[str, ProofScript] = {}
    while pending:
        progress = False
        for name in sorted(pending, key=_script_sort_key):
            text = pending[name]
            cited = set(re.findall(r"\bby\s+(\S+)", text))
            if any(c in pending and c != name for c in cited):
                continue
            loaded[name] = load_script(text, catalog, loaded)
            del pending[name]
            progress = True
        if not progress:
            raise ScriptError("cyclic citations among: " + ", ".join(sorted(pending)))
    return loaded


def replay_all(scripts: Mapping[str, ProofScript] | None = None, catalog: IdentityCatalog | None = None) -> dict[str, Verdict]:
    scripts = load_all(catalog=catalog) if scripts is None else scripts
    out = {}
    earlier: dict[str, ProofScript] = {}
    for name, script in scripts.items():
        out[name] = replay(script, catalog, earlier)
        earlier[name] = script
    return out


# -- semantic cross-check ---------------------------------------------------

@dataclass
class CrossCheck:
    script: str
    results: list[tuple[str, CheckResult]]

    @property
    def ok(self) -> bool:
        return all(r.holds for _, r in self.results)

    def failures(self) -> list[tuple[str, CheckResult]]:
        return [(n, r) for n, r in self.results if not r.holds]


def cross_check(script: ProofScript, corpus: Iterable[FiniteAlgebra]) -> CrossCheck:
    """Evaluate the goal (under the script's hypotheses) on every algebra, ignoring the steps."""
    if script.hypotheses:
        claim = ConditionalIdentity(tuple(script.hypotheses), script.goal)
        check = lambda A: check_conditional(A, claim)
    else:
        check = lambda A: check_identity(A, script.goal)
    return CrossCheck(script.name, [(A.name or "?", check(A)) for A in corpus])
