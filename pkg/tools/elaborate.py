"""Expand proof sketches into fully explicit replay scripts.

A sketch lists the terms of a derivation with one citation per line
(``-`` for an unjustified line).  Each line is turned into single rewrites:
double complements are removed or introduced with explicit ``I20`` steps,
``x'`` versus ``x -> 0`` with ``defcomp``, and the cited identity is applied
once at a position found by matching.  Every emitted step is re-validated by
the replay kernel, so this tool is a convenience, never a trusted component.

Usage::

    python3 tools/elaborate.py [sketch names...]

reads ``tools/sketches/<name>.sk`` and writes
``src/izroupoid/data/proofs/<name>.prf``.
"""
from __future__ import annotations

import re
import sys
from collections import deque
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from izroupoid.catalog import builtin_catalog  # noqa: E402
from izroupoid.proofs import (  # noqa: E402
    DEFCOMP,
    ProofScript,
    Step,
    check_step,
    load_script,
    resolve,
    CitationError,
)
from izroupoid.terms import (  # noqa: E402
    ZERO,
    Arrow,
    ConditionalIdentity,
    Identity,
    Term,
    Var,
    Zero,
    fold_comp,
    match,
    normalize_comp,
    parse_identity,
    parse_term,
    replace_at,
    subterm,
    substitute,
)

SKETCHES = ROOT / "tools" / "sketches"
OUT = ROOT / "src" / "izroupoid" / "data" / "proofs"
CATALOG = builtin_catalog()


def is_comp(t: Term) -> bool:
    return isinstance(t, Arrow) and isinstance(t.rhs, Zero)


def contract_all(t: Term) -> Term:
    """Remove every double complement (normalized terms)."""
    if isinstance(t, Arrow):
        t = Arrow(contract_all(t.lhs), contract_all(t.rhs))
        if is_comp(t) and is_comp(t.lhs):
            return t.lhs.lhs
    return t


def contractions(t: Term, path=()):
    """All (position, inner) with a double complement ``inner''`` at position."""
    if isinstance(t, Arrow):
        if is_comp(t) and is_comp(t.lhs):
            yield path, t.lhs.lhs
        yield from contractions(t.lhs, path + (0,))
        yield from contractions(t.rhs, path + (1,))


def _bfs(t: Term, limit: int = 4000):
    dist = {t: (0, None, None, None)}
    queue = deque([t])
    while queue:
        u = queue.popleft()
        d = dist[u][0]
        for p, inner in contractions(u):
            v = replace_at(u, p, inner)
            if v not in dist:
                dist[v] = (d + 1, u, p, inner)
                if len(dist) > limit:
                    return dist
                queue.append(v)
    return dist


def i20_path(s: Term, t: Term) -> list[Step] | None:
    """Shortest contract-then-expand chain of I20 steps from s to t (normalized)."""
    if s == t:
        return []
    ds, dt = _bfs(s), _bfs(t)
    common = [m for m in ds if m in dt]
    if not common:
        return None
    m = min(common, key=lambda m: (ds[m][0] + dt[m][0], ds[m][0]))
    down = []
    u = m
    while ds[u][1] is not None:
        _, prev, p, inner = ds[u]
        down.append(Step(prev, u, "I20", {"x": fold_comp(inner)}, p, False))
        u = prev
    down.reverse()
    up = []
    u = m
    while dt[u][1] is not None:
        _, prev, p, inner = dt[u]
        up.append(Step(u, prev, "I20", {"x": fold_comp(inner)}, p, True))
        u = prev
    return down + up


def diff_lca(s: Term, t: Term, path=()):
    if s == t:
        return None
    if isinstance(s, Arrow) and isinstance(t, Arrow):
        d0, d1 = s.lhs != t.lhs, s.rhs != t.rhs
        if d0 and not d1:
            return diff_lca(s.lhs, t.lhs, path + (0,))
        if d1 and not d0:
            return diff_lca(s.rhs, t.rhs, path + (1,))
    return path


def _match_mod(p: Term, t: Term, sigma: dict) -> bool:
    """Match modulo x'' = x; `t` is contracted, bindings are stored contracted."""
    if isinstance(p, Var):
        if p.name in sigma:
            return contract_all(normalize_comp(sigma[p.name])) == t
        sigma[p.name] = t
        return True
    if isinstance(p, Zero):
        return isinstance(t, Zero)
    if is_comp(p):
        if is_comp(t):
            return _match_mod(p.lhs, t.lhs, sigma)
        return _match_mod(p.lhs, Arrow(t, ZERO), sigma)
    if isinstance(t, Arrow):
        return _match_mod(p.lhs, t.lhs, sigma) and _match_mod(p.rhs, t.rhs, sigma)
    return False


def _sigma_out(sigma: dict, rule_vars: set, ground: bool):
    if ground:
        return {}
    return {k: fold_comp(v) for k, v in sigma.items() if k in rule_vars}


def _valid(steps, hyps, lemmas):
    return all(check_step(st, CATALOG, hyps, lemmas).ok for st in steps)


def one_rewrite(s: Term, t: Term, label: str, hyps, lemmas) -> list[Step] | None:
    """Steps from s to t using `label` exactly once plus I20 steps (normalized inputs)."""
    try:
        rule = resolve(label, CATALOG, hyps, lemmas)
    except CitationError:
        return None
    e = rule.identity
    rvars = set()
    from izroupoid.terms import variables
    for side in (e.lhs, e.rhs):
        rvars |= variables(side)
    for h in rule.hypotheses:
        rvars |= variables(h.lhs) | variables(h.rhs)
    best = None
    # exact matching on contraction pairs, closest pairs first
    ds = {u: v[0] for u, v in _bfs(s, 300).items()}
    dt = {u: v[0] for u, v in _bfs(t, 300).items()}
    # a rewrite may also happen under a complement the sketch leaves implicit
    lca = diff_lca(s, t) or ()
    for k in range(len(lca) + 1):
        p = lca[:k]
        ds.setdefault(replace_at(s, p, Arrow(Arrow(subterm(s, p), ZERO), ZERO)), 1)
        dt.setdefault(replace_at(t, p, Arrow(Arrow(subterm(t, p), ZERO), ZERO)), 1)
    pairs = sorted(((a, b) for a in ds for b in dt), key=lambda ab: ds[ab[0]] + dt[ab[1]])[:4000]
    for s1, t1 in pairs:
        q = diff_lca(s1, t1)
        if q is None:
            continue
        for k in range(len(q), -1, -1):
            p = q[:k]
            for rev in (False, True):
                lhs, rhs = (e.rhs, e.lhs) if rev else (e.lhs, e.rhs)
                sigma = match(lhs, subterm(s1, p))
                sigma = match(rhs, subterm(t1, p), sigma) if sigma is not None else None
                if sigma is None:
                    continue
                if rule.ground and any(v != Var(k2) for k2, v in sigma.items()):
                    continue
                st = Step(s1, t1, label, _sigma_out(sigma, rvars, rule.ground), p, rev)
                if not check_step(st, CATALOG, hyps, lemmas).ok:
                    continue
                pre, post = i20_path(s, s1), i20_path(t1, t)
                cand = pre + [st] + post
                if best is None or len(cand) < len(best):
                    best = cand
        if best is not None and len(best) <= 1 + ds[s1] + dt[t1]:
            return best
    if best is not None:
        return best
    # matching modulo double complements on fully contracted terms
    cs, ct = contract_all(s), contract_all(t)
    q0 = diff_lca(cs, ct)
    if q0 is None:
        return None
    variants = [(cs, ct)]
    for k in range(len(q0) + 1):
        p = q0[:k]
        wrap_s = replace_at(cs, p, Arrow(Arrow(subterm(cs, p), ZERO), ZERO))
        wrap_t = replace_at(ct, p, Arrow(Arrow(subterm(ct, p), ZERO), ZERO))
        variants += [(wrap_s, ct), (cs, wrap_t), (wrap_s, wrap_t)]
    for vs, vt in variants:
        q = diff_lca(vs, vt)
        if q is None:
            continue
        for k in range(len(q), -1, -1):
            p = q[:k]
            for rev in (False, True):
                lhs, rhs = (e.rhs, e.lhs) if rev else (e.lhs, e.rhs)
                sigma: dict = {}
                if not (_match_mod(normalize_comp(lhs), contract_all(subterm(vs, p)), sigma)
                        and _match_mod(normalize_comp(rhs), contract_all(subterm(vt, p)), sigma)):
                    continue
                if rule.ground and any(v != Var(k2) for k2, v in sigma.items()):
                    continue
                sig = _sigma_out(sigma, rvars, rule.ground)
                s1 = replace_at(vs, p, normalize_comp(substitute(lhs, sig)))
                t1 = replace_at(vs, p, normalize_comp(substitute(rhs, sig)))
                if contract_all(t1) != ct or contract_all(s1) != cs:
                    continue
                st = Step(s1, t1, label, sig, p, rev)
                pre, post = i20_path(s, s1), i20_path(t1, t)
                if pre is None or post is None or not check_step(st, CATALOG, hyps, lemmas).ok:
                    continue
                return pre + [st] + post
    return None


def elaborate_line(s: Term, t: Term, label: str, k: int | None, hyps, lemmas):
    s, t = normalize_comp(s), normalize_comp(t)
    if label == "-":
        if s == t:
            return [Step(s, t, DEFCOMP)], DEFCOMP
        path = i20_path(s, t)
        if path is not None:
            return path, "I20"
        for lab in candidate_labels(k, lemmas):
            steps = one_rewrite(s, t, lab, hyps, lemmas)
            if steps:
                return steps, lab
        return None, None
    if s == t:
        return [Step(s, t, DEFCOMP)], DEFCOMP
    return one_rewrite(s, t, label, hyps, lemmas), label


def candidate_labels(k, lemmas):
    base = ["I", "L3.1a", "L3.1b", "L3.2a", "L3.2b", "L3.2c", "L3.2d"]
    upto = k if k is not None else 64
    return base + [f"L3.3.{j}" for j in range(1, upto)] + list(lemmas or ())


def read_sketch(text: str, name: str):
    header, rows, start = [], [], None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("start"):
            start = line[5:].strip()
        elif line.startswith("="):
            term, _, tail = line[1:].partition(" by ")
            rows.append((term.strip(), tail.strip() or "-"))
        else:
            header.append(line)
    return " ".join(header), start, rows


def elaborate(name: str, lemmas: dict) -> tuple[str, list[str]]:
    text = (SKETCHES / f"{name}.sk").read_text()
    header, start_text, rows = read_sketch(text, name)
    m = re.match(r"^L3\.3\.(\d+)$", name)
    k = int(m.group(1)) if m else None
    hyps: tuple = ()
    if header:
        hm = re.match(r"^proof\s+\S+(?:\s+assume\s+(.*?))?\s+goal\s+(.+)$", header)
        if hm.group(1):
            hyps = tuple(parse_identity(h.strip()) for h in hm.group(1).split(";"))
        goal = parse_identity(hm.group(2))
    start = parse_term(start_text)
    terms = [start] + [parse_term(r[0]) for r in rows]
    if not header:
        goal = catalog_goal(name, start, terms[-1])
        entry = CATALOG.get(name)
        if isinstance(entry, ConditionalIdentity):
            raise SystemExit(f"{name}: conditional items need an explicit header")
    steps: list[Step] = []
    notes = []
    for i, (term_text, label) in enumerate(rows):
        got, used = elaborate_line(terms[i], terms[i + 1], label, k, hyps, lemmas)
        if got is None:
            notes.append(f"line {i + 1}: no derivation for {label} from {fold_comp(normalize_comp(terms[i]))} to {fold_comp(normalize_comp(terms[i + 1]))}")
            continue
        if label == "-" and used not in ("I20", DEFCOMP):
            notes.append(f"line {i + 1}: blank justification resolved as {used}")
        # keep the sketch's own spelling for the terms it names
        got = list(got)
        got[-1] = Step(got[-1].source, terms[i + 1], got[-1].label, got[-1].substitution, got[-1].position, got[-1].rev)
        steps += got
    lines = [f"proof {name}"]
    if hyps:
        lines.append("  assume " + "; ".join(str(h) for h in hyps))
    lines.append(f"  goal {goal}")
    lines.append(f"start {fmt(start)}")
    for st in steps:
        lines.append(Step(st.source, fold_comp(normalize_comp(st.target)) if st is not steps[-1] else st.target,
                          st.label, st.substitution, st.position, st.rev).format()
                     if False else _fmt_step(st))
    return "\n".join(lines) + "\n", notes


def fmt(t: Term) -> str:
    from izroupoid.terms import format_term
    return format_term(fold_comp(normalize_comp(t)))


def _fmt_step(st: Step) -> str:
    return Step(st.source, fold_comp(normalize_comp(st.target)), st.label, st.substitution, st.position, st.rev).format()


def catalog_goal(name: str, start: Term, end: Term) -> Identity:
    e = CATALOG[name]
    if isinstance(e, ConditionalIdentity):
        raise SystemExit(f"{name}: conditional items need an explicit header")
    for lhs, rhs in ((e.lhs, e.rhs), (e.rhs, e.lhs)):
        sigma = match(lhs, start)
        sigma = match(rhs, end, sigma) if sigma is not None else None
        if sigma is not None:
            return Identity(fold_comp(normalize_comp(substitute(e.lhs, sigma))), fold_comp(normalize_comp(substitute(e.rhs, sigma))))
    raise SystemExit(f"{name}: chain {fmt(start)} = {fmt(end)} is not an instance of {e}")


def order(names):
    def key(n):
        m = re.match(r"^L3\.3\.(\d+)$", n)
        return (0, int(m.group(1)), n) if m else (1, 0, n)
    return sorted(names, key=key)


def main(argv):
    names = argv or [p.stem for p in SKETCHES.glob("*.sk")]
    lemmas: dict[str, ProofScript] = {}
    # previously written lemma scripts are available for citation
    for p in OUT.glob("*.prf"):
        if not p.stem.startswith("L3.3."):
            try:
                lemmas[p.stem] = load_script(p.read_text(), CATALOG, lemmas)
            except Exception:
                pass
    bad = 0
    for name in order(names):
        text, notes = elaborate(name, {k: v for k, v in lemmas.items() if k != name and not name.startswith("L3.3.")})
        for n in notes:
            print(f"{name}: {n}")
        if any("no derivation" in n for n in notes):
            bad += 1
            continue
        (OUT / f"{name}.prf").write_text(text)
        if not name.startswith("L3.3."):
            lemmas[name] = load_script(text, CATALOG, lemmas)
        print(f"{name}: {text.count(chr(10)) - 3} lines")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
