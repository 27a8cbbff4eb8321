"""Exhaustive search for implication zroupoids of a given size.

Cells are filled column 0 first (the values of ``x'``), then row-major.  Each
instance ``(x, y, z)`` of axiom (I), and the
single instance of ``0'' = 0``, is evaluated as far as the partial table
allows; an instance blocked on an unfilled cell is parked on that cell's watch
list and resumed when the cell receives a value.  Complete tables get a full
re-check with `check_identity` before they are accepted.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import (
    FiniteAlgebra,
    canonical_form,
    check_identity,
    perms_fixing_zero,
)
from .catalog import builtin_catalog
from .congruence import is_simple, is_subdirectly_irreducible

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 200_000_000
INLINE_ISO_FROM = 4
MAX_CLASSIFY_N = 6


class BudgetExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    n: int
    extra_identities: tuple[str, ...] = ()
    budget: int = DEFAULT_BUDGET
    simple_only: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        cat = builtin_catalog()
        for label in self.extra_identities:
            cat[label]


@dataclass(frozen=True)
class CorpusEntry:
    algebra: FiniteAlgebra
    simple: bool
    subdirectly_irreducible: bool
    in_i20: bool
    in_dm: bool

    @classmethod
    def of(cls, A: FiniteAlgebra) -> "CorpusEntry":
        cat = builtin_catalog()
        nontrivial = A.size >= 2
        return cls(
            A,
            simple=nontrivial and is_simple(A),
            subdirectly_irreducible=nontrivial and is_subdirectly_irreducible(A)[0],
            in_i20=check_identity(A, cat["I20"]).holds,
            in_dm=check_identity(A, cat["DM"]).holds,
        )

    def to_json(self) -> dict:
        d = self.algebra.to_json()
        d["flags"] = {
            "simple": self.simple,
            "subdirectly_irreducible": self.subdirectly_irreducible,
            "i20": self.in_i20,
            "dm": self.in_dm,
        }
        return d


@dataclass
class ModelCorpus:
    n: int
    entries: list[CorpusEntry]
    complete: bool = True
    nodes: int = 0
    config: SearchConfig | None = field(default=None, compare=False)

    @property
    def algebras(self) -> list[FiniteAlgebra]:
        return [e.algebra for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e.to_json(), sort_keys=True) + "\n" for e in self.entries)


def _name(n: int, i: int) -> str:
    return f"I{n}_{i}"


def merge_corpora(corpora: Iterable[ModelCorpus]) -> list[CorpusEntry]:
    out: list[CorpusEntry] = []
    for c in corpora:
        out.extend(c.entries)
    return out


# -- the search kernel ------------------------------------------------------

def _instances(n: int) -> list[tuple[int, int, int]]:
    return [(x, y, z) for x in range(n) for y in range(n) for z in range(n)]


class _Search:
    """Backtracking state for one cardinality; `prefix` pins leading cells."""

    def __init__(self, n: int, budget: int, inline_iso: bool):
        self.n = n
        self.cells = n * n
        self.T = [-1] * self.cells
        self.order = fill_order(n)
        self.pos = {c: i for i, c in enumerate(self.order)}
        self.budget = budget
        self.nodes = 0
        self.inline_iso = inline_iso
        self.perms = [tuple(int(v) for v in p) for p in perms_fixing_zero(n)[1:]] if inline_iso else []
        self.invs = [tuple(sorted(range(n), key=lambda i: p[i])) for p in self.perms]
        self.instances = _instances(n)
        self.watches: list[list[int]] = [[] for _ in range(self.cells)]
        self.trail: list[int] = []
        self.found: list[tuple[int, ...]] = []
        self.exhausted = False

    # Instance -1 stands for 0'' = 0; others index self.instances.
    def _eval(self, k: int) -> int:
        """1 = holds, 0 = violated, 2 + c = blocked on cell c."""
        T, n = self.T, self.n
        if k < 0:
            a = T[0]
            if a < 0:
                return 2
            b = T[a * n]
            if b < 0:
                return 2 + a * n
            return 1 if b == 0 else 0
        x, y, z = self.instances[k]
        c = x * n + y
        xy = T[c]
        if xy < 0:
            return 2 + c
        c = xy * n + z
        lhs = T[c]
        if lhs < 0:
            return 2 + c
        c = z * n
        zc = T[c]
        if zc < 0:
            return 2 + c
        c = zc * n + x
        u = T[c]
        if u < 0:
            return 2 + c
        c = y * n + z
        v = T[c]
        if v < 0:
            return 2 + c
        c = v * n
        vc = T[c]
        if vc < 0:
            return 2 + c
        c = u * n + vc
        w = T[c]
        if w < 0:
            return 2 + c
        c = w * n
        rhs = T[c]
        if rhs < 0:
            return 2 + c
        return 1 if lhs == rhs else 0

    def _register_all(self) -> bool:
        for k in [-1] + list(range(len(self.instances))):
            r = self._eval(k)
            if r == 0:
                return False
            if r >= 2:
                self.watches[r - 2].append(k)
        return True

    def _assign(self, cell: int) -> bool:
        """Resume instances parked on `cell`; False on conflict."""
        for k in self.watches[cell]:
            r = self._eval(k)
            if r == 0:
                return False
            if r >= 2:
                self.watches[r - 2].append(k)
                self.trail.append(r - 2)
        return True

    def _undo(self, mark: int):
        trail, watches = self.trail, self.watches
        while len(trail) > mark:
            watches[trail.pop()].pop()

    def _prefix_canonical(self, filled: int) -> bool:
        """False when some relabelling fixing 0 makes the filled prefix smaller.

        Tables are compared in fill order, which keeps exactly one member of
        each isomorphism class; the row-major canonical form is applied later.
        """
        T, n, order, pos = self.T, self.n, self.order, self.pos
        for p, inv in zip(self.perms, self.invs):
            for idx in range(filled):
                c = order[idx]
                i, j = divmod(c, n)
                src = inv[i] * n + inv[j]
                if pos[src] >= filled:
                    break
                v = p[T[src]]
                if v != T[c]:
                    if v < T[c]:
                        return False
                    break
        return True

    def run(self, prefix: Sequence[int] = ()) -> None:
        if not self._register_all():
            return
        for idx, v in enumerate(prefix):
            cell = self.order[idx]
            self.T[cell] = v
            if not self._assign(cell):
                return
        if self.inline_iso and prefix and not self._prefix_canonical(len(prefix)):
            return
        self._descend(len(prefix))

    def _descend(self, idx: int) -> None:
        if idx == self.cells:
            self.found.append(tuple(self.T))
            return
        T = self.T
        cell = self.order[idx]
        for v in range(self.n):
            self.nodes += 1
            if self.nodes > self.budget:
                self.exhausted = True
                return
            T[cell] = v
            mark = len(self.trail)
            if self._assign(cell) and (not self.inline_iso or self._prefix_canonical(idx + 1)):
                self._descend(idx + 1)
            self._undo(mark)
            if self.exhausted:
                break
        T[cell] = -1


def fill_order(n: int) -> list[int]:
    """Column 0 first, then the remaining cells row-major."""
    return [i * n for i in range(n)] + [c for c in range(n * n) if c % n]


def _run_branch(args) -> tuple[list[tuple[int, ...]], int, bool]:
    n, budget, inline_iso, prefix = args
    s = _Search(n, budget, inline_iso)
    s.run(prefix)
    return s.found, s.nodes, s.exhausted


def raw_models(n: int, budget: int = DEFAULT_BUDGET, workers: int = 1) -> tuple[list[tuple[int, ...]], int, bool]:
    """Flattened tables passing the search (unverified, possibly isomorphic duplicates)."""
    inline_iso = n >= INLINE_ISO_FROM
    if workers <= 1 or n < 3:
        return _run_branch((n, budget, inline_iso, ()))
    # split on the first two filled cells; the worker count never changes the merged result
    prefixes = [(a, b) for a in range(n) for b in range(n)]
    tasks = [(n, budget, inline_iso, p) for p in prefixes]
    found: list[tuple[int, ...]] = []
    nodes, exhausted = 0, False
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for f, k, e in ex.map(_run_branch, tasks):
            found.extend(f)
            nodes += k
            exhausted |= e
    if nodes > budget:
        exhausted = True
    return found, nodes, exhausted


def enumerate_models(cfg: SearchConfig, workers: int = 1) -> ModelCorpus:
    """All models of (I), ``0'' = 0`` and the extra identities, one per isomorphism type."""
    n = cfg.n
    cat = builtin_catalog()
    required = [cat["I"], cat["I0"]] + [cat[l] for l in cfg.extra_identities]
    tables, nodes, exhausted = raw_models(n, cfg.budget, workers)
    seen: dict[tuple[int, ...], FiniteAlgebra] = {}
    for flat in tables:
        A = FiniteAlgebra([flat[i * n : (i + 1) * n] for i in range(n)])
        if not all(check_identity(A, e).holds for e in required):
            continue
        key = canonical_form(A)
        if key not in seen:
            seen[key] = FiniteAlgebra([key[i * n : (i + 1) * n] for i in range(n)])
    entries = []
    for i, key in enumerate(sorted(seen)):
        A = seen[key].renamed(_name(n, i))
        entry = CorpusEntry.of(A)
        if cfg.simple_only and not entry.simple:
            continue
        entries.append(entry)
    if exhausted:
        log.warning("search budget of %d nodes exhausted at n=%d; corpus is partial", cfg.budget, n)
    return ModelCorpus(n, entries, complete=not exhausted, nodes=nodes, config=cfg)


def load_corpus(lines: Iterable[str]) -> list[FiniteAlgebra]:
    """Algebras from corpus JSON lines; stored flags are ignored."""
    from .algebra import from_json

    return [from_json(json.loads(l)) for l in lines if l.strip()]


# -- batch verification -----------------------------------------------------

@dataclass
class SuiteReport:
    algebras: list[FiniteAlgebra]
    labels: list[str]
    results: dict[tuple[int, str], object]

    @property
    def failures(self):
        return [(self.algebras[i], l, r) for (i, l), r in self.results.items() if not r.holds]

    @property
    def ok(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        out = []
        for A, label, r in self.failures:
            out.append(f"FAIL {A.name or '?'} {label}: {r.describe()}")
        out.append(f"{len(self.results) - len(self.failures)}/{len(self.results)} checks passed")
        return out


def _algebras(corpus) -> list[FiniteAlgebra]:
    if isinstance(corpus, ModelCorpus):
        return corpus.algebras
    return [e.algebra if isinstance(e, CorpusEntry) else e for e in corpus]


def verify_suite(corpus, labels: Sequence[str] | str) -> SuiteReport:
    cat = builtin_catalog()
    if isinstance(labels, str):
        labels = cat.expand(labels)
    ids = [(l, cat[l]) for l in labels]
    algs = _algebras(corpus)
    results = {}
    for i, A in enumerate(algs):
        for label, e in ids:
            results[(i, label)] = check_identity(A, e)
    return SuiteReport(algs, list(labels), results)


@dataclass(frozen=True)
class ConditionRow:
    algebra: FiniteAlgebra
    values: tuple[bool, bool, bool, bool]

    @property
    def consistent(self) -> bool:
        return all(self.values) or not any(self.values)


def verify_condition_equivalence(corpus) -> list[ConditionRow]:
    """Evaluate ``0'->x = x``, ``x'' = x``, ``(x->x')' = x`` and ``x'->x = x`` on each algebra.

    Over (I) these four hold together or fail together.
    """
    cat = builtin_catalog()
    conds = [cat[l] for l in ("L3.2a", "L3.2b", "L3.2c", "L3.2d")]
    return [ConditionRow(A, tuple(check_identity(A, c).holds for c in conds)) for A in _algebras(corpus)]


@dataclass
class Classification:
    models: list[FiniteAlgebra]
    incomplete_sizes: list[int]

    @property
    def complete(self) -> bool:
        return not self.incomplete_sizes


def classify_simples(max_n: int, budget: int = DEFAULT_BUDGET, workers: int = 1) -> Classification:
    if max_n > MAX_CLASSIFY_N:
        raise ValueError(f"max_n={max_n} exceeds the supported bound {MAX_CLASSIFY_N}")
    models, incomplete = [], []
    for n in range(2, max_n + 1):
        corpus = enumerate_models(SearchConfig(n, simple_only=True, budget=budget), workers)
        if not corpus.complete:
            incomplete.append(n)
        models.extend(corpus.algebras)
    return Classification(models, incomplete)
