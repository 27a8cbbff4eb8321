"""Finite zroupoids: Cayley tables with element 0 as the constant.

``table[a][b]`` stores ``a -> b``.  Nothing about class membership is ever
stored on an algebra; ask `check_identity` instead.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .partition import Partition
from .terms import (
    AnyIdentity,
    Arrow,
    Comp,
    ConditionalIdentity,
    Identity,
    Term,
    Var,
    Zero,
    variables,
)


class AlgebraError(ValueError):
    pass


class NotACongruence(AlgebraError):
    def __init__(self, witness: tuple[int, int, int, int]):
        a, b, c, d = witness
        super().__init__(
            f"not a congruence: {a}~{b} and {c}~{d} but {a}->{c} and {b}->{d} are not related"
        )
        self.witness = witness


class FiniteAlgebra:
    __slots__ = ("table", "name", "_rows")

    def __init__(self, table, name: str | None = None):
        arr = np.array(table, dtype=np.int64)
        arr.setflags(write=False)
        self.table = arr
        self.name = name
        self._rows = tuple(tuple(int(v) for v in row) for row in arr)

    @property
    def size(self) -> int:
        return len(self._rows)

    def __len__(self):
        return len(self._rows)

    def op(self, a: int, b: int) -> int:
        return self._rows[a][b]

    def comp(self, a: int) -> int:
        return self._rows[a][0]

    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    def flat(self) -> tuple[int, ...]:
        return tuple(v for row in self._rows for v in row)

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"FiniteAlgebra({label}{[list(r) for r in self._rows]})"

    def renamed(self, name: str | None) -> "FiniteAlgebra":
        return FiniteAlgebra(self.table, name)

    def to_json(self) -> dict:
        return {"name": self.name, "size": self.size, "table": [list(r) for r in self._rows]}


def validate(table, name: str | None = None) -> FiniteAlgebra:
    rows = [list(r) for r in table]
    n = len(rows)
    if n == 0:
        raise AlgebraError("empty table")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise AlgebraError(f"dimension mismatch: row {i} has {len(row)} entries, expected {n}")
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v < n:
                raise AlgebraError(f"out-of-range entry {v!r} at ({i},{j}); entries must lie in 0..{n - 1}")
    return FiniteAlgebra(rows, name)


def from_json(data: Mapping) -> FiniteAlgebra:
    table = data.get("table")
    if table is None:
        raise AlgebraError("missing 'table'")
    if "size" in data and data["size"] != len(table):
        raise AlgebraError(f"dimension mismatch: size {data['size']} but {len(table)} rows")
    return validate(table, data.get("name"))


def load_algebra(path) -> FiniteAlgebra:
    with open(path, encoding="utf-8") as f:
        return from_json(json.load(f))


def dump_algebra(A: FiniteAlgebra, path) -> None:
    Path(path).write_text(json.dumps(A.to_json()) + "\n", encoding="utf-8")


BUILTIN_NAMES = ("2z", "2s", "2b", "3k", "4d")


@lru_cache(maxsize=None)
def builtin_algebra(name: str) -> FiniteAlgebra:
    if name not in BUILTIN_NAMES:
        raise KeyError(name)
    text = resources.files(__package__).joinpath(f"data/algebras/{name}.json").read_text("utf-8")
    return from_json(json.loads(text))


def builtin_algebras() -> list[FiniteAlgebra]:
    return [builtin_algebra(n) for n in BUILTIN_NAMES]


def trivial_algebra() -> FiniteAlgebra:
    return FiniteAlgebra([[0]], "T")


# -- evaluation -------------------------------------------------------------

def evaluate(A: FiniteAlgebra, t: Term, assignment: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return assignment[t.name]
        except KeyError:
            raise AlgebraError(f"unbound variable {t.name!r}") from None
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Comp):
        return A.comp(evaluate(A, t.inner, assignment))
    if isinstance(t, Arrow):
        return A.op(evaluate(A, t.lhs, assignment), evaluate(A, t.rhs, assignment))
    raise TypeError(f"not a term: {t!r}")


def evaluate_all(A: FiniteAlgebra, t: Term, grids: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate `t` on many assignments at once; `grids` maps variables to index arrays."""
    tab = A.table
    shape = next(iter(grids.values())).shape if grids else (1,)

    def ev(s):
        if isinstance(s, Var):
            return grids[s.name]
        if isinstance(s, Zero):
            return np.zeros(shape, dtype=np.int64)
        if isinstance(s, Comp):
            return tab[ev(s.inner), 0]
        return tab[ev(s.lhs), ev(s.rhs)]

    return ev(t)


def assignment_grids(n: int, names: Sequence[str]) -> dict[str, np.ndarray]:
    """All ``n**k`` assignments, lexicographic with the first name most significant."""
    k = len(names)
    if k == 0:
        return {}
    idx = np.indices((n,) * k).reshape(k, -1)
    return {name: idx[i] for i, name in enumerate(names)}


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    counterexample: dict[str, int] | None = None
    lhs_value: int | None = None
    rhs_value: int | None = None

    def __bool__(self):
        return self.holds

    def describe(self) -> str:
        if self.holds:
            return "holds"
        asg = ", ".join(f"{k}={v}" for k, v in self.counterexample.items())
        return f"fails at {asg or '(no variables)'}: lhs={self.lhs_value}, rhs={self.rhs_value}"


def _names(*terms: Term) -> list[str]:
    vs: set[str] = set()
    for t in terms:
        vs |= variables(t)
    return sorted(vs)


def check_identity(A: FiniteAlgebra, e: AnyIdentity) -> CheckResult:
    if isinstance(e, ConditionalIdentity):
        return check_conditional(A, e)
    names = _names(e.lhs, e.rhs)
    grids = assignment_grids(A.size, names)
    lhs = np.broadcast_to(evaluate_all(A, e.lhs, grids), (A.size ** len(names),))
    rhs = np.broadcast_to(evaluate_all(A, e.rhs, grids), lhs.shape)
    bad = np.flatnonzero(lhs != rhs)
    if bad.size == 0:
        return CheckResult(True)
    i = int(bad[0])
    return CheckResult(False, {v: int(grids[v][i]) for v in names}, int(lhs[i]), int(rhs[i]))


def check_conditional(A: FiniteAlgebra, c: ConditionalIdentity) -> CheckResult:
    """The conclusion must hold at every assignment satisfying all hypotheses."""
    terms = [c.conclusion.lhs, c.conclusion.rhs]
    for h in c.hypotheses:
        terms += [h.lhs, h.rhs]
    names = _names(*terms)
    m = A.size ** len(names)
    grids = assignment_grids(A.size, names)

    def ev(t):
        return np.broadcast_to(evaluate_all(A, t, grids), (m,))

    ok = np.ones(m, dtype=bool)
    for h in c.hypotheses:
        ok &= ev(h.lhs) == ev(h.rhs)
    lhs, rhs = ev(c.conclusion.lhs), ev(c.conclusion.rhs)
    bad = np.flatnonzero(ok & (lhs != rhs))
    if bad.size == 0:
        return CheckResult(True)
    i = int(bad[0])
    return CheckResult(False, {v: int(grids[v][i]) for v in names}, int(lhs[i]), int(rhs[i]))


def satisfies(A: FiniteAlgebra, e: AnyIdentity) -> bool:
    return check_identity(A, e).holds


# -- constructions ----------------------------------------------------------

def direct_product(A: FiniteAlgebra, B: FiniteAlgebra) -> FiniteAlgebra:
    """Pairs ``(a, b)`` are encoded as ``a*|B| + b``; the constant is ``(0, 0)``."""
    m = B.size
    ta, tb = A.table, B.table
    ia = np.repeat(np.arange(A.size), m)
    ib = np.tile(np.arange(m), A.size)
    table = ta[ia[:, None], ia[None, :]] * m + tb[ib[:, None], ib[None, :]]
    name = f"{A.name}x{B.name}" if A.name and B.name else None
    return FiniteAlgebra(table, name)


def product(algebras: Sequence[FiniteAlgebra]) -> FiniteAlgebra:
    if not algebras:
        return trivial_algebra()
    out = algebras[0]
    for B in algebras[1:]:
        out = direct_product(out, B)
    return out


def subuniverse_closure(A: FiniteAlgebra, seed: Iterable[int]) -> frozenset[int]:
    """Least subset containing `seed` and 0 that is closed under ``->``."""
    elems = set(seed) | {0}
    for x in elems:
        if not 0 <= x < A.size:
            raise AlgebraError(f"element {x} outside 0..{A.size - 1}")
    frontier = list(elems)
    while frontier:
        new = []
        current = list(elems)
        for a in frontier:
            for b in current:
                for v in (A.op(a, b), A.op(b, a)):
                    if v not in elems:
                        elems.add(v)
                        new.append(v)
        frontier = new
    return frozenset(elems)


def subalgebra(A: FiniteAlgebra, universe: Iterable[int], name: str | None = None) -> tuple[FiniteAlgebra, list[int]]:
    """The algebra induced on a subuniverse, relabelled in increasing order.

    Returns the algebra and the list mapping new indices to old elements.
    """
    elems = sorted(set(universe))
    if not elems or elems[0] != 0:
        raise AlgebraError("a subuniverse must contain 0")
    index = {x: i for i, x in enumerate(elems)}
    try:
        table = [[index[A.op(a, b)] for b in elems] for a in elems]
    except KeyError as e:
        raise AlgebraError(f"not closed under ->: produces {e.args[0]}") from None
    return FiniteAlgebra(table, name), elems


def congruence_witness(A: FiniteAlgebra, p: Partition) -> tuple[int, int, int, int] | None:
    """First quadruple ``(a, b, c, d)`` with ``a~b, c~d`` but ``a->c`` and ``b->d`` unrelated."""
    lab = p.labels
    for blk1 in p.blocks:
        for blk2 in p.blocks:
            for a in blk1:
                for b in blk1:
                    for c in blk2:
                        for d in blk2:
                            if lab[A.op(a, c)] != lab[A.op(b, d)]:
                                return (a, b, c, d)
    return None


def quotient(A: FiniteAlgebra, p: Partition, name: str | None = None) -> FiniteAlgebra:
    """Blocks become elements, numbered in canonical block order (block of 0 first)."""
    if p.n != A.size:
        raise AlgebraError(f"partition of {p.n} elements for an algebra of size {A.size}")
    w = congruence_witness(A, p)
    if w is not None:
        raise NotACongruence(w)
    lab = p.labels
    reps = [blk[0] for blk in p.blocks]
    table = [[lab[A.op(a, b)] for b in reps] for a in reps]
    return FiniteAlgebra(table, name)


def kernel(A: FiniteAlgebra, mapping: Sequence[int]) -> Partition:
    return Partition.from_labels(list(mapping))


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, mapping: Sequence[int]) -> bool:
    if len(mapping) != A.size or mapping[0] != 0:
        return False
    return all(
        mapping[A.op(a, b)] == B.op(mapping[a], mapping[b]) for a in range(A.size) for b in range(A.size)
    )


def projection(factors: Sequence[FiniteAlgebra], i: int) -> list[int]:
    """Projection of the `product` of `factors` onto factor `i`."""
    sizes = [F.size for F in factors]
    stride = int(np.prod(sizes[i + 1 :], dtype=np.int64))
    total = int(np.prod(sizes, dtype=np.int64))
    return [(x // stride) % sizes[i] for x in range(total)]


# -- isomorphism ------------------------------------------------------------

def permute(A: FiniteAlgebra, perm: Sequence[int], name: str | None = None) -> FiniteAlgebra:
    """Relabel element ``a`` as ``perm[a]``; `perm` must fix 0."""
    p = np.asarray(perm, dtype=np.int64)
    if p[0] != 0 or sorted(perm) != list(range(A.size)):
        raise AlgebraError("relabelling must be a permutation fixing 0")
    inv = np.argsort(p)
    return FiniteAlgebra(p[A.table[np.ix_(inv, inv)]], name)


def _perms_fixing_zero(n: int) -> np.ndarray:
    rest = list(itertools.permutations(range(1, n)))
    return np.array([(0,) + r for r in rest], dtype=np.int64).reshape(len(rest), n)


@lru_cache(maxsize=16)
def perms_fixing_zero(n: int) -> np.ndarray:
    out = _perms_fixing_zero(n)
    out.setflags(write=False)
    return out


def canonical_form(A: FiniteAlgebra) -> tuple[int, ...]:
    """Lexicographically least flattened table over all relabellings fixing 0."""
    n = A.size
    perms = perms_fixing_zero(n)
    invs = np.argsort(perms, axis=1)
    tab = A.table
    # permuted[k] = perms[k][tab[inv_k][:, inv_k]]
    gathered = tab[invs[:, :, None], invs[:, None, :]]
    permuted = np.take_along_axis(perms, gathered.reshape(len(perms), -1), axis=1)
    best = min(map(tuple, permuted.tolist()))
    return best


def canonical_algebra(A: FiniteAlgebra) -> FiniteAlgebra:
    n = A.size
    flat = canonical_form(A)
    return FiniteAlgebra([flat[i * n : (i + 1) * n] for i in range(n)], A.name)


def is_isomorphic(A: FiniteAlgebra, B: FiniteAlgebra) -> bool:
    return A.size == B.size and canonical_form(A) == canonical_form(B)
