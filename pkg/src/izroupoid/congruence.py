"""Congruences of finite zroupoids and the relations used to build them."""
from __future__ import annotations

import enum
from typing import Iterable

from .algebra import AlgebraError, FiniteAlgebra, check_identity, congruence_witness
from .catalog import builtin_catalog
from .partition import Partition, UnionFind

MAX_LATTICE_SIZE = 12

Relation = frozenset  # of (a, b) pairs


class NotEquivalence(AlgebraError):
    def __init__(self, reason: str, witness: tuple[int, ...]):
        super().__init__(f"not an equivalence relation: {reason} {witness}")
        self.reason = reason
        self.witness = witness


class RelationRefused(AlgebraError):
    pass


class RelationKind(enum.Enum):
    R1 = "r1"
    RDOUBLEPRIME = "rpp"
    RPRIME = "rp"
    RT = "rt"


def principal_congruence(A: FiniteAlgebra, a: int, b: int) -> Partition:
    """Cg(a, b): close the pair under the translations ``z -> c->z`` and ``z -> z->c``."""
    n = A.size
    if not (0 <= a < n and 0 <= b < n):
        raise AlgebraError(f"index out of range: ({a}, {b}) for size {n}")
    rows = A.rows()
    uf = UnionFind(n)
    queue = [(a, b)]
    while queue:
        u, v = queue.pop()
        if not uf.union(u, v):
            continue
        # once u~v, every translate of the pair must be identified too
        for c in range(n):
            queue.append((rows[c][u], rows[c][v]))
            queue.append((rows[u][c], rows[v][c]))
    return Partition.from_labels([uf.find(x) for x in range(n)])


def all_congruences(A: FiniteAlgebra) -> list[Partition]:
    """Every congruence, finest first: Δ leads and ∇ closes the list."""
    n = A.size
    if n > MAX_LATTICE_SIZE:
        raise AlgebraError(f"size budget exceeded: {n} > {MAX_LATTICE_SIZE}")
    found = {Partition.identity(n)}
    principal = {principal_congruence(A, a, b) for a in range(n) for b in range(a + 1, n)}
    frontier = set(principal) - found
    found |= frontier
    while frontier:
        new = set()
        for p in frontier:
            for q in principal:
                j = p.join(q)
                if j not in found:
                    new.add(j)
        found |= new
        frontier = new
    return sorted(found, key=Partition.sort_key)


def _require_nontrivial(A: FiniteAlgebra):
    if A.size < 2:
        raise AlgebraError("simplicity is not defined for the trivial algebra")


def is_simple(A: FiniteAlgebra) -> bool:
    _require_nontrivial(A)
    n = A.size
    return all(principal_congruence(A, a, b).is_full() for a in range(n) for b in range(a + 1, n))


def monolith(A: FiniteAlgebra) -> Partition | None:
    """Meet of all non-identity congruences, or None when that meet is Δ."""
    _require_nontrivial(A)
    n = A.size
    m = Partition.full(n)
    for a in range(n):
        for b in range(a + 1, n):
            m = m.meet(principal_congruence(A, a, b))
            if m.is_identity():
                return None
    return m


def is_subdirectly_irreducible(A: FiniteAlgebra) -> tuple[bool, Partition | None]:
    m = monolith(A)
    return m is not None, m


# -- derived relations ------------------------------------------------------

def derived_relation(A: FiniteAlgebra, kind: RelationKind | str) -> Relation:
    kind = RelationKind(kind)
    n = A.size
    op, comp = A.op, A.comp
    if kind is RelationKind.R1:
        res = check_identity(A, builtin_catalog()["I20"])
        if not res.holds:
            raise RelationRefused(
                f"R1 is only defined on algebras satisfying x'' = x; {res.describe()}"
            )

        def half(x, y):
            return op(op(x, comp(y)), x) == x

        return frozenset((x, y) for x in range(n) for y in range(n) if half(x, y) and half(y, x))
    if kind is RelationKind.RDOUBLEPRIME:
        return frozenset((x, y) for x in range(n) for y in range(n) if comp(comp(x)) == comp(comp(y)))
    if kind is RelationKind.RPRIME:
        return frozenset((x, y) for x in range(n) for y in range(n) if comp(x) == comp(y))
    # RT: T = {b : b -> c != 0 for some c}, as the two-block partition {T, A \ T}
    T = {b for b in range(n) if any(op(b, c) != 0 for c in range(n))}
    return Partition(n, [T, set(range(n)) - T]).pairs()


def as_partition(n: int, rel: Iterable[tuple[int, int]]) -> Partition:
    """Convert an equivalence relation to its partition; raises NotEquivalence otherwise."""
    rel = frozenset(rel)
    for x in range(n):
        if (x, x) not in rel:
            raise NotEquivalence("missing reflexive pair", (x, x))
    for a, b in sorted(rel):
        if not (0 <= a < n and 0 <= b < n):
            raise AlgebraError(f"pair ({a}, {b}) outside 0..{n - 1}")
        if (b, a) not in rel:
            raise NotEquivalence("missing symmetric pair for", (a, b))
    succ: dict[int, set[int]] = {x: set() for x in range(n)}
    for a, b in rel:
        succ[a].add(b)
    for a in range(n):
        for b in sorted(succ[a]):
            for c in sorted(succ[b]):
                if c not in succ[a]:
                    raise NotEquivalence("not transitive on", (a, b, c))
    return Partition.generated_by(n, rel)


def is_congruence(A: FiniteAlgebra, rel) -> tuple[bool, tuple[int, int, int, int] | None]:
    """Compatibility of an equivalence relation with ``->``.

    Returns ``(True, None)`` or ``(False, (a, b, c, d))`` with ``a~b``, ``c~d``
    and ``a->c`` unrelated to ``b->d``.
    """
    p = rel if isinstance(rel, Partition) else as_partition(A.size, rel)
    w = congruence_witness(A, p)
    return w is None, w
