"""Varieties generated by finite zroupoids: free algebras, membership and the subvariety poset.

Elements of free algebras and of the identity search are *term vectors*: the
values of a term under every assignment of its variables into the
generating algebras, stored with one coordinate per (algebra, assignment).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    FiniteAlgebra,
    canonical_form,
    check_identity,
    subalgebra,
    subuniverse_closure,
)
from .terms import ZERO, Arrow, Identity, Term, Var, fold_comp

DEFAULT_ELEMENT_BUDGET = 10**6


class ClosureBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Effort:
    max_power: int = 3
    max_depth: int = 4
    max_vars: int = 3
    element_budget: int = 20_000
    free_budget: int = 50_000
    product_budget: int = 200_000


# -- term-vector closures ---------------------------------------------------

class _Coords:
    """Coordinate layout: for each algebra, all assignments of `v` variables into it."""

    def __init__(self, algebras: Sequence[FiniteAlgebra], v: int):
        self.algebras = list(algebras)
        self.v = v
        # one combined table over the disjoint union of the element sets
        offsets, total = [], 0
        for B in self.algebras:
            offsets.append(total)
            total += B.size
        big = np.zeros((max(total, 1), max(total, 1)), dtype=np.int32)
        for B, off in zip(self.algebras, offsets):
            big[off : off + B.size, off : off + B.size] = B.table + off
        self.table = big
        var_cols: list[list[int]] = [[] for _ in range(v)]
        zero_col: list[int] = []
        self.factors: list[FiniteAlgebra] = []
        self.assignments: list[tuple[int, tuple[int, ...]]] = []
        for bi, (B, off) in enumerate(zip(self.algebras, offsets)):
            for asg in itertools.product(range(B.size), repeat=v):
                for i in range(v):
                    var_cols[i].append(off + asg[i])
                zero_col.append(off)
                self.factors.append(B)
                self.assignments.append((bi, asg))
        self.offsets_per_coord = np.array(
            [offsets[bi] for bi, _ in self.assignments], dtype=np.int32
        )
        self.vars = [np.array(c, dtype=np.int32) for c in var_cols]
        self.zero = np.array(zero_col, dtype=np.int32)

    @property
    def width(self) -> int:
        return len(self.zero)

    def local(self, row: np.ndarray) -> tuple[int, ...]:
        return tuple(int(x) for x in row - self.offsets_per_coord)


def _var_names(v: int) -> list[str]:
    return ["x", "y", "z"][:v] if v <= 3 else [f"x{i}" for i in range(1, v + 1)]


@dataclass
class _ClosureResult:
    rows: np.ndarray          # all distinct full vectors, generation order
    terms: list[Term]
    conflict: tuple[Term, Term] | None
    saturated: bool
    depth_reached: int


def _closure(
    table: np.ndarray,
    start_rows: list[np.ndarray],
    start_terms: list[Term],
    key_width: int,
    max_depth: int | None,
    budget: int,
    stop_on_conflict: bool = True,
) -> _ClosureResult:
    """Close a set of vectors under the coordinatewise operation, level by level.

    The first `key_width` coordinates form the key.  A *conflict* is a new
    vector whose key is already present with a different remainder: the two
    terms then agree on the key coordinates and differ on the rest.
    """
    seen: dict[bytes, int] = {}
    by_key: dict[bytes, int] = {}
    rows: list[np.ndarray] = []
    terms: list[Term] = []
    level: list[int] = []

    def add(row, term):
        full = row.tobytes()
        if full in seen:
            return None
        k = row[:key_width].tobytes()
        if k in by_key:
            return by_key[k]
        seen[full] = len(rows)
        by_key[k] = len(rows)
        rows.append(row)
        terms.append(term)
        return -1

    conflict = None
    for row, term in zip(start_rows, start_terms):
        r = add(row, term)
        if r is not None and r >= 0 and conflict is None:
            conflict = (terms[r], term)
            if stop_on_conflict:
                return _ClosureResult(np.array(rows), terms, conflict, False, 0)
    level = list(range(len(rows)))
    depth = 0
    while level:
        if max_depth is not None and depth >= max_depth:
            return _ClosureResult(np.array(rows), terms, conflict, False, depth)
        depth += 1
        arr = np.array(rows)
        new_level: list[int] = []
        old_count = len(rows)
        for i in level:
            left = table[arr[i][None, :], arr[:old_count]]
            right = table[arr[:old_count], arr[i][None, :]]
            for j in range(old_count):
                for row, term in ((left[j], Arrow(terms[i], terms[j])), (right[j], Arrow(terms[j], terms[i]))):
                    r = add(row, term)
                    if r is None:
                        continue
                    if r >= 0:
                        if conflict is None:
                            conflict = (terms[r], term)
                        if stop_on_conflict:
                            return _ClosureResult(np.array(rows), terms, conflict, False, depth)
                        continue
                    new_level.append(len(rows) - 1)
                    if len(rows) > budget:
                        raise ClosureBudgetExceeded(f"closure exceeded {budget} elements")
        level = new_level
    return _ClosureResult(np.array(rows), terms, conflict, True, depth)


# -- free algebras ----------------------------------------------------------

@dataclass
class FreeAlgebra:
    algebra: FiniteAlgebra
    generators: list[int]
    elements: list[tuple[int, ...]]
    factors: list[FiniteAlgebra]
    terms: list[Term] = field(repr=False, default_factory=list)


def free_algebra(K: Sequence[FiniteAlgebra], k: int, budget: int = DEFAULT_ELEMENT_BUDGET) -> FreeAlgebra:
    """The subalgebra of the product of all ``B^(|B|^k)``, B in K, generated by the projections."""
    if k < 0:
        raise ValueError("k must be non-negative")
    coords = _Coords(K, k)
    names = _var_names(k)
    starts = [coords.zero] + coords.vars
    start_terms: list[Term] = [ZERO] + [Var(nm) for nm in names]
    res = _closure(coords.table, starts, start_terms, coords.width, None, budget, stop_on_conflict=False)
    local = [coords.local(r) for r in res.rows] if len(res.rows) else [()]
    order = sorted(range(len(local)), key=lambda i: local[i])
    index = {local[i]: pos for pos, i in enumerate(order)}
    elements = [local[i] for i in order]
    table = np.zeros((len(elements), len(elements)), dtype=np.int64)
    if coords.width:
        arr = np.array(res.rows)[order]
        for a in range(len(elements)):
            prod = coords.table[arr[a][None, :], arr]
            for b in range(len(elements)):
                table[a, b] = index[coords.local(prod[b])]
    gens = [index[coords.local(r)] for r in coords.vars] if coords.width else [0] * k
    terms = [res.terms[i] for i in order] if coords.width else [ZERO]
    return FreeAlgebra(FiniteAlgebra(table, f"F({','.join(B.name or '?' for B in K)};{k})"), gens, elements, coords.factors, terms)


# -- membership -------------------------------------------------------------

@dataclass(frozen=True)
class HomWitness:
    """A surjective homomorphism onto A from a subalgebra of ``factors[0] x ... x factors[-1]``."""
    factors: tuple[FiniteAlgebra, ...]
    elements: tuple[tuple[int, ...], ...]
    mapping: tuple[int, ...]  # image of elements[i]

    def validate(self, A: FiniteAlgebra) -> bool:
        index = {e: i for i, e in enumerate(self.elements)}
        zero = tuple(0 for _ in self.factors)
        if zero not in index or self.mapping[index[zero]] != 0:
            return False
        for i, u in enumerate(self.elements):
            for j, w in enumerate(self.elements):
                prod = tuple(F.op(a, b) for F, a, b in zip(self.factors, u, w))
                k = index.get(prod)
                if k is None or self.mapping[k] != A.op(self.mapping[i], self.mapping[j]):
                    return False
        return set(self.mapping) == set(range(A.size))


@dataclass(frozen=True)
class Member:
    witness: HomWitness
    route: str

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NonMember:
    identity: Identity

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Unknown:
    reason: str

    def __bool__(self):
        return False


def validate_nonmember(identity: Identity, A: FiniteAlgebra, K: Sequence[FiniteAlgebra]) -> bool:
    return all(check_identity(B, identity).holds for B in K) and not check_identity(A, identity).holds


def generating_set(A: FiniteAlgebra) -> list[int]:
    """A smallest subset generating A together with the constant."""
    n = A.size
    for r in range(0, n + 1):
        for gens in itertools.combinations(range(1, n), r):
            if len(subuniverse_closure(A, gens)) == n:
                return list(gens)
    return list(range(1, n))


def _extend_hom(op, A: FiniteAlgebra, seed: dict[int, int]) -> dict[int, int] | None:
    """Extend ``seed`` (with 0 -> 0) along the subalgebra it generates; None if inconsistent."""
    h = {0: 0}
    for s, a in seed.items():
        if h.setdefault(s, a) != a:
            return None
    frontier = list(h)
    while frontier:
        new = []
        done = list(h)
        for u in done:
            for w in frontier:
                for p, q in ((u, w), (w, u)):
                    s, t = op(p, q), A.op(h[p], h[q])
                    if s in h:
                        if h[s] != t:
                            return None
                    else:
                        h[s] = t
                        new.append(s)
        frontier = new
    return h


def _surjective_homs(S: FiniteAlgebra, A: FiniteAlgebra) -> Iterable[tuple[int, ...]]:
    """Surjective homomorphisms S -> A, by extension from a generating set of S."""
    gens = generating_set(S)
    for images in itertools.product(range(A.size), repeat=len(gens)):
        h = _extend_hom(S.op, A, dict(zip(gens, images)))
        if h is not None and len(h) == S.size and set(h.values()) == set(range(A.size)):
            yield tuple(h[s] for s in range(S.size))


def _subuniverses(B: FiniteAlgebra, max_generators: int) -> list[frozenset[int]]:
    found = []
    for r in range(0, max_generators + 1):
        for gens in itertools.combinations(range(1, B.size), r):
            s = subuniverse_closure(B, gens)
            if s not in found:
                found.append(s)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def _single_factor_member(A: FiniteAlgebra, K: Sequence[FiniteAlgebra]) -> Member | None:
    rank = len(generating_set(A))
    for B in K:
        for S in _subuniverses(B, max(rank, 0) if B.size > A.size else B.size):
            if len(S) < A.size:
                continue
            sub, elems = subalgebra(B, S)
            for h in _surjective_homs(sub, A):
                w = HomWitness((B,), tuple((e,) for e in elems), h)
                return Member(w, "subalgebra")
    return None


def _identity_search(A: FiniteAlgebra, K: Sequence[FiniteAlgebra], v: int, max_depth: int, budget: int) -> Identity | None:
    kc = _Coords(K, v)
    ac = _Coords([A], v)
    shift = kc.table.shape[0]
    table = np.zeros((shift + A.size, shift + A.size), dtype=np.int32)
    table[:shift, :shift] = kc.table
    table[shift:, shift:] = A.table + shift
    names = _var_names(v)
    starts = [np.concatenate([kc.zero, ac.zero + shift])] + [
        np.concatenate([kv, av + shift]) for kv, av in zip(kc.vars, ac.vars)
    ]
    start_terms: list[Term] = [ZERO] + [Var(nm) for nm in names]
    try:
        res = _closure(table, starts, start_terms, kc.width, max_depth, budget)
    except ClosureBudgetExceeded:
        return None
    if res.conflict is None:
        return None
    s, t = res.conflict
    return Identity(fold_comp(s), fold_comp(t))


def _free_route(A: FiniteAlgebra, K: Sequence[FiniteAlgebra], budget: int) -> Member | NonMember | None:
    """Decide via the K-free algebra on as many generators as A needs."""
    gens = generating_set(A)
    v = len(gens)
    kc = _Coords(K, v)
    shift = kc.table.shape[0]
    table = np.zeros((shift + A.size, shift + A.size), dtype=np.int32)
    table[:shift, :shift] = kc.table
    table[shift:, shift:] = A.table + shift
    names = _var_names(v)
    starts = [np.concatenate([kc.zero, [shift]])] + [
        np.concatenate([kv, [shift + g]]) for kv, g in zip(kc.vars, gens)
    ]
    start_terms: list[Term] = [ZERO] + [Var(nm) for nm in names]
    try:
        res = _closure(table, starts, start_terms, kc.width, None, budget)
    except ClosureBudgetExceeded:
        return None
    if res.conflict is not None:
        s, t = res.conflict
        return NonMember(Identity(fold_comp(s), fold_comp(t)))
    elements = tuple(kc.local(r[: kc.width]) for r in res.rows)
    mapping = tuple(int(r[kc.width]) - shift for r in res.rows)
    return Member(HomWitness(tuple(kc.factors), elements, mapping), "free")


def _product_member(A: FiniteAlgebra, K: Sequence[FiniteAlgebra], max_power: int, budget: int) -> Member | None:
    """Look for A as the image of a subalgebra of a product of 2..max_power factors from K."""
    from .algebra import product

    gens = generating_set(A)
    spent = 0
    for m in range(2, max_power + 1):
        for combo in itertools.combinations_with_replacement(range(len(K)), m):
            factors = tuple(K[i] for i in combo)
            P = product(factors)
            sizes = [F.size for F in factors]

            def decode(x):
                out = []
                for s in reversed(sizes):
                    out.append(x % s)
                    x //= s
                return tuple(reversed(out))

            for pre in itertools.product(range(P.size), repeat=len(gens)):
                spent += 1
                if spent > budget:
                    return None
                h = _extend_hom(P.op, A, dict(zip(pre, gens)))
                if h is None or set(h.values()) != set(range(A.size)):
                    continue
                keys = sorted(h)
                w = HomWitness(factors, tuple(decode(x) for x in keys), tuple(h[x] for x in keys))
                if w.validate(A):
                    return Member(w, "product")
    return None


def in_variety(A: FiniteAlgebra, K: Sequence[FiniteAlgebra], effort: Effort = Effort()):
    """Decide whether A lies in the variety generated by K, within `effort`."""
    K = list(K)
    if A.size == 1:
        return Member(HomWitness((), ((),), (0,)), "trivial")
    hit = _single_factor_member(A, K)
    if hit is not None:
        return hit
    for v in range(1, effort.max_vars + 1):
        e = _identity_search(A, K, v, effort.max_depth, effort.element_budget)
        if e is not None:
            return NonMember(e)
    verdict = _free_route(A, K, effort.free_budget)
    if verdict is not None:
        return verdict
    hit = _product_member(A, K, effort.max_power, effort.product_budget)
    if hit is not None:
        return hit
    return Unknown("all search budgets exhausted")


# -- the poset of generated varieties ---------------------------------------

class UndecidedPairs(RuntimeError):
    def __init__(self, pairs):
        super().__init__("membership undecided for: " + ", ".join(f"{a} in V({b})" for a, b in pairs))
        self.pairs = pairs


@dataclass
class VarietyNode:
    generators: tuple[str, ...]
    canonical_key: tuple[str, ...]
    covers: list[int] = field(default_factory=list)

    @property
    def label(self) -> str:
        return ",".join(self.canonical_key) if self.canonical_key else "T"


@dataclass
class VarietyGraph:
    nodes: list[VarietyNode]
    leq: list[list[bool]]
    families: list[tuple[str, ...]]
    node_of_family: list[int]
    verdicts: dict = field(repr=False, default_factory=dict)

    def covers(self) -> list[tuple[int, int]]:
        return sorted((low, high) for high, node in enumerate(self.nodes) for low in node.covers)

    def to_dot(self) -> str:
        lines = ["digraph varieties {", "  rankdir=BT;"]
        for i, node in enumerate(self.nodes):
            lines.append(f'  n{i} [label="{node.label}"];')
        for low, high in self.covers():
            lines.append(f"  n{low} -> n{high};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"id": i, "label": nd.label, "generators": list(nd.canonical_key)}
                for i, nd in enumerate(self.nodes)
            ],
            "covers": [list(p) for p in self.covers()],
        }


def _name_of(B: FiniteAlgebra) -> str:
    return B.name or "".join(map(str, B.flat()))


def variety_poset(families: Sequence[Sequence[FiniteAlgebra]], effort: Effort = Effort()) -> VarietyGraph:
    """Nodes are the distinct varieties V(S); edges are the Hasse covers of inclusion."""
    # every generator, in order of first appearance
    algs: list[FiniteAlgebra] = []
    keys: list[tuple] = []
    for fam in families:
        for B in fam:
            k = (B.size, canonical_form(B))
            if k not in keys:
                keys.append(k)
                algs.append(B)
    names = [_name_of(B) for B in algs]
    fam_idx = [tuple(sorted({keys.index((B.size, canonical_form(B))) for B in fam})) for fam in families]

    verdicts: dict[tuple[int, tuple[int, ...]], object] = {}

    def member(a: int, S: tuple[int, ...]):
        key = (a, S)
        if key not in verdicts:
            if a in S:
                verdicts[key] = Member(HomWitness((algs[a],), tuple((x,) for x in range(algs[a].size)), tuple(range(algs[a].size))), "generator")
            else:
                verdicts[key] = in_variety(algs[a], [algs[i] for i in S], effort)
        return verdicts[key]

    distinct = sorted(set(fam_idx), key=lambda s: (len(s), s))
    undecided = []
    contains: dict[tuple, set] = {}
    for S in distinct:
        contains[S] = set()
        for a in range(len(algs)):
            v = member(a, S)
            if isinstance(v, Unknown):
                undecided.append((names[a], ",".join(names[i] for i in S)))
            elif isinstance(v, Member):
                contains[S].add(a)
    if undecided:
        raise UndecidedPairs(undecided)

    # V(S) is determined by the generators it contains
    classes: dict[frozenset, list[tuple]] = {}
    for S in distinct:
        classes.setdefault(frozenset(contains[S]), []).append(S)

    def irredundant(members: frozenset) -> tuple[int, ...]:
        gens = sorted(members)
        for a in sorted(members, reverse=True):
            rest = tuple(g for g in gens if g != a)
            if a in gens and isinstance(member(a, rest), Member):
                gens = list(rest)
        return tuple(gens)

    reps = []
    for content, fams in classes.items():
        reps.append((content, irredundant(content), fams))
    reps.sort(key=lambda r: (len(r[0]), sorted(r[0])))
    m = len(reps)
    leq = [[reps[i][0] <= reps[j][0] for j in range(m)] for i in range(m)]
    nodes = []
    for i, (content, gens, fams) in enumerate(reps):
        node = VarietyNode(generators=tuple(names[a] for a in sorted(content)), canonical_key=tuple(names[a] for a in gens))
        below = [j for j in range(m) if j != i and leq[j][i]]
        node.covers = [j for j in below if not any(k != j and leq[j][k] and k in below for k in below)]
        nodes.append(node)
    node_of_family = []
    for S in fam_idx:
        content = frozenset(contains[S])
        node_of_family.append(next(i for i, r in enumerate(reps) if r[0] == content))
    return VarietyGraph(nodes, leq, [tuple(names[i] for i in S) for S in fam_idx], node_of_family, verdicts)


def all_subsets(algebras: Sequence[FiniteAlgebra]) -> list[list[FiniteAlgebra]]:
    out = []
    for r in range(len(algebras) + 1):
        for combo in itertools.combinations(algebras, r):
            out.append(list(combo))
    return out


# -- lattice shape ----------------------------------------------------------

@dataclass
class ShapeReport:
    ok: bool
    reason: str
    isomorphism: dict[int, tuple[frozenset, int]] | None = None

    def __bool__(self):
        return self.ok


def check_lattice_shape(graph: VarietyGraph, antichain: int = 2, chain: int = 3) -> ShapeReport:
    """Is the poset a lattice isomorphic to (Boolean lattice on `antichain` atoms) x (chain of `chain`+1 elements)?"""
    m = len(graph.nodes)
    leq = graph.leq
    expected = (2**antichain) * (chain + 1)
    if m != expected:
        return ShapeReport(False, f"size mismatch: {m} nodes, expected {expected}")
    for i in range(m):
        for j in range(m):
            ub = [k for k in range(m) if leq[i][k] and leq[j][k]]
            least = [k for k in ub if all(leq[k][u] for u in ub)]
            if len(least) != 1:
                return ShapeReport(False, f"no join for {graph.nodes[i].label} and {graph.nodes[j].label}")
            lb = [k for k in range(m) if leq[k][i] and leq[k][j]]
            greatest = [k for k in lb if all(leq[u][k] for u in lb)]
            if len(greatest) != 1:
                return ShapeReport(False, f"no meet for {graph.nodes[i].label} and {graph.nodes[j].label}")
    ji = [i for i in range(m) if len(graph.nodes[i].covers) == 1]
    # split the join-irreducibles into comparability components
    comps: list[list[int]] = []
    for i in ji:
        linked = [c for c in comps if any(leq[i][j] or leq[j][i] for j in c)]
        merged = [i] + [x for c in linked for x in c]
        comps = [c for c in comps if c not in linked] + [merged]
    singles = [c for c in comps if len(c) == 1]
    chains = [c for c in comps if len(c) > 1]
    if len(ji) != antichain + chain or len(chains) != 1 or len(chains[0]) != chain or len(singles) != antichain:
        labels = [[graph.nodes[i].label for i in c] for c in comps]
        return ShapeReport(False, f"join-irreducibles do not factor as {antichain} atoms plus a {chain}-chain: {labels}")
    ch = chains[0]
    if not all(leq[a][b] or leq[b][a] for a in ch for b in ch):
        return ShapeReport(False, "chain component is not totally ordered")
    atoms = [c[0] for c in singles]
    phi = {}
    for x in range(m):
        phi[x] = (frozenset(a for a in atoms if leq[a][x]), sum(1 for c in ch if leq[c][x]))
    if len(set(phi.values())) != m:
        return ShapeReport(False, "factor map is not injective")
    for x in range(m):
        for y in range(m):
            px, py = phi[x], phi[y]
            if leq[x][y] != (px[0] <= py[0] and px[1] <= py[1]):
                return ShapeReport(False, f"order not preserved between {graph.nodes[x].label} and {graph.nodes[y].label}")
    return ShapeReport(True, "isomorphic", phi)
