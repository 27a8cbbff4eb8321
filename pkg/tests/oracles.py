"""Slow, obviously-correct reference implementations used to cross-check the library.

Nothing here imports the library's evaluation, search or congruence code;
algebras are plain nested lists and terms are nested tuples.
"""
import itertools

# term encoding: "0", a variable name (str), ("'", t) or ("->", s, t)


def to_tuple(t):
    """Convert a library Term into the tuple encoding (structure only)."""
    from izroupoid.terms import Arrow, Comp, Var, Zero

    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Comp):
        return ("'", to_tuple(t.inner))
    if isinstance(t, Arrow):
        return ("->", to_tuple(t.lhs), to_tuple(t.rhs))
    raise TypeError(t)


def naive_eval(table, t, env):
    if t == "0":
        return 0
    if isinstance(t, str):
        return env[t]
    if t[0] == "'":
        return table[naive_eval(table, t[1], env)][0]
    return table[naive_eval(table, t[1], env)][naive_eval(table, t[2], env)]


def tvars(t, acc=None):
    acc = set() if acc is None else acc
    if t == "0":
        return acc
    if isinstance(t, str):
        acc.add(t)
        return acc
    for s in t[1:]:
        tvars(s, acc)
    return acc


def naive_holds(table, lhs, rhs):
    names = sorted(tvars(lhs) | tvars(rhs))
    n = len(table)
    for vals in itertools.product(range(n), repeat=len(names)):
        env = dict(zip(names, vals))
        if naive_eval(table, lhs, env) != naive_eval(table, rhs, env):
            return False
    return True


def satisfies_I(table):
    n = len(table)

    def op(a, b):
        return table[a][b]

    def c(a):
        return op(a, 0)

    if c(c(0)) != 0:
        return False
    return all(
        op(op(x, y), z) == c(op(op(c(z), x), c(op(y, z))))
        for x in range(n) for y in range(n) for z in range(n)
    )


def brute_canonical(table):
    """Lexicographically least flattened table over all relabellings fixing 0."""
    n = len(table)
    best = None
    for rest in itertools.permutations(range(1, n)):
        p = (0,) + rest  # p[old] = new
        inv = [0] * n
        for old, new in enumerate(p):
            inv[new] = old
        flat = tuple(p[table[inv[i]][inv[j]]] for i in range(n) for j in range(n))
        if best is None or flat < best:
            best = flat
    return best


def brute_force_models(n):
    """Canonical forms of every n-element table satisfying (I) and 0'' = 0."""
    found = set()
    for flat in itertools.product(range(n), repeat=n * n):
        table = [flat[i * n:(i + 1) * n] for i in range(n)]
        if satisfies_I(table):
            found.add(brute_canonical(table))
    return found


def set_partitions(elements):
    elements = list(elements)
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_congruences(table):
    """Every equivalence on the universe compatible with the operation, as sets of blocks."""
    n = len(table)
    out = []
    for part in set_partitions(range(n)):
        lab = [0] * n
        for i, block in enumerate(part):
            for x in block:
                lab[x] = i
        ok = all(
            lab[table[a][c]] == lab[table[b][d]]
            for a in range(n) for b in range(n) if lab[a] == lab[b]
            for c in range(n) for d in range(n) if lab[c] == lab[d]
        )
        if ok:
            out.append(frozenset(frozenset(b) for b in part))
    return out


def cg_by_intersection(table, a, b):
    """Least congruence containing (a, b), as the meet of all congruences containing it."""
    n = len(table)
    pairs = {(x, y) for x in range(n) for y in range(n)}
    for con in brute_congruences(table):
        block = {x: blk for blk in con for x in blk}
        if b in block[a]:
            pairs &= {(x, y) for x in range(n) for y in range(n) if y in block[x]}
    return frozenset(pairs)
