"""Seeded random identities over small tables, checked against the naive evaluator."""
import random

from izroupoid.algebra import FiniteAlgebra, builtin_algebra, check_identity
from izroupoid.terms import parse_identity

import oracles


def random_term(rng, names, depth):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(["0"] + list(names))
    if rng.random() < 0.3:
        return random_term(rng, names, depth - 1) + "'"
    return f"({random_term(rng, names, depth - 1)} -> {random_term(rng, names, depth - 1)})"


def fuzz_cases(count, seed=20141028):
    """Random (table, identity) pairs, half of them over corpus-like tables."""
    rng = random.Random(seed)
    five = [builtin_algebra(n).rows() for n in ("2z", "2s", "2b", "3k", "4d")]
    for _ in range(count):
        if rng.random() < 0.5:
            table = rng.choice(five)
        else:
            n = rng.randint(1, 4)
            table = tuple(tuple(rng.randrange(n) for _ in range(n)) for _ in range(n))
        names = ["x", "y", "z"][: rng.randint(1, 3)]
        lhs, rhs = random_term(rng, names, 3), random_term(rng, names, 3)
        yield table, f"{lhs} = {rhs}"


def fuzz_discrepancies(count=1000):
    bad = []
    for table, text in fuzz_cases(count):
        e = parse_identity(text)
        got = check_identity(FiniteAlgebra(table), e).holds
        want = oracles.naive_holds(table, oracles.to_tuple(e.lhs), oracles.to_tuple(e.rhs))
        if got != want:
            bad.append((table, text, got, want))
    return bad
