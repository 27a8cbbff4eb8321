import pytest

from izroupoid.algebra import AlgebraError, check_identity, trivial_algebra
from izroupoid.congruence import (
    NotEquivalence,
    RelationRefused,
    all_congruences,
    as_partition,
    derived_relation,
    is_congruence,
    is_simple,
    is_subdirectly_irreducible,
    principal_congruence,
)
from izroupoid.partition import Partition
from izroupoid.terms import parse_identity

import oracles


def as_pairs(p):
    return frozenset(p.pairs())


def test_partition_is_canonical():
    assert Partition(3, [[2, 0], [1]]) == Partition(3, [[1], [0, 2]])
    assert Partition(3, [[0, 2], [1]]).blocks == ((0, 2), (1,))


def test_principal_examples(five, b2xb2):
    assert principal_congruence(five["2b"], 0, 1).is_full()
    assert principal_congruence(five["3k"], 1, 2).is_full()
    # (0,0) and (0,1) are encoded 0 and 1; the first-projection kernel pairs elements by first coordinate
    assert principal_congruence(b2xb2, 0, 1) == Partition(4, [[0, 1], [2, 3]])
    with pytest.raises(AlgebraError, match="out of range"):
        principal_congruence(five["2b"], 0, 2)


def test_principal_is_reflexive_on_diagonal(five):
    for A in five.values():
        for a in range(A.size):
            assert principal_congruence(A, a, a).is_identity()
            assert principal_congruence(A, 0, a).related(0, a)


def test_cg_minimality_on_small_corpus(corpus_by_size):
    for n in (2, 3):
        for A in corpus_by_size[n]:
            for a in range(n):
                for b in range(n):
                    got = as_pairs(principal_congruence(A, a, b))
                    assert got == oracles.cg_by_intersection(A.rows(), a, b), (A, a, b)


def test_all_congruences_examples(five, b2xb2):
    assert all_congruences(trivial_algebra()) == [Partition.identity(1)]
    assert all_congruences(five["4d"]) == [Partition.identity(4), Partition.full(4)]
    cons = all_congruences(b2xb2)
    assert Partition(4, [[0, 1], [2, 3]]) in cons and Partition(4, [[0, 2], [1, 3]]) in cons
    assert cons[0].is_identity() and cons[-1].is_full()


def test_all_congruences_match_brute_force(corpus_by_size):
    for A in corpus_by_size[3] + corpus_by_size[4][:60]:
        got = {frozenset(frozenset(b) for b in p.blocks) for p in all_congruences(A)}
        assert got == set(oracles.brute_congruences(A.rows()))


def test_simplicity(five, b2xb2):
    assert all(is_simple(A) for A in five.values())
    assert not is_simple(b2xb2)
    with pytest.raises(AlgebraError):
        is_simple(trivial_algebra())


def test_subdirect_irreducibility(five, b2xb2):
    ok, mono = is_subdirectly_irreducible(five["3k"])
    assert ok and mono.is_full()
    assert is_subdirectly_irreducible(b2xb2) == (False, None)


def test_simple_and_si_agree_on_corpus(corpus):
    for A in corpus:
        if A.size < 2:
            continue
        si, _ = is_subdirectly_irreducible(A)
        if is_simple(A):
            assert si
        if si and len(all_congruences(A)) == 2:
            assert is_simple(A)


# -- derived relations ----------------------------------------------------------

def test_relation_examples(five):
    assert derived_relation(five["2z"], "rpp") == Partition.full(2).pairs()
    assert derived_relation(five["2b"], "rp") == Partition.identity(2).pairs()
    assert derived_relation(five["3k"], "r1") == Partition.full(3).pairs()


def test_r1_refused_outside_i20(five):
    with pytest.raises(RelationRefused, match="x'' = x"):
        derived_relation(five["2z"], "r1")


def test_non_equivalence_is_rejected(five):
    with pytest.raises(NotEquivalence, match="symmetric"):
        is_congruence(five["2b"], {(0, 0), (1, 1), (0, 1)})


def test_r1_is_an_equivalence_on_i20_corpus(i20_corpus):
    for A in i20_corpus:
        rel = derived_relation(A, "r1")
        as_partition(A.size, rel)  # raises unless reflexive, symmetric and transitive


def test_rdoubleprime_congruence_on_corpus(corpus):
    for A in corpus:
        assert is_congruence(A, derived_relation(A, "rpp"))[0]


def test_r1_congruence_on_i20_corpus(i20_corpus):
    for A in i20_corpus:
        assert is_congruence(A, derived_relation(A, "r1"))[0]


def test_rt_is_a_two_block_relation(five):
    p = as_partition(3, derived_relation(five["3k"], "rt"))
    assert len(p.blocks) <= 2


def test_double_prime_collapse_consequences(corpus, catalog):
    """Where x'' = y'' holds, so do x'' = 0, (x -> y)' = 0 and (x -> y) -> z = 0."""
    collapse = parse_identity("x'' = y''")
    found = 0
    for A in corpus:
        if A.size >= 2 and check_identity(A, collapse).holds:
            found += 1
            for text in ("x'' = 0", "(x -> y)' = 0", "(x -> y) -> z = 0"):
                assert check_identity(A, parse_identity(text)).holds, (A, text)
    assert found > 0
