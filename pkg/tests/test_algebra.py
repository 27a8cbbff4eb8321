import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from izroupoid.algebra import (
    AlgebraError,
    FiniteAlgebra,
    builtin_algebra,
    canonical_form,
    check_conditional,
    check_identity,
    direct_product,
    evaluate,
    is_homomorphism,
    is_isomorphic,
    kernel,
    permute,
    projection,
    quotient,
    subalgebra,
    subuniverse_closure,
    validate,
)
from izroupoid.catalog import UnknownLabel, i20_identity_labels
from izroupoid.congruence import principal_congruence
from izroupoid.terms import parse_identity, parse_term

import oracles
from fuzzing import fuzz_discrepancies


# -- catalog ------------------------------------------------------------------

def test_catalog_lookups(catalog):
    assert catalog["DM"] == parse_identity("(x -> y) -> x = x")
    assert catalog["KL1"] == parse_identity("(x -> x) -> (y -> y)' = x -> x")
    assert catalog["L3.3.31"] == parse_identity("x -> y = x -> (x -> y)")
    assert len(i20_identity_labels()) == 63


def test_catalog_item_44_is_conditional(catalog):
    c = catalog["L3.3.44"]
    assert c.hypotheses == (parse_identity("(x -> y') -> x = x"),)
    assert c.conclusion == parse_identity("(x' -> y) -> x' = x'")
    assert sum(1 for l in i20_identity_labels() if hasattr(catalog[l], "hypotheses")) == 1


def test_unknown_label(catalog):
    with pytest.raises(UnknownLabel):
        catalog["L3.3.64"]
    with pytest.raises(UnknownLabel):
        catalog.expand("L3.3.5-L3.3.99")


def test_label_ranges(catalog):
    assert catalog.expand("I,L3.3.1-L3.3.3") == ["I", "L3.3.1", "L3.3.2", "L3.3.3"]
    assert len(catalog.expand("L3.3.*")) == 63


# -- tables and evaluation ----------------------------------------------------

def test_validate_reports_indices():
    assert validate([[1, 1], [0, 1]]).size == 2
    with pytest.raises(AlgebraError, match="row 1"):
        validate([[0, 0], [0]])
    with pytest.raises(AlgebraError, match=r"\(0,1\)"):
        validate([[0, 2], [0, 0]])


def test_evaluate_examples(five):
    assert evaluate(five["3k"], parse_term("(x -> y) -> x"), {"x": 2, "y": 0}) == 2
    assert evaluate(five["4d"], parse_term("x'"), {"x": 3}) == 3
    with pytest.raises(AlgebraError, match="unbound variable 'y'"):
        evaluate(five["2b"], parse_term("x -> y"), {"x": 0})


def test_check_identity_examples(five, catalog):
    r = check_identity(five["2s"], catalog["DM"])
    assert not r.holds and r.counterexample == {"x": 0, "y": 1} and (r.lhs_value, r.rhs_value) == (1, 0)
    assert check_identity(five["2b"], parse_identity("x -> x = 0'")).holds
    r = check_identity(five["2z"], catalog["I20"])
    assert not r.holds and r.counterexample == {"x": 1}


def test_conditional_item_44_on_i20_members(five, catalog):
    assert check_conditional(five["3k"], catalog["L3.3.44"]).holds
    assert check_conditional(five["2s"], catalog["L3.3.44"]).holds


def test_vacuous_conditional_holds():
    c = parse_identity("x = 0'")  # fails as an identity in 2b
    from izroupoid.terms import ConditionalIdentity

    never = ConditionalIdentity((parse_identity("x = x'"),), c)
    assert check_conditional(builtin_algebra("2b"), never).holds


def test_check_identity_matches_naive_evaluator_on_fuzz_cases():
    assert fuzz_discrepancies(300) == []


# -- constructions --------------------------------------------------------------

def test_product_of_2b_with_itself(b2xb2, catalog):
    assert b2xb2.size == 4
    assert check_identity(b2xb2, catalog["I"]).holds and check_identity(b2xb2, catalog["I0"]).holds


def test_subuniverse_examples(five):
    assert subuniverse_closure(five["3k"], {1}) == {0, 1}
    sub, _ = subalgebra(five["3k"], {0, 1})
    assert is_isomorphic(sub, five["2b"])
    assert subuniverse_closure(five["4d"], {2}) == {0, 1, 2}
    assert is_isomorphic(subalgebra(five["4d"], {0, 1, 2})[0], five["3k"])


def test_quotient_by_projection_kernel(b2xb2, five):
    p0 = projection([five["2b"], five["2b"]], 0)
    assert is_homomorphism(b2xb2, five["2b"], p0)
    assert is_isomorphic(quotient(b2xb2, kernel(b2xb2, p0)), five["2b"])


def test_quotient_rejects_non_congruence(five):
    from izroupoid.algebra import NotACongruence
    from izroupoid.partition import Partition

    with pytest.raises(NotACongruence):
        quotient(five["4d"], Partition(4, [[0, 1], [2], [3]]))


def _identities_holding(A, catalog):
    return {l for l in ("I", "I0", "I20", "DM", "KL1", "KL2", "BA", *i20_identity_labels())
            if check_identity(A, catalog[l]).holds}


@pytest.mark.parametrize("a,b", [("2s", "3k"), ("2b", "4d"), ("2z", "2z"), ("3k", "2s")])
def test_hsp_preserves_identities(five, catalog, a, b):
    A, B = five[a], five[b]
    both = _identities_holding(A, catalog) & _identities_holding(B, catalog)
    P = direct_product(A, B)
    assert both <= _identities_holding(P, catalog)
    # a subalgebra and a quotient of the product
    S, _ = subalgebra(P, subuniverse_closure(P, {P.size - 1}))
    assert both <= _identities_holding(S, catalog)
    Q = quotient(P, principal_congruence(P, 0, 1))
    assert both <= _identities_holding(Q, catalog)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["2z", "2s", "2b", "3k", "4d"]), st.randoms(use_true_random=False))
def test_canonical_form_is_relabelling_invariant(name, rnd):
    A = builtin_algebra(name)
    rest = list(range(1, A.size))
    rnd.shuffle(rest)
    B = permute(A, [0] + rest)
    assert canonical_form(B) == canonical_form(A)
    assert canonical_form(A) == oracles.brute_canonical(A.rows())


def test_canonical_form_separates_non_isomorphic(five):
    forms = {canonical_form(A) for A in five.values()}
    assert len(forms) == 5


def test_permute_must_fix_zero(five):
    with pytest.raises(AlgebraError):
        permute(five["2b"], [1, 0])


def test_tables_are_read_only(five):
    with pytest.raises((ValueError, TypeError)):
        five["2b"].table[0, 0] = 0
    assert isinstance(five["2b"].table, np.ndarray)
