import pytest
from hypothesis import given, strategies as st

from izroupoid.terms import (
    ZERO,
    Arrow,
    Comp,
    Identity,
    TermSyntaxError,
    Var,
    format_term,
    fold_comp,
    match,
    normalize_comp,
    parse_conditional,
    parse_identity,
    parse_identity_file,
    parse_term,
    positions,
    replace_at,
    subterm,
    substitute,
    variables,
)

x, y, z = Var("x"), Var("y"), Var("z")


def terms(var_names=("x", "y", "z"), max_leaves=12):
    leaf = st.one_of(st.just(ZERO), st.sampled_from([Var(v) for v in var_names]))
    return st.recursive(
        leaf,
        lambda kids: st.one_of(kids.map(Comp), st.tuples(kids, kids).map(lambda p: Arrow(*p))),
        max_leaves=max_leaves,
    )


# -- parsing and printing ---------------------------------------------------

def test_parse_bare_and_parenthesized_arrow_agree():
    want = Arrow(Arrow(x, Comp(y)), x)
    assert parse_term("(x -> y') -> x") == want
    assert parse_term("((x -> y') -> x)") == want


def test_parse_stacked_primes():
    assert parse_term("0''") == Comp(Comp(ZERO))


def test_prime_binds_tighter_than_arrow():
    assert parse_term("(x -> y)'") == Comp(Arrow(x, y))
    assert parse_term("(x' -> y)") == Arrow(Comp(x), y)


@pytest.mark.parametrize("text", ["x -> -> y", "(x -> y", "x y", "(x)", "", "(x -> y))"])
def test_malformed_terms_raise_with_offset(text):
    with pytest.raises(TermSyntaxError) as info:
        parse_term(text)
    assert info.value.offset >= 0


def test_double_arrow_error_points_at_second_arrow():
    with pytest.raises(TermSyntaxError) as info:
        parse_term("x -> -> y")
    assert info.value.offset == 5


def test_unknown_character():
    with pytest.raises(TermSyntaxError, match="unknown character .* offset 6"):
        parse_term("(x -> $)")


def test_format_examples():
    assert format_term(Comp(ZERO)) == "0'"
    assert format_term(Arrow(Arrow(x, y), z)) == "((x -> y) -> z)"
    assert format_term(Arrow(ZERO, Comp(x))) == "(0 -> x')"


@given(terms())
def test_print_parse_roundtrip(t):
    assert parse_term(format_term(t)) == t


@given(terms())
def test_normalize_is_idempotent_and_removes_comp(t):
    n = normalize_comp(t)
    assert normalize_comp(n) == n
    assert "'" not in format_term(n)


@given(terms())
def test_fold_then_normalize_is_normalize(t):
    assert normalize_comp(fold_comp(t)) == normalize_comp(t)


def test_arrow_to_zero_prints_as_prime_after_folding():
    assert format_term(fold_comp(Arrow(Arrow(x, ZERO), ZERO))) == "x''"


# -- substitution and positions ---------------------------------------------

def test_substitute_examples():
    assert substitute(Comp(x), {"x": ZERO}) == Comp(ZERO)
    lhs = parse_term("(x -> y) -> z")
    a, b, c = Var("a"), Var("b"), Var("c")
    assert substitute(lhs, {"x": a, "y": b, "z": c}) == Arrow(Arrow(a, b), c)
    assert substitute(lhs, {}) == lhs


def test_substitution_is_simultaneous():
    assert substitute(Arrow(x, y), {"x": y, "y": x}) == Arrow(y, x)


@given(terms(), terms(), terms(), terms())
def test_substitution_composes(t, s1, s2, s3):
    sigma = {"x": s1, "y": s2}
    tau = {"x": s3, "z": s1}
    composed = {v: substitute(sigma.get(v, Var(v)), tau) for v in ("x", "y", "z")}
    assert substitute(substitute(t, sigma), tau) == substitute(t, composed)


@given(terms(), terms())
def test_substitute_variable_set(t, s):
    out = substitute(t, {"x": s})
    expect = (variables(t) - {"x"}) | (variables(s) if "x" in variables(t) else set())
    assert variables(out) == expect


@given(terms())
def test_every_position_round_trips_through_replace(t):
    for p in positions(t):
        assert normalize_comp(replace_at(t, p, subterm(t, p))) == normalize_comp(t)


def test_comp_has_an_implicit_zero_child():
    t = parse_term("x'")
    assert subterm(t, (1,)) == ZERO
    assert replace_at(t, (1,), y) == Arrow(x, y)


def test_positions_agree_on_raw_and_normalized_trees():
    t = parse_term("((x -> y)' -> z'')")
    assert list(positions(t)) == list(positions(normalize_comp(t)))


def test_match_modulo_definitional_comp():
    sigma = match(parse_term("(u -> 0) -> v"), parse_term("x' -> y"))
    assert sigma == {"u": x, "v": y}
    assert match(parse_term("u -> u"), parse_term("x -> y")) is None


# -- identities ---------------------------------------------------------------

def test_identity_parse_and_print():
    e = parse_identity("(x -> y) -> x = x")
    assert e == Identity(Arrow(Arrow(x, y), x), x)
    assert parse_identity(str(e)) == e


def test_conditional_parse():
    c = parse_conditional("(x -> y') -> x = x |- (x' -> y) -> x' = x'")
    assert len(c.hypotheses) == 1
    assert c.conclusion.rhs == Comp(x)


def test_identity_file_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        parse_identity_file("A : x = x\nA : y = y\n")
