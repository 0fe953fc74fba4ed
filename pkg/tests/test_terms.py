import pytest
from hypothesis import given, settings, strategies as st

from oracles import oracle_unify, random_term
from prost.errors import InvalidPositionError
from prost.terms import (
    App,
    Symbol,
    Var,
    apply_subst,
    compare_positions,
    match_term,
    replace_at,
    subterm_at,
    unify,
    variables,
)

S = Symbol("s", 1)
D = Symbol("d", 1)
F3 = Symbol("f", 3)
F2 = Symbol("f", 2)
A = Symbol("a", 0)
B = Symbol("b", 0)
C = Symbol("c", 0)
G = Symbol("g", 0)
ZERO = Symbol("0", 0)
X = Var("x")


def app(sym, *args):
    return App(sym, tuple(args))


def test_subterm_direct_child():
    t = app(D, app(S, X))
    assert subterm_at(t, (1,)) == app(S, X)


def test_subterm_root_is_identity():
    t = app(S, app(S, X))
    assert subterm_at(t, ()) is t


def test_subterm_third_argument():
    t = app(F3, app(A), app(B), app(G))
    assert subterm_at(t, (3,)) == app(G)


def test_subterm_invalid_position():
    with pytest.raises(InvalidPositionError):
        subterm_at(app(A), (1,))


def test_replace_third_argument():
    t = app(F3, app(A), app(B), app(G))
    assert replace_at(t, (3,), app(A)) == app(F3, app(A), app(B), app(A))


def test_replace_at_root():
    assert replace_at(app(A), (), app(B)) == app(B)


def test_replace_nested():
    t = app(D, app(S, X))
    assert replace_at(t, (1, 1), app(ZERO)) == app(D, app(S, app(ZERO)))


def test_match_simple():
    sigma = match_term(app(D, X), app(D, app(ZERO)))
    assert sigma == {"x": app(ZERO)}


def test_match_nonlinear_mismatch():
    assert match_term(app(F2, X, X), app(F2, app(B), app(C))) is None


def test_match_nonlinear_equal():
    sigma = match_term(app(F2, X, X), app(F2, app(A), app(A)))
    assert sigma == {"x": app(A)}


def test_unify_identical_constants():
    assert unify(app(G), app(G)) == {}


def test_unify_clash_through_shared_variable():
    # f(a, b, x) against f(x', x', x'): the first two arguments force a = b
    lhs = app(F3, app(A), app(B), X)
    other = app(F3, Var("x'"), Var("x'"), Var("x'"))
    assert unify(lhs, other) is None
    assert oracle_unify(lhs, other) is None


def test_unify_occurs_check():
    assert unify(X, app(S, X)) is None


def test_compare_positions_prefix():
    assert compare_positions((1,), (1, 2)) == "above"
    assert compare_positions((1, 2), (1,)) == "below"


def test_compare_positions_parallel():
    assert compare_positions((1, 1), (2,)) == "left-parallel"
    assert compare_positions((2, 3), (2, 1)) == "right-parallel"
    assert compare_positions((2,), (2,)) == "equal"


# -- properties ---------------------------------------------------------------

SYMS = [F2, S, A, B]
VARS = ["x", "y", "z"]


def terms(max_size=6):
    return st.builds(
        lambda seed, size: random_term(__import__("random").Random(seed), SYMS, VARS, size),
        st.integers(0, 10**6),
        st.integers(1, max_size),
    )


@given(terms(), st.integers(0, 10**6))
@settings(max_examples=150, deadline=None)
def test_replace_subterm_roundtrip(t, pick):
    from prost.terms import positions

    all_pos = [pos for pos, _ in positions(t)]
    pos = all_pos[pick % len(all_pos)]
    assert replace_at(t, pos, subterm_at(t, pos)) == t


@given(terms(5), terms(3), terms(3))
@settings(max_examples=150, deadline=None)
def test_match_after_substitution(p, img_x, img_y):
    sigma = {"x": img_x, "y": img_y}
    subject = apply_subst(sigma, p)
    found = match_term(p, subject)
    assert found is not None
    assert apply_subst(found, p) == subject


@given(terms(5), terms(5))
@settings(max_examples=300, deadline=None)
def test_unify_agrees_with_equation_oracle(s, t):
    theta = unify(s, t)
    oracle = oracle_unify(s, t)
    assert (theta is None) == (oracle is None)
    if theta is not None:
        assert apply_subst(theta, s) == apply_subst(theta, t)
        assert apply_subst(oracle, s) == apply_subst(oracle, t)
        # each result is most general: it matches the other's instance
        assert match_term(apply_subst(theta, s), apply_subst(oracle, s)) is not None
        assert match_term(apply_subst(oracle, s), apply_subst(theta, s)) is not None


POSITIONS = st.lists(st.integers(1, 3), max_size=4).map(tuple)


@given(POSITIONS, POSITIONS)
@settings(max_examples=300, deadline=None)
def test_compare_positions_total_antisymmetric(tau, pi):
    c1 = compare_positions(tau, pi)
    c2 = compare_positions(pi, tau)
    assert c1 in ("equal", "above", "below", "left-parallel", "right-parallel")
    mirror = {
        "equal": "equal",
        "above": "below",
        "below": "above",
        "left-parallel": "right-parallel",
        "right-parallel": "left-parallel",
    }
    assert c2 == mirror[c1]
    assert (c1 == "equal") == (tau == pi)


def test_variables_collects_all():
    assert variables(app(F2, X, app(S, Var("y")))) == {"x", "y"}
