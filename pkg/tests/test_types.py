from hypothesis import given, strategies as st

from hogsos import ty as T
from hogsos.sexpr import SyntaxError
from hogsos.ty import BOOL, NAT, UNIT, VOID, Fun, Mu, Prod, Sum, TVar

import pytest


def bodies(max_depth=3):
    """Types with free indices below 2, as a hypothesis strategy."""
    leaves = st.sampled_from([TVar(0), TVar(1), BOOL, UNIT, VOID])
    return st.recursive(
        leaves,
        lambda kids: st.one_of(
            st.builds(Sum, kids, kids),
            st.builds(Prod, kids, kids),
            st.builds(Fun, kids, kids),
            st.builds(Mu, kids),
        ),
        max_leaves=8,
    )


def closed_types():
    return bodies().map(lambda b: Mu(Mu(b)))


def test_derived_types():
    d = T.derived_types()
    assert d["void"] == Mu(TVar(0))
    assert d["unit"] == Fun(VOID, VOID)
    assert d["bool"] == Sum(Fun(VOID, VOID), Fun(VOID, VOID))
    assert d["nat"] == Mu(Sum(UNIT, TVar(0)))


def test_nat_unfolds_to_unit_plus_nat():
    assert T.subst_ty(Sum(UNIT, TVar(0)), NAT) == Sum(UNIT, NAT)
    assert T.unfold_mu(NAT) == Sum(UNIT, NAT)


def test_subst_examples():
    r = Mu(Fun(TVar(0), BOOL))
    assert T.subst_ty(TVar(0), BOOL) == BOOL
    assert T.subst_ty(Fun(TVar(0), BOOL), r) == Fun(r, BOOL)


def test_subst_under_binder_shifts_correctly():
    # μb.(a ⊞ b) with a := bool
    body = Mu(Sum(TVar(1), TVar(0)))
    assert T.subst_ty(body, BOOL) == Mu(Sum(BOOL, TVar(0)))


@given(bodies(), closed_types())
def test_subst_closes_single_index_bodies(body, arg):
    if not T.free_indices(body) <= {0}:
        body = Mu(body)  # binds index 0, leaves at most index 0 free
        if not T.free_indices(body) <= {0}:
            return
    assert T.is_closed(T.subst_ty(body, arg))


@given(closed_types())
def test_identity_body(t):
    assert T.subst_ty(TVar(0), t) == t


@given(closed_types())
def test_print_parse_roundtrip(t):
    assert T.parse_ty(T.show_ty(t)) == t


def test_alpha_equivalence_is_structural():
    assert T.parse_ty("(mu a (sum unit a))") == T.parse_ty("(mu z (sum unit z))") == NAT
    assert T.parse_ty("(mu a (mu b (fun a b)))") != T.parse_ty("(mu a (mu b (fun b a)))")


def test_arrow_is_right_associative():
    assert T.parse_ty("(fun bool bool bool)") == Fun(BOOL, Fun(BOOL, BOOL))


@pytest.mark.parametrize("text", ["(sum bool)", "(mu a)", "(foo bool bool)", "x", "(fun"])
def test_bad_type_syntax(text):
    with pytest.raises(SyntaxError):
        T.parse_ty(text)


def test_type_closure_contains_components():
    cl = T.type_closure([Fun(BOOL, NAT)])
    for t in (BOOL, NAT, UNIT, VOID, Sum(UNIT, NAT)):
        assert t in cl
