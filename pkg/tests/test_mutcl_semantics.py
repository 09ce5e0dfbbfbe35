import pytest
from hypothesis import given, settings, strategies as st

from hogsos.behavior import Folded, Fun, Pair, Silent, SumL, SumR
from hogsos.mutcl_semantics import (
    IllTyped, LabelTypeMismatch, extended_weak_labelled, gamma, step, terminates, trace,
    weak_behaviors, weak_labelled,
)
from hogsos.mutcl_syntax import (
    I, K, K1, S, S1, S2, app, apps, case, enumerate_terms, fold, fst, inl, inr, pair, snd,
    typecheck, unfold,
)
from hogsos.ty import BOOL, NAT, UNIT, VOID
from hogsos.ty import Fun as FunTy
from hogsos.gsos.mutcl_law import CHECK_TYPES, check_universe

B2B = FunTy(BOOL, BOOL)
STAR = I(VOID)
TT = inl(UNIT, UNIT, STAR)
FF = inr(UNIT, UNIT, STAR)


def test_gamma_values():
    assert isinstance(gamma(I(BOOL)), Fun)
    assert gamma(TT) == SumL(STAR)
    assert gamma(FF) == SumR(STAR)
    assert gamma(pair(TT, FF)) == Pair(TT, FF)
    zero = fold(NAT, inl(UNIT, NAT, STAR))
    assert gamma(zero) == Folded(inl(UNIT, NAT, STAR))


def test_gamma_redexes():
    assert gamma(app(I(BOOL), TT)) == Silent(TT)
    assert gamma(app(K(BOOL, BOOL), TT)) == Silent(K1(BOOL, BOOL, TT))
    assert gamma(app(K1(BOOL, BOOL, TT), FF)) == Silent(TT)
    assert gamma(fst(pair(TT, FF))) == Silent(TT)
    assert gamma(snd(pair(TT, FF))) == Silent(FF)
    const = K1(UNIT, UNIT, STAR)
    assert gamma(case(FF, const, I(UNIT))) == Silent(app(I(UNIT), STAR))
    assert gamma(case(TT, const, I(UNIT))) == Silent(app(const, STAR))
    zero = fold(NAT, inl(UNIT, NAT, STAR))
    assert gamma(unfold(NAT, zero)) == Silent(inl(UNIT, NAT, STAR))


def test_gamma_is_call_by_name():
    # the argument is never touched before the head is a value
    arg = app(I(BOOL), TT)
    assert gamma(app(I(BOOL), arg)) == Silent(arg)
    inner = app(app(K(B2B, BOOL), I(BOOL)), TT)
    assert gamma(app(inner, arg)) == Silent(app(app(K1(B2B, BOOL, I(BOOL)), TT), arg))


def test_gamma_rejects_ill_typed():
    from hogsos.mutcl_syntax import Term
    with pytest.raises(IllTyped):
        gamma(Term("app", (), (I(BOOL), STAR)))


_TRIPLES = [
    (K(BOOL, BOOL), I(BOOL), TT),
    (K(BOOL, BOOL), I(BOOL), FF),
    (K(BOOL, BOOL), K1(BOOL, BOOL, TT), FF),
    (K(BOOL, BOOL), app(I(B2B), I(BOOL)), TT),
    (app(I(FunTy(BOOL, B2B)), K(BOOL, BOOL)), I(BOOL), TT),
    (K1(B2B, BOOL, I(BOOL)), I(BOOL), FF),
    (K1(B2B, BOOL, K1(BOOL, BOOL, FF)), K1(BOOL, BOOL, TT), TT),
    (app(K(B2B, BOOL), K1(BOOL, BOOL, FF)), I(BOOL), app(I(BOOL), TT)),
    (K(BOOL, BOOL), S2(BOOL, BOOL, BOOL, K(BOOL, BOOL), I(BOOL)), FF),
    (app(I(FunTy(BOOL, B2B)), K(BOOL, BOOL)), K1(BOOL, BOOL, FF), app(K1(BOOL, BOOL, TT), FF)),
]


@pytest.mark.parametrize("t,s,e", _TRIPLES)
def test_s_redex_trace(t, s, e):
    a, b, c = BOOL, BOOL, BOOL
    if typecheck(t) != FunTy(a, FunTy(b, c)) or typecheck(s) != FunTy(a, b) or typecheck(e) != a:
        pytest.fail("bad fixture")
    prog = app(app(app(S(a, b, c), t), s), e)
    tr = trace(prog, 3)
    assert tr.terms == [
        prog,
        app(app(S1(a, b, c, t), s), e),
        app(S2(a, b, c, t, s), e),
        app(app(t, e), app(s, e)),
    ]


def test_eta_trace():
    f = K1(BOOL, BOOL, TT)
    e = FF
    ki = app(K(B2B, BOOL), I(BOOL))
    prog = apps(S(BOOL, BOOL, BOOL), ki, f, e)
    tr = trace(prog, 50)
    assert tr.complete and tr.value == TT
    assert tr.terms == [
        prog,
        app(app(S1(BOOL, BOOL, BOOL, ki), f), e),
        app(S2(BOOL, BOOL, BOOL, ki, f), e),
        app(app(ki, e), app(f, e)),
        app(app(K1(B2B, BOOL, I(BOOL)), e), app(f, e)),
        app(I(BOOL), app(f, e)),
        app(f, e),
        TT,
    ]


def test_trace_fuel_and_value():
    prog = app(I(BOOL), app(I(BOOL), TT))
    full = trace(prog, 10)
    assert full.complete and full.steps == 2 and full.value == TT
    cut = trace(prog, 1)
    assert cut.truncated and cut.value is None
    assert terminates(prog, 10) == TT
    assert terminates(prog, 1) is None
    assert trace(TT, 0).complete


def test_weak_labelled():
    prog = app(I(B2B), I(BOOL))
    assert weak_labelled(prog, TT, 10) == TT
    assert weak_labelled(app(I(BOOL), FF), "inr", 10) == STAR
    assert weak_labelled(app(I(BOOL), FF), "inl", 10) is None
    assert weak_labelled(fst(pair(pair(TT, FF), TT)), "snd", 10) == FF
    zero = fold(NAT, inl(UNIT, NAT, STAR))
    assert weak_labelled(zero, "mu", 1) == inl(UNIT, NAT, STAR)
    assert weak_labelled(prog, TT, 0) is None


def test_weak_labelled_checks_label():
    with pytest.raises(LabelTypeMismatch):
        weak_labelled(I(BOOL), STAR, 5)
    with pytest.raises(LabelTypeMismatch):
        weak_labelled(TT, "fst", 5)


def test_extended_weak_labelled():
    prog = app(I(B2B), I(BOOL))
    got = extended_weak_labelled(prog, TT, 10)
    assert got == [TT, app(prog, TT), app(I(BOOL), TT)]
    # without fuel only the syntactic applications remain
    assert extended_weak_labelled(prog, TT, 0) == [app(prog, TT)]
    assert extended_weak_labelled(TT, "inl", 10) == [STAR]


def test_weak_behaviors():
    prog = app(I(BOOL), TT)
    bs = weak_behaviors(prog, 10)
    assert bs == frozenset({Silent(prog), Silent(TT), SumL(STAR)})
    assert len(weak_behaviors(app(I(B2B), I(BOOL)), 10, extended=True)) == 5


_TERMS = [t for ty in CHECK_TYPES for t in enumerate_terms(ty, 6, check_universe())]


@settings(max_examples=300)
@given(st.sampled_from(_TERMS))
def test_subject_reduction(t):
    ty = typecheck(t)
    for u in trace(t, 30).terms:
        assert typecheck(u) == ty


@settings(max_examples=300)
@given(st.sampled_from(_TERMS))
def test_determinism(t):
    assert gamma(t) == gamma(t)
    nxt = step(t)
    assert (nxt is None) == gamma(t).is_value


@settings(max_examples=200)
@given(st.sampled_from(_TERMS), st.integers(0, 20))
def test_trace_prefix_property(t, k):
    short = trace(t, k)
    long = trace(t, k + 5)
    assert long.terms[: len(short.terms)] == short.terms
    if short.complete:
        assert long.terms == short.terms


def test_all_small_terms_terminate():
    # every term enumerated here reaches a value quickly
    for t in _TERMS:
        assert trace(t, 200).complete
