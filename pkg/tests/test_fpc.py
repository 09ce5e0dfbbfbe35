import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hogsos.behavior import Fun, Silent, SumL
from hogsos.fpc import (
    ContextMismatch, FpcConfig, FpcPool, FpcRelationChecker, TypeMismatch, check_subst,
    choice, compose, ctx_fpc_bounded, enumerate_fpc, eta_expand, fapp, fcase, ffold, ffst, fhole,
    finl, finr, fpair, free_vars, fsnd, funfold, identity_subst, is_closed_term, lam,
    may_terminates, omega, parse_fpc, parse_fpc_query, plug_fpc, reach, recursive_arrow, rel_fpc,
    shift, show_fpc, step_fpc, step_rules, subst, subst1, successors, typecheck_fpc, var,
)
from hogsos.ty import BOOL, UNIT, VOID, Fun as FunTy, Mu, Prod, TVar

B2B = FunTy(BOOL, BOOL)
STAR = lam(VOID, var(0))
TT = finl(UNIT, UNIT, STAR)
FF = finr(UNIT, UNIT, STAR)
NOT = lam(BOOL, fcase(var(0), lam(UNIT, FF), lam(UNIT, TT)))


def test_typing_examples():
    assert typecheck_fpc((), STAR) == UNIT
    assert typecheck_fpc((), TT) == BOOL
    assert typecheck_fpc((), NOT) == B2B
    assert typecheck_fpc((BOOL,), var(0)) == BOOL
    assert typecheck_fpc((UNIT, BOOL), var(1)) == BOOL
    assert typecheck_fpc((), fpair(TT, STAR)) == Prod(BOOL, UNIT)
    assert typecheck_fpc((), fsnd(fpair(TT, STAR))) == UNIT
    with pytest.raises(TypeMismatch):
        typecheck_fpc((), choice(TT, STAR))
    with pytest.raises(TypeMismatch):
        typecheck_fpc((), fapp(NOT, STAR))
    with pytest.raises(TypeMismatch):
        typecheck_fpc((), var(0))


def test_fold_at_recursive_arrow():
    r = recursive_arrow(BOOL)
    assert r == Mu(FunTy(TVar(0), BOOL))
    w = lam(r, fapp(funfold(var(0)), var(0)))
    assert typecheck_fpc((), w) == FunTy(r, BOOL)
    assert typecheck_fpc((), ffold(r, w)) == r
    assert typecheck_fpc((), omega(BOOL)) == BOOL
    with pytest.raises(TypeMismatch):
        typecheck_fpc((), ffold(r, NOT))


def test_free_vars_and_shift():
    t = lam(BOOL, fapp(var(1), var(0)))
    assert free_vars(t) == {0}
    assert not is_closed_term(t)
    assert shift(t, 2) == lam(BOOL, fapp(var(3), var(0)))
    assert shift(STAR, 5) == STAR


def test_subst1_basics():
    assert subst1(var(0), TT) == TT
    assert subst1(var(1), TT) == var(0)
    body = lam(BOOL, fapp(var(1), var(0)))
    assert subst1(body, NOT) == lam(BOOL, fapp(NOT, var(0)))
    # the substituted term is shifted under binders
    assert subst1(body, var(3)) == lam(BOOL, fapp(var(4), var(0)))


def test_beta_step():
    t = fapp(NOT, TT)
    assert step_rules(t) == (("beta", fcase(TT, lam(UNIT, FF), lam(UNIT, TT))),)
    m = may_terminates(t)
    assert m.yes and m.path[-1] == FF


def test_step_examples():
    assert step_fpc(TT) == {SumL(STAR)}
    assert isinstance(next(iter(step_fpc(NOT))), Fun)
    assert step_fpc(choice(TT, FF)) == {Silent(TT), Silent(FF)}
    assert step_fpc(var(0)) == frozenset()
    assert step_fpc(ffst(fpair(TT, FF))) == {Silent(TT)}
    assert step_fpc(fcase(FF, lam(UNIT, TT), lam(UNIT, FF))) == {Silent(fapp(lam(UNIT, FF), STAR))}
    inner = choice(fpair(TT, FF), fpair(FF, TT))
    assert successors(ffst(inner)) == (ffst(fpair(TT, FF)), ffst(fpair(FF, TT)))


def test_omega_cycle_certified():
    w = omega(BOOL)
    r = reach(w, 10)
    assert r.complete and len(r.terms) == 2
    assert successors(r.terms[1]) == (w,)
    m = may_terminates(w)
    assert m.status == "no_certified" and m.path == ()
    assert may_terminates(choice(w, w)).status == "no_certified"


def test_may_terminates_through_choice():
    m = may_terminates(choice(TT, omega(BOOL)))
    assert m.yes and m.path[-1] == TT
    m = may_terminates(choice(omega(BOOL), TT))
    assert m.yes and m.path == (choice(omega(BOOL), TT), TT)


def test_may_terminates_unknown_without_fuel():
    deep = fapp(NOT, fapp(NOT, fapp(NOT, TT)))
    assert may_terminates(deep, fuel=1).status == "unknown"
    assert may_terminates(deep, fuel=100).yes


def test_parse_and_show():
    t = parse_fpc("(lam x bool (case (var x) (lam u unit (inr unit unit (var u))) (lam u unit (inl unit unit (var u)))))")
    assert typecheck_fpc((), t) == B2B
    assert parse_fpc(show_fpc(t)) == t
    assert parse_fpc("(omega bool)") == omega(BOOL)
    assert show_fpc(var(2)) == "(var #2)"
    a, b = parse_fpc_query("(pair-of (inl unit unit (lam x void (var x))) (omega bool))")
    assert a == TT and b == omega(BOOL)


_UNI = (VOID, UNIT, BOOL, B2B, Prod(BOOL, BOOL))
_OPEN = [(ctx, t) for ctx in [(), (BOOL,), (B2B, BOOL)]
         for ty in (BOOL, B2B) for t in enumerate_fpc(ctx, ty, 5, _UNI)]


@settings(max_examples=300)
@given(st.sampled_from(_OPEN))
def test_roundtrip_open_terms(item):
    ctx, t = item
    assert parse_fpc(show_fpc(t)) == t
    names = tuple(f"v{i}" for i in range(len(ctx)))[::-1]
    named = show_fpc(t).replace("(var #0)", "(var v0)").replace("(var #1)", "(var v1)")
    assert parse_fpc(named, names) == t


def _enumerated_closed(ty, size):
    return enumerate_fpc((), ty, size, _UNI)


def test_enumeration_sound_and_distinct():
    for ctx in [(), (BOOL,)]:
        for ty in (BOOL, B2B, UNIT):
            terms = enumerate_fpc(ctx, ty, 5, _UNI)
            assert len(set(terms)) == len(terms)
            assert all(typecheck_fpc(ctx, t) == ty and t.size <= 5 for t in terms)
    assert enumerate_fpc((), VOID, 4, _UNI) == []
    no_choice = enumerate_fpc((), BOOL, 4, _UNI, with_choice=False)
    assert all("choice" not in show_fpc(t) for t in no_choice)


@settings(max_examples=300)
@given(st.sampled_from(_OPEN))
def test_subject_reduction(item):
    ctx, t = item
    ty = typecheck_fpc(ctx, t)
    for u in reach(t, 30).terms:
        assert typecheck_fpc(ctx, u) == ty


def test_only_choice_branches():
    for ctx, t in _OPEN:
        for u in reach(t, 20).terms:
            if len(successors(u)) >= 2:
                assert _has_choice_redex(u)


def _has_choice_redex(u):
    # the redex sits at the head of an evaluation context
    while u.op != "choice":
        if u.op in ("app", "unfold", "case", "fst", "snd"):
            u = u.args[0]
        else:
            return False
    return True


def _sub_for(ctx, k):
    pools = [enumerate_fpc((), ty, 3, _UNI) for ty in ctx]
    return [tuple(c) for c in itertools.islice(itertools.product(*pools), k)]


@settings(max_examples=200)
@given(st.sampled_from(_OPEN), st.integers(0, 20))
def test_substitution_lemma(item, k):
    ctx, t = item
    sigmas = _sub_for(ctx, k + 1)
    sigma = sigmas[k % len(sigmas)]
    check_subst(sigma, ctx, ())
    u = subst(t, sigma)
    assert is_closed_term(u)
    assert typecheck_fpc((), u) == typecheck_fpc(ctx, t)


@settings(max_examples=200)
@given(st.sampled_from(_OPEN))
def test_substitution_composes(item):
    ctx, t = item
    if not ctx:
        return
    # σ : ctx → (BOOL,) by constants and the one variable alternating
    sigma = tuple(var(0) if ty == BOOL else lam(BOOL, var(1)) for ty in ctx)
    sigma = tuple(s if typecheck_fpc((BOOL,), s) == ty else lam(BOOL, var(0)) for s, ty in zip(sigma, ctx))
    check_subst(sigma, ctx, (BOOL,))
    tau = (TT,)
    assert subst(subst(t, sigma), tau) == subst(t, compose(sigma, tau))
    assert subst(t, identity_subst(len(ctx))) == t


def test_subst1_agrees_with_simultaneous():
    for ctx, t in _OPEN:
        if ctx[:1] == (BOOL,):
            rest = identity_subst(len(ctx) - 1)
            assert subst1(t, TT) == subst(t, (TT,) + rest)


def test_check_subst_errors():
    with pytest.raises(ContextMismatch):
        check_subst((TT,), (BOOL, BOOL), ())
    with pytest.raises(ContextMismatch):
        check_subst((STAR,), (BOOL,), ())


# -- the logical relation ----------------------------------------------------

def cfg(n=3):
    return FpcConfig(n=n, pool=FpcPool(6, 3))


def test_index_zero_holds():
    assert rel_fpc(cfg(0), (), None, TT, FF).holds


def test_values_and_booleans():
    assert rel_fpc(cfg(), (), None, TT, TT).holds
    assert rel_fpc(cfg(), (), None, TT, FF).fails
    assert rel_fpc(cfg(), (), None, NOT, NOT).holds


def test_choice_on_the_left_needs_both_branches():
    assert rel_fpc(cfg(), (), None, choice(TT, TT), TT).holds
    assert rel_fpc(cfg(), (), None, choice(TT, FF), TT).fails
    assert rel_fpc(cfg(), (), None, TT, choice(TT, FF)).holds
    assert rel_fpc(cfg(), (), None, choice(FF, TT), choice(TT, FF)).holds


def test_divergence_asymmetry():
    w = omega(B2B)
    e = eta_expand(w, B2B)
    assert rel_fpc(cfg(), (), None, w, e).holds
    v = rel_fpc(cfg(), (), None, e, w)
    assert v.fails


def test_open_terms_use_substitutions():
    c = cfg()
    assert rel_fpc(c, (BOOL,), None, var(0), var(0)).holds
    assert rel_fpc(c, (BOOL,), None, var(0), TT).fails
    assert rel_fpc(c, (BOOL,), None, fapp(NOT, fapp(NOT, var(0))), var(0)).holds


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fundamental_property_open(n):
    checker = FpcRelationChecker(FpcConfig(n=n, pool=FpcPool(4, 3)))
    for ctx, t in _OPEN[::7]:
        ty = typecheck_fpc(ctx, t)
        assert not checker.rel(n, ctx, ty, t, t).fails, show_fpc(t)


def test_rel_type_errors():
    with pytest.raises(TypeError):
        rel_fpc(cfg(), (), None, TT, STAR)
    with pytest.raises(ValueError):
        FpcConfig(target_contexts="all")


# -- contexts ----------------------------------------------------------------

def test_plug():
    c = fapp(fhole(B2B), TT)
    assert plug_fpc(c, NOT) == fapp(NOT, TT)
    with pytest.raises(ContextMismatch):
        plug_fpc(c, var(0))
    inside = lam(BOOL, fapp(fhole(B2B), var(0)))
    assert plug_fpc(inside, NOT) == lam(BOOL, fapp(NOT, var(0)))


def test_ctx_separates_eta_from_omega():
    w = omega(B2B)
    v = ctx_fpc_bounded(eta_expand(w, B2B), w, max_size=3)
    assert v.is_counterexample
    assert v.context == fhole(B2B)
    assert v.checked == 1


def test_ctx_other_direction_finds_nothing():
    w = omega(B2B)
    v = ctx_fpc_bounded(w, eta_expand(w, B2B), max_size=3)
    assert v.status == "no_counterexample"


def test_ctx_bool_observation():
    v = ctx_fpc_bounded(TT, omega(BOOL), "bool", max_size=2)
    assert v.is_counterexample
    v = ctx_fpc_bounded(TT, FF, "bool", max_size=3)
    assert not v.is_counterexample


def test_ctx_rejects_open_terms():
    with pytest.raises(ContextMismatch):
        ctx_fpc_bounded(var(0), var(0))
