"""The combinator calculus presented as a GSOS law, plus its weak models."""

from __future__ import annotations

import random

from ..behavior import Behavior, Folded, Fun, Pair, Silent, SumL, SumR
from ..mutcl_semantics import _gamma, trace, weak_behaviors
from ..mutcl_syntax import OPERATORS, SortedPool, Term, enumerator, typecheck
from ..ty import BOOL, NAT, UNIT, Mu, Prod, Sum, Ty, type_closure, unfold_mu
from ..ty import Fun as FunTy
from .kernel import F, GsosLaw, SortMismatch, X, Y, lax_bialgebra_check, operational_model

# the type family the cross-checks run over
CHECK_TYPES: tuple[Ty, ...] = (
    BOOL, UNIT, FunTy(BOOL, BOOL), Sum(BOOL, UNIT), Prod(BOOL, BOOL), NAT,
)


# argument types S and K need before they can be applied
_COMBINATOR_ARGS: tuple[Ty, ...] = (
    FunTy(BOOL, FunTy(BOOL, BOOL)),
    FunTy(FunTy(BOOL, BOOL), FunTy(BOOL, BOOL)),
)


def check_universe() -> tuple[Ty, ...]:
    """Free type choices available to the enumerator in the cross-checks."""
    return type_closure(CHECK_TYPES + _COMBINATOR_ARGS)


def _lam(key, fn) -> Fun:
    return Fun(key, fn)


def rho(op: str, tys: tuple, operands: list) -> Behavior:
    """One rule per operator; continuations are free terms over X and Y leaves."""
    if op == "S":
        return _lam(("S", tys), lambda e: F("S1", X(e), tys=tys))
    if op == "S1":
        (t, _), = operands
        return _lam(("S1", tys, t), lambda e: F("S2", X(t), X(e), tys=tys))
    if op == "S2":
        (t, _), (s, _) = operands
        return _lam(("S2", tys, t, s),
                    lambda e: F("app", F("app", X(t), X(e)), F("app", X(s), X(e))))
    if op == "K":
        return _lam(("K", tys), lambda e: F("K1", X(e), tys=tys))
    if op == "K1":
        (t, _), = operands
        return _lam(("K1", t), lambda e: X(t))
    if op == "I":
        return _lam(("I", tys), lambda e: X(e))
    if op == "inl":
        (t, _), = operands
        return SumL(X(t))
    if op == "inr":
        (t, _), = operands
        return SumR(X(t))
    if op == "pair":
        (t, _), (s, _) = operands
        return Pair(X(t), X(s))
    if op == "fold":
        (t, _), = operands
        return Folded(X(t))
    if op == "app":
        (t, f), (s, _) = operands
        if isinstance(f, Silent):
            return Silent(F("app", Y(f.next), X(s)))
        return Silent(Y(f.apply(s)))
    if op == "case":
        (t, f), (s, _), (r, _) = operands
        if isinstance(f, Silent):
            return Silent(F("case", Y(f.next), X(s), X(r)))
        if isinstance(f, SumL):
            return Silent(F("app", X(s), Y(f.payload)))
        return Silent(F("app", X(r), Y(f.payload)))
    if op in ("fst", "snd"):
        (t, f), = operands
        if isinstance(f, Silent):
            return Silent(F(op, Y(f.next)))
        return Silent(Y(f.left if op == "fst" else f.right))
    if op == "unfold":
        (t, f), = operands
        if isinstance(f, Silent):
            return Silent(F("unfold", Y(f.next), tys=tys))
        return Silent(Y(f.payload))
    raise ValueError(f"unknown operator {op!r}")


MUTCL_LAW = GsosLaw(rho, name="mutcl")


def decompose(t: Term):
    return t.op, t.tys, t.args


def build(op, tys, args) -> Term:
    return Term(op, tys, tuple(args))


def _sort_check(t: Term, b: Behavior) -> None:
    ty = typecheck(t)
    if isinstance(b, Silent):
        if typecheck(b.next) != ty:
            raise SortMismatch(f"silent step changes the type of {t}")
    elif isinstance(b, Fun) != isinstance(ty, FunTy):
        raise SortMismatch(f"behaviour shape does not fit the type of {t}")


def derived_gamma(check: bool = False):
    """The operational model of the law, computed independently of the hand-written one."""
    return operational_model(MUTCL_LAW, decompose, build, _sort_check if check else None)


# -- weak models ---------------------------------------------------------------

def weak_model(fuel: int, extended: bool = False):
    def c(t: Term) -> frozenset:
        return weak_behaviors(t, fuel, extended)
    return c


def mutated_weak_model(fuel: int):
    """Weak model with the application beta-step removed.

    An application ``t s`` only exposes ``u s`` for trace points ``u`` of
    ``t``; reaching a function value does not fire.  Used as a negative
    control: the lax check must reject it at ``app``.
    """
    honest = weak_model(fuel)

    def c(t: Term) -> frozenset:
        if t.op != "app":
            return honest(t)
        head, arg = t.args
        return frozenset(Silent(Term("app", (), (u, arg))) for u in trace(head, fuel).terms)
    return c


def probe_fn(pool: SortedPool):
    def probes(t: Term):
        ty = typecheck(t)
        return pool[ty.dom] if isinstance(ty, FunTy) else ()
    return probes


class OperatorSampler:
    """Seeded random operator applications with well-typed random arguments.

    Type parameters range over ``types``; arguments are drawn uniformly from
    all enumerated terms of the required type with at most ``arg_size`` nodes.
    """

    def __init__(self, seed: int, types=CHECK_TYPES, arg_size: int = 5, universe=None):
        self.rng = random.Random(seed)
        self.types = tuple(types)
        self.arg_size = arg_size
        self.en = enumerator(universe or check_universe())
        self._cache: dict[Ty, list[Term]] = {}

    def _terms(self, ty: Ty) -> list[Term]:
        hit = self._cache.get(ty)
        if hit is None:
            hit = self._cache[ty] = self.en.upto(ty, self.arg_size)
        return hit

    def _ty(self, kind=None) -> Ty:
        opts = [t for t in self.types if kind is None or isinstance(t, kind)]
        return self.rng.choice(opts)

    def _args(self, *tys):
        out = []
        for ty in tys:
            pool = self._terms(ty)
            if not pool:
                return None
            out.append(self.rng.choice(pool))
        return tuple(out)

    def _attempt(self, op: str):
        r = self._ty
        if op in ("S", "S1", "S2"):
            a, b, c = r(), r(), r()
            need = {"S": (), "S1": (FunTy(a, FunTy(b, c)),),
                    "S2": (FunTy(a, FunTy(b, c)), FunTy(a, b))}[op]
            return (a, b, c), self._args(*need)
        if op in ("K", "K1"):
            a, b = r(), r()
            return (a, b), (self._args(a) if op == "K1" else ())
        if op == "I":
            return (r(),), ()
        if op == "app":
            a, b = r(), r()
            return (), self._args(FunTy(a, b), a)
        if op in ("inl", "inr"):
            a, b = r(), r()
            return (a, b), self._args(a if op == "inl" else b)
        if op == "case":
            sm, c = r(Sum), r()
            return (), self._args(sm, FunTy(sm.left, c), FunTy(sm.right, c))
        if op == "pair":
            return (), self._args(r(), r())
        if op in ("fst", "snd"):
            return (), self._args(Prod(r(), r()))
        mu = r(Mu)
        if op == "fold":
            return (mu,), self._args(unfold_mu(mu))
        return (mu,), self._args(mu)

    def sample(self, op: str):
        for _ in range(1000):
            tys, args = self._attempt(op)
            if args is not None:
                return op, tys, args
        raise ValueError(f"could not sample operator {op}")


def lax_samples(per_op: int, seed: int, arg_size: int = 5, universe=None):
    """``per_op`` seeded operator applications for each of the 15 operators."""
    sampler = OperatorSampler(seed, arg_size=arg_size, universe=universe)
    return [sampler.sample(op) for op in OPERATORS for _ in range(per_op)]


def check_weak_model(samples, fuel: int = 60, pool: SortedPool | None = None,
                     mutated: bool = False, extended: bool = False):
    """Lax check of the weak model; operand behaviours use one step less fuel than the result."""
    pool = pool or SortedPool(4, 3)
    lhs = mutated_weak_model(fuel + 1) if mutated else weak_model(fuel + 1, extended)
    operands = mutated_weak_model(fuel) if mutated else weak_model(fuel, extended)
    return lax_bialgebra_check(MUTCL_LAW, build, lhs, samples, probe_fn(pool), operand_weak=operands)


def check_strict(samples, pool: SortedPool | None = None):
    pool = pool or SortedPool(4, 3)
    return lax_bialgebra_check(MUTCL_LAW, build, None, samples, probe_fn(pool), strict=_gamma)


def replay_lax_violation(v, fuel: int) -> dict:
    """Re-derive a lax violation from the transition system alone.

    Reports whether the required behaviour is reachable by honest weak
    transitions of the sample, which is what a mutated model dropped.
    """
    honest = weak_behaviors(v.sample, fuel + 1)
    reachable = v.required in honest if not isinstance(v.required, Fun) else None
    return {
        "sample": str(v.sample),
        "required": repr(v.required),
        "reachable_in_honest_model": reachable,
        "trace": [str(u) for u in trace(v.sample, fuel + 1).terms],
    }
