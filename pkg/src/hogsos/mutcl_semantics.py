"""Call-by-name transition system on closed terms.

``gamma`` gives the unique one-step behaviour of a term.  Everything weak
(traces, weak labelled steps, behaviour sets) is built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache, partial

from .behavior import Behavior, Folded, Fun, Pair, Silent, SumL, SumR
from .mutcl_syntax import (
    K1,
    S1,
    S2,
    Term,
    TypeMismatch,
    app,
    case,
    fst,
    show,
    snd,
    typecheck,
    unfold,
)
from .ty import Fun as FunTy
from .ty import Mu, Prod, Sum, show_ty

TAGS = ("inl", "inr", "fst", "snd", "mu")
VALUE_OPS = frozenset({"S", "S1", "S2", "K", "K1", "I", "inl", "inr", "pair", "fold"})


class IllTyped(Exception):
    pass


class LabelTypeMismatch(Exception):
    pass


def apply_value(v: Term, e: Term) -> Term:
    """The target of ``v —e→`` for a function value ``v``."""
    op = v.op
    if op == "S":
        return S1(*v.tys, e)
    if op == "S1":
        return S2(*v.tys, v.args[0], e)
    if op == "S2":
        t, s = v.args
        return app(app(t, e), app(s, e))
    if op == "K":
        return K1(*v.tys, e)
    if op == "K1":
        return v.args[0]
    if op == "I":
        return e
    raise ValueError(f"not a function value: {show(v)}")


def value_behavior(v: Term) -> Behavior:
    op = v.op
    if op == "inl":
        return SumL(v.args[0])
    if op == "inr":
        return SumR(v.args[0])
    if op == "pair":
        return Pair(*v.args)
    if op == "fold":
        return Folded(v.args[0])
    return Fun(v, partial(apply_value, v))


@lru_cache(maxsize=1 << 17)
def _gamma(t: Term) -> Behavior:
    op = t.op
    if op in VALUE_OPS:
        return value_behavior(t)
    head = t.args[0]
    b = _gamma(head)
    if op == "app":
        if isinstance(b, Silent):
            return Silent(app(b.next, t.args[1]))
        return Silent(apply_value(head, t.args[1]))
    if op == "case":
        _, s, r = t.args
        if isinstance(b, Silent):
            return Silent(case(b.next, s, r))
        if isinstance(b, SumL):
            return Silent(app(s, b.payload))
        return Silent(app(r, b.payload))
    if op in ("fst", "snd"):
        if isinstance(b, Silent):
            return Silent((fst if op == "fst" else snd)(b.next))
        return Silent(b.left if op == "fst" else b.right)
    if op == "unfold":
        if isinstance(b, Silent):
            return Silent(unfold(t.tys[0], b.next))
        return Silent(b.payload)
    raise ValueError(f"unknown operator {op!r}")


def gamma(t: Term) -> Behavior:
    """One-step behaviour of a well-typed closed term."""
    try:
        typecheck(t)
    except TypeMismatch as err:
        raise IllTyped(str(err)) from None
    return _gamma(t)


def step(t: Term) -> Term | None:
    """The silent successor, or None for a value."""
    b = _gamma(t)
    return b.next if isinstance(b, Silent) else None


@dataclass
class Trace:
    """Silent reduction sequence starting at (and including) the source term."""

    terms: list[Term] = field(default_factory=list)
    complete: bool = False  # last term is a value
    cyclic: bool = False  # a term repeated; certified divergence

    @property
    def value(self) -> Term | None:
        return self.terms[-1] if self.complete else None

    @property
    def truncated(self) -> bool:
        return not self.complete and not self.cyclic

    @property
    def steps(self) -> int:
        return len(self.terms) - 1


def trace(t: Term, fuel: int) -> Trace:
    """Follow silent steps from ``t``, at most ``fuel`` of them."""
    out = Trace([t])
    seen = {t}
    cur = t
    for _ in range(fuel):
        b = _gamma(cur)
        if b.is_value:
            out.complete = True
            return out
        cur = b.next
        if cur in seen:
            out.cyclic = True
            return out
        seen.add(cur)
        out.terms.append(cur)
    out.complete = _gamma(cur).is_value
    return out


def terminates(t: Term, fuel: int) -> Term | None:
    """The value reached within ``fuel`` silent steps, else None (unknown)."""
    return trace(t, fuel).value


def _check_label(t: Term, label) -> None:
    try:
        ty = typecheck(t)
    except TypeMismatch as err:
        raise IllTyped(str(err)) from None
    if isinstance(label, Term):
        lt = typecheck(label)
        if not isinstance(ty, FunTy) or ty.dom != lt:
            raise LabelTypeMismatch(f"argument of type {show_ty(lt)} for a term of type {show_ty(ty)}")
        return
    want = {"inl": Sum, "inr": Sum, "fst": Prod, "snd": Prod, "mu": Mu}.get(label)
    if want is None:
        raise LabelTypeMismatch(f"unknown label {label!r}")
    if not isinstance(ty, want):
        raise LabelTypeMismatch(f"label {label} for a term of type {show_ty(ty)}")


def fire(b: Behavior, label) -> Term | None:
    """The target of a labelled transition from a value behaviour, or None."""
    if isinstance(label, Term):
        return b.apply(label) if isinstance(b, Fun) else None
    if label == "inl":
        return b.payload if isinstance(b, SumL) else None
    if label == "inr":
        return b.payload if isinstance(b, SumR) else None
    if label == "fst":
        return b.left if isinstance(b, Pair) else None
    if label == "snd":
        return b.right if isinstance(b, Pair) else None
    if label == "mu":
        return b.payload if isinstance(b, Folded) else None
    return None


def weak_labelled(t: Term, label, fuel: int, check: bool = True) -> Term | None:
    """``s`` with ``t ⇒ v —label→ s``, or None if absent or out of fuel."""
    if check:
        _check_label(t, label)
    tr = trace(t, fuel)
    if not tr.complete:
        return None
    return fire(_gamma(tr.value), label)


def extended_weak_labelled(t: Term, label, fuel: int, check: bool = True) -> list[Term]:
    """Targets of the extended weak step: also ``u·e`` for every trace point ``u``."""
    if check:
        _check_label(t, label)
    tr = trace(t, fuel)
    out = []
    if tr.complete:
        s = fire(_gamma(tr.value), label)
        if s is not None:
            out.append(s)
    if isinstance(label, Term):
        out.extend(app(u, label) for u in tr.terms)
    return out


def app_behavior(u: Term) -> Fun:
    """The syntactic-application applicator ``e ↦ u·e``."""
    return Fun(("app", u), partial(app, u))


def weak_behaviors(t: Term, fuel: int, extended: bool = False) -> frozenset[Behavior]:
    """Every behaviour reachable by weak transitions from ``t``.

    Silent(u) for each trace point u (zero steps included), plus the value
    behaviour when the trace completes.  ``extended`` adds ``e ↦ u·e`` for
    trace points at function type.
    """
    tr = trace(t, fuel)
    out: set[Behavior] = {Silent(u) for u in tr.terms}
    if tr.complete:
        out.add(_gamma(tr.value))
    if extended and isinstance(typecheck(t), FunTy):
        out.update(app_behavior(u) for u in tr.terms)
    return frozenset(out)
