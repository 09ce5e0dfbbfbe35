"""Signatures, free terms, GSOS laws as data, derived operational models
and the lax bialgebra check.

A law is a function ``rule(op, tys, operands)`` where ``operands`` is a list
of ``(state, behaviour)`` pairs.  It returns a behaviour whose continuations
are :class:`FreeTerm` trees with :class:`Leaf` nodes of kind ``x`` (a state
before the step) or ``y`` (a state after the step).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

from ..behavior import Behavior, Fun, map_behavior


class SortMismatch(Exception):
    pass


@dataclass(frozen=True)
class OpSym:
    name: str
    arity: tuple
    sort: Any


@dataclass
class Signature:
    """Finite sorted signature.  Checked on construction."""

    sorts: frozenset
    ops: dict[str, OpSym] = field(default_factory=dict)

    def __post_init__(self):
        self.sorts = frozenset(self.sorts)
        for op in self.ops.values():
            bad = [s for s in (*op.arity, op.sort) if s not in self.sorts]
            if bad:
                raise SortMismatch(f"operator {op.name} uses undeclared sorts {bad}")

    @classmethod
    def of(cls, sorts, *ops: OpSym) -> "Signature":
        return cls(frozenset(sorts), {o.name: o for o in ops})


@dataclass(frozen=True)
class Leaf:
    kind: str  # "x" or "y"
    value: Any


@dataclass(frozen=True)
class FreeTerm:
    op: str
    tys: tuple
    args: tuple


def X(v) -> Leaf:
    return Leaf("x", v)


def Y(v) -> Leaf:
    return Leaf("y", v)


def F(op: str, *args, tys: tuple = ()) -> FreeTerm:
    return FreeTerm(op, tys, args)


def evaluate(ft, build: Callable) -> Any:
    """Collapse both leaf kinds and evaluate the tree in the carrier algebra."""
    if isinstance(ft, Leaf):
        return ft.value
    return build(ft.op, ft.tys, tuple(evaluate(a, build) for a in ft.args))


def free_sort(ft, sort_of: Callable, op_sort: Callable):
    """Sort of a free term; ``op_sort(op, tys, arg_sorts)`` raises on mismatch."""
    if isinstance(ft, Leaf):
        return sort_of(ft.value)
    return op_sort(ft.op, ft.tys, tuple(free_sort(a, sort_of, op_sort) for a in ft.args))


@dataclass
class GsosLaw:
    rule: Callable[[str, tuple, list], Behavior]
    signature: Signature | None = None
    name: str = "law"

    def __call__(self, op, tys, operands):
        return self.rule(op, tys, operands)


def operational_model(law: GsosLaw, decompose: Callable, build: Callable,
                      check: Callable | None = None) -> Callable:
    """The coalgebra determined by ``law`` on closed terms, by structural recursion.

    ``decompose(t)`` returns ``(op, tys, args)``; ``build`` is its inverse.
    ``check(t, behaviour)``, when given, validates sorts of the result.
    """
    memo: dict = {}

    def gamma(t):
        hit = memo.get(t)
        if hit is not None:
            return hit
        op, tys, args = decompose(t)
        operands = [(a, gamma(a)) for a in args]
        out = map_behavior(law(op, tys, operands), lambda ft: evaluate(ft, build))
        if check is not None:
            check(t, out)
        memo[t] = out
        return out

    return gamma


def behaviors_agree(b1: Behavior, b2: Behavior, probes) -> bool:
    """Equality of behaviours, extensional on the probe labels at function shapes."""
    if isinstance(b1, Fun) or isinstance(b2, Fun):
        if not (isinstance(b1, Fun) and isinstance(b2, Fun)):
            return False
        return all(b1.apply(e) == b2.apply(e) for e in probes)
    return b1 == b2


def covered(b: Behavior, available, probes) -> bool:
    if not isinstance(b, Fun):
        return b in available
    return any(isinstance(a, Fun) and behaviors_agree(b, a, probes) for a in available)


@dataclass
class LaxViolation:
    op: str
    sample: Any
    operand_behaviors: tuple
    required: Behavior
    reason: str


@dataclass
class OperatorReport:
    op: str
    samples: int = 0
    requirements: int = 0
    violation: LaxViolation | None = None

    @property
    def passed(self) -> bool:
        return self.violation is None


@dataclass
class LaxReport:
    per_op: dict[str, OperatorReport]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.per_op.values())

    def failures(self) -> list[LaxViolation]:
        return [r.violation for r in self.per_op.values() if r.violation is not None]


def required_behaviors(law: GsosLaw, build: Callable, weak: Callable, op, tys, args):
    """Every behaviour the rules demand of ``a(x)`` given weak operand behaviours.

    Yields ``(operand behaviour choice, evaluated behaviour)``.
    """
    choices = [sorted(weak(a), key=repr) for a in args]
    for combo in itertools.product(*choices):
        b = law(op, tys, list(zip(args, combo)))
        yield combo, map_behavior(b, lambda ft: evaluate(ft, build))


def lax_bialgebra_check(law: GsosLaw, build: Callable, weak: Callable, samples,
                        probes: Callable, strict: Callable | None = None,
                        operand_weak: Callable | None = None) -> LaxReport:
    """Check that every rule-required behaviour is available in the weak model.

    ``samples`` are ``(op, tys, args)`` triples.  ``weak(t)`` is the set of
    behaviours of ``t`` in the weak model (the preorder is inclusion, functions
    compared on ``probes(t)``).  ``operand_weak`` defaults to ``weak``.
    With ``strict`` (a deterministic coalgebra) the check is the strict
    bialgebra equation instead: the single required behaviour equals
    ``strict(a(x))``.
    """
    operand_weak = operand_weak or weak
    per_op: dict[str, OperatorReport] = {}
    for op, tys, args in samples:
        rep = per_op.setdefault(op, OperatorReport(op))
        rep.samples += 1
        if rep.violation is not None:
            continue
        term = build(op, tys, tuple(args))
        labels = probes(term)
        if strict is not None:
            operands = [(a, strict(a)) for a in args]
            want = map_behavior(law(op, tys, operands), lambda ft: evaluate(ft, build))
            got = strict(term)
            rep.requirements += 1
            if not behaviors_agree(want, got, labels):
                rep.violation = LaxViolation(op, term, tuple(b for _, b in operands), want,
                                             "strict equation fails")
            continue
        available = weak(term)
        for combo, need in required_behaviors(law, build, operand_weak, op, tys, args):
            rep.requirements += 1
            if not covered(need, available, labels):
                rep.violation = LaxViolation(op, term, combo, need,
                                             "required behaviour missing from the weak model")
                break
    return LaxReport(per_op)

