"""Finite relation algebra, liftings and congruence checks on finite algebras."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable

Relation = frozenset  # of (a, b) pairs


class CarrierMismatch(Exception):
    pass


class PreconditionViolation(Exception):
    pass


def identity(carrier: Iterable) -> Relation:
    return frozenset((x, x) for x in carrier)


def total(carrier: Iterable) -> Relation:
    xs = list(carrier)
    return frozenset(itertools.product(xs, xs))


def _field(r: Relation) -> set:
    return {x for p in r for x in p}


def rel_compose(r: Relation, s: Relation, carrier: Iterable | None = None) -> Relation:
    """``{(a, c) | ∃b. r(a, b) ∧ s(b, c)}``."""
    if carrier is not None:
        cs = set(carrier)
        if not (_field(r) <= cs and _field(s) <= cs):
            raise CarrierMismatch("relation mentions elements outside the carrier")
    by_first: dict[Any, set] = {}
    for b, c in s:
        by_first.setdefault(b, set()).add(c)
    return frozenset((a, c) for a, b in r for c in by_first.get(b, ()))


def preorder_hull(r: Relation, carrier: Iterable) -> Relation:
    """Least reflexive and transitive relation on ``carrier`` containing ``r``."""
    xs = list(carrier)
    if not _field(r) <= set(xs):
        raise CarrierMismatch("relation mentions elements outside the carrier")
    reach = {x: {x} for x in xs}
    for a, b in r:
        reach[a].add(b)
    # Warshall
    for k in xs:
        for i in xs:
            if k in reach[i]:
                reach[i] |= reach[k]
    return frozenset((i, j) for i in xs for j in reach[i])


def egli_milner_lr(r: Relation, a: Iterable, b: Iterable) -> bool:
    """Every element of ``a`` is related to some element of ``b``."""
    bs = list(b)
    return all(any((x, y) in r for y in bs) for x in a)


@dataclass
class FiniteAlgebra:
    """Sorted finite algebra: each operation is an explicit table.

    ``ops[name] = (arity sorts, result sort, table)`` with ``table`` mapping
    argument tuples to results.
    """

    carrier: dict[Any, tuple]  # sort -> elements
    ops: dict[str, tuple[tuple, Any, dict]] = field(default_factory=dict)

    def elements(self) -> list:
        return [x for s in self.carrier for x in self.carrier[s]]

    def sort_of(self, x) -> Any:
        for s, xs in self.carrier.items():
            if x in xs:
                return s
        raise KeyError(x)

    def applications(self, op: str):
        arity, _, _ = self.ops[op]
        return itertools.product(*(self.carrier[s] for s in arity))

    def apply(self, op: str, args: tuple):
        return self.ops[op][2][tuple(args)]


def canonical_lift(alg: FiniteAlgebra, r: Relation) -> frozenset:
    """Pairs of operator applications ``(f, xs), (f, ys)`` with xs, ys related pointwise."""
    out = set()
    for op in alg.ops:
        apps = list(alg.applications(op))
        for xs in apps:
            for ys in apps:
                if all((x, y) in r for x, y in zip(xs, ys)):
                    out.add(((op, xs), (op, ys)))
    return frozenset(out)


def congruence_check(alg: FiniteAlgebra, r: Relation) -> tuple[bool, tuple | None]:
    """True iff every operation maps pointwise-related arguments to related results.

    On failure returns the violating ``(op, xs, ys)``.
    """
    for op in alg.ops:
        arity, _, _ = alg.ops[op]
        related = [
            [(x, y) for x in alg.carrier[s] for y in alg.carrier[s] if (x, y) in r]
            for s in arity
        ]
        for choice in itertools.product(*related):
            xs = tuple(p[0] for p in choice)
            ys = tuple(p[1] for p in choice)
            if (alg.apply(op, xs), alg.apply(op, ys)) not in r:
                return False, (op, xs, ys)
    return True, None


def union_hull_congruence_check(alg: FiniteAlgebra, congruences: list[Relation]) -> bool:
    """Preorder hull of a union of reflexive congruences is again a congruence."""
    carrier = alg.elements()
    diag = identity(carrier)
    for r in congruences:
        if not diag <= r:
            raise PreconditionViolation("input relation is not reflexive")
        ok, bad = congruence_check(alg, r)
        if not ok:
            raise PreconditionViolation(f"input relation is not a congruence: {bad}")
    union = frozenset().union(*congruences) if congruences else frozenset()
    ok, _ = congruence_check(alg, preorder_hull(union, carrier))
    return ok
