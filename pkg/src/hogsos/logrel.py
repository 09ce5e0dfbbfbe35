"""Bounded checkers for the step-indexed logical relations L and M.

The function clause quantifies over argument pairs drawn from a finite pool
and weak transitions are explored up to a fuel bound, so verdicts are
three-valued: HOLDS (up to pool and fuel), FAILS (with a concrete witness
that replays through the transition system) or UNKNOWN.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from .behavior import Folded, Pair, Silent, SumL, SumR
from .mutcl_semantics import _gamma, apply_value, trace
from .mutcl_syntax import SortedPool, Term, app, show, typecheck
from .ty import Fun as FunTy
from .ty import Ty, show_ty, unfold_mu


class Outcome(enum.Enum):
    HOLDS = "holds"
    UNKNOWN = "unknown"
    FAILS = "fails"


@dataclass(frozen=True)
class Witness:
    """Where a relation check failed: clause, type, the two terms, and the label."""

    clause: str
    ty: Ty
    left: Term
    right: Term
    label: Any = None
    index: int = 0
    detail: str = ""
    sub: "Witness | None" = None

    def to_json(self) -> dict:
        out = {
            "clause": self.clause,
            "type": show_ty(self.ty),
            "index": self.index,
            "left": str(self.left),
            "right": str(self.right),
        }
        if self.label is not None:
            out["label"] = self.label if isinstance(self.label, str) else _label_json(self.label)
        if self.detail:
            out["detail"] = self.detail
        if self.sub is not None:
            out["because"] = self.sub.to_json()
        return out


def _label_json(label):
    if isinstance(label, tuple):
        return [str(x) for x in label]
    return str(label)


@dataclass(frozen=True)
class RelVerdict:
    outcome: Outcome
    witness: Witness | None = None
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.outcome is Outcome.HOLDS

    @property
    def fails(self) -> bool:
        return self.outcome is Outcome.FAILS

    @property
    def unknown(self) -> bool:
        return self.outcome is Outcome.UNKNOWN

    def __and__(self, other: "RelVerdict") -> "RelVerdict":
        # fails beats unknown beats holds; the left operand wins ties
        rank = {Outcome.HOLDS: 0, Outcome.UNKNOWN: 1, Outcome.FAILS: 2}
        return self if rank[self.outcome] >= rank[other.outcome] else other

    def to_json(self) -> dict:
        out: dict = {"verdict": self.outcome.value}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.reason:
            out["reason"] = self.reason
        return out


HOLDS = RelVerdict(Outcome.HOLDS)


def conj(verdicts) -> RelVerdict:
    out = HOLDS
    for v in verdicts:
        out = out & v
        if out.fails:
            return out
    return out


@dataclass
class CheckerConfig:
    flavor: str = "L"  # "L" uses ⇒ in the value clause, "M" uses ↝
    n: int = 4
    pool: SortedPool = field(default_factory=SortedPool)
    fuel: int = 200

    def __post_init__(self):
        if self.flavor not in ("L", "M"):
            raise ValueError(f"flavor must be L or M, not {self.flavor!r}")
        if self.n < 0:
            raise ValueError("index must be non-negative")


class PremiseViolation(Exception):
    pass


class RelationChecker:
    """Memoizing evaluator of ``rel`` for one configuration (index excluded)."""

    def __init__(self, cfg: CheckerConfig):
        self.cfg = cfg
        self.flavor = cfg.flavor
        self.pool = cfg.pool
        self.fuel = cfg.fuel
        self.vacuous_types: set[Ty] = set()
        self._memo: dict[tuple[int, Term, Term], RelVerdict] = {}
        self._traces: dict[Term, Any] = {}

    def trace(self, t: Term):
        tr = self._traces.get(t)
        if tr is None:
            tr = self._traces[t] = trace(t, self.fuel)
        return tr

    # -- entry points -------------------------------------------------------

    def rel(self, n: int, ty: Ty, t: Term, s: Term) -> RelVerdict:
        if n <= 0:
            return HOLDS
        key = (n, t, s)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self.rel(n - 1, ty, t, s)
        if not out.fails:
            out = out & self.check_E(n, ty, t, s)
        if not out.fails:
            out = out & self.check_V(n, ty, t, s)
        self._memo[key] = out
        return out

    def check_E(self, n: int, ty: Ty, t: Term, s: Term) -> RelVerdict:
        """If t → t', some s' with s ⇒ s' is related to t' at index n-1."""
        b = _gamma(t)
        if not isinstance(b, Silent):
            return HOLDS
        t1 = b.next
        tr = self.trace(s)
        return self._exists(
            n, ty, t1, tr.terms, complete=not tr.truncated,
            clause="E", left=t, right=s, label=None,
        )

    def check_V(self, n: int, ty: Ty, t: Term, s: Term) -> RelVerdict:
        """Type-directed value clause, relations at index n-1."""
        b = _gamma(t)
        if isinstance(b, Silent):
            return HOLDS
        if isinstance(ty, FunTy):
            return self._check_fun(n, ty, t, s)
        tr = self.trace(s)
        if tr.truncated:
            return RelVerdict(Outcome.UNKNOWN, reason=f"fuel exhausted tracing {show(s)}")
        sb = _gamma(tr.value) if tr.complete else None
        if isinstance(b, (SumL, SumR)):
            tag = "inl" if isinstance(b, SumL) else "inr"
            sub = ty.left if tag == "inl" else ty.right
            if type(sb) is not type(b):
                return self._fail("V", ty, t, s, tag, n, "no matching weak tagged successor")
            return self._wrap(self.rel(n - 1, sub, b.payload, sb.payload), "V", ty, t, s, tag, n)
        if isinstance(b, Pair):
            if not isinstance(sb, Pair):
                return self._fail("V", ty, t, s, "fst", n, "no weak pair successor")
            left = self._wrap(self.rel(n - 1, ty.left, b.left, sb.left), "V", ty, t, s, "fst", n)
            if left.fails:
                return left
            return left & self._wrap(
                self.rel(n - 1, ty.right, b.right, sb.right), "V", ty, t, s, "snd", n
            )
        if isinstance(b, Folded):
            if not isinstance(sb, Folded):
                return self._fail("V", ty, t, s, "mu", n, "no weak folded successor")
            return self._wrap(
                self.rel(n - 1, unfold_mu(ty), b.payload, sb.payload), "V", ty, t, s, "mu", n
            )
        raise TypeError(f"behaviour {b!r} does not fit type {show_ty(ty)}")

    # -- helpers -----------------------------------------------------------

    def _check_fun(self, n: int, ty: FunTy, t: Term, s: Term) -> RelVerdict:
        args = self.pool[ty.dom]
        if not args:
            self.vacuous_types.add(ty.dom)
            return HOLDS
        tr = self.trace(s)
        out = HOLDS
        for e1 in args:
            t1 = apply_value(t, e1)
            for e2 in args:
                q = self.rel(n - 1, ty.dom, e1, e2)
                if q.fails:
                    continue
                if self.flavor == "L":
                    cands = [apply_value(tr.value, e2)] if tr.complete else []
                    complete = not tr.truncated
                else:
                    cands = [app(u, e2) for u in tr.terms]
                    if tr.complete:
                        cands.insert(0, apply_value(tr.value, e2))
                    complete = not tr.truncated
                v = self._exists(
                    n, ty.cod, t1, cands, complete=complete,
                    clause="V", left=t, right=s, label=(e1, e2),
                )
                if v.fails and not q.holds:
                    v = RelVerdict(
                        Outcome.UNKNOWN,
                        reason=f"argument pair undecided at index {n - 1}: {q.reason}",
                    )
                out = out & v
                if out.fails:
                    return out
        return out

    def _exists(self, n, ty, t1, cands, complete, clause, left, right, label) -> RelVerdict:
        first_fail = None
        reason = ""
        for s1 in cands:
            v = self.rel(n - 1, ty, t1, s1)
            if v.holds:
                return HOLDS
            if v.fails:
                if first_fail is None:
                    first_fail = v
            elif not reason:
                reason = v.reason
        if not complete:
            return RelVerdict(Outcome.UNKNOWN, reason=reason or f"fuel exhausted tracing {show(right)}")
        if reason:
            return RelVerdict(Outcome.UNKNOWN, reason=reason)
        detail = f"no weak successor of the right term relates to {show(t1)}"
        return RelVerdict(
            Outcome.FAILS,
            Witness(clause, ty, left, right, label, n, detail,
                    first_fail.witness if first_fail else None),
        )

    def _fail(self, clause, ty, t, s, label, n, detail) -> RelVerdict:
        return RelVerdict(Outcome.FAILS, Witness(clause, ty, t, s, label, n, detail))

    def _wrap(self, v: RelVerdict, clause, ty, t, s, label, n) -> RelVerdict:
        if not v.fails:
            return v
        return RelVerdict(Outcome.FAILS, Witness(clause, ty, t, s, label, n, "", v.witness))


def _type_of(t: Term, s: Term) -> Ty:
    ty = typecheck(t)
    other = typecheck(s)
    if ty != other:
        raise TypeError(f"terms have different types: {show_ty(ty)} and {show_ty(other)}")
    return ty


def rel(cfg: CheckerConfig, ty: Ty | None, t: Term, s: Term, checker: RelationChecker | None = None) -> RelVerdict:
    """Decide ``rel_n(t, s)`` up to pool and fuel, with ``n = cfg.n``."""
    found = _type_of(t, s)
    if ty is not None and ty != found:
        raise TypeError(f"terms have type {show_ty(found)}, not {show_ty(ty)}")
    checker = checker or RelationChecker(cfg)
    return checker.rel(cfg.n, found, t, s)


def check_E(cfg: CheckerConfig, t: Term, s: Term, checker: RelationChecker | None = None) -> RelVerdict:
    checker = checker or RelationChecker(cfg)
    return checker.check_E(cfg.n, _type_of(t, s), t, s)


def check_V(cfg: CheckerConfig, t: Term, s: Term, checker: RelationChecker | None = None) -> RelVerdict:
    checker = checker or RelationChecker(cfg)
    return checker.check_V(cfg.n, _type_of(t, s), t, s)


def backwards_closed_check(cfg: CheckerConfig, t: Term, t1: Term, s: Term, s1: Term) -> RelVerdict:
    """If t ⇒ t1, s ⇒ s1 and rel(t1, s1) holds, rel(t, s) must not fail.

    Returns HOLDS when the implication is consistent on this instance and
    FAILS with the offending witness otherwise.
    """
    if t1 not in trace(t, cfg.fuel).terms:
        raise PremiseViolation(f"{show(t1)} is not a weak successor of {show(t)}")
    if s1 not in trace(s, cfg.fuel).terms:
        raise PremiseViolation(f"{show(s1)} is not a weak successor of {show(s)}")
    checker = RelationChecker(cfg)
    ty = _type_of(t, s)
    after = checker.rel(cfg.n, ty, t1, s1)
    if not after.holds:
        return HOLDS
    before = checker.rel(cfg.n, ty, t, s)
    if before.fails:
        return before
    return HOLDS


def stabilization_probe(cfg: CheckerConfig, pairs, max_n: int = 8) -> tuple[int | None, list[list[str]]]:
    """Least n with identical verdict vectors at n and n+1 over ``pairs``.

    Returns ``(n_star, vectors)`` where ``vectors[k]`` lists outcomes at
    index k; ``n_star`` is None if no stabilization is seen up to ``max_n``.
    """
    checker = RelationChecker(cfg)
    typed = [(_type_of(t, s), t, s) for t, s in pairs]
    vectors = [[checker.rel(0, ty, t, s).outcome.value for ty, t, s in typed]]
    for n in range(1, max_n + 2):
        vectors.append([checker.rel(n, ty, t, s).outcome.value for ty, t, s in typed])
        if vectors[-1] == vectors[-2]:
            return n - 1, vectors
    return None, vectors
