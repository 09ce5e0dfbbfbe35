"""One-hole contexts and bounded contextual-preorder search.

A context is an ordinary term tree containing exactly one ``hole`` node
annotated with the hole type.  The hole counts as one node.  The preorder
search is written against a small backend protocol so the FPC module can
reuse it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

from .mutcl_semantics import trace
from .mutcl_syntax import Enumerator, Term, default_universe, enumerator, typecheck
from .ty import BOOL, Ty, show_ty

HOLE = "hole"


class HoleTypeMismatch(Exception):
    pass


def hole(ty: Ty) -> Term:
    return Term(HOLE, (ty,))


def hole_type(c: Term) -> Ty:
    for u in _walk(c):
        if u.op == HOLE:
            return u.tys[0]
    raise ValueError("not a context: no hole")


def _walk(t: Term):
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        stack.extend(reversed(u.args))


def count_holes(c: Term) -> int:
    return sum(1 for u in _walk(c) if u.op == HOLE)


def _replace(c: Term, t: Term) -> Term:
    if c.op == HOLE:
        return t
    return Term(c.op, c.tys, tuple(_replace(a, t) for a in c.args))


def plug(c: Term, t: Term) -> Term:
    """``C[t]``; the argument must have the hole type."""
    want = hole_type(c)
    got = typecheck(t)
    if got != want:
        raise HoleTypeMismatch(f"hole has type {show_ty(want)}, term has type {show_ty(got)}")
    return _replace(c, t)


def show_context(c: Term) -> str:
    if c.op == HOLE:
        return f"(hole {show_ty(c.tys[0])})"
    parts = [c.op] + [show_ty(x) for x in c.tys] + [show_context(a) for a in c.args]
    return "(" + " ".join(parts) + ")"


class ContextEnumerator:
    """Exactly-one-hole contexts by exact node count, over a term enumerator."""

    def __init__(self, terms: Enumerator):
        self.terms = terms
        self._memo: dict[tuple[Ty, Ty, int], tuple[Term, ...]] = {}

    def exact(self, hole_ty: Ty, out: Ty, n: int) -> tuple[Term, ...]:
        key = (hole_ty, out, n)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = tuple(self._gen(hole_ty, out, n))
        return hit

    def _gen(self, hole_ty: Ty, out: Ty, n: int):
        if n == 1:
            if out == hole_ty:
                yield hole(hole_ty)
            return
        for op, tys, premises in self.terms.shapes(out):
            k = len(premises)
            if k == 0 or n - 1 < k:
                continue
            for i in range(k):
                yield from self._with_hole_at(op, tys, premises, i, hole_ty, n - 1)

    def _with_hole_at(self, op, tys, premises, i, hole_ty, budget):
        others = premises[:i] + premises[i + 1:]
        for csize in range(1, budget - len(others) + 1):
            ctxs = self.exact(hole_ty, premises[i], csize)
            if not ctxs:
                continue
            rest = budget - csize
            if others:
                fills = list(self.terms.split(rest, others))
            else:
                fills = [()] if rest == 0 else []
            for c in ctxs:
                for f in fills:
                    yield Term(op, tys, f[:i] + (c,) + f[i:])


def enumerate_contexts(hole_ty: Ty, out: Ty, max_size: int, universe=None) -> Iterator[Term]:
    """Every exactly-one-hole context ``hole_ty ⇝ out`` with at most ``max_size`` nodes."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    if universe is None:
        universe = default_universe(hole_ty, out)
    ce = ContextEnumerator(enumerator(universe))
    for n in range(1, max_size + 1):
        yield from ce.exact(hole_ty, out, n)


# -- observations -------------------------------------------------------------

@dataclass(frozen=True)
class Observation:
    """``name`` is ``all`` (termination implication at every type) or ``bool``."""

    name: str

    def observed_at(self, ty: Ty) -> bool:
        return self.name == "all" or ty == BOOL


OBS_ALL = Observation("all")
OBS_BOOL = Observation("bool")


def observation(name: str) -> Observation:
    if name not in ("all", "bool"):
        raise ValueError(f"unknown observation {name!r}")
    return Observation(name)


# -- backends -----------------------------------------------------------------

class MutclBackend:
    """Termination oracle and context supply for the combinator calculus."""

    name = "mutcl"

    def __init__(self, universe=None):
        self.universe = universe

    def type_of(self, t) -> Ty:
        return typecheck(t)

    def universe_for(self, ty: Ty):
        return self.universe if self.universe is not None else default_universe(ty)

    def output_types(self, hole_ty: Ty, obs: Observation):
        if obs.name == "bool":
            return (BOOL,)
        return tuple(self.universe_for(hole_ty))

    def contexts(self, hole_ty: Ty, outs, max_size: int):
        ce = ContextEnumerator(enumerator(self.universe_for(hole_ty)))
        for n in range(1, max_size + 1):
            for out in outs:
                yield from ce.exact(hole_ty, out, n)

    def plug(self, c, t):
        return _replace(c, t)

    def observe(self, t, fuel: int) -> str:
        """``yes`` (terminates), ``no`` (certified divergence) or ``unknown``."""
        tr = trace(t, fuel)
        if tr.complete:
            return "yes"
        return "no" if tr.cyclic else "unknown"

    def show_context(self, c) -> str:
        return show_context(c)


@dataclass
class CtxVerdict:
    status: str  # no_counterexample | counterexample | unknown
    context: Any = None
    unknown_contexts: list = field(default_factory=list)
    checked: int = 0

    @property
    def is_counterexample(self) -> bool:
        return self.status == "counterexample"

    def to_json(self, backend=None) -> dict:
        render = backend.show_context if backend is not None else show_context
        out: dict = {"verdict": self.status, "contexts_checked": self.checked}
        if self.context is not None:
            out["context"] = render(self.context)
        if self.unknown_contexts:
            out["unknown_contexts"] = [render(c) for c in self.unknown_contexts]
        return out


def ctx_preorder_bounded(t, s, obs: Observation | str = OBS_ALL, max_size: int = 5, fuel: int = 500,
                         backend=None) -> CtxVerdict:
    """Search for a context C with C[t] terminating and C[s] certified divergent.

    Contexts are tried in enumeration order and the first certified one is
    returned.  A context where the implication cannot be settled within fuel
    is collected as unknown.
    """
    if isinstance(obs, str):
        obs = observation(obs)
    backend = backend or MutclBackend()
    ty = backend.type_of(t)
    if backend.type_of(s) != ty:
        raise TypeError("terms have different types")
    unknown = []
    checked = 0
    for c in backend.contexts(ty, backend.output_types(ty, obs), max_size):
        checked += 1
        left = backend.observe(backend.plug(c, t), fuel)
        if left == "no":
            continue
        right = backend.observe(backend.plug(c, s), fuel)
        if right == "yes":
            continue
        if left == "yes" and right == "no":
            return CtxVerdict("counterexample", c, unknown, checked)
        unknown.append(c)
    return CtxVerdict("unknown" if unknown else "no_counterexample", None, unknown, checked)


def ctx_equiv_bounded(t, s, obs=OBS_ALL, max_size: int = 5, fuel: int = 500, backend=None):
    """Both directions of the bounded preorder."""
    return (
        ctx_preorder_bounded(t, s, obs, max_size, fuel, backend),
        ctx_preorder_bounded(s, t, obs, max_size, fuel, backend),
    )
