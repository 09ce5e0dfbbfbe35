"""Explicit finite higher-order coalgebras and the step-indexed henceforth chain.

States are named and belong to exactly one sort.  Each sort has a kind that
fixes the value shapes of its states:

    base  no value shape (only silent steps)
    fun   a finite label map from ``dom`` states to ``cod`` states
    sum   ``inl`` into ``left`` or ``inr`` into ``right``
    prod  a pair of a ``left`` and a ``right`` state
    mu    ``fold`` into the ``unfold`` sort

Behaviours are sets; a deterministic system has singleton sets.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Any

from ..behavior import Folded, Pair, Silent, SumL, SumR

Relation = frozenset


class ModelError(Exception):
    pass


class HenceforthError(Exception):
    pass


@dataclass(frozen=True)
class FunMap:
    """Finite function behaviour: sorted ``(label, target)`` pairs."""

    table: tuple

    def apply(self, e):
        for k, v in self.table:
            if k == e:
                return v
        raise KeyError(e)


@dataclass(frozen=True)
class SortSpec:
    kind: str
    dom: str | None = None
    cod: str | None = None
    left: str | None = None
    right: str | None = None
    unfold: str | None = None


@dataclass
class FiniteCoalgebra:
    sorts: dict[str, SortSpec]
    states: dict[str, tuple]
    behaviors: dict[Any, frozenset]
    weak: dict[Any, frozenset] | None = None
    relations: dict[str, Relation] = field(default_factory=dict)

    def __post_init__(self):
        self._sort_of = {}
        for s, xs in self.states.items():
            if s not in self.sorts:
                raise ModelError(f"states declared for unknown sort {s!r}")
            for x in xs:
                if x in self._sort_of:
                    raise ModelError(f"state {x!r} declared twice")
                self._sort_of[x] = s
        for x in self._sort_of:
            self.behaviors.setdefault(x, frozenset())
        for x, bs in self.behaviors.items():
            for b in bs:
                self._check_behavior(x, b)
        if self.weak is None:
            self.weak = weak_closure(self)
        else:
            for x, bs in self.weak.items():
                for b in bs:
                    self._check_behavior(x, b)
        for name, r in self.relations.items():
            for a, b in r:
                if self.sort_of(a) != self.sort_of(b):
                    raise ModelError(f"relation {name} relates states of different sorts")

    def sort_of(self, x) -> str:
        try:
            return self._sort_of[x]
        except KeyError:
            raise ModelError(f"unknown state {x!r}") from None

    def all_states(self) -> list:
        return [x for s in sorted(self.states) for x in self.states[s]]

    def pairs(self) -> list[tuple]:
        """Every same-sort pair: the top relation."""
        return [(a, b) for s in sorted(self.states) for a in self.states[s] for b in self.states[s]]

    def top(self) -> Relation:
        return frozenset(self.pairs())

    def lattice_size(self) -> int:
        return 2 ** len(self.pairs())

    def _expect(self, y, sort, x):
        if self.sort_of(y) != sort:
            raise ModelError(f"behaviour of {x!r} points to {y!r} of the wrong sort")

    def _check_behavior(self, x, b) -> None:
        s = self.sort_of(x)
        spec = self.sorts[s]
        if isinstance(b, Silent):
            self._expect(b.next, s, x)
        elif isinstance(b, FunMap):
            if spec.kind != "fun":
                raise ModelError(f"function behaviour on {x!r} of non-function sort")
            labels = [k for k, _ in b.table]
            if sorted(map(str, labels)) != sorted(map(str, self.states[spec.dom])):
                raise ModelError(f"label map of {x!r} must cover every {spec.dom} state")
            for _, v in b.table:
                self._expect(v, spec.cod, x)
        elif isinstance(b, (SumL, SumR)):
            if spec.kind != "sum":
                raise ModelError(f"tagged behaviour on {x!r} of non-sum sort")
            self._expect(b.payload, spec.left if isinstance(b, SumL) else spec.right, x)
        elif isinstance(b, Pair):
            if spec.kind != "prod":
                raise ModelError(f"pair behaviour on {x!r} of non-product sort")
            self._expect(b.left, spec.left, x)
            self._expect(b.right, spec.right, x)
        elif isinstance(b, Folded):
            if spec.kind != "mu":
                raise ModelError(f"fold behaviour on {x!r} of non-recursive sort")
            self._expect(b.payload, spec.unfold, x)
        else:
            raise ModelError(f"unknown behaviour {b!r}")


def weak_closure(m: FiniteCoalgebra) -> dict:
    """``{Silent(x)} ∪ ⋃ {c(y) | x ⇒ y}`` with ⇒ reflexive-transitive silent reachability."""
    out = {}
    for x in m.all_states():
        seen = {x}
        todo = [x]
        while todo:
            y = todo.pop()
            for b in m.behaviors[y]:
                if isinstance(b, Silent) and b.next not in seen:
                    seen.add(b.next)
                    todo.append(b.next)
        bs = {Silent(x)}
        for y in seen:
            bs |= m.behaviors[y]
        out[x] = frozenset(bs)
    return out


# -- the lifting and the henceforth chain -------------------------------------

def lift_related(m: FiniteCoalgebra, r: Relation, s: Relation, b1, b2) -> bool:
    """Canonical lifting: same shape, continuations in ``s``, labels related by ``r``."""
    if type(b1) is not type(b2):
        return False
    if isinstance(b1, Silent):
        return (b1.next, b2.next) in s
    if isinstance(b1, FunMap):
        return all(
            (v1, v2) in s
            for e1, v1 in b1.table
            for e2, v2 in b2.table
            if (e1, e2) in r
        )
    if isinstance(b1, (SumL, SumR, Folded)):
        return (b1.payload, b2.payload) in s
    if isinstance(b1, Pair):
        return (b1.left, b2.left) in s and (b1.right, b2.right) in s
    raise ModelError(f"unknown behaviour {b1!r}")


def step_condition(m: FiniteCoalgebra, r: Relation, x, y) -> bool:
    """``(x, y)`` lies in the inverse image of the lifted relation: c(x) vs. c̃(y), left-to-right."""
    weak_y = m.weak[y]
    return all(any(lift_related(m, r, r, b, b2) for b2 in weak_y) for b in m.behaviors[x])


@dataclass
class HenceforthResult:
    chain: list[Relation]
    nu: int

    @property
    def limit(self) -> Relation:
        return self.chain[self.nu]


def henceforth(m: FiniteCoalgebra, r: Relation | None = None, max_steps: int = 1000) -> HenceforthResult:
    """The chain □⁰R = R, □ᵏ⁺¹R = □ᵏR ∧ (c×c̃)*[B̄(□ᵏR, □ᵏR)] until it repeats."""
    cur = m.top() if r is None else frozenset(r)
    chain = [cur]
    for _ in range(max_steps):
        nxt = frozenset(p for p in cur if step_condition(m, cur, *p))
        if nxt == cur:
            return HenceforthResult(chain, len(chain) - 1)
        chain.append(nxt)
        cur = nxt
    raise HenceforthError(f"no stabilization within {max_steps} steps")


def is_logical_relation(m: FiniteCoalgebra, r: Relation) -> bool:
    return all(step_condition(m, r, *p) for p in r)


def is_bisimulation(m: FiniteCoalgebra, r: Relation) -> bool:
    """``R ≤ (c×c̃)*[B̄(Δ, R)]``."""
    diag = frozenset((x, x) for x in m.all_states())
    return all(
        all(any(lift_related(m, diag, r, b, b2) for b2 in m.weak[y]) for b in m.behaviors[x])
        for x, y in r
    )


def has_function_sorts(m: FiniteCoalgebra) -> bool:
    return any(spec.kind == "fun" for spec in m.sorts.values())


def brute_force_gfp(m: FiniteCoalgebra, r: Relation | None = None) -> Relation:
    """Largest post-fixed point below ``r``, by trying every subrelation.

    Only meaningful when the step condition is monotone (no function sorts),
    where post-fixed points are closed under union.
    """
    base = sorted(m.top() if r is None else r, key=repr)
    if len(base) > 16:
        raise ModelError("model too large for brute force")
    best: set = set()
    for k in range(len(base) + 1):
        for sub in itertools.combinations(base, k):
            cand = frozenset(sub)
            if is_logical_relation(m, cand):
                best |= cand
    return frozenset(best)


# -- JSON ---------------------------------------------------------------------

def _behavior_from_json(item: dict):
    if len(item) != 1:
        raise ModelError(f"behaviour item must have exactly one key: {item}")
    (k, v), = item.items()
    if k == "silent":
        return Silent(v)
    if k == "fun":
        return FunMap(tuple(sorted(v.items())))
    if k == "inl":
        return SumL(v)
    if k == "inr":
        return SumR(v)
    if k == "pair":
        return Pair(v[0], v[1])
    if k == "fold":
        return Folded(v)
    raise ModelError(f"unknown behaviour kind {k!r}")


def _behavior_to_json(b) -> dict:
    if isinstance(b, Silent):
        return {"silent": b.next}
    if isinstance(b, FunMap):
        return {"fun": dict(b.table)}
    if isinstance(b, SumL):
        return {"inl": b.payload}
    if isinstance(b, SumR):
        return {"inr": b.payload}
    if isinstance(b, Pair):
        return {"pair": [b.left, b.right]}
    return {"fold": b.payload}


def model_from_json(data: dict) -> FiniteCoalgebra:
    sorts = {name: SortSpec(**spec) for name, spec in data["sorts"].items()}
    states = {s: tuple(xs) for s, xs in data["states"].items()}
    behaviors = {
        x: frozenset(_behavior_from_json(i) for i in items)
        for x, items in data.get("behaviors", {}).items()
    }
    weak = None
    if "weak_behaviors" in data:
        weak = {
            x: frozenset(_behavior_from_json(i) for i in items)
            for x, items in data["weak_behaviors"].items()
        }
    relations = {
        name: frozenset((a, b) for a, b in pairs)
        for name, pairs in data.get("relations", {}).items()
    }
    return FiniteCoalgebra(sorts, states, behaviors, weak, relations)


def model_to_json(m: FiniteCoalgebra) -> dict:
    def spec(s: SortSpec):
        return {k: v for k, v in vars(s).items() if v is not None}

    return {
        "sorts": {n: spec(s) for n, s in sorted(m.sorts.items())},
        "states": {s: list(xs) for s, xs in sorted(m.states.items())},
        "behaviors": {
            x: sorted((_behavior_to_json(b) for b in m.behaviors[x]), key=json.dumps)
            for x in m.all_states()
        },
        "relations": {n: sorted([a, b] for a, b in r) for n, r in sorted(m.relations.items())},
    }


def load_model(path) -> FiniteCoalgebra:
    with open(path) as fh:
        return model_from_json(json.load(fh))


def resolve_relation(m: FiniteCoalgebra, name: str) -> Relation:
    if name == "top":
        return m.top()
    if name == "bottom":
        return frozenset()
    if name == "diag":
        return frozenset((x, x) for x in m.all_states())
    try:
        return m.relations[name]
    except KeyError:
        raise ModelError(f"unknown relation {name!r}") from None


# -- random models ------------------------------------------------------------

def random_model(seed: int, max_states: int = 5, functions: bool = True,
                 silent_prob: float = 0.4) -> FiniteCoalgebra:
    """A seeded deterministic model over base, sum, product, recursive and (optionally) function sorts."""
    rng = random.Random(seed)
    sorts = {
        "b": SortSpec("base"),
        "s": SortSpec("sum", left="b", right="b"),
        "p": SortSpec("prod", left="b", right="s"),
        "m": SortSpec("mu", unfold="s"),
    }
    if functions:
        sorts["f"] = SortSpec("fun", dom="s", cod="m")
    states = {
        name: tuple(f"{name}{i}" for i in range(rng.randint(1, max_states)))
        for name in sorted(sorts)
    }
    behaviors: dict = {}
    for name in sorted(sorts):
        spec = sorts[name]
        for x in states[name]:
            if spec.kind == "base" or rng.random() < silent_prob:
                if spec.kind == "base" and rng.random() < 0.3:
                    behaviors[x] = frozenset()
                else:
                    behaviors[x] = frozenset({Silent(rng.choice(states[name]))})
                continue
            pick = rng.choice
            if spec.kind == "sum":
                b = SumL(pick(states["b"])) if rng.random() < 0.5 else SumR(pick(states["b"]))
            elif spec.kind == "prod":
                b = Pair(pick(states["b"]), pick(states["s"]))
            elif spec.kind == "mu":
                b = Folded(pick(states["s"]))
            else:
                b = FunMap(tuple((e, pick(states[spec.cod])) for e in states[spec.dom]))
            behaviors[x] = frozenset({b})
    return FiniteCoalgebra(sorts, states, behaviors)
