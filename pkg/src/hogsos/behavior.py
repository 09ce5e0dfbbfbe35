"""One-step behaviours of a higher-order transition system.

A behaviour is either a silent successor or a value shape.  Function values
carry an applicator; two function behaviours compare equal when their keys
agree, so sets of behaviours stay hashable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable


class Behavior:
    __slots__ = ()
    is_value = True


@dataclass(frozen=True)
class Silent(Behavior):
    next: Any
    is_value = False


@dataclass(frozen=True)
class Fun(Behavior):
    """Function shape.  ``key`` identifies the applicator for equality."""

    key: Any
    fn: Callable[[Any], Any] = field(compare=False, repr=False)

    def apply(self, e):
        return self.fn(e)


@dataclass(frozen=True)
class SumL(Behavior):
    payload: Any


@dataclass(frozen=True)
class SumR(Behavior):
    payload: Any


@dataclass(frozen=True)
class Pair(Behavior):
    left: Any
    right: Any


@dataclass(frozen=True)
class Folded(Behavior):
    payload: Any


def shape_name(b: Behavior) -> str:
    return {
        Silent: "silent",
        Fun: "fun",
        SumL: "inl",
        SumR: "inr",
        Pair: "pair",
        Folded: "fold",
    }[type(b)]


def map_behavior(b: Behavior, f: Callable[[Any], Any]) -> Behavior:
    """Apply ``f`` to every continuation of ``b``; function results are mapped lazily."""
    if isinstance(b, Silent):
        return Silent(f(b.next))
    if isinstance(b, Fun):
        fn = b.fn
        return Fun(("mapped", b.key), lambda e: f(fn(e)))
    if isinstance(b, SumL):
        return SumL(f(b.payload))
    if isinstance(b, SumR):
        return SumR(f(b.payload))
    if isinstance(b, Pair):
        return Pair(f(b.left), f(b.right))
    if isinstance(b, Folded):
        return Folded(f(b.payload))
    raise TypeError(f"not a behaviour: {b!r}")
