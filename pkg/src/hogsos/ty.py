"""Closed type expressions with de Bruijn-indexed recursive binders.

Type variables are de Bruijn indices, so α-equivalent types are equal as
Python values.  Surface syntax uses names and is converted on parse.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .sexpr import Atom, SList, SyntaxError, read_one


class Ty:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class TVar(Ty):
    index: int


@dataclass(frozen=True, slots=True)
class Sum(Ty):
    left: Ty
    right: Ty


@dataclass(frozen=True, slots=True)
class Prod(Ty):
    left: Ty
    right: Ty


@dataclass(frozen=True, slots=True)
class Fun(Ty):
    dom: Ty
    cod: Ty


@dataclass(frozen=True, slots=True)
class Mu(Ty):
    body: Ty


def free_indices(t: Ty, depth: int = 0) -> frozenset[int]:
    """Free de Bruijn indices of ``t``, relative to the outside of ``depth`` binders."""
    if isinstance(t, TVar):
        return frozenset({t.index - depth}) if t.index >= depth else frozenset()
    if isinstance(t, Mu):
        return free_indices(t.body, depth + 1)
    out: frozenset[int] = frozenset()
    for c in _children(t):
        out |= free_indices(c, depth)
    return out


def _children(t: Ty) -> tuple[Ty, ...]:
    if isinstance(t, Fun):
        return (t.dom, t.cod)
    if isinstance(t, (Sum, Prod)):
        return (t.left, t.right)
    if isinstance(t, Mu):
        return (t.body,)
    return ()


def is_closed(t: Ty) -> bool:
    return not free_indices(t)


def _subst(t: Ty, j: int, arg: Ty) -> Ty:
    if isinstance(t, TVar):
        if t.index == j:
            return arg
        return TVar(t.index - 1) if t.index > j else t
    if isinstance(t, Mu):
        return Mu(_subst(t.body, j + 1, arg))
    if isinstance(t, Fun):
        return Fun(_subst(t.dom, j, arg), _subst(t.cod, j, arg))
    return type(t)(_subst(t.left, j, arg), _subst(t.right, j, arg))


def subst_ty(body: Ty, arg: Ty) -> Ty:
    """Replace index 0 of ``body`` by the closed type ``arg``.

    ``arg`` is closed, so no shifting of ``arg`` is needed under binders.
    """
    return _subst(body, 0, arg)


@lru_cache(maxsize=None)
def unfold_mu(t: Mu) -> Ty:
    """One-step unfolding ``τ[μα.τ/α]`` of a recursive type."""
    return subst_ty(t.body, t)


VOID = Mu(TVar(0))
UNIT = Fun(VOID, VOID)
BOOL = Sum(UNIT, UNIT)
NAT = Mu(Sum(UNIT, TVar(0)))


def derived_types() -> dict[str, Ty]:
    return {"void": VOID, "unit": UNIT, "bool": BOOL, "nat": NAT}


_ALIASES = derived_types()
_ALIAS_NAMES = {v: k for k, v in _ALIASES.items()}
_CTORS = {"sum": Sum, "prod": Prod, "fun": Fun}


def ty_from_sexpr(node, env: tuple[str, ...] = ()) -> Ty:
    if isinstance(node, Atom):
        name = node.text
        if name in env:
            # innermost binder is env[-1]
            return TVar(len(env) - 1 - max(i for i, n in enumerate(env) if n == name))
        if name in _ALIASES:
            return _ALIASES[name]
        raise SyntaxError(f"unknown type name {name!r}", node.pos)
    if not isinstance(node, SList) or node.head is None:
        raise SyntaxError("malformed type", getattr(node, "pos", None))
    head = node.head
    if head == "mu":
        if len(node) != 3 or not isinstance(node[1], Atom):
            raise SyntaxError("mu expects (mu name T)", node.pos)
        return Mu(ty_from_sexpr(node[2], env + (node[1].text,)))
    if head in _CTORS:
        if head == "fun" and len(node) > 3:
            # right-associative n-ary arrow
            parts = [ty_from_sexpr(x, env) for x in node.items[1:]]
            out = parts[-1]
            for p in reversed(parts[:-1]):
                out = Fun(p, out)
            return out
        if len(node) != 3:
            raise SyntaxError(f"{head} expects two arguments", node.pos)
        return _CTORS[head](ty_from_sexpr(node[1], env), ty_from_sexpr(node[2], env))
    raise SyntaxError(f"unknown type constructor {head!r}", node.pos)


def parse_ty(text: str) -> Ty:
    t = ty_from_sexpr(read_one(text))
    return t


_NAMES = "abcdefghijklmnopqrstuvwxyz"


def show_ty(t: Ty, depth: int = 0) -> str:
    """Print ``t`` in surface syntax; closed subtypes use aliases where possible."""
    if depth == 0 or is_closed(t):
        alias = _ALIAS_NAMES.get(t)
        if alias is not None:
            return alias
    if isinstance(t, TVar):
        return _binder_name(depth - 1 - t.index)
    if isinstance(t, Mu):
        return f"(mu {_binder_name(depth)} {show_ty(t.body, depth + 1)})"
    if isinstance(t, Fun):
        return f"(fun {show_ty(t.dom, depth)} {show_ty(t.cod, depth)})"
    tag = "sum" if isinstance(t, Sum) else "prod"
    return f"({tag} {show_ty(t.left, depth)} {show_ty(t.right, depth)})"


def _binder_name(level: int) -> str:
    # aliases are reserved words, so binder names never collide with them
    q, r = divmod(level, len(_NAMES))
    return _NAMES[r] + (str(q) if q else "")


def ty_key(t: Ty) -> str:
    """Deterministic sort key."""
    return show_ty(t)


def components(t: Ty) -> tuple[Ty, ...]:
    """Immediate closed component types (a μ-type's component is its unfolding)."""
    if isinstance(t, Mu):
        return (unfold_mu(t),)
    if isinstance(t, Fun):
        return (t.dom, t.cod)
    if isinstance(t, (Sum, Prod)):
        return (t.left, t.right)
    return ()


def type_closure(types) -> tuple[Ty, ...]:
    """Smallest set containing ``types`` and closed under :func:`components`.

    Finite because closed types are regular trees.
    """
    seen: set[Ty] = set()
    todo = list(types)
    while todo:
        t = todo.pop()
        if t in seen:
            continue
        seen.add(t)
        todo.extend(components(t))
    return tuple(sorted(seen, key=ty_key))
