"""Terms of the typed combinator calculus with sums, products and recursive types.

Fifteen operators.  Combinators carry the type parameters that cannot be
recovered from their arguments; ``app``, ``case``, ``pair``, ``fst`` and
``snd`` synthesize theirs from the children.  ``fold`` and ``unfold`` carry
the full recursive type ``μα.τ``.
"""

from __future__ import annotations

from functools import lru_cache

from . import ty as T
from .sexpr import Atom, SList, SyntaxError, read_all, read_one
from .ty import BOOL, Fun, Mu, Prod, Sum, Ty, show_ty, ty_from_sexpr, ty_key, unfold_mu

# operator -> (number of type parameters, number of subterms)
ARITY: dict[str, tuple[int, int]] = {
    "S": (3, 0),
    "S1": (3, 1),
    "S2": (3, 2),
    "K": (2, 0),
    "K1": (2, 1),
    "I": (1, 0),
    "app": (0, 2),
    "inl": (2, 1),
    "inr": (2, 1),
    "case": (0, 3),
    "pair": (0, 2),
    "fst": (0, 1),
    "snd": (0, 1),
    "fold": (1, 1),
    "unfold": (1, 1),
}
OPERATORS = tuple(ARITY)
_SPELLINGS = {"S'": "S1", "S''": "S2", "K'": "K1"}


class Term:
    """Immutable closed term.  Hash and size are cached."""

    __slots__ = ("op", "tys", "args", "_hash", "_size")

    def __init__(self, op: str, tys: tuple = (), args: tuple = ()):
        self.op = op
        self.tys = tys
        self.args = args
        self._hash = hash((op, tys, args))
        self._size = 1 + sum(a._size for a in args)

    @property
    def size(self) -> int:
        return self._size

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term) or self._hash != other._hash:
            return False
        return self.op == other.op and self.tys == other.tys and self.args == other.args

    def __repr__(self):
        return f"Term<{show(self)}>"

    def __str__(self):
        return show(self)

    # pickling support for __slots__ with cached fields
    def __reduce__(self):
        return (Term, (self.op, self.tys, self.args))


# -- constructors -----------------------------------------------------------

def S(a: Ty, b: Ty, c: Ty) -> Term:
    return Term("S", (a, b, c))


def S1(a: Ty, b: Ty, c: Ty, t: Term) -> Term:
    return Term("S1", (a, b, c), (t,))


def S2(a: Ty, b: Ty, c: Ty, t: Term, s: Term) -> Term:
    return Term("S2", (a, b, c), (t, s))


def K(a: Ty, b: Ty) -> Term:
    return Term("K", (a, b))


def K1(a: Ty, b: Ty, t: Term) -> Term:
    return Term("K1", (a, b), (t,))


def I(a: Ty) -> Term:  # noqa: E743
    return Term("I", (a,))


def app(t: Term, s: Term) -> Term:
    return Term("app", (), (t, s))


def inl(a: Ty, b: Ty, t: Term) -> Term:
    return Term("inl", (a, b), (t,))


def inr(a: Ty, b: Ty, t: Term) -> Term:
    return Term("inr", (a, b), (t,))


def case(t: Term, s: Term, r: Term) -> Term:
    return Term("case", (), (t, s, r))


def pair(t: Term, s: Term) -> Term:
    return Term("pair", (), (t, s))


def fst(t: Term) -> Term:
    return Term("fst", (), (t,))


def snd(t: Term) -> Term:
    return Term("snd", (), (t,))


def fold(mu: Mu, t: Term) -> Term:
    return Term("fold", (mu,), (t,))


def unfold(mu: Mu, t: Term) -> Term:
    return Term("unfold", (mu,), (t,))


def apps(t: Term, *args: Term) -> Term:
    """Left-nested application ``t a1 a2 ...``."""
    for a in args:
        t = app(t, a)
    return t


# -- typing -----------------------------------------------------------------

class TypeMismatch(Exception):
    def __init__(self, path: tuple[int, ...], expected, found):
        self.path = path
        self.expected = expected
        self.found = found
        exp = show_ty(expected) if isinstance(expected, Ty) else expected
        fnd = show_ty(found) if isinstance(found, Ty) else found
        super().__init__(f"type mismatch at {list(path)}: expected {exp}, found {fnd}")


def combinator_type(op: str, tys: tuple) -> Ty:
    """Type of a nullary combinator, or of the value built by S1/S2/K1 from well-typed arguments."""
    if op in ("S", "S1", "S2"):
        a, b, c = tys
        full = Fun(Fun(a, Fun(b, c)), Fun(Fun(a, b), Fun(a, c)))
        return {"S": full, "S1": full.cod, "S2": full.cod.cod}[op]
    if op in ("K", "K1"):
        a, b = tys
        full = Fun(a, Fun(b, a))
        return full if op == "K" else full.cod
    if op == "I":
        return Fun(tys[0], tys[0])
    raise ValueError(op)


@lru_cache(maxsize=1 << 18)
def _infer(t: Term) -> Ty:
    op, tys, args = t.op, t.tys, t.args
    if ARITY.get(op) != (len(tys), len(args)):
        raise TypeMismatch((), f"well-formed {op}", f"{len(tys)} types, {len(args)} terms")
    kids = []
    for i, a in enumerate(args):
        try:
            kids.append(_infer(a))
        except TypeMismatch as err:
            raise TypeMismatch((i,) + err.path, err.expected, err.found) from None

    def need(i, expected):
        if kids[i] != expected:
            raise TypeMismatch((i,), expected, kids[i])

    if op in ("S", "K", "I"):
        return combinator_type(op, tys)
    if op == "S1":
        a, b, c = tys
        need(0, Fun(a, Fun(b, c)))
        return combinator_type(op, tys)
    if op == "S2":
        a, b, c = tys
        need(0, Fun(a, Fun(b, c)))
        need(1, Fun(a, b))
        return combinator_type(op, tys)
    if op == "K1":
        need(0, tys[0])
        return combinator_type(op, tys)
    if op == "app":
        f = kids[0]
        if not isinstance(f, Fun):
            raise TypeMismatch((0,), "a function type", f)
        need(1, f.dom)
        return f.cod
    if op in ("inl", "inr"):
        need(0, tys[0] if op == "inl" else tys[1])
        return Sum(*tys)
    if op == "case":
        sc = kids[0]
        if not isinstance(sc, Sum):
            raise TypeMismatch((0,), "a sum type", sc)
        br = kids[1]
        if not isinstance(br, Fun):
            raise TypeMismatch((1,), "a function type", br)
        need(1, Fun(sc.left, br.cod))
        need(2, Fun(sc.right, br.cod))
        return br.cod
    if op == "pair":
        return Prod(kids[0], kids[1])
    if op in ("fst", "snd"):
        p = kids[0]
        if not isinstance(p, Prod):
            raise TypeMismatch((0,), "a product type", p)
        return p.left if op == "fst" else p.right
    mu = tys[0]
    if not isinstance(mu, Mu) or not T.is_closed(mu):
        raise TypeMismatch((), "a closed recursive type", mu)
    if op == "fold":
        need(0, unfold_mu(mu))
        return mu
    need(0, mu)
    return unfold_mu(mu)


def typecheck(t: Term) -> Ty:
    """The unique type of ``t``; raises :class:`TypeMismatch` on ill-typed input."""
    return _infer(t)


def well_typed(t: Term) -> bool:
    try:
        _infer(t)
    except TypeMismatch:
        return False
    return True


# -- surface syntax ---------------------------------------------------------

def show(t: Term) -> str:
    parts = [t.op]
    parts += [show_ty(x) for x in t.tys]
    parts += [show(a) for a in t.args]
    return "(" + " ".join(parts) + ")"


def term_from_sexpr(node) -> Term:
    if not isinstance(node, SList) or node.head is None:
        pos = node.pos if isinstance(node, (Atom, SList)) else None
        raise SyntaxError("expected an operator application", pos)
    op = _SPELLINGS.get(node.head, node.head)
    if op not in ARITY:
        raise SyntaxError(f"unknown operator {node.head!r}", node.pos)
    ntys, nargs = ARITY[op]
    rest = node.items[1:]
    if len(rest) != ntys + nargs:
        raise SyntaxError(
            f"{op} expects {ntys} type(s) and {nargs} term(s), got {len(rest)} item(s)", node.pos
        )
    tys = tuple(ty_from_sexpr(x) for x in rest[:ntys])
    if op in ("fold", "unfold") and not isinstance(tys[0], Mu):
        raise SyntaxError(f"{op} expects a recursive type", rest[0].pos)
    args = tuple(term_from_sexpr(x) for x in rest[ntys:])
    return Term(op, tys, args)


def parse(text: str) -> Term:
    """Parse one term.  No typechecking is done here."""
    return term_from_sexpr(read_one(text))


def parse_query(text: str) -> tuple[Term, ...]:
    """Parse a file body: one term, or ``(pair-of t s)`` for a relation query."""
    data = read_all(text)
    if len(data) == 1 and isinstance(data[0], SList) and data[0].head == "pair-of":
        node = data[0]
        if len(node) != 3:
            raise SyntaxError("pair-of expects two terms", node.pos)
        return (term_from_sexpr(node[1]), term_from_sexpr(node[2]))
    if len(data) != 1:
        raise SyntaxError(f"expected one term, found {len(data)}", 0)
    return (term_from_sexpr(data[0]),)


def subterms(t: Term):
    """Every subterm occurrence, preorder, with its path."""
    stack = [((), t)]
    while stack:
        path, u = stack.pop()
        yield path, u
        for i in reversed(range(len(u.args))):
            stack.append((path + (i,), u.args[i]))


# -- enumeration ------------------------------------------------------------

def default_universe(*types: Ty) -> tuple[Ty, ...]:
    return T.type_closure(types + (BOOL,))


class Enumerator:
    """Exhaustive well-typed term generator by exact node count.

    Operators whose premises mention a type that does not occur in the
    conclusion (the middle type of S2, the domain of app, the sum scrutinised
    by case, the discarded side of fst/snd, the recursive type of unfold)
    draw it from ``universe``.  Completeness is relative to that choice.
    """

    def __init__(self, universe):
        self.universe = tuple(sorted(set(universe), key=ty_key))
        self._sums = [u for u in self.universe if isinstance(u, Sum)]
        self._prods = [u for u in self.universe if isinstance(u, Prod)]
        self._mus = [u for u in self.universe if isinstance(u, Mu)]
        self._memo: dict[tuple[Ty, int], tuple[Term, ...]] = {}
        self._shape_memo: dict[Ty, tuple] = {}

    def exact(self, ty: Ty, n: int) -> tuple[Term, ...]:
        if n < 1:
            return ()
        key = (ty, n)
        hit = self._memo.get(key)
        if hit is None:
            hit = tuple(self._gen(ty, n))
            self._memo[key] = hit
        return hit

    def upto(self, ty: Ty, max_size: int) -> list[Term]:
        out: list[Term] = []
        for n in range(1, max_size + 1):
            out.extend(self.exact(ty, n))
        return out

    def split(self, n: int, tys):
        """All tuples of terms of the given types whose sizes sum to ``n``."""
        if len(tys) == 1:
            yield from ((x,) for x in self.exact(tys[0], n))
            return
        k = len(tys)
        for first in range(1, n - (k - 1) + 1):
            heads = self.exact(tys[0], first)
            if not heads:
                continue
            tails = list(self.split(n - first, tys[1:]))
            for h in heads:
                for rest in tails:
                    yield (h,) + rest

    def shapes(self, ty: Ty) -> tuple:
        """Operator instances with conclusion ``ty``: ``(op, type params, premise types)``."""
        hit = self._shape_memo.get(ty)
        if hit is None:
            hit = self._shape_memo[ty] = tuple(self._shapes(ty))
        return hit

    def _shapes(self, ty: Ty):
        if isinstance(ty, Fun):
            d, c = ty.dom, ty.cod
            # S(a,b,c): (a⇒b⇒c)⇒(a⇒b)⇒a⇒c
            if (
                isinstance(d, Fun) and isinstance(d.cod, Fun)
                and isinstance(c, Fun) and isinstance(c.dom, Fun) and isinstance(c.cod, Fun)
            ):
                a, b, r = d.dom, d.cod.dom, d.cod.cod
                if c.dom == Fun(a, b) and c.cod == Fun(a, r):
                    yield "S", (a, b, r), ()
            # K(a,b): a⇒b⇒a
            if isinstance(c, Fun) and c.cod == d:
                yield "K", (d, c.dom), ()
            if d == c:
                yield "I", (d,), ()
            # S1(a,b,c)(t): (a⇒b)⇒a⇒c
            if isinstance(d, Fun) and isinstance(c, Fun) and c.dom == d.dom:
                a, b, r = d.dom, d.cod, c.cod
                yield "S1", (a, b, r), (Fun(a, Fun(b, r)),)
            for b in self.universe:
                yield "S2", (d, b, c), (Fun(d, Fun(b, c)), Fun(d, b))
            # K1(a,b)(t): b⇒a
            yield "K1", (c, d), (c,)
        for a in self.universe:
            yield "app", (), (Fun(a, ty), a)
        if isinstance(ty, Sum):
            yield "inl", (ty.left, ty.right), (ty.left,)
            yield "inr", (ty.left, ty.right), (ty.right,)
        for sm in self._sums:
            yield "case", (), (sm, Fun(sm.left, ty), Fun(sm.right, ty))
        if isinstance(ty, Prod):
            yield "pair", (), (ty.left, ty.right)
        for p in self._prods:
            if p.left == ty:
                yield "fst", (), (p,)
        for p in self._prods:
            if p.right == ty:
                yield "snd", (), (p,)
        if isinstance(ty, Mu):
            yield "fold", (ty,), (unfold_mu(ty),)
        for mu in self._mus:
            if unfold_mu(mu) == ty:
                yield "unfold", (mu,), (mu,)

    def _gen(self, ty: Ty, n: int):
        for op, tys, premises in self.shapes(ty):
            if not premises:
                if n == 1:
                    yield Term(op, tys)
            elif n - 1 >= len(premises):
                for kids in self.split(n - 1, premises):
                    yield Term(op, tys, kids)


_ENUMERATORS: dict[tuple, Enumerator] = {}


def enumerator(universe) -> Enumerator:
    key = tuple(sorted(set(universe), key=ty_key))
    e = _ENUMERATORS.get(key)
    if e is None:
        e = _ENUMERATORS[key] = Enumerator(key)
    return e


def enumerate_terms(ty: Ty, max_size: int, universe=None) -> list[Term]:
    """All closed terms of type ``ty`` with at most ``max_size`` nodes.

    Ordered by size, then by operator, then by type choice.  The list for
    ``k`` is a prefix of the list for ``k + 1``.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    if universe is None:
        universe = default_universe(ty)
    return enumerator(universe).upto(ty, max_size)


class SortedPool:
    """Finite per-type stand-in for quantification over all closed terms.

    ``pool[τ]`` lists the first ``pool_size`` terms of type τ in enumeration
    order, among those with at most ``max_nodes`` nodes.  If that leaves the
    pool empty, the bound grows to the first size that has terms, up to
    ``reach_nodes``, so inhabited types never get a vacuous pool.
    """

    def __init__(self, pool_size: int = 8, max_nodes: int = 4, universe=None, reach_nodes: int = 8):
        self.pool_size = pool_size
        self.max_nodes = max_nodes
        self.reach_nodes = max(reach_nodes, max_nodes)
        self.universe = None if universe is None else tuple(universe)
        self._cache: dict[Ty, tuple[Term, ...]] = {}

    def __getitem__(self, ty: Ty) -> tuple[Term, ...]:
        hit = self._cache.get(ty)
        if hit is None:
            uni = self.universe if self.universe is not None else default_universe(ty)
            en = enumerator(uni)
            out: list[Term] = []
            for n in range(1, self.reach_nodes + 1):
                if n > self.max_nodes and out:
                    break
                out.extend(en.exact(ty, n))
                if len(out) >= self.pool_size:
                    break
            hit = self._cache[ty] = tuple(out[: self.pool_size])
        return hit

    def get(self, ty: Ty) -> tuple[Term, ...]:
        return self[ty]

    def as_dict(self, types) -> dict[Ty, tuple[Term, ...]]:
        return {t: self[t] for t in types}

