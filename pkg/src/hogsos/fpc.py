"""Nondeterministic call-by-name lambda calculus with sums, products and
iso-recursive types.

Variables are de Bruijn indices; a typing context is a tuple whose entry
``i`` is the type of ``var i`` (entry 0 is the innermost binder).  ``lam``
carries its domain, ``inl``/``inr`` carry both summands and ``fold``
carries the recursive type.  Every other operator synthesizes its type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .behavior import Folded, Fun, Pair, Silent, SumL, SumR
from .ctx import OBS_ALL, CtxVerdict, Observation, ctx_preorder_bounded, observation
from .logrel import HOLDS, Outcome, RelVerdict, Witness
from .mutcl_syntax import default_universe
from .sexpr import Atom, SList, SyntaxError, read_all, read_one
from .ty import BOOL, Mu, Prod, Sum, TVar, Ty, is_closed, show_ty, ty_from_sexpr, ty_key, unfold_mu
from .ty import Fun as FunTy

# operator -> (number of type annotations, number of subterms)
ARITY: dict[str, tuple[int, int]] = {
    "var": (0, 0),
    "lam": (1, 1),
    "app": (0, 2),
    "fold": (1, 1),
    "unfold": (0, 1),
    "inl": (2, 1),
    "inr": (2, 1),
    "case": (0, 3),
    "pair": (0, 2),
    "fst": (0, 1),
    "snd": (0, 1),
    "choice": (0, 2),
}
VALUE_OPS = frozenset({"lam", "inl", "inr", "pair", "fold"})
HOLE = "hole"


class FTerm:
    """Immutable, possibly open term.  ``index`` is only meaningful for ``var``."""

    __slots__ = ("op", "tys", "args", "index", "_hash", "_size")

    def __init__(self, op: str, tys: tuple = (), args: tuple = (), index: int = 0):
        self.op = op
        self.tys = tys
        self.args = args
        self.index = index
        self._hash = hash((op, tys, args, index))
        self._size = 1 + sum(a._size for a in args)

    @property
    def size(self) -> int:
        return self._size

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FTerm) or self._hash != other._hash:
            return False
        return (self.op == other.op and self.index == other.index
                and self.tys == other.tys and self.args == other.args)

    def __repr__(self):
        return f"FTerm<{show_fpc(self)}>"

    def __str__(self):
        return show_fpc(self)

    def __reduce__(self):
        return (FTerm, (self.op, self.tys, self.args, self.index))


def var(i: int) -> FTerm:
    return FTerm("var", index=i)


def lam(dom: Ty, body: FTerm) -> FTerm:
    return FTerm("lam", (dom,), (body,))


def fapp(t: FTerm, s: FTerm) -> FTerm:
    return FTerm("app", (), (t, s))


def ffold(mu: Mu, t: FTerm) -> FTerm:
    return FTerm("fold", (mu,), (t,))


def funfold(t: FTerm) -> FTerm:
    return FTerm("unfold", (), (t,))


def finl(a: Ty, b: Ty, t: FTerm) -> FTerm:
    return FTerm("inl", (a, b), (t,))


def finr(a: Ty, b: Ty, t: FTerm) -> FTerm:
    return FTerm("inr", (a, b), (t,))


def fcase(t: FTerm, s: FTerm, r: FTerm) -> FTerm:
    return FTerm("case", (), (t, s, r))


def fpair(t: FTerm, s: FTerm) -> FTerm:
    return FTerm("pair", (), (t, s))


def ffst(t: FTerm) -> FTerm:
    return FTerm("fst", (), (t,))


def fsnd(t: FTerm) -> FTerm:
    return FTerm("snd", (), (t,))


def choice(t: FTerm, s: FTerm) -> FTerm:
    return FTerm("choice", (), (t, s))


def fhole(ty: Ty) -> FTerm:
    return FTerm(HOLE, (ty,))


def omega(ty: Ty) -> FTerm:
    """A closed divergent term of type ``ty`` via self-application at μα.(α ⇒ ty)."""
    r = recursive_arrow(ty)
    w = lam(r, fapp(funfold(var(0)), var(0)))
    return fapp(w, ffold(r, w))


def recursive_arrow(ty: Ty) -> Mu:
    if not is_closed(ty):
        raise ValueError("omega needs a closed type")
    # a closed type needs no shifting under the new binder
    return Mu(FunTy(TVar(0), ty))


def eta_expand(f: FTerm, ty: FunTy) -> FTerm:
    """``lam x. f x`` for a closed ``f``."""
    return lam(ty.dom, fapp(shift(f, 1), var(0)))


# -- typing -----------------------------------------------------------------

class TypeMismatch(Exception):
    def __init__(self, path: tuple[int, ...], expected, found):
        self.path = path
        self.expected = expected
        self.found = found
        exp = show_ty(expected) if isinstance(expected, Ty) else expected
        fnd = show_ty(found) if isinstance(found, Ty) else found
        super().__init__(f"type mismatch at {list(path)}: expected {exp}, found {fnd}")


class ContextMismatch(Exception):
    pass


_TYPE_MEMO: dict[tuple, Ty] = {}


def typecheck_fpc(ctx: tuple, t: FTerm) -> Ty:
    """The unique type of ``t`` in context ``ctx``."""
    ctx = tuple(ctx)
    key = (ctx, t)
    hit = _TYPE_MEMO.get(key)
    if hit is None:
        hit = _infer(ctx, t)
        if len(_TYPE_MEMO) > 1 << 18:
            _TYPE_MEMO.clear()
        _TYPE_MEMO[key] = hit
    return hit


def _infer(ctx: tuple, t: FTerm) -> Ty:
    op, tys, args = t.op, t.tys, t.args
    if op == "var":
        if not 0 <= t.index < len(ctx):
            raise TypeMismatch((), f"a variable below {len(ctx)}", f"index {t.index}")
        return ctx[t.index]
    if op == HOLE:
        return tys[0]
    if ARITY.get(op, (None, None)) != (len(tys), len(args)):
        raise TypeMismatch((), f"well-formed {op}", f"{len(tys)} types, {len(args)} terms")

    def sub(i, inner=ctx):
        try:
            return typecheck_fpc(inner, args[i])
        except TypeMismatch as err:
            raise TypeMismatch((i,) + err.path, err.expected, err.found) from None

    def need(i, expected, inner=ctx):
        got = sub(i, inner)
        if got != expected:
            raise TypeMismatch((i,), expected, got)

    if op == "lam":
        return FunTy(tys[0], sub(0, (tys[0],) + ctx))
    if op == "app":
        f = sub(0)
        if not isinstance(f, FunTy):
            raise TypeMismatch((0,), "a function type", f)
        need(1, f.dom)
        return f.cod
    if op == "fold":
        mu = tys[0]
        if not isinstance(mu, Mu) or not is_closed(mu):
            raise TypeMismatch((), "a closed recursive type", mu)
        need(0, unfold_mu(mu))
        return mu
    if op == "unfold":
        mu = sub(0)
        if not isinstance(mu, Mu):
            raise TypeMismatch((0,), "a recursive type", mu)
        return unfold_mu(mu)
    if op in ("inl", "inr"):
        need(0, tys[0] if op == "inl" else tys[1])
        return Sum(*tys)
    if op == "case":
        sc = sub(0)
        if not isinstance(sc, Sum):
            raise TypeMismatch((0,), "a sum type", sc)
        br = sub(1)
        if not isinstance(br, FunTy):
            raise TypeMismatch((1,), "a function type", br)
        need(1, FunTy(sc.left, br.cod))
        need(2, FunTy(sc.right, br.cod))
        return br.cod
    if op == "pair":
        return Prod(sub(0), sub(1))
    if op in ("fst", "snd"):
        p = sub(0)
        if not isinstance(p, Prod):
            raise TypeMismatch((0,), "a product type", p)
        return p.left if op == "fst" else p.right
    # choice
    left = sub(0)
    need(1, left)
    return left


def well_typed_fpc(ctx: tuple, t: FTerm) -> bool:
    try:
        typecheck_fpc(ctx, t)
    except TypeMismatch:
        return False
    return True


def free_vars(t: FTerm, depth: int = 0) -> frozenset[int]:
    if t.op == "var":
        return frozenset({t.index - depth}) if t.index >= depth else frozenset()
    out: frozenset = frozenset()
    for a in t.args:
        out |= free_vars(a, depth + (1 if t.op == "lam" else 0))
    return out


def is_closed_term(t: FTerm) -> bool:
    return not free_vars(t)


# -- substitution -----------------------------------------------------------

def _map_vars(t: FTerm, f, depth: int = 0) -> FTerm:
    """Replace each free ``var j`` (``j ≥ depth``) by ``f(j - depth, depth)``."""
    if t.op == "var":
        return f(t.index - depth, depth) if t.index >= depth else t
    if not t.args:
        return t
    inner = depth + 1 if t.op == "lam" else depth
    return FTerm(t.op, t.tys, tuple(_map_vars(a, f, inner) for a in t.args), t.index)


def shift(t: FTerm, d: int, cutoff: int = 0) -> FTerm:
    """Add ``d`` to every free index at or above ``cutoff``."""
    if d == 0:
        return t

    def f(j, depth):
        if j < cutoff:
            return var(j + depth)
        if j + d < 0:
            raise ContextMismatch(f"negative index after shifting var {j}")
        return var(j + d + depth)
    return _map_vars(t, f)


def subst(t: FTerm, sigma) -> FTerm:
    """Simultaneous substitution: free ``var i`` becomes ``sigma[i]``."""
    sigma = tuple(sigma)

    def f(j, depth):
        if j >= len(sigma):
            raise ContextMismatch(f"substitution has no component for var {j}")
        return shift(sigma[j], depth)
    return _map_vars(t, f)


def subst1(t: FTerm, s: FTerm) -> FTerm:
    """``t[x/s]`` for ``t`` with ``x`` as ``var 0``; other free indices drop by one."""
    def f(j, depth):
        if j == 0:
            return shift(s, depth)
        return var(j - 1 + depth)
    return _map_vars(t, f)


def compose(sigma, tau) -> tuple:
    """``σ;τ`` with ``subst(subst(t, σ), τ) = subst(t, σ;τ)``."""
    return tuple(subst(u, tau) for u in sigma)


def identity_subst(n: int) -> tuple:
    return tuple(var(i) for i in range(n))


def check_subst(sigma, source: tuple, target: tuple) -> None:
    """Component ``x`` must have type ``source[x]`` in ``target``."""
    if len(sigma) != len(source):
        raise ContextMismatch(f"substitution has {len(sigma)} components for {len(source)} variables")
    for i, (u, want) in enumerate(zip(sigma, source)):
        got = typecheck_fpc(target, u)
        if got != want:
            raise ContextMismatch(f"component {i} has type {show_ty(got)}, not {show_ty(want)}")


# -- semantics --------------------------------------------------------------

_STEP_MEMO: dict[FTerm, tuple] = {}


def step_rules(t: FTerm) -> tuple[tuple[str, FTerm], ...]:
    """One-step reducts tagged with the rule that produced them."""
    hit = _STEP_MEMO.get(t)
    if hit is not None:
        return hit
    out = tuple(_rules(t))
    if len(_STEP_MEMO) > 1 << 18:
        _STEP_MEMO.clear()
    _STEP_MEMO[t] = out
    return out


def _rules(t: FTerm):
    op, args = t.op, t.args
    if op == "choice":
        yield "choice-left", args[0]
        yield "choice-right", args[1]
    elif op == "app":
        head, arg = args
        if head.op == "lam":
            yield "beta", subst1(head.args[0], arg)
        else:
            for _, h in step_rules(head):
                yield "app-head", fapp(h, arg)
    elif op == "unfold":
        (body,) = args
        if body.op == "fold":
            yield "unfold-fold", body.args[0]
        else:
            for _, b in step_rules(body):
                yield "unfold-cong", funfold(b)
    elif op == "case":
        sc, s, r = args
        if sc.op == "inl":
            yield "case-inl", fapp(s, sc.args[0])
        elif sc.op == "inr":
            yield "case-inr", fapp(r, sc.args[0])
        else:
            for _, u in step_rules(sc):
                yield "case-cong", fcase(u, s, r)
    elif op in ("fst", "snd"):
        (p,) = args
        if p.op == "pair":
            yield f"{op}-pair", p.args[0 if op == "fst" else 1]
        else:
            for _, u in step_rules(p):
                yield f"{op}-cong", FTerm(op, (), (u,))


def successors(t: FTerm) -> tuple[FTerm, ...]:
    return tuple(dict.fromkeys(u for _, u in step_rules(t)))


def is_value(t: FTerm) -> bool:
    return t.op in VALUE_OPS


def value_shape(t: FTerm):
    op = t.op
    if op == "lam":
        body = t.args[0]
        return Fun(t, lambda e: subst1(body, e))
    if op == "inl":
        return SumL(t.args[0])
    if op == "inr":
        return SumR(t.args[0])
    if op == "pair":
        return Pair(*t.args)
    if op == "fold":
        return Folded(t.args[0])
    return None


def step_fpc(t: FTerm) -> frozenset:
    """Behaviours of ``t``: silent reducts, or the single value shape.

    Variables and other stuck open terms have no behaviour.
    """
    v = value_shape(t)
    if v is not None:
        return frozenset({v})
    return frozenset(Silent(u) for u in successors(t))


@dataclass
class Reach:
    """Silent-reachable terms of a term, in breadth-first order."""

    terms: tuple
    complete: bool  # the reachable set was exhausted
    parent: dict = field(default_factory=dict, repr=False)

    def path_to(self, u: FTerm) -> list[FTerm]:
        out = [u]
        while self.parent.get(out[-1]) is not None:
            out.append(self.parent[out[-1]])
        return out[::-1]


def reach(t: FTerm, fuel: int) -> Reach:
    """Breadth-first closure under silent steps, expanding at most ``fuel`` terms."""
    parent: dict = {t: None}
    order = [t]
    i = 0
    while i < len(order):
        if i >= fuel:
            return Reach(tuple(order), False, parent)
        u = order[i]
        i += 1
        for v in successors(u):
            if v not in parent:
                parent[v] = u
                order.append(v)
    return Reach(tuple(order), True, parent)


@dataclass(frozen=True)
class MayResult:
    status: str  # yes | no_certified | unknown
    path: tuple = ()
    explored: int = 0

    @property
    def yes(self) -> bool:
        return self.status == "yes"


def may_terminates(t: FTerm, fuel: int = 500) -> MayResult:
    """Is some value reachable?  Certified ``no`` once the reachable set is exhausted."""
    r = reach(t, fuel)
    for u in r.terms:
        if is_value(u):
            return MayResult("yes", tuple(r.path_to(u)), len(r.terms))
    return MayResult("no_certified" if r.complete else "unknown", (), len(r.terms))


# -- surface syntax ---------------------------------------------------------

def _name(depth: int) -> str:
    return f"x{depth}"


def show_fpc(t: FTerm, depth: int = 0) -> str:
    if t.op == "var":
        if t.index < depth:
            return f"(var {_name(depth - 1 - t.index)})"
        return f"(var #{t.index - depth})"
    if t.op == HOLE:
        return f"(hole {show_ty(t.tys[0])})"
    if t.op == "lam":
        return f"(lam {_name(depth)} {show_ty(t.tys[0])} {show_fpc(t.args[0], depth + 1)})"
    parts = [t.op] + [show_ty(x) for x in t.tys] + [show_fpc(a, depth) for a in t.args]
    return "(" + " ".join(parts) + ")"


def fpc_from_sexpr(node, env: tuple[str, ...] = ()) -> FTerm:
    """``env[-1]`` is the innermost bound name."""
    if not isinstance(node, SList) or node.head is None:
        raise SyntaxError("expected an operator application", getattr(node, "pos", None))
    op = node.head
    rest = node.items[1:]
    if op == "var":
        if len(rest) != 1 or not isinstance(rest[0], Atom):
            raise SyntaxError("var expects a name", node.pos)
        name = rest[0].text
        if name.startswith("#") and name[1:].isdigit():
            return var(len(env) + int(name[1:]))
        if name not in env:
            raise SyntaxError(f"unbound variable {name!r}", rest[0].pos)
        return var(len(env) - 1 - max(i for i, n in enumerate(env) if n == name))
    if op == "lam":
        if len(rest) != 3 or not isinstance(rest[0], Atom):
            raise SyntaxError("lam expects (lam x T t)", node.pos)
        return lam(ty_from_sexpr(rest[1]), fpc_from_sexpr(rest[2], env + (rest[0].text,)))
    if op == "omega":
        if len(rest) != 1:
            raise SyntaxError("omega expects a type", node.pos)
        return omega(ty_from_sexpr(rest[0]))
    if op == HOLE:
        if len(rest) != 1:
            raise SyntaxError("hole expects a type", node.pos)
        return fhole(ty_from_sexpr(rest[0]))
    if op not in ARITY:
        raise SyntaxError(f"unknown operator {op!r}", node.pos)
    ntys, nargs = ARITY[op]
    if len(rest) != ntys + nargs:
        raise SyntaxError(
            f"{op} expects {ntys} type(s) and {nargs} term(s), got {len(rest)} item(s)", node.pos
        )
    tys = tuple(ty_from_sexpr(x) for x in rest[:ntys])
    if op == "fold" and not isinstance(tys[0], Mu):
        raise SyntaxError("fold expects a recursive type", rest[0].pos)
    return FTerm(op, tys, tuple(fpc_from_sexpr(x, env) for x in rest[ntys:]))


def parse_fpc(text: str, names: tuple[str, ...] = ()) -> FTerm:
    return fpc_from_sexpr(read_one(text), tuple(names))


def parse_fpc_query(text: str) -> tuple[FTerm, ...]:
    data = read_all(text)
    if len(data) == 1 and isinstance(data[0], SList) and data[0].head == "pair-of":
        node = data[0]
        if len(node) != 3:
            raise SyntaxError("pair-of expects two terms", node.pos)
        return (fpc_from_sexpr(node[1]), fpc_from_sexpr(node[2]))
    if len(data) != 1:
        raise SyntaxError(f"expected one term, found {len(data)}", 0)
    return (fpc_from_sexpr(data[0]),)


# -- enumeration ------------------------------------------------------------

class FpcEnumerator:
    """Well-typed terms in a context by exact node count.

    Types that occur only in premises come from ``universe``, as for the
    combinator calculus.  ``choice`` can be switched off to keep pools small.
    """

    def __init__(self, universe, with_choice: bool = True):
        self.universe = tuple(sorted(set(universe), key=ty_key))
        self.with_choice = with_choice
        self._sums = [u for u in self.universe if isinstance(u, Sum)]
        self._prods = [u for u in self.universe if isinstance(u, Prod)]
        self._mus = [u for u in self.universe if isinstance(u, Mu)]
        self._memo: dict = {}

    def shapes(self, ctx: tuple, ty: Ty):
        """``(op, tys, premises)`` with premises as ``(context, type)`` pairs."""
        for i, g in enumerate(ctx):
            if g == ty:
                yield ("var", i), (), ()
        if isinstance(ty, FunTy):
            yield "lam", (ty.dom,), (((ty.dom,) + ctx, ty.cod),)
        for a in self.universe:
            yield "app", (), ((ctx, FunTy(a, ty)), (ctx, a))
        if isinstance(ty, Sum):
            yield "inl", (ty.left, ty.right), ((ctx, ty.left),)
            yield "inr", (ty.left, ty.right), ((ctx, ty.right),)
        for sm in self._sums:
            yield "case", (), ((ctx, sm), (ctx, FunTy(sm.left, ty)), (ctx, FunTy(sm.right, ty)))
        if isinstance(ty, Prod):
            yield "pair", (), ((ctx, ty.left), (ctx, ty.right))
        for p in self._prods:
            if p.left == ty:
                yield "fst", (), ((ctx, p),)
        for p in self._prods:
            if p.right == ty:
                yield "snd", (), ((ctx, p),)
        if isinstance(ty, Mu):
            yield "fold", (ty,), ((ctx, unfold_mu(ty)),)
        for mu in self._mus:
            if unfold_mu(mu) == ty:
                yield "unfold", (), ((ctx, mu),)
        if self.with_choice:
            yield "choice", (), ((ctx, ty), (ctx, ty))

    def exact(self, ctx: tuple, ty: Ty, n: int) -> tuple[FTerm, ...]:
        key = (ctx, ty, n)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = tuple(self._gen(ctx, ty, n))
        return hit

    def upto(self, ctx: tuple, ty: Ty, max_size: int) -> list[FTerm]:
        return [t for n in range(1, max_size + 1) for t in self.exact(ctx, ty, n)]

    def split(self, n: int, premises) -> Iterator[tuple]:
        if not premises:
            if n == 0:
                yield ()
            return
        (ctx, ty), rest = premises[0], premises[1:]
        for k in range(1, n - len(rest) + 1):
            heads = self.exact(ctx, ty, k)
            if not heads:
                continue
            tails = list(self.split(n - k, rest))
            for h in heads:
                for tl in tails:
                    yield (h,) + tl

    def _gen(self, ctx: tuple, ty: Ty, n: int):
        for op, tys, premises in self.shapes(ctx, ty):
            if isinstance(op, tuple):
                if n == 1:
                    yield var(op[1])
            elif premises and n - 1 >= len(premises):
                for kids in self.split(n - 1, premises):
                    yield FTerm(op, tys, kids)


_ENUMS: dict = {}


def fpc_enumerator(universe, with_choice: bool = True) -> FpcEnumerator:
    key = (tuple(sorted(set(universe), key=ty_key)), with_choice)
    e = _ENUMS.get(key)
    if e is None:
        e = _ENUMS[key] = FpcEnumerator(*key)
    return e


def enumerate_fpc(ctx: tuple, ty: Ty, max_size: int, universe=None, with_choice: bool = True):
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    ctx = tuple(ctx)
    if universe is None:
        universe = default_universe(ty, *ctx)
    return fpc_enumerator(universe, with_choice).upto(ctx, ty, max_size)


class FpcPool:
    """First ``pool_size`` terms per (context, type), in enumeration order."""

    def __init__(self, pool_size: int = 6, max_nodes: int = 3, universe=None, with_choice: bool = True):
        self.pool_size = pool_size
        self.max_nodes = max_nodes
        self.universe = None if universe is None else tuple(universe)
        self.with_choice = with_choice
        self._cache: dict = {}

    def get(self, ctx: tuple, ty: Ty) -> tuple[FTerm, ...]:
        key = (tuple(ctx), ty)
        hit = self._cache.get(key)
        if hit is None:
            uni = self.universe if self.universe is not None else default_universe(ty, *ctx)
            en = fpc_enumerator(uni, self.with_choice)
            out: list = []
            for n in range(1, self.max_nodes + 1):
                out.extend(en.exact(tuple(ctx), ty, n))
                if len(out) >= self.pool_size:
                    break
            hit = self._cache[key] = tuple(out[: self.pool_size])
        return hit


# -- logical relation -------------------------------------------------------

@dataclass
class FpcConfig:
    n: int = 3
    pool: FpcPool = field(default_factory=FpcPool)
    fuel: int = 200
    subst_samples: int = 16  # related substitution pairs tried per target context
    target_contexts: str = "closed+self"  # which Δ the substitution clause ranges over

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("index must be non-negative")
        if self.target_contexts not in ("closed", "closed+self"):
            raise ValueError(f"unknown target context family {self.target_contexts!r}")


class FpcRelationChecker:
    """Bounded evaluator of the step-indexed relation with substitution closure."""

    def __init__(self, cfg: FpcConfig):
        self.cfg = cfg
        self.pool = cfg.pool
        self._memo: dict = {}
        self._reach: dict = {}

    def reach(self, t: FTerm) -> Reach:
        r = self._reach.get(t)
        if r is None:
            r = self._reach[t] = reach(t, self.cfg.fuel)
        return r

    def rel(self, n: int, ctx: tuple, ty: Ty, t: FTerm, s: FTerm) -> RelVerdict:
        if n <= 0:
            return HOLDS
        key = (n, ctx, t, s)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = self.rel(n - 1, ctx, ty, t, s)
        for clause in (self.check_S, self.check_E, self.check_V):
            if out.fails:
                break
            out = out & clause(n, ctx, ty, t, s)
        self._memo[key] = out
        return out

    def _targets(self, ctx: tuple):
        yield ()
        if ctx and self.cfg.target_contexts == "closed+self":
            yield ctx

    def related_substitutions(self, n: int, ctx: tuple, target: tuple):
        """Componentwise related ``(σ, σ')`` pairs into ``target``, at index ``n - 1``."""
        per_var = []
        for g in ctx:
            cands = self.pool.get(target, g)
            pairs = [
                (u, v) for u in cands for v in cands
                if not self.rel(n - 1, target, g, u, v).fails
            ]
            if not pairs:
                return
            per_var.append(pairs)
        for combo in _bounded_product(per_var, self.cfg.subst_samples):
            yield tuple(p[0] for p in combo), tuple(p[1] for p in combo)

    def check_S(self, n, ctx, ty, t, s) -> RelVerdict:
        if not ctx:
            return HOLDS
        out = HOLDS
        for target in self._targets(ctx):
            for sig1, sig2 in self.related_substitutions(n, ctx, target):
                v = self.rel(n - 1, target, ty, subst(t, sig1), subst(s, sig2))
                if v.fails:
                    label = (_show_subst(sig1), _show_subst(sig2))
                    return RelVerdict(Outcome.FAILS, Witness(
                        "S", ty, t, s, label, n, "substitution instance unrelated", v.witness))
                out = out & v
        return out

    def check_E(self, n, ctx, ty, t, s) -> RelVerdict:
        out = HOLDS
        for t1 in successors(t):
            v = self._exists(n, ctx, ty, t1, s, lambda s1: [s1], "E", t)
            out = out & v
            if out.fails:
                return out
        return out

    def check_V(self, n, ctx, ty, t, s) -> RelVerdict:
        op = t.op
        if op not in VALUE_OPS:
            return HOLDS
        if op == "lam":
            args = self.pool.get(ctx, ty.dom)
            out = HOLDS
            body = t.args[0]
            for e1 in args:
                for e2 in args:
                    q = self.rel(n - 1, ctx, ty.dom, e1, e2)
                    if q.fails:
                        continue
                    left = subst1(body, e1)

                    def cands(s1, e2=e2):
                        return [subst1(s1.args[0], e2)] if s1.op == "lam" else []
                    v = self._exists(n, ctx, ty.cod, left, s, cands, "V", t, label=(e1, e2))
                    if v.fails and not q.holds:
                        v = RelVerdict(Outcome.UNKNOWN, reason="argument pair undecided")
                    out = out & v
                    if out.fails:
                        return out
            return out
        if op in ("inl", "inr"):
            sub_ty = ty.left if op == "inl" else ty.right
            return self._exists(n, ctx, sub_ty, t.args[0], s,
                                lambda s1: [s1.args[0]] if s1.op == op else [], "V", t, label=op)
        if op == "fold":
            return self._exists(n, ctx, unfold_mu(ty), t.args[0], s,
                                lambda s1: [s1.args[0]] if s1.op == "fold" else [], "V", t, label="mu")
        # pair: both components against the same weak successor
        return self._exists_pair(n, ctx, ty, t, s)

    def _exists(self, n, ctx, ty, t1, s, cands, clause, left, label=None) -> RelVerdict:
        """Some weak successor of ``s`` yields a candidate related to ``t1`` at ``n - 1``."""
        r = self.reach(s)
        reason = ""
        first_fail = None
        for s1 in r.terms:
            for c in cands(s1):
                v = self.rel(n - 1, ctx, ty, t1, c)
                if v.holds:
                    return HOLDS
                if v.fails:
                    first_fail = first_fail or v
                elif not reason:
                    reason = v.reason or "undecided candidate"
        if not r.complete:
            return RelVerdict(Outcome.UNKNOWN, reason=reason or f"fuel exhausted exploring {s}")
        if reason:
            return RelVerdict(Outcome.UNKNOWN, reason=reason)
        return RelVerdict(Outcome.FAILS, Witness(
            clause, ty, left, s, label, n,
            f"no weak successor of the right term matches {t1}",
            first_fail.witness if first_fail else None))

    def _exists_pair(self, n, ctx, ty, t, s) -> RelVerdict:
        r = self.reach(s)
        reason = ""
        first_fail = None
        for s1 in r.terms:
            if s1.op != "pair":
                continue
            v = self.rel(n - 1, ctx, ty.left, t.args[0], s1.args[0])
            if not v.fails:
                v = v & self.rel(n - 1, ctx, ty.right, t.args[1], s1.args[1])
            if v.holds:
                return HOLDS
            if v.fails:
                first_fail = first_fail or v
            elif not reason:
                reason = v.reason or "undecided candidate"
        if not r.complete:
            return RelVerdict(Outcome.UNKNOWN, reason=reason or f"fuel exhausted exploring {s}")
        if reason:
            return RelVerdict(Outcome.UNKNOWN, reason=reason)
        return RelVerdict(Outcome.FAILS, Witness(
            "V", ty, t, s, "pair", n, "no weak pair successor matches",
            first_fail.witness if first_fail else None))


def _bounded_product(lists, limit: int):
    """Cartesian product in order of increasing index sum, at most ``limit`` items."""
    if not lists:
        yield ()
        return
    sizes = [len(x) for x in lists]
    emitted = 0
    for total in range(sum(sizes) - len(sizes) + 1):
        for idx in _compositions(total, sizes):
            yield tuple(lists[i][j] for i, j in enumerate(idx))
            emitted += 1
            if emitted >= limit:
                return


def _compositions(total: int, sizes):
    if len(sizes) == 1:
        if total < sizes[0]:
            yield (total,)
        return
    for j in range(min(total, sizes[0] - 1) + 1):
        for rest in _compositions(total - j, sizes[1:]):
            yield (j,) + rest


def _show_subst(sigma) -> str:
    return "[" + ", ".join(str(u) for u in sigma) + "]"


def rel_fpc(cfg: FpcConfig, ctx: tuple, ty: Ty | None, t: FTerm, s: FTerm,
            checker: FpcRelationChecker | None = None) -> RelVerdict:
    ctx = tuple(ctx)
    found = typecheck_fpc(ctx, t)
    other = typecheck_fpc(ctx, s)
    if found != other:
        raise TypeError(f"terms have different types: {show_ty(found)} and {show_ty(other)}")
    if ty is not None and ty != found:
        raise TypeError(f"terms have type {show_ty(found)}, not {show_ty(ty)}")
    checker = checker or FpcRelationChecker(cfg)
    return checker.rel(cfg.n, ctx, found, t, s)


# -- contexts ---------------------------------------------------------------

def _replace_hole(c: FTerm, t: FTerm) -> FTerm:
    if c.op == HOLE:
        return t
    if not c.args:
        return c
    return FTerm(c.op, c.tys, tuple(_replace_hole(a, t) for a in c.args), c.index)


def plug_fpc(c: FTerm, t: FTerm) -> FTerm:
    """``C[t]`` for a closed ``t``; the hole never captures variables."""
    if not is_closed_term(t):
        raise ContextMismatch("only closed terms can be plugged")
    return _replace_hole(c, t)


class FpcContextEnumerator:
    """One-hole contexts with a closed hole of a fixed type; the hole counts as one node."""

    def __init__(self, terms: FpcEnumerator):
        self.terms = terms
        self._memo: dict = {}

    def exact(self, hole_ty: Ty, ctx: tuple, out: Ty, n: int) -> tuple[FTerm, ...]:
        key = (hole_ty, ctx, out, n)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = tuple(self._gen(hole_ty, ctx, out, n))
        return hit

    def _gen(self, hole_ty, ctx, out, n):
        if n == 1:
            if out == hole_ty:
                yield fhole(hole_ty)
            return
        for op, tys, premises in self.terms.shapes(ctx, out):
            k = len(premises)
            if isinstance(op, tuple) or k == 0 or n - 1 < k:
                continue
            for i in range(k):
                others = premises[:i] + premises[i + 1:]
                pctx, pty = premises[i]
                for csize in range(1, n - 1 - len(others) + 1):
                    ctxs = self.exact(hole_ty, pctx, pty, csize)
                    if not ctxs:
                        continue
                    rest = n - 1 - csize
                    fills = list(self.terms.split(rest, others)) if others else ([()] if rest == 0 else [])
                    for c in ctxs:
                        for f in fills:
                            yield FTerm(op, tys, f[:i] + (c,) + f[i:])


class FpcBackend:
    """May-termination oracle and closed-hole contexts for the bounded preorder search."""

    name = "fpc"

    def __init__(self, universe=None, with_choice: bool = True):
        self.universe = universe
        self.with_choice = with_choice

    def type_of(self, t: FTerm) -> Ty:
        if not is_closed_term(t):
            raise ContextMismatch("contextual comparison needs closed terms")
        return typecheck_fpc((), t)

    def universe_for(self, ty: Ty):
        return self.universe if self.universe is not None else default_universe(ty)

    def output_types(self, hole_ty: Ty, obs: Observation):
        if obs.name == "bool":
            return (BOOL,)
        return tuple(self.universe_for(hole_ty))

    def contexts(self, hole_ty: Ty, outs, max_size: int):
        ce = FpcContextEnumerator(fpc_enumerator(self.universe_for(hole_ty), self.with_choice))
        for n in range(1, max_size + 1):
            for out in outs:
                yield from ce.exact(hole_ty, (), out, n)

    def plug(self, c, t):
        return _replace_hole(c, t)

    def observe(self, t, fuel: int) -> str:
        status = may_terminates(t, fuel).status
        return {"yes": "yes", "no_certified": "no"}.get(status, "unknown")

    def show_context(self, c) -> str:
        return show_fpc(c)


def ctx_fpc_bounded(t: FTerm, s: FTerm, obs: Observation | str = OBS_ALL, max_size: int = 4,
                    fuel: int = 500, backend: FpcBackend | None = None) -> CtxVerdict:
    """Search for a closed-hole context under which ``t`` may terminate and ``s`` certainly does not."""
    if isinstance(obs, str):
        obs = observation(obs)
    return ctx_preorder_bounded(t, s, obs, max_size, fuel, backend or FpcBackend())
