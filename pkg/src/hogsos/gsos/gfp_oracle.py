"""Boolean-matrix greatest-fixpoint iteration on finite models.

An independent oracle for the henceforth chain: relations are n×n boolean
matrices over a global state index and each round recomputes the whole
step condition with array operations.
"""

from __future__ import annotations

import numpy as np

from ..behavior import Folded, Pair, Silent, SumL, SumR
from .finite import FiniteCoalgebra, FunMap


def _encode(m: FiniteCoalgebra, index: dict, b):
    if isinstance(b, Silent):
        return ("silent", index[b.next])
    if isinstance(b, FunMap):
        labels = np.array([index[e] for e, _ in b.table], dtype=int)
        targets = np.array([index[v] for _, v in b.table], dtype=int)
        return ("fun", labels, targets)
    if isinstance(b, SumL):
        return ("inl", index[b.payload])
    if isinstance(b, SumR):
        return ("inr", index[b.payload])
    if isinstance(b, Folded):
        return ("fold", index[b.payload])
    if isinstance(b, Pair):
        return ("pair", index[b.left], index[b.right])
    raise TypeError(b)


def _lift(mat: np.ndarray, b1, b2) -> bool:
    if b1[0] != b2[0]:
        return False
    kind = b1[0]
    if kind == "fun":
        _, d1, u = b1
        _, d2, v = b2
        premise = mat[np.ix_(d1, d2)]
        return bool(np.all(~premise | mat[np.ix_(u, v)]))
    if kind == "pair":
        return bool(mat[b1[1], b2[1]] and mat[b1[2], b2[2]])
    return bool(mat[b1[1], b2[1]])


def gfp_matrix(m: FiniteCoalgebra, start=None, max_rounds: int = 100_000):
    """Iterate ``X ↦ X ∧ Φ(X)`` from ``start`` (default ⊤) until it is stationary.

    Returns ``(relation, rounds)`` where ``rounds`` counts the strict decreases.
    """
    names = m.all_states()
    index = {x: i for i, x in enumerate(names)}
    n = len(names)
    strong = [[_encode(m, index, b) for b in sorted(m.behaviors[x], key=repr)] for x in names]
    weak = [[_encode(m, index, b) for b in sorted(m.weak[x], key=repr)] for x in names]
    same_sort = np.zeros((n, n), dtype=bool)
    for i, x in enumerate(names):
        for j, y in enumerate(names):
            same_sort[i, j] = m.sort_of(x) == m.sort_of(y)
    if start is None:
        mat = same_sort.copy()
    else:
        mat = np.zeros((n, n), dtype=bool)
        for a, b in start:
            mat[index[a], index[b]] = True

    for rounds in range(max_rounds):
        nxt = mat.copy()
        for i, j in zip(*np.nonzero(mat)):
            ok = all(any(_lift(mat, b, b2) for b2 in weak[j]) for b in strong[i])
            nxt[i, j] = ok
        if np.array_equal(nxt, mat):
            rel = frozenset((names[i], names[j]) for i, j in zip(*np.nonzero(mat)))
            return rel, rounds
        mat = nxt
    raise RuntimeError("matrix iteration did not stabilize")
