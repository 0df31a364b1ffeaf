"""Isomorphism of incidence structures by individualization-refinement.

Both structures are given as boolean (blocks, points) incidence matrices.
Refinement is 1-dimensional Weisfeiler-Leman on the bipartite point-block
graph, run on the two structures side by side so that colour names are shared:
each round a point's new colour is (old colour, number of incident blocks of
each block colour) and symmetrically for blocks, and the joint signatures are
renamed by sorted order.  A colour class of different size in the two
structures kills the branch.  When refinement stalls a point of the smallest
non-trivial cell is individualized against every candidate on the other side.
"""

from __future__ import annotations

import numpy as np

from .errors import BudgetExceeded


def _relabel(old1, old2, counts1, counts2):
    key = np.vstack([
        np.column_stack([old1, counts1]),
        np.column_stack([old2, counts2]),
    ])
    _, inv = np.unique(key, axis=0, return_inverse=True)
    inv = inv.ravel()
    n1 = old1.shape[0]
    new1, new2 = inv[:n1], inv[n1:]
    size = int(inv.max()) + 1 if inv.size else 0
    if not np.array_equal(np.bincount(new1, minlength=size), np.bincount(new2, minlength=size)):
        return None
    return new1, new2


def _histogram(inc: np.ndarray, colors: np.ndarray) -> np.ndarray:
    onehot = np.zeros((colors.shape[0], int(colors.max()) + 1), dtype=np.float32)
    onehot[np.arange(colors.shape[0]), colors] = 1.0
    return np.rint(inc @ onehot).astype(np.int64)


def refine(inc1, inc2, p1, p2, c1=None, c2=None):
    """Equitable joint refinement; returns (p1, p2, c1, c2) or None on mismatch."""
    b = inc1.shape[0]
    if c1 is None:
        c1 = np.zeros(b, dtype=np.int64)
        c2 = np.zeros(b, dtype=np.int64)
    inc1t, inc2t = inc1.T, inc2.T
    cells = (-1, -1)
    while True:
        r = _relabel(c1, c2, _histogram(inc1, p1), _histogram(inc2, p2))
        if r is None:
            return None
        c1, c2 = r
        r = _relabel(p1, p2, _histogram(inc1t, c1), _histogram(inc2t, c2))
        if r is None:
            return None
        p1, p2 = r
        now = (int(p1.max()) + 1, int(c1.max()) + 1)
        if now == cells:
            return p1, p2, c1, c2
        cells = now


def _rows_key(inc: np.ndarray) -> np.ndarray:
    packed = np.packbits(inc, axis=1)
    return packed[np.lexsort(packed.T[::-1])]


class _Budget:
    def __init__(self, limit):
        self.left = limit

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("isomorphism search node budget exhausted")


def isomorphisms(inc1, inc2, fixed=(), node_budget: int = 50_000):
    """Yield point maps perm (perm[x] = image of x) carrying blocks to blocks.

    ``fixed`` lists (x, y) pairs forced into every map.  Raises BudgetExceeded
    when the search tree outgrows ``node_budget``.
    """
    inc1 = np.asarray(inc1, dtype=bool)
    inc2 = np.asarray(inc2, dtype=bool)
    if inc1.shape != inc2.shape:
        return
    b, v = inc1.shape
    if b == 0:
        yield np.arange(v)
        return
    target = _rows_key(inc2)
    f1 = inc1.astype(np.float32)
    f2 = inc2.astype(np.float32)
    p1 = np.zeros(v, dtype=np.int64)
    p2 = np.zeros(v, dtype=np.int64)
    for j, (x, y) in enumerate(fixed):
        p1[x] = p2[y] = j + 1
    budget = _Budget(node_budget)
    yield from _search(f1, f2, inc1, target, p1, p2, budget)


def _search(f1, f2, inc1, target, p1, p2, budget):
    budget.spend()
    r = refine(f1, f2, p1, p2)
    if r is None:
        return
    p1, p2, _, _ = r
    v = p1.shape[0]
    sizes = np.bincount(p1)
    if sizes.max() == 1:
        perm = np.empty(v, dtype=np.int64)
        perm[np.argsort(p1)] = np.argsort(p2)
        image = np.zeros_like(inc1)
        image[:, perm] = inc1
        if np.array_equal(_rows_key(image), target):
            yield perm
        return
    nontrivial = np.flatnonzero(sizes > 1)
    cell = nontrivial[np.argmin(sizes[nontrivial])]
    x = int(np.flatnonzero(p1 == cell)[0])
    fresh = int(p1.max()) + 1
    for y in np.flatnonzero(p2 == cell):
        q1, q2 = p1.copy(), p2.copy()
        q1[x] = q2[y] = fresh
        yield from _search(f1, f2, inc1, target, q1, q2, budget)


def find_isomorphism(inc1, inc2, fixed=(), node_budget: int = 50_000):
    """First isomorphism or None; raises BudgetExceeded when undecided."""
    for perm in isomorphisms(inc1, inc2, fixed, node_budget):
        return perm
    return None
