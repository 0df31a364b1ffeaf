"""t-design verification and the 3-design criteria for orbit designs.

``verify_t_design`` counts, for every t-subset of points, the blocks that
contain it.  For t <= 3 the counts come from products of the incidence
matrix: the pair counts are M^T M and the triple counts with first point u are
M_u^T M_u, where M_u keeps the blocks through u.  Every product entry is an
integer of size at most the number of blocks, so float32 BLAS is exact as long
as that stays below 2^24.  ``count_t_subsets_direct`` is the plain counter
version (combinatorial rank per t-subset) and serves as the oracle.

The criteria take (E, d) with W_B(mu) = W_E(mu^d) and evaluate, for each u
outside GF(2), the character sum, the Walsh triple product and the count
N_E(u^d, (1+u)^d, 1); ``criterion_equation_count`` counts the roots of
(u^d x + (1+u)^d)^t + x^t + 1.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import boolfn
from .affine import OrbitDesign
from .blocks import Block
from .errors import BudgetExceeded, PreconditionError
from .gf2n import FieldCtx

MAX_T3_POINTS = 256
_EXACT_F32 = 1 << 24


@dataclass(frozen=True)
class DesignParams:
    t: int
    v: int
    k: int
    lam: int

    def satisfies_divisibility(self) -> bool:
        for s in range(self.t + 1):
            num = self.lam * math.comb(self.v - s, self.t - s)
            den = math.comb(self.k - s, self.t - s)
            if den == 0 or num % den:
                return False
        return True

    def num_blocks(self) -> int:
        return self.lam * math.comb(self.v, self.t) // math.comb(self.k, self.t)

    def __str__(self):
        return f"{self.t}-({self.v},{self.k},{self.lam})"

    def to_json(self) -> dict:
        return {"t": self.t, "v": self.v, "k": self.k, "lambda": self.lam}


@dataclass(frozen=True)
class NotADesign:
    """Two t-subsets lying in different numbers of blocks."""

    t: int
    subset_a: tuple[int, ...]
    count_a: int
    subset_b: tuple[int, ...]
    count_b: int

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "witness": [
                {"subset": list(self.subset_a), "count": self.count_a},
                {"subset": list(self.subset_b), "count": self.count_b},
            ],
        }


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("APNDESIGNS_THREADS", "1")))
    except ValueError:
        return 1


def _triple_counts_from(inc: np.ndarray, u: int) -> np.ndarray:
    rows = inc[inc[:, u] > 0]
    return np.rint(rows.T @ rows).astype(np.int64)


def verify_t_design(D: OrbitDesign, t: int) -> DesignParams | NotADesign:
    v, k = D.v, D.k
    if not 1 <= t <= k:
        raise PreconditionError(f"need 1 <= t <= k, got t={t}, k={k}")
    if t > 3:
        return _verify_direct(D, t)
    if t == 3 and v > MAX_T3_POINTS:
        raise BudgetExceeded(f"t=3 verification limited to q <= {MAX_T3_POINTS}")
    if D.num_blocks >= _EXACT_F32:
        return _verify_direct(D, t)
    inc = D.incidence.astype(np.float32)
    if t == 1:
        counts = inc.sum(axis=0).astype(np.int64)
        return _judge(t, v, k, counts[:, None], lambda j: (j,))
    if t == 2:
        g = np.rint(inc.T @ inc).astype(np.int64)
        iu = np.triu_indices(v, 1)
        return _judge(t, v, k, g[iu], lambda j: (int(iu[0][j]), int(iu[1][j])))

    pi, pj = np.triu_indices(v, 1)
    ref = None
    with ThreadPoolExecutor(_workers()) as pool:
        us = range(v - 2)
        for u, g in zip(us, pool.map(lambda u: _triple_counts_from(inc, u), us)):
            keep = pi > u
            a, b = pi[keep], pj[keep]
            vals = g[a, b]
            if ref is None:
                ref = ((u, int(a[0]), int(b[0])), int(vals[0]))
            bad = np.flatnonzero(vals != ref[1])
            if bad.size:
                j = bad[0]
                return NotADesign(3, ref[0], ref[1], (u, int(a[j]), int(b[j])), int(vals[j]))
    return DesignParams(3, v, k, ref[1])


def _judge(t, v, k, counts, subset_of):
    counts = np.asarray(counts).ravel()
    bad = np.flatnonzero(counts != counts[0])
    if bad.size:
        j = int(bad[0])
        return NotADesign(t, subset_of(0), int(counts[0]), subset_of(j), int(counts[j]))
    return DesignParams(t, v, k, int(counts[0]))


def _rank_tables(v: int, t: int) -> list[np.ndarray]:
    # colex rank of a sorted t-subset: sum_j C(x_j, j+1)
    return [np.array([math.comb(x, j + 1) for x in range(v)], dtype=np.int64) for j in range(t)]


def _unrank(r: int, t: int) -> tuple[int, ...]:
    out = []
    for j in range(t, 0, -1):
        x = j - 1
        while math.comb(x + 1, j) <= r:
            x += 1
        out.append(x)
        r -= math.comb(x, j)
    return tuple(sorted(out))


def count_t_subsets_direct(D: OrbitDesign, t: int) -> np.ndarray:
    """Per-t-subset block counts via explicit counters indexed by colex rank."""
    v, k = D.v, D.k
    total = math.comb(v, t)
    if total > 50_000_000:
        raise BudgetExceeded(f"C({v},{t}) counters exceed the memory guard")
    combos = np.array(list(itertools.combinations(range(k), t)), dtype=np.int64).reshape(-1, t)
    tables = _rank_tables(v, t)
    counts = np.zeros(total, dtype=np.int64)
    members = np.array([np.flatnonzero(r) for r in D.incidence], dtype=np.int64).reshape(-1, k)
    step = max(1, 4_000_000 // max(1, combos.shape[0]))
    for start in range(0, members.shape[0], step):
        chunk = members[start:start + step]
        picked = chunk[:, combos]  # (blocks, C(k,t), t), each sorted ascending
        ranks = sum(tables[j][picked[..., j]] for j in range(t))
        counts += np.bincount(ranks.ravel(), minlength=total)
    return counts


def _verify_direct(D: OrbitDesign, t: int) -> DesignParams | NotADesign:
    counts = count_t_subsets_direct(D, t)
    return _judge(t, D.v, D.k, counts, lambda j: _unrank(j, t))


# -- N_E and I_B ------------------------------------------------------------

def count_N(E: Block, a: int, b: int, c: int) -> int:
    """#{(x, y, z) in E^3 : ax + by + cz = 0}, in O(k^2)."""
    ctx = E.ctx
    m = E.members
    if m.size == 0:
        return 0
    s = ctx.mul_vec(a, m)[:, None] ^ ctx.mul_vec(b, m)[None, :]
    if c == 0:
        return int((s == 0).sum()) * m.size
    z = ctx.mul_vec(ctx.inv(c), s)
    return int(E.mask[z].sum())


def count_N_brute(E: Block, a: int, b: int, c: int) -> int:
    """O(k^3) oracle for count_N."""
    ctx = E.ctx
    m = E.members
    ax, by, cz = ctx.mul_vec(a, m), ctx.mul_vec(b, m), ctx.mul_vec(c, m)
    return int((ax[:, None, None] ^ by[None, :, None] ^ cz[None, None, :] == 0).sum())


def count_I(B: Block, u1: int, u2: int, u3: int) -> int:
    """#{(x, y) in GF(q)^2 : u_i x + y in B for i = 1, 2, 3}."""
    if len({u1, u2, u3}) != 3:
        raise PreconditionError("u1, u2, u3 must be pairwise distinct")
    ctx = B.ctx
    x = ctx.elements
    y = ctx.elements[None, :]
    hit = np.ones((ctx.q, ctx.q), dtype=bool)
    for u in (u1, u2, u3):
        hit &= B.mask[ctx.mul_vec(u, x)[:, None] ^ y]
    return int(hit.sum())


# -- criteria ---------------------------------------------------------------

@dataclass
class CriterionReport:
    criterion: str
    values: dict[int, int] = field(default_factory=dict)  # u -> value

    @property
    def verdict(self) -> bool:
        return len(set(self.values.values())) <= 1

    @property
    def constant(self) -> int | None:
        vals = set(self.values.values())
        return vals.pop() if len(vals) == 1 else None

    def witness(self) -> tuple[tuple[int, int], tuple[int, int]] | None:
        if self.verdict:
            return None
        items = iter(self.values.items())
        u0, v0 = next(items)
        for u, val in items:
            if val != v0:
                return (u0, v0), (u, val)
        return None

    def to_json(self) -> dict:
        out = {"criterion": self.criterion, "verdict": self.verdict, "constant": self.constant}
        w = self.witness()
        if w:
            out["witness"] = [{"u": u, "value": val} for u, val in w]
        return out


def _scalings(ctx: FieldCtx, d: int):
    """(u, u^d, (1+u)^d) for u outside GF(2)."""
    for u in range(2, ctx.q):
        yield u, ctx.pow(u, d), ctx.pow(u ^ 1, d)


def criterion_char_sum(E: Block, d: int) -> CriterionReport:
    ctx = E.ctx
    s = 1 - 2 * E.mask.astype(np.int64)
    x = ctx.elements
    rep = CriterionReport("char_sum")
    for u, a, b in _scalings(ctx, d):
        z = s[ctx.mul_vec(a, x)[:, None] ^ ctx.mul_vec(b, x)[None, :]]
        rep.values[u] = int(s @ z @ s)
    return rep


def criterion_walsh_triple(E: Block, d: int) -> CriterionReport:
    ctx = E.ctx
    w = boolfn.walsh(boolfn.char_fn(E)).coeffs
    x = ctx.elements
    rep = CriterionReport("walsh_triple")
    for u, a, b in _scalings(ctx, d):
        rep.values[u] = int(np.sum(w * w[ctx.mul_vec(a, x)] * w[ctx.mul_vec(b, x)]))
    return rep


def criterion_count_N(E: Block, d: int) -> CriterionReport:
    rep = CriterionReport("count_N")
    for u, a, b in _scalings(E.ctx, d):
        rep.values[u] = count_N(E, a, b, 1)
    return rep


def criterion_equation_count(ctx: FieldCtx, t: int, d: int) -> CriterionReport:
    if math.gcd(t * d, ctx.order) != 1:
        raise PreconditionError(f"gcd(t*d, q-1) != 1 for t={t}, d={d}")
    x = ctx.elements
    xt = ctx.power_map(t)
    rep = CriterionReport("equation_count")
    for u, a, b in _scalings(ctx, d):
        lhs = ctx.pow_vec(ctx.mul_vec(a, x) ^ b, t) ^ xt ^ 1
        rep.values[u] = int((lhs == 0).sum())
    return rep


def triple_identity_rhs(q: int, k: int, n_count: int) -> int:
    """q^2 - 6kq + 12k^2 - 8N, the common value of the criteria."""
    return q * q - 6 * k * q + 12 * k * k - 8 * n_count


@dataclass
class CriteriaSummary:
    direct: DesignParams | NotADesign
    reports: list[CriterionReport]
    transfer_checked: bool

    @property
    def direct_verdict(self) -> bool:
        return isinstance(self.direct, DesignParams)

    @property
    def agree(self) -> bool:
        return all(r.verdict == self.direct_verdict for r in self.reports)

    def to_json(self) -> dict:
        return {
            "direct": self.direct.to_json(),
            "is_3_design": self.direct_verdict,
            "criteria": [r.to_json() for r in self.reports],
            "agree": self.agree,
        }


def check_transfer(B: Block, E: Block, d: int) -> bool:
    wb = boolfn.walsh(boolfn.char_fn(B))
    we = boolfn.walsh(boolfn.char_fn(E))
    return boolfn.walsh_transfer_holds(wb, we, d)


def run_criteria(D: OrbitDesign, E: Block | None = None, d: int = 1,
                 equation_exponent: int | None = None) -> CriteriaSummary:
    """Direct t=3 verdict next to the criteria for (E, d); E defaults to the base block."""
    B = D.base
    if E is None:
        E, d = B, 1
    if not check_transfer(B, E, d):
        raise PreconditionError("W_B(mu) = W_E(mu^d) fails; criteria do not apply")
    reports = [criterion_char_sum(E, d), criterion_walsh_triple(E, d), criterion_count_N(E, d)]
    if equation_exponent is not None:
        reports.append(criterion_equation_count(B.ctx, equation_exponent, d))
    return CriteriaSummary(verify_t_design(D, 3), reports, True)


# -- isomorphism ------------------------------------------------------------

GUARANTEED_ISO_POINTS = 32


@dataclass
class IsoResult:
    verdict: bool | None  # None: undetermined
    mapping: np.ndarray | None = None
    reason: str = ""

    def __bool__(self):
        return bool(self.verdict)


def intersection_profile(D: OrbitDesign) -> dict[int, int]:
    """Distribution of |B0 & B| over all blocks B, for the first block B0.

    Orbit designs are block-transitive, so this does not depend on B0.
    """
    inc = D.incidence
    sizes = (inc & inc[0]).sum(axis=1)
    vals, counts = np.unique(sizes, return_counts=True)
    return dict(zip(vals.tolist(), counts.tolist()))


def design_invariants(D: OrbitDesign, enum_budget: int = 22) -> dict:
    from . import codes

    C = codes.code_from_design(D)
    inv = {
        "params": (D.v, D.k, D.num_blocks),
        "intersections": tuple(sorted(intersection_profile(D).items())),
        "code_dim": C.dim,
    }
    if min(C.dim, D.v - C.dim) <= enum_budget:
        w = codes.weight_enumerator(C, enum_budget, via_dual=True)
        inv["weights"] = tuple(int(c) for c in w)
    return inv


def are_isomorphic(D1: OrbitDesign, D2: OrbitDesign, node_budget: int | None = None,
                   invariants=None) -> IsoResult:
    """Point bijection carrying the blocks of D1 onto those of D2.

    Invariants are compared first.  The search then pins 0 -> 0 and 1 -> 1:
    the affine group acts 2-transitively on the points of D2 and preserves
    its blocks, so any isomorphism can be composed with one of its elements
    to fix those two images.  Above 32 points the search runs under a node
    budget and may come back undetermined.
    """
    if D1.v != D2.v:
        return IsoResult(False, reason="different point counts")
    inv1, inv2 = invariants or (design_invariants(D1), design_invariants(D2))
    for key in ("params", "intersections", "code_dim", "weights"):
        if key in inv1 and key in inv2 and inv1[key] != inv2[key]:
            return IsoResult(False, reason=f"invariant {key} differs")
    from . import iso

    if node_budget is None:
        node_budget = 1_000_000 if D1.v <= GUARANTEED_ISO_POINTS else 2_000
    fixed = ((0, 0), (1, 1)) if D1.v >= 2 else ()
    try:
        perm = iso.find_isomorphism(D1.incidence, D2.incidence, fixed, node_budget)
    except BudgetExceeded:
        return IsoResult(None, reason="search budget exhausted")
    if perm is None:
        return IsoResult(False, reason="exhaustive search found no isomorphism")
    return IsoResult(True, perm, "isomorphism found")


@dataclass
class Classification:
    classes: list[list[str]]
    undetermined: list[tuple[str, str]]

    def to_json(self) -> dict:
        return {"classes": self.classes,
                "undetermined": [list(p) for p in self.undetermined]}


def classify(designs, node_budget: int | None = None) -> Classification:
    """Partition labelled designs (a mapping label -> OrbitDesign) by isomorphism."""
    items = list(designs.items())
    if len({D.v for _, D in items}) > 1:
        raise PreconditionError("designs to classify must share the point count")
    invs = {label: design_invariants(D) for label, D in items}
    reps: list[tuple[str, OrbitDesign]] = []
    classes: list[list[str]] = []
    undetermined = []
    for label, D in items:
        for j, (rlabel, R) in enumerate(reps):
            res = are_isomorphic(R, D, node_budget, (invs[rlabel], invs[label]))
            if res.verdict is None:
                undetermined.append((rlabel, label))
            elif res.verdict:
                classes[j].append(label)
                break
        else:
            reps.append((label, D))
            classes.append([label])
    return Classification(classes, undetermined)
