"""Binary linear codes spanned by block characteristic vectors.

Vectors of length v are packed into rows of 64-bit words; coordinate j sits
in word j // 64 at bit j % 64.  Points are indexed by the integer value of
the field element, ascending.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BudgetExceeded, PreconditionError

ENUM_BUDGET = 28
DEFAULT_SEED = 20190401


def pack(bits: np.ndarray) -> np.ndarray:
    """Bool matrix (m, v) -> uint64 words (m, ceil(v/64))."""
    bits = np.atleast_2d(np.asarray(bits, dtype=bool))
    m, v = bits.shape
    words = max(1, -(-v // 64))
    padded = np.zeros((m, words * 64), dtype=bool)
    padded[:, :v] = bits
    return np.packbits(padded, axis=1, bitorder="little").view("<u8").astype(np.uint64)


def unpack(words: np.ndarray, v: int) -> np.ndarray:
    words = np.atleast_2d(np.asarray(words, dtype=np.uint64))
    raw = words.astype("<u8").view(np.uint8)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :v].astype(bool)


def weights(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def rref(words: np.ndarray, v: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); returns (nonzero rows, pivot columns)."""
    rows = np.array(words, dtype=np.uint64, copy=True).reshape(-1, max(1, -(-v // 64)))
    pivots = []
    r = 0
    for col in range(v):
        if r == rows.shape[0]:
            break
        w, bit = col // 64, np.uint64(1 << (col % 64))
        hits = np.flatnonzero(rows[r:, w] & bit) + r
        if hits.size == 0:
            continue
        p = hits[0]
        if p != r:
            rows[[r, p]] = rows[[p, r]]
        others = np.flatnonzero(rows[:, w] & bit)
        others = others[others != r]
        rows[others] ^= rows[r]
        pivots.append(col)
        r += 1
    return rows[:r].copy(), pivots


@dataclass(frozen=True, eq=False)
class BinaryCode:
    v: int
    gen: np.ndarray  # RREF rows, packed
    pivots: tuple[int, ...]

    @classmethod
    def from_rows(cls, rows, v: int | None = None) -> "BinaryCode":
        """Span of the given rows: a bool matrix, or packed words with ``v`` given."""
        rows = np.asarray(rows)
        if rows.dtype == np.uint64:
            if v is None:
                raise PreconditionError("packed rows need the length v")
            words = rows
        else:
            rows = np.atleast_2d(rows.astype(bool))
            v = rows.shape[1] if v is None else v
            words = pack(rows) if rows.size else np.zeros((0, max(1, -(-v // 64))), np.uint64)
        g, piv = rref(words, v)
        return cls(v, g, tuple(piv))

    @classmethod
    def zero(cls, v: int) -> "BinaryCode":
        return cls(v, np.zeros((0, max(1, -(-v // 64))), dtype=np.uint64), ())

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def words(self) -> int:
        return max(1, -(-self.v // 64))

    @cached_property
    def matrix(self) -> np.ndarray:
        return unpack(self.gen, self.v) if self.dim else np.zeros((0, self.v), dtype=bool)

    def __eq__(self, other):
        return (
            isinstance(other, BinaryCode)
            and self.v == other.v
            and self.pivots == other.pivots
            and np.array_equal(self.gen, other.gen)
        )

    def __repr__(self):
        return f"BinaryCode[{self.v},{self.dim}]"

    def reduce(self, vec_words: np.ndarray) -> np.ndarray:
        """Residue of packed vectors after elimination by the RREF rows."""
        r = np.array(vec_words, dtype=np.uint64, copy=True).reshape(-1, self.words)
        for row, col in zip(self.gen, self.pivots):
            hit = (r[:, col // 64] >> np.uint64(col % 64)) & np.uint64(1)
            r[hit.astype(bool)] ^= row
        return r

    def contains(self, vecs) -> np.ndarray:
        vecs = np.asarray(vecs)
        words = vecs if vecs.dtype == np.uint64 else pack(vecs)
        return ~self.reduce(words).any(axis=1)

    def is_subcode_of(self, other: "BinaryCode") -> bool:
        return bool(other.contains(self.gen).all()) if self.dim else True

    def to_text(self) -> str:
        return "\n".join("".join("1" if b else "0" for b in row) for row in self.matrix)

    def to_json(self) -> dict:
        return {
            "length": self.v,
            "dimension": self.dim,
            "rows": [format(int.from_bytes(r.astype("<u8").tobytes(), "little"), "#x")
                     for r in self.gen],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BinaryCode":
        v = int(data["length"])
        nb = max(1, -(-v // 64)) * 8
        raw = b"".join(int(h, 16).to_bytes(nb, "little") for h in data["rows"])
        words = np.frombuffer(raw, dtype="<u8").astype(np.uint64).reshape(-1, nb // 8)
        return cls.from_rows(words, v)


def code_from_design(D) -> BinaryCode:
    """Span of the characteristic vectors of the design's blocks."""
    if D.num_blocks == 0:
        return BinaryCode.zero(D.v)
    return BinaryCode.from_rows(D.incidence)


def dual(C: BinaryCode) -> BinaryCode:
    v, k = C.v, C.dim
    free = [j for j in range(v) if j not in set(C.pivots)]
    h = np.zeros((v - k, v), dtype=bool)
    h[np.arange(v - k), free] = True
    if k:
        h[:, list(C.pivots)] = C.matrix[:, free].T
    if v - k == 0:
        return BinaryCode.zero(v)
    return BinaryCode.from_rows(h)


def is_self_dual(C: BinaryCode) -> bool:
    if 2 * C.dim != C.v:
        return False
    if C.dim == 0:
        return True
    m = C.matrix.astype(np.int64)
    return not np.any((m @ m.T) & 1)


def hull(C: BinaryCode) -> BinaryCode:
    """C intersected with its dual."""
    D = dual(C)
    if C.dim == 0 or D.dim == 0:
        return BinaryCode.zero(C.v)
    # kernel of the stacked parity checks of C and of C^perp
    return dual(BinaryCode.from_rows(np.vstack([D.matrix, C.matrix])))


# -- weight enumerators -----------------------------------------------------

def _span(rows: np.ndarray) -> np.ndarray:
    """All 2^len(rows) combinations, in Gray-code order."""
    out = np.zeros((1, rows.shape[1]), dtype=np.uint64)
    for r in rows:
        out = np.concatenate([out, out[::-1] ^ r])
    return out


def enumerate_weights(C: BinaryCode, budget: int = ENUM_BUDGET) -> np.ndarray:
    if C.dim > budget:
        raise BudgetExceeded(f"dimension {C.dim} above enumeration budget {budget}")
    counts = np.zeros(C.v + 1, dtype=np.int64)
    if C.dim == 0:
        counts[0] = 1
        return counts
    h = C.dim // 2
    low = _span(C.gen[:h])
    high = _span(C.gen[h:])
    step = max(1, (1 << 22) // (low.shape[0] * C.words))
    for s in range(0, high.shape[0], step):
        block = high[s:s + step, None, :] ^ low[None, :, :]
        counts += np.bincount(weights(block).ravel(), minlength=C.v + 1)
    return counts


def krawtchouk(v: int, j: int, i: int) -> int:
    return sum((-1) ** s * math.comb(i, s) * math.comb(v - i, j - s) for s in range(j + 1))


def macwilliams(counts, v: int, dim: int) -> np.ndarray:
    """Weight distribution of the dual from that of a [v, dim] code."""
    size = 1 << dim
    out = []
    for j in range(v + 1):
        total = sum(int(counts[i]) * krawtchouk(v, j, i) for i in range(v + 1) if counts[i])
        if total % size:
            raise ValueError("input is not the weight distribution of a linear code")
        out.append(total // size)
    return np.array(out, dtype=object)


def weight_enumerator(C: BinaryCode, budget: int = ENUM_BUDGET,
                      via_dual: bool = False) -> np.ndarray:
    """Codeword counts by weight.

    Enumerates 2^dim codewords; with ``via_dual`` a code above budget whose
    dual is small enough gets its distribution by MacWilliams from the dual
    (an object array of Python ints, since counts can pass 2^63).
    """
    if C.dim <= budget:
        return enumerate_weights(C, budget)
    if via_dual and C.v - C.dim <= budget:
        D = dual(C)
        return macwilliams(enumerate_weights(D, budget), C.v, D.dim)
    raise BudgetExceeded(f"dimension {C.dim} above enumeration budget {budget}")


def enumerator_dict(counts) -> dict[str, int]:
    return {str(w): int(c) for w, c in enumerate(counts) if c}


# -- minimum distance -------------------------------------------------------

@dataclass(frozen=True)
class Distance:
    lower: int
    upper: int
    witness: np.ndarray | None = None  # bool vector of weight ``upper``

    @property
    def exact(self) -> int | None:
        return self.lower if self.lower == self.upper else None

    def to_json(self) -> dict:
        if self.exact is not None:
            return {"d": self.exact}
        return {"d_lower": self.lower, "d_upper": self.upper}


def _min_nonzero(counts) -> int:
    nz = [w for w in range(1, len(counts)) if counts[w]]
    return nz[0] if nz else 0


def isd_upper_bound(C: BinaryCode, iterations: int = 200, seed: int = DEFAULT_SEED,
                    target: int | None = None) -> tuple[int, np.ndarray]:
    """Low-weight search by random information sets (rows and row pairs)."""
    rng = np.random.default_rng(seed)
    m = C.matrix
    best_w, best = C.v + 1, None
    for _ in range(iterations):
        perm = rng.permutation(C.v)
        g, _ = rref(pack(m[:, perm]), C.v)
        cand = [g]
        if g.shape[0] > 1:
            i, j = np.triu_indices(g.shape[0], 1)
            cand.append(g[i] ^ g[j])
        for words in cand:
            w = weights(words)
            j = int(np.argmin(w))
            if 0 < w[j] < best_w:
                best_w = int(w[j])
                vec = np.zeros(C.v, dtype=bool)
                vec[perm] = unpack(words[j], C.v)[0]
                best = vec
        if target is not None and best_w <= target:
            break
    return best_w, best


def _disjoint_information_sets(C: BinaryCode) -> list[np.ndarray]:
    """Systematic generators on pairwise disjoint information sets, greedily."""
    m = C.matrix
    used = np.zeros(C.v, dtype=bool)
    out = []
    while True:
        order = np.concatenate([np.flatnonzero(~used), np.flatnonzero(used)])
        g, piv = rref(pack(m[:, order]), C.v)
        cols = order[piv]
        if used[cols].any():
            break
        used[cols] = True
        inv = np.empty(C.v, dtype=np.int64)
        inv[order] = np.arange(C.v)
        out.append(pack(unpack(g, C.v)[:, inv]))
        if (~used).sum() < C.dim:
            break
    return out


def bz_lower_bound(C: BinaryCode, max_rows: int = 3) -> tuple[int, int]:
    """Partial Brouwer-Zimmermann: (lower bound, least weight seen).

    Every codeword with at most ``max_rows`` ones inside some disjoint
    information set is enumerated; anything else has weight at least
    m * (max_rows + 1) for m disjoint information sets.
    """
    sets = _disjoint_information_sets(C)
    seen = C.v + 1
    for g in sets:
        for r in range(1, max_rows + 1):
            for chunk in _combo_chunks(g.shape[0], r):
                acc = g[chunk[:, 0]].copy()
                for c in range(1, r):
                    acc ^= g[chunk[:, c]]
                seen = min(seen, int(weights(acc).min()))
    return min(seen, len(sets) * (max_rows + 1)), seen


def _combo_chunks(k: int, r: int, size: int = 200_000):
    it = itertools.combinations(range(k), r)
    while True:
        chunk = np.array(list(itertools.islice(it, size)), dtype=np.int64)
        if chunk.size == 0:
            return
        yield chunk.reshape(-1, r)


def min_distance(C: BinaryCode, budget: int = ENUM_BUDGET, seed: int = DEFAULT_SEED,
                 isd_iterations: int = 200, bz_rows: int = 3) -> Distance:
    if C.dim == 0:
        return Distance(0, 0)
    if C.dim <= budget or C.v - C.dim <= budget:
        counts = weight_enumerator(C, budget, via_dual=True)
        d = _min_nonzero(counts)
        return Distance(d, d)
    upper, vec = isd_upper_bound(C, isd_iterations, seed)
    lower, seen = bz_lower_bound(C, bz_rows)
    upper = min(upper, seen)
    return Distance(min(lower, upper), upper, vec)


# -- equivalence ------------------------------------------------------------

def min_weight_words(C: BinaryCode, budget: int = ENUM_BUDGET) -> np.ndarray:
    """Bool matrix of every minimum-weight codeword (dim within budget)."""
    if C.dim > budget:
        raise BudgetExceeded("minimum-weight enumeration over budget")
    low = _span(C.gen[: C.dim // 2])
    high = _span(C.gen[C.dim // 2:])
    d = _min_nonzero(enumerate_weights(C, budget))
    found = []
    step = max(1, (1 << 22) // (low.shape[0] * C.words))
    for s in range(0, high.shape[0], step):
        block = (high[s:s + step, None, :] ^ low[None, :, :]).reshape(-1, C.words)
        found.append(block[weights(block) == d])
    return unpack(np.concatenate(found), C.v)


def permute(C: BinaryCode, perm) -> BinaryCode:
    """Code with coordinate j moved to perm[j]."""
    perm = np.asarray(perm)
    m = np.zeros((C.dim, C.v), dtype=bool)
    m[:, perm] = C.matrix
    return BinaryCode.from_rows(m) if C.dim else BinaryCode.zero(C.v)


def codes_equivalent(C1: BinaryCode, C2: BinaryCode, budget: int = ENUM_BUDGET,
                     node_budget: int = 20_000) -> bool | None:
    """Permutation equivalence: True, False, or None when undetermined."""
    from . import iso

    if C1.v != C2.v:
        raise PreconditionError("codes of different lengths")
    if C1 == C2:
        return True
    if C1.dim != C2.dim:
        return False
    try:
        w1 = weight_enumerator(C1, budget, via_dual=True)
        w2 = weight_enumerator(C2, budget, via_dual=True)
    except BudgetExceeded:
        return None
    if not np.array_equal(w1, w2):
        return False
    h1, h2 = hull(C1), hull(C2)
    if h1.dim != h2.dim:
        return False
    if h1.dim <= budget and not np.array_equal(enumerate_weights(h1), enumerate_weights(h2)):
        return False
    if C1.dim > budget:
        return None
    s1, s2 = min_weight_words(C1, budget), min_weight_words(C2, budget)
    try:
        for perm in iso.isomorphisms(s1, s2, node_budget=node_budget):
            if permute(C1, perm) == C2:
                return True
    except BudgetExceeded:
        return None
    return False
