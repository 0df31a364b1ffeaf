"""Boolean functions on GF(q) and their Walsh spectra.

The Walsh coefficient at mu is sum_x (-1)^(f(x) + Tr(mu x)).  ``walsh_naive``
evaluates that sum directly.  ``walsh_fast`` runs the ordinary Hadamard
butterfly, which uses the dot-product character (-1)^(w . x), and then
reindexes: Tr(mu x) is a bilinear form on the polynomial basis, so
Tr(mu x) = w(mu) . x with w(mu)_j = Tr(mu * x^j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .gf2n import FieldCtx


@dataclass(frozen=True, eq=False)
class BooleanFn:
    ctx: FieldCtx
    table: np.ndarray  # uint8, table[x] = f(x)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.uint8)
        if t.shape != (self.ctx.q,):
            raise PreconditionError(f"truth table must have length {self.ctx.q}")
        object.__setattr__(self, "table", t & 1)

    def __eq__(self, other):
        return (
            isinstance(other, BooleanFn)
            and self.ctx == other.ctx
            and np.array_equal(self.table, other.table)
        )

    def signs(self) -> np.ndarray:
        return 1 - 2 * self.table.astype(np.int64)

    def weight(self) -> int:
        return int(self.table.sum())

    def to_hex(self) -> str:
        """Integer with bit x = f(x), as ceil(q/4) hex digits."""
        value = int.from_bytes(np.packbits(self.table, bitorder="little").tobytes(), "little")
        return format(value, f"0{(self.ctx.q + 3) // 4}x")

    @classmethod
    def from_hex(cls, ctx: FieldCtx, s: str) -> "BooleanFn":
        value = int(s, 16)
        if value >> ctx.q:
            raise PreconditionError("truth table has bits beyond q")
        bits = (value >> np.arange(ctx.q, dtype=object)) & 1
        return cls(ctx, np.array(bits, dtype=np.uint8))


@dataclass(frozen=True, eq=False)
class WalshSpectrum:
    ctx: FieldCtx
    coeffs: np.ndarray  # int64, coeffs[mu]

    def __eq__(self, other):
        return (
            isinstance(other, WalshSpectrum)
            and self.ctx == other.ctx
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __getitem__(self, mu):
        return self.coeffs[mu]

    def to_json(self) -> dict:
        return {**self.ctx.to_json(), "coeffs": [int(c) for c in self.coeffs]}


def from_table(ctx: FieldCtx, table) -> BooleanFn:
    return BooleanFn(ctx, np.asarray(table, dtype=np.uint8))


def char_fn(block) -> BooleanFn:
    """Indicator of a block (anything with ``ctx`` and ``mask``)."""
    return BooleanFn(block.ctx, block.mask.astype(np.uint8))


def trace_fn(ctx: FieldCtx, s: int = 1) -> BooleanFn:
    """x -> Tr(x^s)."""
    return BooleanFn(ctx, ctx.trace_vec(ctx.power_map(s)))


def walsh_naive(f: BooleanFn) -> WalshSpectrum:
    ctx = f.ctx
    sf = f.signs()
    x = ctx.elements
    coeffs = np.empty(ctx.q, dtype=np.int64)
    for mu in range(ctx.q):
        chi = 1 - 2 * ctx.trace_vec(ctx.mul_vec(mu, x)).astype(np.int64)
        coeffs[mu] = int(np.dot(sf, chi))
    return WalshSpectrum(ctx, coeffs)


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Hadamard transform over the dot-product character."""
    a = np.array(values, dtype=np.int64)
    size = a.shape[0]
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        a = np.stack((a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]), axis=1)
        h *= 2
    return a.reshape(size)


def trace_dual_index(ctx: FieldCtx) -> np.ndarray:
    """perm[mu] = sum_j Tr(mu x^j) 2^j, so Tr(mu x) = popcount(perm[mu] & x) mod 2."""
    cached = _DUAL_INDEX.get(ctx)
    if cached is not None:
        return cached
    perm = np.zeros(ctx.q, dtype=np.int64)
    for j in range(ctx.n):
        perm |= ctx.trace_vec(ctx.mul_vec(ctx.elements, 1 << j)).astype(np.int64) << j
    perm.setflags(write=False)
    _DUAL_INDEX[ctx] = perm
    return perm


_DUAL_INDEX: dict = {}


def walsh_fast(f: BooleanFn) -> WalshSpectrum:
    h = fwht(f.signs())
    return WalshSpectrum(f.ctx, h[trace_dual_index(f.ctx)])


walsh = walsh_fast


def inverse_walsh(w: WalshSpectrum) -> np.ndarray:
    """Recover (-1)^f(x) from the spectrum: (1/q) sum_mu W(mu) (-1)^Tr(mu x)."""
    ctx = w.ctx
    dual = trace_dual_index(ctx)
    # sum_mu W(mu)(-1)^(perm[mu].x) = fwht of W placed at perm[mu]
    placed = np.zeros(ctx.q, dtype=np.int64)
    placed[dual] = w.coeffs
    total = fwht(placed)
    if np.any(total % ctx.q):
        raise ValueError("not a valid Walsh spectrum")
    return total // ctx.q


def is_semibent(w: WalshSpectrum) -> bool:
    n = w.ctx.n
    if n % 2 == 0:
        raise PreconditionError("semi-bent functions need odd n")
    amp = 1 << ((n + 1) // 2)
    return set(np.unique(w.coeffs).tolist()) == {0, amp, -amp}


def support(w: WalshSpectrum) -> np.ndarray:
    """Sorted array of mu with a nonzero coefficient."""
    return np.flatnonzero(w.coeffs)


def support_mask(w: WalshSpectrum) -> np.ndarray:
    return w.coeffs != 0


def walsh_transfer_holds(wb: WalshSpectrum, we: WalshSpectrum, d: int) -> bool:
    """Whether wb(mu) == we(mu^d) for every mu."""
    ctx = wb.ctx
    return bool(np.array_equal(wb.coeffs, we.coeffs[ctx.power_map(d)]))
