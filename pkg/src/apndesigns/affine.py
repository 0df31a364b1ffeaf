"""The affine group x -> ax + b of GF(q) acting on blocks.

Orbit blocks are stored as packed little-endian bitsets (bit x of a block is
byte x // 8, bit x % 8), one row per block, rows sorted lexicographically as
byte strings.  The stabilizer is computed by a direct scan over all (a, b),
independently of the orbit, so the orbit-stabilizer identity is a real check.

Binary orbit file layout (all integers little-endian)::

    offset  size  field
    0       4     magic b"APNO"
    4       1     format version (1)
    5       1     n
    6       2     reserved, zero
    8       4     modulus
    12      8     stab_order
    20      8     num_blocks
    28      ...   num_blocks rows of max(1, q/8) bytes each
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import boolfn
from .blocks import Block
from .errors import HypothesisError, PreconditionError
from .gf2n import FieldCtx

BINARY_MAGIC = b"APNO"
BINARY_VERSION = 1
_HEADER = struct.Struct("<4sBBHIQQ")


@dataclass(frozen=True)
class AffineMap:
    a: int
    b: int

    def __post_init__(self):
        if self.a == 0:
            raise PreconditionError("affine map needs a != 0")

    def __call__(self, ctx: FieldCtx, x):
        return ctx.mul_vec(self.a, x) ^ self.b


IDENTITY = AffineMap(1, 0)


def apply(m: AffineMap, block: Block) -> Block:
    ctx = block.ctx
    return Block.from_members(ctx, m(ctx, block.members))


def _row_bytes(q: int) -> int:
    return max(1, q // 8)


def _images_for_scale(ctx: FieldCtx, members: np.ndarray, a: int) -> np.ndarray:
    """Packed images a*B + b for every translation b, shape (q, row_bytes)."""
    q = ctx.q
    idx = ctx.mul_vec(a, members)[None, :] ^ ctx.elements[:, None]
    masks = np.zeros((q, q), dtype=bool)
    masks[np.arange(q)[:, None], idx] = True
    return np.packbits(masks, axis=1, bitorder="little")


@dataclass(frozen=True, eq=False)
class OrbitDesign:
    ctx: FieldCtx
    base: Block
    packed: np.ndarray  # (num_blocks, row_bytes) uint8, sorted unique rows
    stab_order: int

    @property
    def num_blocks(self) -> int:
        return int(self.packed.shape[0])

    @property
    def v(self) -> int:
        return self.ctx.q

    @property
    def k(self) -> int:
        return self.base.k

    @cached_property
    def incidence(self) -> np.ndarray:
        """Boolean (num_blocks, q) block-by-point incidence matrix."""
        inc = np.unpackbits(self.packed, axis=1, bitorder="little")[:, : self.ctx.q]
        inc = inc.astype(bool)
        inc.setflags(write=False)
        return inc

    def block(self, j: int) -> Block:
        return Block(self.ctx, self.incidence[j])

    def blocks(self):
        for j in range(self.num_blocks):
            yield self.block(j)

    def block_set(self) -> set[bytes]:
        return {row.tobytes() for row in self.packed}

    def __contains__(self, block: Block) -> bool:
        return block.packed() in self.block_set()

    def to_json(self, label: str = "") -> dict:
        return {
            **self.base.to_json(label or "orbit"),
            "stab_order": self.stab_order,
            "num_blocks": self.num_blocks,
            "blocks": [format(int.from_bytes(r.tobytes(), "little"), "#x") for r in self.packed],
        }

    @classmethod
    def from_json(cls, data: dict) -> "OrbitDesign":
        base = Block.from_json(data)
        ctx = base.ctx
        rb = _row_bytes(ctx.q)
        rows = [int(h, 16).to_bytes(rb, "little") for h in data["blocks"]]
        packed = np.frombuffer(b"".join(rows), dtype=np.uint8).reshape(len(rows), rb)
        if len(rows) != data.get("num_blocks", len(rows)):
            raise ValueError("num_blocks does not match the block list")
        return cls(ctx, base, np.unique(packed, axis=0), int(data["stab_order"]))

    def to_binary(self) -> bytes:
        header = _HEADER.pack(BINARY_MAGIC, BINARY_VERSION, self.ctx.n, 0, self.ctx.modulus,
                              self.stab_order, self.num_blocks)
        return header + self.packed.tobytes()

    @classmethod
    def from_binary(cls, data: bytes, base: Block | None = None) -> "OrbitDesign":
        magic, version, n, _, modulus, stab, nb = _HEADER.unpack_from(data)
        if magic != BINARY_MAGIC or version != BINARY_VERSION:
            raise ValueError("not an orbit file")
        ctx = FieldCtx(n, modulus)
        rb = _row_bytes(ctx.q)
        body = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
        if body.size != nb * rb:
            raise ValueError("truncated orbit file")
        packed = body.reshape(nb, rb).copy()
        if base is None:
            base = Block(ctx, np.unpackbits(packed[0], bitorder="little")[: ctx.q].astype(bool))
        return cls(ctx, base, packed, stab)


def orbit(block: Block) -> OrbitDesign:
    """All q(q-1) images of the block, deduplicated."""
    ctx = block.ctx
    parts = [_images_for_scale(ctx, block.members, a) for a in range(1, ctx.q)]
    packed = np.unique(np.concatenate(parts), axis=0)
    num = packed.shape[0]
    return OrbitDesign(ctx, block, packed, ctx.q * (ctx.q - 1) // num)


def orbit_size(block: Block) -> int:
    """Distinct image count without keeping an orbit matrix; for large n."""
    ctx = block.ctx
    seen: set[bytes] = set()
    for a in range(1, ctx.q):
        imgs = np.unique(_images_for_scale(ctx, block.members, a), axis=0)
        seen.update(r.tobytes() for r in imgs)
    return len(seen)


def stabilizer(block: Block) -> list[AffineMap]:
    ctx = block.ctx
    out = []
    members = block.members
    for a in range(1, ctx.q):
        idx = ctx.mul_vec(a, members)[None, :] ^ ctx.elements[:, None]
        hits = np.flatnonzero(block.mask[idx].all(axis=1))
        out.extend(AffineMap(a, int(b)) for b in hits)
    return out


def stabilizer_order(block: Block) -> int:
    ctx = block.ctx
    if block.k == 0:
        return ctx.q * (ctx.q - 1)
    members = block.members
    total = 0
    for a in range(1, ctx.q):
        idx = ctx.mul_vec(a, members)[None, :] ^ ctx.elements[:, None]
        total += int(block.mask[idx].all(axis=1).sum())
    return total


def scaled_support_intersections(ctx: FieldCtx, supp_mask: np.ndarray) -> dict[int, int]:
    """|b*S intersect S| for every b outside GF(2)."""
    supp = np.flatnonzero(supp_mask)
    out = {}
    for b in range(2, ctx.q):
        out[b] = int(supp_mask[ctx.mul_vec(b, supp)].sum())
    return out


def check_stabilizer_criterion(block_e: Block, d: int, block_b: Block) -> bool:
    """Sufficient condition for a trivial stabilizer of ``block_b``.

    True iff f_E is semi-bent and no scaling b outside GF(2) fixes the support
    of its spectrum.  Requires W_B(mu) = W_E(mu^d); raises HypothesisError if
    not.  When the condition holds, the stabilizer of B is recomputed by brute
    force and must be trivial.
    """
    ctx = block_b.ctx
    wb = boolfn.walsh(boolfn.char_fn(block_b))
    we = boolfn.walsh(boolfn.char_fn(block_e))
    if not boolfn.walsh_transfer_holds(wb, we, d):
        raise HypothesisError(f"W_B(mu) != W_E(mu^{d}) for some mu")
    if ctx.n % 2 == 0 or not boolfn.is_semibent(we):
        return False
    supp = boolfn.support_mask(we)
    size = int(supp.sum())
    if any(c == size for c in scaled_support_intersections(ctx, supp).values()):
        return False
    stab = stabilizer_order(block_b)
    if stab != 1:
        raise AssertionError(f"criterion holds but the brute-force stabilizer has order {stab}")
    return True
