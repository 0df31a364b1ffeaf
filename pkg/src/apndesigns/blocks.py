"""Base blocks: exponent catalogs and the KA, AP and OV constructions.

A ``Block`` is a subset of GF(q) held as a length-q boolean mask (authoritative)
with the sorted member list derived from it.  Exponents that stand for
fractions such as 1/(2^i+1) are realised as inverses modulo q-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import PreconditionError
from .gf2n import FieldCtx, exp_inverse, make_field


@dataclass(frozen=True, eq=False)
class Block:
    ctx: FieldCtx
    mask: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        if m.shape != (self.ctx.q,):
            raise PreconditionError(f"block mask must have length {self.ctx.q}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_members(cls, ctx: FieldCtx, members) -> "Block":
        mask = np.zeros(ctx.q, dtype=bool)
        idx = np.asarray(list(members) if not isinstance(members, np.ndarray) else members,
                         dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= ctx.q):
            raise PreconditionError("block member outside GF(q)")
        mask[idx] = True
        return cls(ctx, mask)

    @classmethod
    def from_bits(cls, ctx: FieldCtx, bits: int) -> "Block":
        raw = bits.to_bytes(max(1, (ctx.q + 7) // 8), "little")
        mask = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[: ctx.q]
        return cls(ctx, mask.astype(bool))

    @cached_property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def k(self) -> int:
        return int(self.members.size)

    def __len__(self):
        return self.k

    def __contains__(self, x) -> bool:
        return bool(self.mask[x])

    def packed(self) -> bytes:
        return np.packbits(self.mask, bitorder="little").tobytes()

    @property
    def bits(self) -> int:
        return int.from_bytes(self.packed(), "little")

    def __eq__(self, other):
        return isinstance(other, Block) and self.ctx == other.ctx and np.array_equal(
            self.mask, other.mask
        )

    def __hash__(self):
        return hash((self.ctx, self.packed()))

    def __repr__(self):
        return f"Block(n={self.ctx.n}, k={self.k})"

    def complement(self) -> "Block":
        return Block(self.ctx, ~self.mask)

    def to_json(self, construction: str = "explicit", params: dict | None = None) -> dict:
        return {
            **self.ctx.to_json(),
            "construction": construction,
            "params": dict(params or {}),
            "members": [format(int(x), "#x") for x in self.members],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Block":
        ctx = FieldCtx.from_json(data)
        return cls.from_members(ctx, [int(m, 16) for m in data["members"]])


# -- exponent catalogs ------------------------------------------------------

APN_FAMILIES = ("Gold", "Kasami", "Welch", "NihoA", "NihoB", "Inverse", "Dobbertin")
OVAL_FAMILIES = ("TransOval", "SegreOval", "GlynnIOval", "GlynnIIOval")

_ALIASES = {f.lower(): f for f in APN_FAMILIES + OVAL_FAMILIES}
_ALIASES.update({
    "niho": "Niho",
    "trans": "TransOval",
    "segre": "SegreOval",
    "glynn1": "GlynnIOval",
    "glynni": "GlynnIOval",
    "glynn2": "GlynnIIOval",
    "glynnii": "GlynnIIOval",
})


@dataclass(frozen=True)
class ExponentCatalogEntry:
    family: str
    exponent: int
    params: dict = field(default_factory=dict)
    bar: bool = False

    @property
    def label(self) -> str:
        p = ",".join(f"{k}={v}" for k, v in self.params.items())
        name = f"{self.family}{'-bar' if self.bar else ''}"
        return f"{name}({p})" if p else name


def _family(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise PreconditionError(f"unknown exponent family {name!r}") from None


def _need_odd(n, family):
    if n % 2 == 0:
        raise PreconditionError(f"{family} exponent needs n odd, got n={n}")


def _need_coprime(i, n, family):
    if i is None or i < 1:
        raise PreconditionError(f"{family} exponent needs a positive parameter i")
    if math.gcd(i, n) != 1:
        raise PreconditionError(f"{family} exponent needs gcd(i, n) = 1, got gcd({i},{n}) = {math.gcd(i, n)}")


def apn_exponent(family: str, n: int, i: int | None = None) -> int:
    fam = _family(family)
    if fam == "Gold":
        _need_coprime(i, n, fam)
        return 2**i + 1
    if fam == "Kasami":
        _need_coprime(i, n, fam)
        return 2 ** (2 * i) - 2**i + 1
    if fam == "Welch":
        _need_odd(n, fam)
        return 2 ** ((n - 1) // 2) + 3
    if fam in ("Niho", "NihoA", "NihoB"):
        _need_odd(n, fam)
        if fam == "Niho":
            fam = "NihoA" if n % 4 == 1 else "NihoB"
        if fam == "NihoA":
            if n % 4 != 1:
                raise PreconditionError(f"NihoA needs n = 1 mod 4, got n={n}")
            return 2 ** ((n - 1) // 2) + 2 ** ((n - 1) // 4) - 1
        if n % 4 != 3:
            raise PreconditionError(f"NihoB needs n = 3 mod 4, got n={n}")
        return 2 ** ((n - 1) // 2) + 2 ** ((3 * n - 1) // 4) - 1
    if fam == "Inverse":
        _need_odd(n, fam)
        return 2**n - 2
    if fam == "Dobbertin":
        if n % 5:
            raise PreconditionError(f"Dobbertin exponent needs n = 0 mod 5, got n={n}")
        m = n // 5
        return 2 ** (4 * m) + 2 ** (3 * m) + 2 ** (2 * m) + 2**m - 1
    raise PreconditionError(f"{fam} is not an APN family")


def oval_exponent(family: str, n: int, i: int | None = None, bar: bool = False) -> int:
    fam = _family(family)
    if fam == "TransOval":
        _need_coprime(i, n, fam)
        s = 2**i
    elif fam == "SegreOval":
        _need_odd(n, fam)
        s = 6
    elif fam == "GlynnIOval":
        _need_odd(n, fam)
        s = 3 * 2 ** ((n + 1) // 2) + 4
    elif fam == "GlynnIIOval":
        _need_odd(n, fam)
        if n % 4 == 1:
            s = 2 ** ((n + 1) // 2) + 2 ** ((3 * n + 1) // 4)
        else:
            s = 2 ** ((n + 1) // 2) + 2 ** ((n + 1) // 4)
    else:
        raise PreconditionError(f"{fam} is not an o-monomial family")
    q = 2**n
    s %= q - 1
    return ominomial_bar(s, q) if bar else s


def ominomial_bar(s: int, q: int) -> int:
    """Exponent of x * (x^(q-2))^s, i.e. 1 - s mod q-1."""
    return (1 - s) % (q - 1)


def apn_catalog(n: int) -> list[ExponentCatalogEntry]:
    out = []
    for fam in ("Gold", "Kasami"):
        for i in range(1, n):
            if math.gcd(i, n) == 1:
                out.append(ExponentCatalogEntry(fam, apn_exponent(fam, n, i), {"i": i}))
    for fam in ("Welch", "Niho", "Inverse", "Dobbertin"):
        try:
            out.append(ExponentCatalogEntry(fam, apn_exponent(fam, n)))
        except PreconditionError:
            pass
    return out


def oval_catalog(n: int) -> list[ExponentCatalogEntry]:
    out = []
    for i in range(1, n):
        if math.gcd(i, n) == 1:
            for bar in (False, True):
                out.append(ExponentCatalogEntry(
                    "TransOval", oval_exponent("TransOval", n, i, bar), {"i": i}, bar))
    if n % 2:
        for fam in ("SegreOval", "GlynnIOval", "GlynnIIOval"):
            for bar in (False, True):
                out.append(ExponentCatalogEntry(fam, oval_exponent(fam, n, bar=bar), {}, bar))
    return out


def is_apn(ctx: FieldCtx, s: int) -> bool:
    """Every derivative x^s + (x+a)^s, a != 0, takes each value at most twice."""
    pw = ctx.power_map(s)
    x = ctx.elements
    chunk = max(1, (1 << 22) // ctx.q)
    for start in range(1, ctx.q, chunk):
        a = np.arange(start, min(ctx.q, start + chunk))
        deriv = pw[x[None, :] ^ a[:, None]] ^ pw[None, :]
        # per-row value counts via offset bincount
        flat = (deriv + (np.arange(a.size) * ctx.q)[:, None]).ravel()
        if np.bincount(flat, minlength=a.size * ctx.q).max() > 2:
            return False
    return True


def is_two_to_one(values: np.ndarray) -> bool:
    counts = np.bincount(values, minlength=values.size)
    return bool(np.all((counts == 0) | (counts == 2)))


def is_ominomial(ctx: FieldCtx, s: int) -> bool:
    """x^s + a x is 2-to-1 for every a != 0."""
    pw = ctx.power_map(s)
    x = ctx.elements
    return all(is_two_to_one(pw ^ ctx.mul_vec(a, x)) for a in range(1, ctx.q))


def _image_block(ctx: FieldCtx, values: np.ndarray) -> Block:
    mask = np.zeros(ctx.q, dtype=bool)
    mask[values] = True
    return Block(ctx, mask)


def kasami_block(ctx: FieldCtx, i: int) -> Block:
    """GF(q) minus the image of x -> ((x+1)^s + x^s + 1)^(1/(2^i+1)), s Kasami."""
    _need_odd(ctx.n, "Kasami block")
    _need_coprime(i, ctx.n, "Kasami block")
    s = apn_exponent("Kasami", ctx.n, i)
    root = exp_inverse(2**i + 1, ctx.order)
    pw = ctx.power_map(s)
    x = ctx.elements
    inner = pw[x ^ 1] ^ pw ^ 1
    return _image_block(ctx, ctx.pow_vec(inner, root)).complement()


def apn_image_block(ctx: FieldCtx, s: int, check_apn: bool = True) -> Block:
    """Image of x -> (x+1)^s + x^s for an APN permutation exponent s."""
    if math.gcd(s, ctx.order) != 1:
        raise PreconditionError(f"gcd(s, q-1) = {math.gcd(s, ctx.order)} for s={s}; need 1")
    if check_apn and not is_apn(ctx, s):
        raise PreconditionError(f"x^{s} is not APN over GF(2^{ctx.n})")
    pw = ctx.power_map(s)
    return _image_block(ctx, pw[ctx.elements ^ 1] ^ pw)


def oval_block(ctx: FieldCtx, s: int, check_catalog: bool = True) -> Block:
    """Image of x -> x^s + x for a cataloged o-monomial exponent."""
    if check_catalog:
        known = {e.exponent for e in oval_catalog(ctx.n)}
        if s % ctx.order not in known:
            raise PreconditionError(f"x^{s} is not a cataloged o-monomial for n={ctx.n}")
    return _image_block(ctx, ctx.power_map(s) ^ ctx.elements)


def random_block(ctx: FieldCtx, k: int, rng: np.random.Generator) -> Block:
    if not 0 <= k <= ctx.q:
        raise PreconditionError(f"block size {k} outside 0..{ctx.q}")
    return Block.from_members(ctx, rng.choice(ctx.q, size=k, replace=False))


def kasami_transfer(ctx: FieldCtx, i: int) -> tuple[Block, int]:
    """(E, d) with E = {Tr(x^3) = 1} and d = (2^i+1)/3, for the Kasami block."""
    d = (2**i + 1) * exp_inverse(3, ctx.order) % ctx.order
    return trace_one_set(ctx, 3), d


def ap_kasami_transfer(ctx: FieldCtx, i: int) -> tuple[Block, int]:
    """(E, d) with E = {Tr(x^(2^i+1)) = 1}, d = 1/s, for AP with a Kasami exponent."""
    s = apn_exponent("Kasami", ctx.n, i)
    return trace_one_set(ctx, 2**i + 1), exp_inverse(s, ctx.order)


def trace_one_set(ctx: FieldCtx, t: int) -> Block:
    return Block(ctx, ctx.trace_vec(ctx.power_map(t)).astype(bool))


def construct(label: str) -> Block:
    """Build a block from a label such as ``KA_5_1``, ``AP_5_13`` or ``OV_5_6``."""
    kind, n, p = parse_label(label)
    ctx = make_field(n)
    if kind == "KA":
        return kasami_block(ctx, p)
    if kind == "AP":
        return apn_image_block(ctx, p)
    return oval_block(ctx, p)


def parse_label(label: str) -> tuple[str, int, int]:
    parts = label.replace("{", "_").replace("}", "").replace(",", "_").split("_")
    parts = [p for p in parts if p]
    if len(parts) != 3 or parts[0].upper() not in ("KA", "AP", "OV"):
        raise PreconditionError(f"bad design label {label!r}; expected e.g. KA_5_1")
    try:
        return parts[0].upper(), int(parts[1]), int(parts[2])
    except ValueError:
        raise PreconditionError(f"bad design label {label!r}") from None
