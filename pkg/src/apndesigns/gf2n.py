"""Arithmetic in GF(2^n), 2 <= n <= 16.

Elements are plain ints in ``[0, q)`` holding polynomial-basis coefficients
(bit j is the coefficient of x^j).  Each field is fixed to the numerically
smallest irreducible polynomial of its degree:

    n   modulus              n   modulus
    2   0x7     x^2+x+1      10  0x409   x^10+x^3+1
    3   0xb     x^3+x+1      11  0x805   x^11+x^2+1
    4   0x13    x^4+x+1      12  0x1009  x^12+x^3+1
    5   0x25    x^5+x^2+1    13  0x201b  x^13+x^4+x^3+x+1
    6   0x43    x^6+x+1      14  0x4021  x^14+x^5+1
    7   0x83    x^7+x+1      15  0x8003  x^15+x+1
    8   0x11b   AES poly     16  0x1002b x^16+x^5+x^3+x+1
    9   0x203   x^9+x+1

Scalar operations (``mul``, ``inv``, ``pow``, ``trace``) work by carry-less
multiplication and reduction.  The ``*_vec`` helpers operate on numpy arrays
through log/antilog tables built over a primitive element; the test-suite
checks the two paths against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import PreconditionError

MIN_DEGREE = 2
MAX_DEGREE = 16


def poly_degree(p: int) -> int:
    return p.bit_length() - 1


def poly_mod(a: int, m: int) -> int:
    """Remainder of a modulo m, both GF(2)[x] polynomials packed in ints."""
    dm = poly_degree(m)
    while a and poly_degree(a) >= dm:
        a ^= m << (poly_degree(a) - dm)
    return a


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def is_irreducible(p: int) -> bool:
    """Trial division by every polynomial of degree 1..deg(p)//2."""
    d = poly_degree(p)
    if d < 1:
        return False
    for f in range(2, 1 << (d // 2 + 1)):
        if poly_mod(p, f) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(n: int) -> int:
    for p in range(1 << n, 1 << (n + 1)):
        if is_irreducible(p):
            return p
    raise AssertionError("unreachable: irreducibles exist in every degree")


@dataclass(frozen=True)
class FieldCtx:
    n: int
    modulus: int

    def __post_init__(self):
        if not MIN_DEGREE <= self.n <= MAX_DEGREE:
            raise PreconditionError(f"n={self.n} outside {MIN_DEGREE}..{MAX_DEGREE}")
        if poly_degree(self.modulus) != self.n:
            raise PreconditionError(f"modulus {self.modulus:#x} does not have degree {self.n}")
        if not is_irreducible(self.modulus):
            raise PreconditionError(f"modulus {self.modulus:#x} is reducible")

    @property
    def q(self) -> int:
        return 1 << self.n

    @property
    def order(self) -> int:
        """Size of the multiplicative group, q - 1."""
        return (1 << self.n) - 1

    # -- scalar arithmetic -------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return poly_mod(clmul(a, b), self.modulus)

    def square(self, a: int) -> int:
        return self.mul(a, a)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 raised to a negative power")
            return 1 if e == 0 else 0
        e %= self.order
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.order - 1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def trace(self, a: int) -> int:
        t, x = 0, a
        for _ in range(self.n):
            t ^= x
            x = self.mul(x, x)
        # t lies in GF(2)
        return t

    # -- tables and vectorised arithmetic ----------------------------------

    @cached_property
    def generator(self) -> int:
        """Smallest primitive element."""
        factors = _prime_factors(self.order)
        for g in range(2, self.q):
            if all(self.pow(g, self.order // p) != 1 for p in factors):
                return g
        return 1  # q = 2 never happens (n >= 2)

    @cached_property
    def exp_table(self) -> np.ndarray:
        """exp_table[k] = g^k for 0 <= k < 2(q-1), doubled to skip a modulo."""
        t = np.empty(2 * self.order, dtype=np.int64)
        x = 1
        for k in range(self.order):
            t[k] = x
            x = self.mul(x, self.generator)
        t[self.order:] = t[: self.order]
        t.setflags(write=False)
        return t

    @cached_property
    def log_table(self) -> np.ndarray:
        """log_table[x] for x != 0; log_table[0] is a sentinel -1."""
        t = np.full(self.q, -1, dtype=np.int64)
        t[self.exp_table[: self.order]] = np.arange(self.order)
        t.setflags(write=False)
        return t

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Tr(x) for every x, uint8. Built from Tr of the basis (trace is linear)."""
        basis = [self.trace(1 << j) for j in range(self.n)]
        x = np.arange(self.q)
        t = np.zeros(self.q, dtype=np.uint8)
        for j, tj in enumerate(basis):
            if tj:
                t ^= ((x >> j) & 1).astype(np.uint8)
        t.setflags(write=False)
        return t

    @cached_property
    def elements(self) -> np.ndarray:
        e = np.arange(self.q, dtype=np.int64)
        e.setflags(write=False)
        return e

    def mul_vec(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la, lb = self.log_table[a], self.log_table[b]
        r = self.exp_table[np.where((la < 0) | (lb < 0), 0, la + lb)]
        return np.where((a == 0) | (b == 0), 0, r)

    def pow_vec(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if e < 0 and np.any(a == 0):
            raise ZeroDivisionError("0 raised to a negative power")
        la = self.log_table[a]
        r = self.exp_table[np.where(la < 0, 0, (la * (e % self.order)) % self.order)]
        zero_val = 1 if e == 0 else 0
        return np.where(a == 0, zero_val, r)

    def inv_vec(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("0 has no inverse")
        return self.exp_table[(self.order - self.log_table[a]) % self.order]

    def trace_vec(self, a) -> np.ndarray:
        return self.trace_table[np.asarray(a, dtype=np.int64)]

    def power_map(self, e: int) -> np.ndarray:
        """Table of x^e over all x (0^0 = 1)."""
        return self.pow_vec(self.elements, e)

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        return {"n": self.n, "modulus": format(self.modulus, "#x")}

    @classmethod
    def from_json(cls, data: dict) -> "FieldCtx":
        return cls(int(data["n"]), int(data["modulus"], 16))

    def elem_hex(self, a: int) -> str:
        return format(a, "#x")

    def check_elem(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise PreconditionError(f"{a} is not an element of GF(2^{self.n})")
        return a


def _prime_factors(m: int) -> list[int]:
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


@lru_cache(maxsize=None)
def make_field(n: int) -> FieldCtx:
    if not MIN_DEGREE <= n <= MAX_DEGREE:
        raise PreconditionError(f"n={n} outside {MIN_DEGREE}..{MAX_DEGREE}")
    return FieldCtx(n, smallest_irreducible(n))


def exp_inverse(e: int, m: int) -> int:
    """Inverse of e modulo m by extended Euclid; raises if gcd(e, m) != 1."""
    if m <= 0:
        raise PreconditionError("modulus must be positive")
    g, x = _egcd(e % m, m)
    if g != 1:
        raise PreconditionError(f"{e} has no inverse mod {m} (gcd {g})")
    return x % m


def _egcd(a: int, b: int) -> tuple[int, int]:
    x0, x1 = 1, 0
    while b:
        k = a // b
        a, b = b, a - k * b
        x0, x1 = x1, x0 - k * x1
    return a, x0


def is_unit(e: int, m: int) -> bool:
    return math.gcd(e, m) == 1
