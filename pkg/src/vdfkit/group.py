"""Arithmetic in RSA groups of unknown order and in prime fields.

Group elements are plain ``int`` residues in ``[1, N)``; the group object
carries the modulus and performs every operation, so op counting lives in
one place. Counting is scoped with :func:`measure`.
"""
from __future__ import annotations

import hashlib
import math
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Iterator, Optional

import gmpy2

TAG_GROUP = b"H_G:"
TAG_PRIME = b"H_prime:"
TAG_FS = b"FS:"
TAG_SETUP = b"setup:"


class MissingTrapdoor(Exception):
    """Raised when a trapdoor-only operation is asked of a public group."""


class ChainBudgetExceeded(Exception):
    """Raised when a square chain longer than the active budget is requested."""


# ---------------------------------------------------------------------------
# operation counting
# ---------------------------------------------------------------------------


@dataclass
class OpCounter:
    squarings: int = 0
    multiplications: int = 0
    reductions: int = 0

    @property
    def group_ops(self) -> int:
        return self.squarings + self.multiplications

    def reset(self) -> None:
        self.squarings = self.multiplications = self.reductions = 0

    def as_dict(self) -> dict:
        return {
            "squarings": self.squarings,
            "multiplications": self.multiplications,
            "reductions": self.reductions,
        }


_counters: ContextVar[tuple] = ContextVar("vdfkit_counters", default=())
_chain_limit: ContextVar[Optional[int]] = ContextVar("vdfkit_chain_limit", default=None)


@contextmanager
def measure() -> Iterator[OpCounter]:
    """Open a measurement region; nested regions also feed enclosing ones."""
    counter = OpCounter()
    token = _counters.set(_counters.get() + (counter,))
    try:
        yield counter
    finally:
        _counters.reset(token)


@contextmanager
def chain_limit(max_steps: int) -> Iterator[None]:
    """Forbid :meth:`UnknownOrderGroup.square_chain` calls longer than ``max_steps``."""
    token = _chain_limit.set(max_steps)
    try:
        yield
    finally:
        _chain_limit.reset(token)


def _count(squarings: int = 0, multiplications: int = 0) -> None:
    for c in _counters.get():
        c.squarings += squarings
        c.multiplications += multiplications
        c.reductions += squarings + multiplications


# ---------------------------------------------------------------------------
# encoding / hashing helpers
# ---------------------------------------------------------------------------


def int_to_hex(v: int) -> str:
    return v.to_bytes(max(1, (v.bit_length() + 7) // 8), "big").hex()


def hex_to_int(s: str) -> int:
    if not isinstance(s, str) or not s:
        raise ValueError("expected a non-empty hex string")
    return int(s, 16)


def frame(*fields: bytes | int | str) -> bytes:
    """Unambiguous length-prefixed concatenation used as oracle input."""
    out = bytearray()
    for f in fields:
        if isinstance(f, int):
            f = int_to_bytes(f)
        elif isinstance(f, str):
            f = f.encode()
        out += len(f).to_bytes(4, "big") + f
    return bytes(out)


def int_to_bytes(v: int, width: int = 0) -> bytes:
    width = max(width, (v.bit_length() + 7) // 8, 1)
    return v.to_bytes(width, "big")


def _xof(tag: bytes, data: bytes, nbits: int) -> int:
    nbytes = (nbits + 7) // 8
    raw = hashlib.shake_256(tag + data).digest(nbytes)
    return int.from_bytes(raw, "big") >> (8 * nbytes - nbits)


def is_prime(n: int) -> bool:
    # GMP runs BPSW plus extra Miller-Rabin rounds; BPSW is exact below 2**64.
    return n >= 2 and bool(gmpy2.is_prime(n, 40))


def hash_to_prime(data: bytes, bits: int) -> int:
    """Deterministic prime in ``[2**(bits-1), 2**bits)`` derived from ``data``."""
    if bits < 8:
        raise ValueError("hash_to_prime needs at least 8 bits")
    ctr = 0
    while True:
        c = _xof(TAG_PRIME, frame(bits, data, ctr), bits)
        c |= (1 << (bits - 1)) | 1
        if is_prime(c):
            return c
        ctr += 1


def challenge_int(data: bytes, bits: int) -> int:
    """Fiat-Shamir integer challenge in ``[0, 2**bits)``."""
    return _xof(TAG_FS, frame(bits, data), bits)


def _seeded_prime(seed: bytes, label: bytes, bits: int, mod4: Optional[int] = None,
                  avoid: int = 0) -> int:
    ctr = 0
    while True:
        c = _xof(TAG_SETUP, frame(seed, label, bits, ctr), bits)
        c |= (1 << (bits - 1)) | 1
        if mod4 is not None:
            c = (c & ~3) | mod4
        if c != avoid and c.bit_length() == bits and is_prime(c):
            return c
        ctr += 1


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnknownOrderGroup:
    """The multiplicative group modulo an RSA modulus ``N``.

    ``phi`` is the trapdoor. It is only reachable through :meth:`trapdoor`
    and is never serialized.
    """

    modulus: int
    _phi: Optional[int] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.modulus < 15 or self.modulus % 2 == 0:
            raise ValueError("modulus must be odd and at least 15")

    @property
    def bits(self) -> int:
        return self.modulus.bit_length()

    @property
    def element_bytes(self) -> int:
        return (self.bits + 7) // 8

    @property
    def has_trapdoor(self) -> bool:
        return self._phi is not None

    def trapdoor(self) -> int:
        if self._phi is None:
            raise MissingTrapdoor("group was built without its trapdoor")
        return self._phi

    def public(self) -> "UnknownOrderGroup":
        return UnknownOrderGroup(self.modulus)

    # -- elements --------------------------------------------------------

    def is_unit(self, v: int) -> bool:
        return 0 < v < self.modulus and math.gcd(v, self.modulus) == 1

    def encode(self, v: int) -> bytes:
        return v.to_bytes(self.element_bytes, "big")

    def decode(self, raw: bytes) -> int:
        v = int.from_bytes(raw, "big")
        if len(raw) != self.element_bytes or not 0 < v < self.modulus:
            raise ValueError("not a canonical group element")
        return v

    # -- arithmetic ------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        _count(multiplications=1)
        return a * b % self.modulus

    def square(self, a: int) -> int:
        _count(squarings=1)
        return a * a % self.modulus

    def pow(self, g: int, e: int) -> int:
        """``g**e mod N``; counted at the cost of left-to-right binary exponentiation."""
        if e < 0:
            raise ValueError("negative exponent")
        if e == 0:
            return 1 % self.modulus
        _count(squarings=e.bit_length() - 1, multiplications=e.bit_count() - 1)
        return pow(g, e, self.modulus)

    def square_chain(self, g: int, k: int) -> int:
        """``g**(2**k) mod N`` by ``k`` sequential squarings."""
        if k < 0:
            raise ValueError("negative chain length")
        limit = _chain_limit.get()
        if limit is not None and k > limit:
            raise ChainBudgetExceeded(f"square_chain({k}) exceeds budget {limit}")
        n = gmpy2.mpz(self.modulus)
        x = gmpy2.mpz(g)
        for _ in range(k):
            x = x * x % n
        _count(squarings=k)
        return int(x)

    def square_chain_checkpoints(self, g: int, k: int) -> list[int]:
        """All intermediate values ``[g, g**2, ..., g**(2**k)]`` of one chain."""
        n = gmpy2.mpz(self.modulus)
        x = gmpy2.mpz(g)
        out = [g]
        for _ in range(k):
            x = x * x % n
            out.append(int(x))
        _count(squarings=k)
        return out

    def trapdoor_pow2(self, g: int, k: int) -> int:
        """``g**(2**k)`` via the reduced exponent ``2**k mod phi(N)``."""
        e = pow(2, k, self.trapdoor())
        return self.pow(g, e)

    def descriptor(self) -> dict:
        return {"modulus_hex": int_to_hex(self.modulus), "bits": self.bits}

    @classmethod
    def from_descriptor(cls, d: dict) -> "UnknownOrderGroup":
        g = cls(hex_to_int(d["modulus_hex"]))
        if "bits" in d and int(d["bits"]) != g.bits:
            raise ValueError("group descriptor bit length mismatch")
        return g


def sample_group(lam: int, seed: bytes) -> UnknownOrderGroup:
    """Deterministic RSA group with two distinct primes of about ``lam/2`` bits."""
    if lam < 6:
        raise ValueError("lambda must be at least 6 (two distinct odd primes)")
    if not seed:
        raise ValueError("seed must be non-empty")
    pbits = lam // 2
    qbits = lam - pbits
    p = _seeded_prime(seed, b"p", pbits)
    q = _seeded_prime(seed, b"q", qbits, avoid=p)
    return UnknownOrderGroup(p * q, (p - 1) * (q - 1))


def hash_to_group(data: bytes, group: UnknownOrderGroup) -> int:
    """Map bytes to a unit of ``group`` (rejection with a counter)."""
    if not data:
        raise ValueError("hash_to_group input must be non-empty")
    ctr = 0
    while True:
        v = _xof(TAG_GROUP, frame(group.modulus, data, ctr), group.bits + 64) % group.modulus
        if group.is_unit(v):
            return v
        ctr += 1


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self) -> None:
        if self.p % 4 != 3:
            raise ValueError("p must be 3 mod 4")
        if not is_prime(self.p):
            raise ValueError("p is not prime")

    @property
    def bits(self) -> int:
        return self.p.bit_length()

    @property
    def element_bytes(self) -> int:
        return (self.bits + 7) // 8

    @property
    def modulus(self) -> int:
        return self.p

    def encode(self, v: int) -> bytes:
        return v.to_bytes(self.element_bytes, "big")

    def decode(self, raw: bytes) -> int:
        v = int.from_bytes(raw, "big")
        if len(raw) != self.element_bytes or not 0 < v < self.p:
            raise ValueError("not a canonical field element")
        return v

    def is_qr(self, x: int) -> bool:
        x %= self.p
        return x != 0 and pow(x, (self.p - 1) // 2, self.p) == 1

    def mul(self, a: int, b: int) -> int:
        _count(multiplications=1)
        return a * b % self.p

    def square(self, a: int) -> int:
        _count(squarings=1)
        return a * a % self.p

    def pow(self, g: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent")
        if e == 0:
            return 1
        _count(squarings=e.bit_length() - 1, multiplications=e.bit_count() - 1)
        return pow(g, e, self.p)

    def square_chain(self, g: int, k: int) -> int:
        x = g
        for _ in range(k):
            x = x * x % self.p
        _count(squarings=k)
        return x

    def hash_to_qr(self, data: bytes) -> int:
        if not data:
            raise ValueError("input must be non-empty")
        ctr = 0
        while True:
            v = _xof(TAG_GROUP, frame(self.p, data, ctr), self.bits + 64) % self.p
            if v:
                return v * v % self.p
            ctr += 1

    def descriptor(self) -> dict:
        return {"p_hex": int_to_hex(self.p), "bits": self.bits}

    @classmethod
    def from_descriptor(cls, d: dict) -> "PrimeField":
        return cls(hex_to_int(d["p_hex"]))


def sample_field(bits: int, seed: bytes) -> PrimeField:
    if bits < 3:
        raise ValueError("need at least 3 bits for p = 3 mod 4")
    return PrimeField(_seeded_prime(seed, b"dn", bits, mod4=3))
