"""Dwork-Naor square roots, the RSW time-lock puzzle, and the Pietrzak and
Wesolowski proofs of exponentiation.

Each protocol is available as plain functions over ``(group, g, y, T)`` and
wrapped as a :class:`~vdfkit.core.VdfScheme` for the generic machinery.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import (
    ChallengeSource,
    FiatShamir,
    Input,
    Proof,
    Round,
    VdfParams,
    VdfScheme,
    check_integer_challenge,
    check_prime_challenge,
)
from .group import (
    PrimeField,
    UnknownOrderGroup,
    frame,
    hash_to_group,
    sample_field,
    sample_group,
)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


# ---------------------------------------------------------------------------
# Dwork-Naor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DworkNaorParams:
    field: PrimeField


def dn_eval(params: DworkNaorParams, x: int) -> int:
    """Square root of a quadratic residue via ``x**((p+1)/4)``."""
    f = params.field
    x %= f.p
    if not f.is_qr(x):
        raise ValueError(f"{x} is not a quadratic residue mod {f.p}")
    return f.pow(x, (f.p + 1) // 4)


def dn_verify(params: DworkNaorParams, x: int, y: int) -> bool:
    f = params.field
    return f.square(y % f.p) == x % f.p


# ---------------------------------------------------------------------------
# RSW
# ---------------------------------------------------------------------------


def rsw_eval(group: UnknownOrderGroup, g: int, T: int) -> int:
    return group.square_chain(g, T)


def rsw_trapdoor_eval(group: UnknownOrderGroup, g: int, T: int) -> int:
    return group.trapdoor_pow2(g, T)


# ---------------------------------------------------------------------------
# Pietrzak
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PietrzakRound:
    z: int
    r: int
    g: int
    y: int
    T: int


def pietrzak_challenge_input(group: UnknownOrderGroup, g: int, y: int, z: int, T: int) -> bytes:
    return frame(b"pietrzak", group.encode(g), group.encode(y), group.encode(z), T)


def pietrzak_open(group: UnknownOrderGroup, g: int, y: int, T: int,
                  source: ChallengeSource, lam: int, *, check_identity: bool = False,
                  trace: Optional[list] = None) -> tuple[list, list]:
    """Halving protocol: emit midpoints, fold on each challenge until ``T == 1``.

    Returns ``(midpoints, rounds)``. With ``check_identity`` every level
    asserts ``z**r * y == (g**r * z)**(2**(T/2))`` by direct recomputation.
    """
    if not is_power_of_two(T):
        raise ValueError(f"Pietrzak needs T a power of two, got {T}")
    rounds = [Round(group.encode(y))]
    proof = []
    while T > 1:
        half = T // 2
        z = group.square_chain(g, half)
        r = check_integer_challenge(source.integer(pietrzak_challenge_input(group, g, y, z, T), lam), lam)
        rounds.append(Round(group.encode(z), r))
        proof.append(z)
        g_next = group.mul(group.pow(g, r), z)
        y_next = group.mul(group.pow(z, r), y)
        if check_identity:
            assert group.square_chain(g_next, half) == y_next, "halving identity violated"
        if trace is not None:
            trace.append(PietrzakRound(z, r, g_next, y_next, half))
        g, y, T = g_next, y_next, half
    return proof, rounds


def pietrzak_verify(group: UnknownOrderGroup, g: int, y: int, T: int, proof,
                    source: ChallengeSource, lam: int) -> bool:
    if not is_power_of_two(T) or len(proof) != T.bit_length() - 1:
        return False
    for z in proof:
        if not 0 < z < group.modulus:
            return False
        r = check_integer_challenge(source.integer(pietrzak_challenge_input(group, g, y, z, T), lam), lam)
        g, y = group.mul(group.pow(g, r), z), group.mul(group.pow(z, r), y)
        T //= 2
    return y == group.square(g)


def pietrzak_merge(group: UnknownOrderGroup, proof_g_to_h, proof_h_to_y, g: int, h: int,
                   y: int, T: int, lam: int, oracle: Optional[ChallengeSource] = None) -> list:
    """Combine delay-``T`` proofs for ``g -> h`` and ``h -> y`` into one for ``g -> y`` at ``2T``.

    The head of the merged proof is ``h``; the tail proves ``u -> v`` at
    delay ``T`` with ``u = g**r * h`` and ``v = h**r * y``.
    """
    oracle = oracle or FiatShamir()
    if not pietrzak_verify(group, g, h, T, proof_g_to_h, oracle, lam):
        raise ValueError("first proof does not verify")
    if not pietrzak_verify(group, h, y, T, proof_h_to_y, oracle, lam):
        raise ValueError("second proof does not verify")
    r = check_integer_challenge(oracle.integer(pietrzak_challenge_input(group, g, y, h, 2 * T), lam), lam)
    u = group.mul(group.pow(g, r), h)
    v = group.mul(group.pow(h, r), y)
    tail, _ = pietrzak_open(group, u, v, T, oracle, lam)
    return [h] + tail


# ---------------------------------------------------------------------------
# Wesolowski
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WesolowskiProof:
    pi: int
    ell: int
    remainder: int


def wesolowski_challenge_input(group: UnknownOrderGroup, g: int, y: int) -> bytes:
    return group.encode(g) + group.encode(y)


def wesolowski_pi_from_checkpoints(group: UnknownOrderGroup, checkpoints: list, T: int,
                                   ell: int) -> int:
    """``g**(2**T // ell)`` as a product of stored powers ``g**(2**j)``."""
    q = (1 << T) // ell
    pi = 1
    j = 0
    while q:
        if q & 1:
            pi = group.mul(pi, checkpoints[j])
        q >>= 1
        j += 1
    return pi


def wesolowski_open(group: UnknownOrderGroup, g: int, y: int, T: int,
                    source: ChallengeSource, lam: int) -> tuple[WesolowskiProof, list]:
    ell = check_prime_challenge(source.prime(wesolowski_challenge_input(group, g, y), 2 * lam))
    q, _ = divmod(1 << T, ell)
    pi = group.pow(g, q)
    proof = WesolowskiProof(pi, ell, pow(2, T, ell))
    return proof, [Round(group.encode(y), ell), Round(group.encode(pi))]


def wesolowski_verify(group: UnknownOrderGroup, g: int, y: int, T: int, pi: int,
                      source: ChallengeSource, lam: int) -> bool:
    ell = check_prime_challenge(source.prime(wesolowski_challenge_input(group, g, y), 2 * lam))
    if not 0 < pi < group.modulus:
        return False
    r = pow(2, T, ell)
    return y == group.mul(group.pow(pi, ell), group.pow(g, r))


# ---------------------------------------------------------------------------
# scheme objects
# ---------------------------------------------------------------------------


class _GroupScheme(VdfScheme):
    def setup(self, lam, T, seed=b"vdfkit", *, modulus_bits=None, mode="fiat_shamir",
              domain="bytes", group=None):
        group = group or sample_group(modulus_bits or lam, seed)
        return VdfParams(lam, T, self.scheme_id, group, mode, domain)

    def to_element(self, params, x: Input) -> int:
        grp = params.group
        if isinstance(x, (bytes, bytearray)):
            if params.domain == "residue":
                raise ValueError("residue-domain parameters take integer inputs")
            return hash_to_group(bytes(x), grp)
        if not grp.is_unit(x):
            raise ValueError("input is not a unit of the group")
        return x

    def step(self, params, v, i):
        return params.group.square_chain(v, i)

    def in_range(self, params, v):
        return isinstance(v, int) and 0 < v < params.group.modulus

    def in_domain(self, params, v):
        return params.group.is_unit(v)


class RSW(_GroupScheme):
    """Time-lock puzzle; verification needs the trapdoor (a secret verifier)."""

    scheme_id = "rsw"
    proof_kind = "empty"

    def open_element(self, params, g, y, T, source):
        return Proof("empty"), [Round(params.group.encode(y))]

    def verify_element(self, params, g, y, T, proof, source):
        return len(proof) == 0 and rsw_trapdoor_eval(params.group, g, T) == y


class Pietrzak(_GroupScheme):
    scheme_id = "pietrzak"
    proof_kind = "vector"

    def setup(self, lam, T, seed=b"vdfkit", **kw):
        if not is_power_of_two(T):
            raise ValueError(f"Pietrzak needs T a power of two, got {T}")
        return super().setup(lam, T, seed, **kw)

    def open_element(self, params, g, y, T, source):
        proof, rounds = pietrzak_open(params.group, g, y, T, source, params.lam)
        return Proof("vector", tuple(proof)), rounds

    def verify_element(self, params, g, y, T, proof, source):
        return pietrzak_verify(params.group, g, y, T, proof.elements, source, params.lam)


class Wesolowski(_GroupScheme):
    scheme_id = "wesolowski"
    proof_kind = "single"

    def open_element(self, params, g, y, T, source):
        proof, rounds = wesolowski_open(params.group, g, y, T, source, params.lam)
        return Proof("single", (proof.pi,)), rounds

    def verify_element(self, params, g, y, T, proof, source):
        if len(proof) != 1:
            return False
        return wesolowski_verify(params.group, g, y, T, proof.elements[0], source, params.lam)


class DworkNaor(VdfScheme):
    """Iterated modular square roots over ``p = 3 mod 4``.

    ``T`` counts root extractions; verification squares ``T`` times, so it
    is linear in ``T`` like the original single-root pricing function.
    """

    scheme_id = "dwork_naor"
    proof_kind = "empty"
    linear_verify = True

    def setup(self, lam, T, seed=b"vdfkit", *, modulus_bits=None, mode="fiat_shamir",
              domain="residue", group=None):
        field = group or sample_field(modulus_bits or lam, seed)
        return VdfParams(lam, T, self.scheme_id, field, mode, domain)

    def is_permutation(self, params):
        return True

    def to_element(self, params, x: Input) -> int:
        f = params.group
        if isinstance(x, (bytes, bytearray)):
            return f.hash_to_qr(bytes(x))
        if not f.is_qr(x) or not 0 < x < f.p:
            raise ValueError(f"{x} is not a quadratic residue mod {f.p}")
        return x

    def step(self, params, v, i):
        f = params.group
        e = (f.p + 1) // 4
        for _ in range(i):
            v = f.pow(v, e)
        return v

    def in_range(self, params, v):
        return isinstance(v, int) and 0 < v < params.group.p

    def in_domain(self, params, v):
        return 0 < v < params.group.p and params.group.is_qr(v)

    def open_element(self, params, g, y, T, source):
        return Proof("empty"), [Round(params.group.encode(y))]

    def verify_element(self, params, g, y, T, proof, source):
        return len(proof) == 0 and params.group.square_chain(y, T) == g


SCHEMES = {
    "dwork_naor": DworkNaor(),
    "rsw": RSW(),
    "pietrzak": Pietrzak(),
    "wesolowski": Wesolowski(),
}


def get_scheme(scheme_id: str) -> VdfScheme:
    try:
        return SCHEMES[scheme_id]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme_id!r}") from None
