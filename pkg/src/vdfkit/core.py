"""Scheme-agnostic VDF contract, interactive transcripts and the Fiat-Shamir compiler."""
from __future__ import annotations

import math
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence, Union

from .group import (
    ChainBudgetExceeded,
    PrimeField,
    UnknownOrderGroup,
    challenge_int,
    chain_limit,
    frame,
    hash_to_prime,
    hex_to_int,
    int_to_hex,
    is_prime,
)

SCHEME_IDS = ("dwork_naor", "rsw", "pietrzak", "wesolowski", "derived_from_rsvl")
MODES = ("interactive", "fiat_shamir")
DOMAINS = ("bytes", "residue")

Input = Union[bytes, int]


class ChallengeRejected(Exception):
    """The prover refuses a challenge (wrong range, not prime, transcript exhausted)."""


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VdfParams:
    lam: int
    T: int
    scheme_id: str
    group: Any
    mode: str = "fiat_shamir"
    domain: str = "bytes"

    def __post_init__(self) -> None:
        if self.scheme_id not in SCHEME_IDS:
            raise ValueError(f"unknown scheme {self.scheme_id!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.T < 1:
            raise ValueError("T must be at least 1")
        # stands in for T <= 2**o(lambda)
        if self.T >= 2 ** (self.lam / 2):
            raise ValueError(f"T={self.T} too large for lambda={self.lam}")

    @property
    def log_T(self) -> int:
        return max(1, math.ceil(math.log2(self.T)))

    def with_mode(self, mode: str) -> "VdfParams":
        return replace(self, mode=mode)


@dataclass(frozen=True)
class Statement:
    x: Input
    y: int
    T: int

    def encode(self, width: int) -> bytes:
        x = self.x if isinstance(self.x, bytes) else self.x.to_bytes(width, "big")
        return frame(x, self.y.to_bytes(width, "big"), self.T)


@dataclass(frozen=True)
class Proof:
    kind: str  # "empty" | "single" | "vector"
    elements: tuple = ()

    def __post_init__(self) -> None:
        if self.kind == "empty" and self.elements:
            raise ValueError("empty proof with elements")
        if self.kind == "single" and len(self.elements) != 1:
            raise ValueError("single proof needs exactly one element")

    def __len__(self) -> int:
        return len(self.elements)


@dataclass
class Round:
    message: bytes
    challenge: Optional[int] = None


@dataclass
class Transcript:
    rounds: list = field(default_factory=list)
    final_accept: bool = False
    aborted: bool = False

    def challenges(self) -> list:
        return [r.challenge for r in self.rounds if r.challenge is not None]

    def copy(self) -> "Transcript":
        return Transcript([Round(r.message, r.challenge) for r in self.rounds],
                          self.final_accept, self.aborted)


# ---------------------------------------------------------------------------
# challenge sources
# ---------------------------------------------------------------------------


class ChallengeSource(ABC):
    interactive = True

    @abstractmethod
    def integer(self, prefix: bytes, bits: int) -> int: ...

    @abstractmethod
    def prime(self, prefix: bytes, bits: int) -> int: ...


class VerifierRandom(ChallengeSource):
    """A live verifier drawing uniform challenges from a seeded generator."""

    def __init__(self, seed: Any = 0):
        self.rng = random.Random(seed)

    def integer(self, prefix: bytes, bits: int) -> int:
        return self.rng.getrandbits(bits)

    def prime(self, prefix: bytes, bits: int) -> int:
        while True:
            c = self.rng.getrandbits(bits) | (1 << (bits - 1)) | 1
            if is_prime(c):
                return c


class FiatShamir(ChallengeSource):
    """Challenges are oracle outputs on the running transcript state."""

    interactive = False

    def integer(self, prefix: bytes, bits: int) -> int:
        return challenge_int(prefix, bits)

    def prime(self, prefix: bytes, bits: int) -> int:
        return hash_to_prime(prefix, bits)


class Replay(ChallengeSource):
    """Hands out a fixed challenge sequence, ignoring the prefix."""

    def __init__(self, challenges: Sequence[int]):
        self._queue = list(challenges)
        self._pos = 0

    def _next(self) -> int:
        if self._pos >= len(self._queue):
            raise ChallengeRejected("challenge sequence exhausted")
        c = self._queue[self._pos]
        self._pos += 1
        return c

    def integer(self, prefix: bytes, bits: int) -> int:
        return self._next()

    def prime(self, prefix: bytes, bits: int) -> int:
        return self._next()

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._queue)


class Recorder(ChallengeSource):
    """Wraps a source and records the challenges it emits."""

    def __init__(self, inner: ChallengeSource):
        self.inner = inner
        self.interactive = inner.interactive
        self.seen: list = []

    def integer(self, prefix: bytes, bits: int) -> int:
        c = self.inner.integer(prefix, bits)
        self.seen.append(c)
        return c

    def prime(self, prefix: bytes, bits: int) -> int:
        c = self.inner.prime(prefix, bits)
        self.seen.append(c)
        return c


def check_integer_challenge(r: int, bits: int) -> int:
    if not isinstance(r, int) or not 0 <= r < 2 ** bits:
        raise ChallengeRejected(f"challenge {r!r} outside [0, 2^{bits})")
    return r


def check_prime_challenge(ell: int) -> int:
    if not isinstance(ell, int) or not is_prime(ell):
        raise ChallengeRejected(f"challenge {ell!r} is not prime")
    return ell


# ---------------------------------------------------------------------------
# scheme contract
# ---------------------------------------------------------------------------


class VdfScheme(ABC):
    """setup / eval / open / verify over a domain embedded into group elements.

    ``eval(params, x, steps)`` exposes the delay as a parameter so the
    reductions can evaluate any prefix of the chain. ``to_element`` is
    ``eval`` with zero steps and ``step(v, i)`` is the iterated function on
    the range.
    """

    scheme_id: str = ""
    proof_kind: str = "empty"
    # verification that inherently costs O(T) (no chain budget applies)
    linear_verify: bool = False
    non_interactive: bool = False

    @abstractmethod
    def setup(self, lam: int, T: int, seed: bytes = b"vdfkit", **kw) -> VdfParams: ...

    @abstractmethod
    def to_element(self, params: VdfParams, x: Input) -> int: ...

    @abstractmethod
    def step(self, params: VdfParams, v: int, i: int) -> int: ...

    @abstractmethod
    def in_range(self, params: VdfParams, v: int) -> bool: ...

    @abstractmethod
    def open_element(self, params: VdfParams, g: int, y: int, T: int,
                     source: ChallengeSource) -> tuple[Proof, list]: ...

    @abstractmethod
    def verify_element(self, params: VdfParams, g: int, y: int, T: int,
                       proof: Proof, source: ChallengeSource) -> bool: ...

    # -- derived helpers -------------------------------------------------

    def is_permutation(self, params: VdfParams) -> bool:
        return params.domain == "residue"

    def eval(self, params: VdfParams, x: Input, steps: Optional[int] = None) -> int:
        return self.step(params, self.to_element(params, x), params.T if steps is None else steps)

    def open(self, params: VdfParams, x: Input, y: int,
             source: Optional[ChallengeSource] = None) -> tuple[Proof, Transcript]:
        source = source or self.default_source(params)
        g = self.to_element(params, x)
        proof, rounds = self.open_element(params, g, y, params.T, source)
        return proof, Transcript(rounds)

    def verify(self, params: VdfParams, x: Input, y: int, proof: Proof,
               source: Optional[ChallengeSource] = None) -> bool:
        source = source or self.default_source(params)
        try:
            g = self.to_element(params, x)
        except ValueError:
            return False
        if not self.in_range(params, y):
            return False
        if self.linear_verify:
            return bool(self.verify_element(params, g, y, params.T, proof, source))
        budget = 4 * params.lam * params.log_T
        with chain_limit(budget):
            return bool(self.verify_element(params, g, y, params.T, proof, source))

    def default_source(self, params: VdfParams) -> ChallengeSource:
        if params.mode == "fiat_shamir":
            return FiatShamir()
        raise ValueError("interactive mode needs an explicit challenge source")

    # -- transcript codec -----------------------------------------------

    def element_codec(self, params: VdfParams):
        return params.group

    def proof_from_transcript(self, params: VdfParams, transcript: Transcript) -> tuple[int, Proof]:
        """Recover ``(y, proof)`` from the prover messages of a transcript."""
        codec = self.element_codec(params)
        if not transcript.rounds:
            raise ValueError("empty transcript")
        y = codec.decode(transcript.rounds[0].message)
        elems = tuple(codec.decode(r.message) for r in transcript.rounds[1:])
        if self.proof_kind == "empty":
            if elems:
                raise ValueError("unexpected proof messages")
            return y, Proof("empty")
        if self.proof_kind == "single":
            if len(elems) != 1:
                raise ValueError("expected one proof message")
            return y, Proof("single", elems)
        return y, Proof("vector", elems)


# ---------------------------------------------------------------------------
# driving the protocol
# ---------------------------------------------------------------------------


def verify_transcript(scheme: VdfScheme, params: VdfParams, statement: Statement,
                      transcript: Transcript) -> bool:
    """Interactive verifier: replays its own recorded challenges."""
    if transcript.aborted:
        return False
    try:
        y, proof = scheme.proof_from_transcript(params, transcript)
    except ValueError:
        return False
    if y != statement.y or statement.T != params.T:
        return False
    source = Replay(transcript.challenges())
    try:
        ok = scheme.verify(params, statement.x, y, proof, source)
    except (ChallengeRejected, ChainBudgetExceeded):
        return False
    return ok and source.exhausted


def run_interactive(scheme: VdfScheme, params: VdfParams, x: Input,
                    challenge_source: ChallengeSource):
    """Eval, then the open/challenge loop, then verify.

    Returns ``(statement, proof, transcript, accept)``.
    """
    y = scheme.eval(params, x)
    statement = Statement(x, y, params.T)
    try:
        proof, transcript = scheme.open(params, x, y, challenge_source)
    except ChallengeRejected:
        transcript = Transcript([Round(scheme.element_codec(params).encode(y))], aborted=True)
        return statement, Proof("empty"), transcript, False
    accept = verify_transcript(scheme, params, statement, transcript)
    transcript.final_accept = accept
    return statement, proof, transcript, accept


class FiatShamirCompiled(VdfScheme):
    """Non-interactive version of an interactive scheme.

    ``open`` needs no counterparty. ``verify_compiled`` recomputes every
    challenge, compares it with the transcript when one is supplied, and
    then runs the base verification.
    """

    non_interactive = True

    def __init__(self, base: VdfScheme):
        self.base = base
        self.scheme_id = base.scheme_id
        self.proof_kind = base.proof_kind
        self.linear_verify = base.linear_verify

    def setup(self, lam, T, seed=b"vdfkit", **kw):
        return self.base.setup(lam, T, seed, **kw).with_mode("fiat_shamir")

    def to_element(self, params, x):
        return self.base.to_element(params, x)

    def step(self, params, v, i):
        return self.base.step(params, v, i)

    def in_range(self, params, v):
        return self.base.in_range(params, v)

    def is_permutation(self, params):
        return self.base.is_permutation(params)

    def element_codec(self, params):
        return self.base.element_codec(params)

    def open_element(self, params, g, y, T, source=None):
        return self.base.open_element(params, g, y, T, FiatShamir())

    def verify_element(self, params, g, y, T, proof, source=None):
        return self.base.verify_element(params, g, y, T, proof, FiatShamir())

    def open(self, params, x, y, source=None):
        return self.base.open(params, x, y, FiatShamir())

    def verify(self, params, x, y, proof, source=None):
        return self.base.verify(params, x, y, proof, FiatShamir())

    def verify_compiled(self, params: VdfParams, statement: Statement, proof: Proof,
                        transcript: Optional[Transcript] = None) -> bool:
        rec = Recorder(FiatShamir())
        try:
            ok = self.base.verify(params, statement.x, statement.y, proof, rec)
        except (ChallengeRejected, ChainBudgetExceeded):
            return False
        if transcript is not None and transcript.challenges() != rec.seen:
            return False
        return ok

    def prove(self, params: VdfParams, x: Input) -> tuple[Statement, Proof, Transcript]:
        y = self.eval(params, x)
        proof, transcript = self.open(params, x, y)
        transcript.final_accept = True
        return Statement(x, y, params.T), proof, transcript


def fs_compile(scheme: VdfScheme) -> FiatShamirCompiled:
    if isinstance(scheme, FiatShamirCompiled):
        return scheme
    return FiatShamirCompiled(scheme)


def check_language_membership(scheme: VdfScheme, params: VdfParams, s: Statement) -> bool:
    """Ground truth: ``s.y`` is the honest output for ``s.x`` (recomputes the chain)."""
    if s.T != params.T:
        return False
    try:
        return scheme.eval(params, s.x) == s.y
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# JSON envelope
# ---------------------------------------------------------------------------


def group_descriptor(group) -> dict:
    d = group.descriptor
    return d() if callable(d) else dict(d)


def group_from_descriptor(d: dict):
    if "modulus_hex" in d:
        return UnknownOrderGroup.from_descriptor(d)
    if "p_hex" in d:
        return PrimeField.from_descriptor(d)
    raise ValueError("unrecognised group descriptor")


def encode_input(x: Input) -> str:
    return x.hex() if isinstance(x, bytes) else int_to_hex(x)


def decode_input(params: VdfParams, s: str) -> Input:
    if params.domain == "residue":
        return hex_to_int(s)
    return bytes.fromhex(s)


def to_envelope(params: VdfParams, statement: Statement, proof: Proof,
                transcript: Optional[Transcript] = None) -> dict:
    env = {
        "scheme": params.scheme_id,
        "lambda": params.lam,
        "T": params.T,
        "mode": params.mode,
        "domain": params.domain,
        "group": group_descriptor(params.group),
        "x_hex": encode_input(statement.x),
        "y_hex": int_to_hex(statement.y),
        "proof_hex": [int_to_hex(e) for e in proof.elements],
        "proof_kind": proof.kind,
        "rounds": [],
    }
    if transcript is not None:
        env["rounds"] = [
            {"message_hex": r.message.hex(),
             "challenge_hex": None if r.challenge is None else int_to_hex(r.challenge)}
            for r in transcript.rounds
        ]
        env["aborted"] = transcript.aborted
    return env


def from_envelope(env: dict) -> tuple[VdfParams, Statement, Proof, Transcript]:
    params = VdfParams(
        lam=int(env["lambda"]), T=int(env["T"]), scheme_id=env["scheme"],
        group=group_from_descriptor(env["group"]), mode=env.get("mode", "fiat_shamir"),
        domain=env.get("domain", "bytes"),
    )
    statement = Statement(decode_input(params, env["x_hex"]), hex_to_int(env["y_hex"]), params.T)
    proof = Proof(env.get("proof_kind", "vector"), tuple(hex_to_int(h) for h in env["proof_hex"]))
    rounds = [
        Round(bytes.fromhex(r["message_hex"]),
              None if r.get("challenge_hex") is None else hex_to_int(r["challenge_hex"]))
        for r in env.get("rounds", [])
    ]
    return params, statement, proof, Transcript(rounds, aborted=bool(env.get("aborted", False)))
