"""Executable reductions between VDFs and rSVL.

* :func:`perm_vdf_to_rsvl` and :func:`general_vdf_to_rsvl` turn a VDF into
  an rSVL instance whose successor is one evaluation step and whose
  verifier is ``Verify(Open(...))``.
* :func:`rsvl_to_perm_vdf` and :func:`rsvl_to_general_vdf` go the other way.

The verifier of a derived instance needs a proof for ``(v0, v, i)`` without
redoing ``i`` steps. Vertices along the honest line are labeled with proof
material built as the line is walked: Pietrzak labels keep a binary-counter
stack of segment proofs combined with :func:`pietrzak_merge`, Wesolowski
labels keep the checkpoint powers of the chain.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .core import (
    FiatShamir,
    FiatShamirCompiled,
    Input,
    Proof,
    Round,
    VdfParams,
    VdfScheme,
    decode_input,
    group_descriptor,
    group_from_descriptor,
)
from .group import hash_to_prime, int_to_hex
from .schemes import (
    pietrzak_merge,
    pietrzak_verify,
    wesolowski_challenge_input,
    wesolowski_pi_from_checkpoints,
)
from .search import RsvlFamily, RsvlInstance, walk
from .search import instance_from_json as search_instance_from_json


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IteratedStep:
    """``f(v, i)``: ``i`` steps of evaluation starting from a range value."""

    f: Callable[[int, int], int]

    def __call__(self, v: int, i: int) -> int:
        return self.f(v, i)

    def check_semigroup(self, points: Iterable[int],
                        splits=((0, 0), (1, 0), (1, 1), (1, 2), (2, 3), (3, 5))) -> bool:
        for v in points:
            if self.f(v, 0) != v:
                return False
            for a, b in splits:
                if self.f(v, a + b) != self.f(self.f(v, a), b):
                    return False
        return True


@dataclass(frozen=True)
class InjectiveOwf:
    """``H: bytes -> n-bit vertex`` together with the domain it is checked on."""

    n: int
    fn: Callable[[bytes], int]
    domain: tuple = ()
    name: str = "custom"

    def __call__(self, x: bytes) -> int:
        return self.fn(x)

    def collisions(self) -> list:
        seen: dict = {}
        out = []
        for x in self.domain:
            h = self.fn(x)
            if h in seen:
                out.append((seen[h], x))
            seen[h] = x
        return out

    def check_injective(self) -> bool:
        return not self.collisions()


def truncated_hash_owf(n: int, domain: Iterable[bytes], seed: bytes = b"owf",
                       max_keys: int = 1 << 16) -> InjectiveOwf:
    """Keyed SHA-256 truncated to ``n`` bits, rekeyed until injective on ``domain``."""
    domain = tuple(domain)
    if len(domain) > 2 ** n:
        raise ValueError("domain larger than the vertex space")
    for ctr in range(max_keys):
        key = hashlib.sha256(seed + ctr.to_bytes(4, "big")).digest()
        fn = _truncated(key, n)
        owf = InjectiveOwf(n, fn, domain, f"sha256-trunc{n}#{ctr}")
        if owf.check_injective():
            return owf
    raise ValueError("no injective key found for the domain")


def _truncated(key: bytes, n: int) -> Callable[[bytes], int]:
    def fn(x: bytes) -> int:
        d = hashlib.sha256(key + x).digest()
        return int.from_bytes(d, "big") >> (256 - n)
    return fn


def identity_owf(n: int) -> InjectiveOwf:
    width = (n + 7) // 8
    dom = tuple(v.to_bytes(width, "big") for v in range(2 ** n)) if n <= 16 else ()

    def fn(x: bytes) -> int:
        v = int.from_bytes(x, "big")
        if len(x) != width or v >= 2 ** n:
            raise ValueError("input outside {0,1}^n")
        return v

    return InjectiveOwf(n, fn, dom, "identity")


@dataclass
class VertexLabel:
    position: int
    state: int
    proof_cache: object = None


# ---------------------------------------------------------------------------
# labelers: Open for (v0, claimed v, i) from stored material
# ---------------------------------------------------------------------------


class ChainLabeler:
    """Honest line from ``v0`` with lazily extended states."""

    def __init__(self, scheme: VdfScheme, params: VdfParams, v0: int, f: IteratedStep):
        self.scheme = scheme
        self.params = params
        self.v0 = v0
        self.f = f
        self.states = [v0]

    def _extend(self, i: int) -> None:
        while len(self.states) <= i:
            self._advance()

    def _advance(self) -> None:
        self.states.append(self.f(self.states[-1], 1))

    def state(self, i: int) -> int:
        self._extend(i)
        return self.states[i]

    def label(self, i: int) -> VertexLabel:
        return VertexLabel(i, self.state(i), None)

    def open(self, i: int, v: int) -> Proof:
        return Proof("empty")

    def verify(self, i: int, v: int, proof) -> bool:
        return self.scheme.verify_element(self.params, self.v0, v, i, proof, FiatShamir())

    def accepts(self, v: int, i: int) -> bool:
        return bool(self.verify(i, v, self.open(i, v)))


class TimeLockLabeler(ChainLabeler):
    """RSW: trapdoor check when available, else the stored chain state."""

    def verify(self, i, v, proof):
        if self.params.group.has_trapdoor:
            return super().verify(i, v, proof)
        return v == self.state(i)


class WesolowskiLabeler(ChainLabeler):
    def label(self, i):
        self._extend(i)
        return VertexLabel(i, self.states[i], self.states[: i + 1])

    def open(self, i, v):
        grp = self.params.group
        self._extend(i)
        ell = hash_to_prime(wesolowski_challenge_input(grp, self.v0, v), 2 * self.params.lam)
        return Proof("single", (wesolowski_pi_from_checkpoints(grp, self.states, i, ell),))


@dataclass(frozen=True)
class Segment:
    start: int
    end: int
    length: int
    proof: tuple


class PietrzakLabeler(ChainLabeler):
    """Binary-counter stack of power-of-two segments, merged as the walk advances."""

    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        self.stacks: list = [()]
        self._verified: dict = {}

    def _advance(self) -> None:
        grp, lam = self.params.group, self.params.lam
        prev = self.states[-1]
        nxt = self.f(prev, 1)
        self.states.append(nxt)
        stack = list(self.stacks[-1]) + [Segment(prev, nxt, 1, ())]
        while len(stack) >= 2 and stack[-1].length == stack[-2].length:
            b = stack.pop()
            a = stack.pop()
            merged = pietrzak_merge(grp, a.proof, b.proof, a.start, a.end, b.end, a.length, lam)
            stack.append(Segment(a.start, b.end, 2 * a.length, tuple(merged)))
        self.stacks.append(tuple(stack))

    def label(self, i):
        self._extend(i)
        return VertexLabel(i, self.states[i], self.stacks[i])

    def open(self, i, v):
        self._extend(i)
        return self.stacks[i]

    def _segment_ok(self, seg: Segment, end: int) -> bool:
        key = (seg.start, end, seg.length, seg.proof)
        if key not in self._verified:
            self._verified[key] = pietrzak_verify(self.params.group, seg.start, end, seg.length,
                                                  seg.proof, FiatShamir(), self.params.lam)
        return self._verified[key]

    def verify(self, i, v, stack):
        if i == 0 or not stack or sum(s.length for s in stack) != i:
            return False
        if stack[0].start != self.v0:
            return False
        for a, b in zip(stack, stack[1:]):
            if a.end != b.start or not self._segment_ok(a, a.end):
                return False
        last = stack[-1]
        if last.end == v:
            return self._segment_ok(last, v)
        return pietrzak_verify(self.params.group, last.start, v, last.length, last.proof,
                               FiatShamir(), self.params.lam)


class RsvlBackedLabeler(ChainLabeler):
    def verify(self, i, v, proof):
        inner = self.params.group.instance(self.v0, self.params.T)
        return inner.V(v, i)


def make_labeler(scheme: VdfScheme, params: VdfParams, v0: int, f: IteratedStep) -> ChainLabeler:
    base = scheme.base if isinstance(scheme, FiatShamirCompiled) else scheme
    sid = base.scheme_id
    cls = {
        "pietrzak": PietrzakLabeler,
        "wesolowski": WesolowskiLabeler,
        "rsw": TimeLockLabeler,
        "derived_from_rsvl": RsvlBackedLabeler,
    }.get(sid, ChainLabeler)
    return cls(base, params, v0, f)


# ---------------------------------------------------------------------------
# VDF -> rSVL
# ---------------------------------------------------------------------------


def _vertex_width(params: VdfParams) -> int:
    g = params.group
    if isinstance(g, RsvlFamily):
        return g.n
    return g.modulus.bit_length()


def _derived_instance(scheme: VdfScheme, params: VdfParams, x: Input, v0: int, f: IteratedStep,
                      construction: str) -> RsvlInstance:
    labeler = make_labeler(scheme, params, v0, f)
    base = labeler.scheme

    def successor(u: int) -> int:
        return f(u, 1) if base.in_domain(params, u) else u

    def verifier(v: int, i: int) -> bool:
        return base.in_range(params, v) and labeler.accepts(v, i)

    # each position can carry a mirror root for Dwork-Naor (y and -y square alike)
    budget = params.T if base.scheme_id == "dwork_naor" else math.ceil(params.lam)
    desc = {
        "family": "vdf_derived",
        "params": {
            "construction": construction,
            "x_hex": x.hex() if isinstance(x, bytes) else int_to_hex(x),
            "vdf": _params_envelope(params),
        },
    }
    inst = RsvlInstance(
        n=_vertex_width(params), T=params.T, v0=v0,
        successor=successor, verifier=verifier,
        false_positive_budget=budget, position_oracle=labeler.state,
        descriptor=desc,
    )
    object.__setattr__(inst, "labeler", labeler)
    return inst


def _params_envelope(params: VdfParams) -> dict:
    return {"scheme": params.scheme_id, "lambda": params.lam, "T": params.T,
            "mode": params.mode, "domain": params.domain,
            "group": group_descriptor(params.group)}


def perm_vdf_to_rsvl(scheme: VdfScheme, params: VdfParams, x: Input) -> RsvlInstance:
    """Successor ``S(u) = Eval(pp, u, 1)``; source ``x`` itself (requires ``X = Y``)."""
    if not scheme.is_permutation(params):
        raise TypeError("scheme is not a permutation VDF (X != Y); use general_vdf_to_rsvl")
    v0 = scheme.to_element(params, x)
    f = IteratedStep(lambda v, i: scheme.step(params, v, i))
    return _derived_instance(scheme, params, x, v0, f, "permutation")


def general_vdf_to_rsvl(scheme: VdfScheme, params: VdfParams, x: Input,
                        f: Optional[IteratedStep] = None, probe_steps: int = 8) -> RsvlInstance:
    """Source ``Eval(pp, x, 0)``; successor ``S(u) = f(u, 1)`` for an iterated ``f``."""
    f = f or IteratedStep(lambda v, i: scheme.step(params, v, i))
    v0 = scheme.eval(params, x, 0)
    probes = [v0, f(v0, 1), f(v0, 2)]
    if not f.check_semigroup(probes):
        raise ValueError("f fails the semigroup law f(v, a+b) = f(f(v, a), b)")
    for i in range(min(probe_steps, params.T) + 1):
        if f(v0, i) != scheme.eval(params, x, i):
            raise ValueError(f"f(Eval(x, 0), {i}) disagrees with Eval(x, {i})")
    return _derived_instance(scheme, params, x, v0, f, "general")


# ---------------------------------------------------------------------------
# rSVL -> VDF
# ---------------------------------------------------------------------------


class VertexCodec:
    def __init__(self, n: int):
        self.n = n
        self.element_bytes = max(1, (n + 7) // 8)

    def encode(self, v: int) -> bytes:
        return v.to_bytes(self.element_bytes, "big")

    def decode(self, raw: bytes) -> int:
        v = int.from_bytes(raw, "big")
        if len(raw) != self.element_bytes or v >= 2 ** self.n:
            raise ValueError("not an n-bit vertex")
        return v


class RsvlVdf(VdfScheme):
    """VDF read off an rSVL family: ``Eval = S^T``, ``Verify = V(y, T)``, no proof."""

    scheme_id = "derived_from_rsvl"
    proof_kind = "empty"

    def __init__(self, family: RsvlFamily, owf: Optional[InjectiveOwf] = None):
        self.family = family
        self.owf = owf
        if owf is not None:
            if owf.n != family.n:
                raise ValueError("OWF output width must equal the family width")
            bad = owf.collisions()
            if bad:
                raise ValueError(f"OWF is not injective on its domain: {bad[0]!r}")

    def setup(self, lam=None, T=1, seed=b"vdfkit", *, mode="fiat_shamir", **kw):
        domain = "bytes" if self.owf is not None else "residue"
        # lambda is the vertex width; T <= 2^o(lambda) is enforced by VdfParams
        return VdfParams(self.family.n, T, self.scheme_id, self.family, mode, domain)

    def is_permutation(self, params):
        return self.owf is None

    def element_codec(self, params):
        return VertexCodec(self.family.n)

    def to_element(self, params, x):
        if isinstance(x, (bytes, bytearray)):
            if self.owf is None:
                raise ValueError("permutation variant takes n-bit vertices")
            return self.owf(bytes(x))
        if not 0 <= x < 2 ** self.family.n:
            raise ValueError("input is not an n-bit vertex")
        return x

    def step(self, params, v, i):
        return walk(self.family.instance(v, params.T), i)

    def in_range(self, params, v):
        return isinstance(v, int) and 0 <= v < 2 ** self.family.n

    def in_domain(self, params, v):
        return self.in_range(params, v)

    def open_element(self, params, g, y, T, source):
        return Proof("empty"), [Round(VertexCodec(self.family.n).encode(y))]

    def verify_element(self, params, g, y, T, proof, source):
        return len(proof) == 0 and self.family.instance(g, params.T).V(y, T)

    def instance_for(self, params: VdfParams, x: Input) -> RsvlInstance:
        return self.family.instance(self.to_element(params, x), params.T)


def rsvl_to_perm_vdf(family: RsvlFamily) -> RsvlVdf:
    return RsvlVdf(family)


def rsvl_to_general_vdf(family: RsvlFamily, H: InjectiveOwf) -> RsvlVdf:
    return RsvlVdf(family, H)


def instance_from_descriptor(d: dict) -> RsvlInstance:
    """Rebuild toy or VDF-derived instances from their JSON descriptor."""
    if d.get("family") != "vdf_derived":
        return search_instance_from_json(d)
    p = d["params"]
    env = p["vdf"]
    from .schemes import get_scheme

    scheme = get_scheme(env["scheme"])
    params = VdfParams(int(env["lambda"]), int(env["T"]), env["scheme"],
                       group_from_descriptor(env["group"]), env.get("mode", "fiat_shamir"),
                       env.get("domain", "bytes"))
    x = decode_input(params, p["x_hex"])
    if p.get("construction") == "permutation":
        inst = perm_vdf_to_rsvl(scheme, params, x)
    else:
        inst = general_vdf_to_rsvl(scheme, params, x)
    if inst.T != int(d.get("T", inst.T)) or int_to_hex(inst.v0) != d.get("v0_hex", int_to_hex(inst.v0)):
        raise ValueError("descriptor does not match the rebuilt instance")
    return inst
