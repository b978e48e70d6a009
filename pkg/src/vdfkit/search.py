"""End-of-Line, End-of-Metered-Line and (relaxed) Sink-of-Verifiable-Line.

Vertices are ``int`` values in ``[0, 2**n)``. Successor/verifier circuits
are opaque callables paired with a JSON descriptor.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .group import hex_to_int, int_to_hex


@dataclass(frozen=True)
class Sink:
    v: int


@dataclass(frozen=True)
class FalsePositive:
    v: int
    i: int


RsvlSolution = Union[Sink, FalsePositive]


@dataclass(frozen=True, eq=False)
class RsvlInstance:
    """``(S, V, T, v0)`` over ``{0,1}^n``.

    ``position_oracle(i)`` is trusted ground truth for ``S^i(v0)``; when it
    is missing, false-positive checks walk the line (bounded by
    ``walk_budget``).
    """

    n: int
    T: int
    v0: int
    successor: Callable[[int], int]
    verifier: Callable[[int, int], bool]
    false_positive_budget: int = 0
    position_oracle: Optional[Callable[[int], int]] = None
    descriptor: dict = field(default_factory=dict)
    walk_budget: int = 1 << 20

    def __post_init__(self) -> None:
        if not 1 <= self.T <= 2 ** self.n:
            raise ValueError("T must lie in [1, 2^n]")
        if not 0 <= self.v0 < 2 ** self.n:
            raise ValueError("v0 is not an n-bit vertex")

    def S(self, v: int) -> int:
        return self.successor(v)

    def V(self, v: int, i: int) -> bool:
        if not 1 <= i <= self.T or not 0 <= v < 2 ** self.n:
            return False
        return bool(self.verifier(v, i))

    def line_vertex(self, i: int) -> int:
        if self.position_oracle is not None:
            return self.position_oracle(i)
        if i > self.walk_budget:
            raise ValueError("walk exceeds the configured step budget")
        return walk(self, i)

    def to_json(self) -> dict:
        return {"family": self.descriptor.get("family", "opaque"), "n": self.n, "T": self.T,
                "v0_hex": int_to_hex(self.v0), "params": self.descriptor.get("params", {})}


def walk(instance: RsvlInstance, i: int, start: Optional[int] = None) -> int:
    """``S^i`` applied to ``start`` (the source by default), one step at a time."""
    if i < 0:
        raise ValueError("negative step count")
    v = instance.v0 if start is None else start
    for _ in range(i):
        v = instance.S(v)
    return v


def check_rsvl_solution(instance: RsvlInstance, candidate: RsvlSolution) -> bool:
    if isinstance(candidate, Sink):
        return instance.V(candidate.v, instance.T)
    if isinstance(candidate, FalsePositive):
        if not 1 <= candidate.i <= instance.T:
            return False
        return instance.V(candidate.v, candidate.i) and candidate.v != instance.line_vertex(candidate.i)
    raise TypeError(f"not an rSVL solution: {candidate!r}")


def check_svl_solution(instance: RsvlInstance, v: int) -> bool:
    """SVL has only the sink as a solution."""
    return instance.V(v, instance.T)


def solution_to_json(sol: RsvlSolution) -> dict:
    if isinstance(sol, Sink):
        return {"sink": int_to_hex(sol.v)}
    return {"false_positive": [int_to_hex(sol.v), sol.i]}


def solution_from_json(d: dict) -> RsvlSolution:
    if "sink" in d:
        return Sink(hex_to_int(d["sink"]))
    if "false_positive" in d:
        v, i = d["false_positive"]
        return FalsePositive(hex_to_int(v), int(i))
    raise ValueError("solution must have a 'sink' or 'false_positive' key")


# ---------------------------------------------------------------------------
# toy families
# ---------------------------------------------------------------------------


def toy_linear_instance(n: int, c: int, v0: int, T: int) -> RsvlInstance:
    """``S(v) = v + c mod 2**n`` with a closed-form verifier.

    INSECURE: the closed form computes any position in O(1), so this family
    has no sequentiality. It exists to test the machinery.
    """
    mask = (1 << n) - 1

    def position(i: int) -> int:
        return (v0 + i * c) & mask

    return RsvlInstance(
        n=n, T=T, v0=v0,
        successor=lambda v: (v + c) & mask,
        verifier=lambda v, i: v == position(i),
        position_oracle=position,
        descriptor={"family": "toy_linear", "params": {"c": c}},
    )


def planted_instance(base: RsvlInstance, planted: dict) -> RsvlInstance:
    """Copy of ``base`` whose verifier also accepts planted ``(v, i)`` pairs."""
    extra = {(int(v), int(i)) for v, i in planted}

    def verifier(v, i):
        return (v, i) in extra or base.verifier(v, i)

    desc = dict(base.descriptor)
    desc["params"] = dict(desc.get("params", {}), planted=[[int_to_hex(v), i] for v, i in sorted(extra)])
    desc["family"] = "planted:" + base.descriptor.get("family", "opaque")
    return RsvlInstance(base.n, base.T, base.v0, base.successor, verifier,
                        false_positive_budget=len(extra), position_oracle=base.position_oracle,
                        descriptor=desc)


@dataclass(frozen=True)
class RsvlFamily:
    """A keyed family ``{instance(v, T)}`` indexed by its source vertex."""

    n: int
    make: Callable[[int, int], RsvlInstance]
    descriptor: dict = field(default_factory=dict)

    def instance(self, v0: int, T: int) -> RsvlInstance:
        return self.make(v0, T)


def toy_linear_family(n: int, c: int) -> RsvlFamily:
    return RsvlFamily(n, lambda v0, T: toy_linear_instance(n, c, v0, T),
                      {"family": "toy_linear", "n": n, "params": {"c": c}})


def keyed_linear_family(n: int, seed: bytes) -> RsvlFamily:
    """Sample the stride from a seed (an odd stride keeps ``S`` a single cycle)."""
    c = int.from_bytes(hashlib.sha256(b"family:" + seed).digest(), "big") % (1 << n) | 1
    return toy_linear_family(n, c)


def shift_source(instance: RsvlInstance) -> RsvlInstance:
    """Equivalent instance whose source is ``0^n``.

    ``S'(v) = S(v ^ v0) ^ v0`` and ``V'(v, i) = V(v ^ v0, i)``; positions
    and solutions map back by XOR with ``v0``.
    """
    v0 = instance.v0
    oracle = None
    if instance.position_oracle is not None:
        base_oracle = instance.position_oracle
        oracle = lambda i: base_oracle(i) ^ v0  # noqa: E731
    desc = {"family": "shifted:" + instance.descriptor.get("family", "opaque"),
            "params": {"inner": instance.to_json()}}
    return RsvlInstance(
        n=instance.n, T=instance.T, v0=0,
        successor=lambda v: instance.S(v ^ v0) ^ v0,
        verifier=lambda v, i: instance.V(v ^ v0, i),
        false_positive_budget=instance.false_positive_budget,
        position_oracle=oracle,
        descriptor=desc,
    )


def instance_from_json(d: dict) -> RsvlInstance:
    fam = d.get("family")
    n, T, v0 = int(d["n"]), int(d["T"]), hex_to_int(d["v0_hex"])
    params = d.get("params", {})
    if fam == "toy_linear":
        return toy_linear_instance(n, int(params["c"]), v0, T)
    if fam == "planted:toy_linear":
        base = toy_linear_instance(n, int(params["c"]), v0, T)
        return planted_instance(base, [(hex_to_int(v), int(i)) for v, i in params["planted"]])
    if fam == "shifted:toy_linear":
        return shift_source(instance_from_json(params["inner"]))
    raise ValueError(f"cannot rebuild instance family {fam!r}")


# ---------------------------------------------------------------------------
# EOL / EOML
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EolInstance:
    n: int
    S: Callable[[int], int]
    P: Callable[[int], int]

    def __post_init__(self) -> None:
        if self.P(0) != 0:
            raise ValueError("P(0^n) must be 0^n")
        if self.S(0) == 0:
            raise ValueError("S(0^n) must differ from 0^n")


@dataclass(frozen=True, eq=False)
class EomlInstance(EolInstance):
    M: Callable[[int], int] = lambda v: 0

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.M(0) != 1:
            raise ValueError("M(0^n) must be 1")


def check_eol_solution(instance: EolInstance, v: int) -> bool:
    S, P = instance.S, instance.P
    return P(S(v)) != v or (S(P(v)) != v and v != 0)


def check_eoml_solution(instance: EomlInstance, v: int) -> bool:
    if check_eol_solution(instance, v):
        return True
    M, S, P = instance.M, instance.S, instance.P
    if v != 0 and M(v) == 1:
        return True
    m = M(v)
    return (m > 0 and M(S(v)) - m != 1) or (m > 1 and m - M(P(v)) != 1)


def line_eol_instance(n: int, line: list) -> EolInstance:
    """Explicit single line ``line[0] = 0 -> line[1] -> ...``; other vertices are self-loops."""
    succ, pred = _line_maps(line)
    return EolInstance(n, lambda v: succ.get(v, v), lambda v: pred.get(v, v))


def line_eoml_instance(n: int, line: list, meter: Optional[dict] = None) -> EomlInstance:
    """As :func:`line_eol_instance` with the honest odometer ``M(line[k]) = k + 1``."""
    succ, pred = _line_maps(line)
    m = {v: k + 1 for k, v in enumerate(line)}
    if meter:
        m.update(meter)
    return EomlInstance(n, lambda v: succ.get(v, v), lambda v: pred.get(v, v), lambda v: m.get(v, 0))


def _line_maps(line: list) -> tuple[dict, dict]:
    if not line or line[0] != 0 or len(set(line)) != len(line):
        raise ValueError("line must start at 0 and not repeat")
    succ = {a: b for a, b in zip(line, line[1:])}
    pred = {b: a for a, b in zip(line, line[1:])}
    pred[0] = 0
    return succ, pred
