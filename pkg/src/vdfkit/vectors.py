"""Known-answer vectors in JSON lines.

Each record is ``{scheme, N_hex, g_hex, T, y_hex, proof_hex[], expect}``;
``N_hex`` is the field prime for Dwork-Naor. Records with
``"mode": "interactive"`` carry the verifier's challenges in
``challenges_hex`` and are replayed instead of recomputed.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Optional

from .core import ChallengeRejected, FiatShamir, Replay
from .group import PrimeField, UnknownOrderGroup, hex_to_int
from .schemes import pietrzak_verify, wesolowski_verify

REQUIRED = ("scheme", "N_hex", "g_hex", "T", "y_hex", "proof_hex")


def load_vectors(path: Optional[str | Path] = None) -> list[dict]:
    if path is None:
        text = resources.files("vdfkit").joinpath("data/hand_vectors.jsonl").read_text()
    else:
        text = Path(path).read_text()
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def is_vector(record: dict) -> bool:
    return all(k in record for k in REQUIRED)


def verify_vector(rec: dict) -> bool:
    """Run the scheme's verifier on one record (ignores ``expect``)."""
    missing = [k for k in REQUIRED if k not in rec]
    if missing:
        raise ValueError(f"vector missing fields: {missing}")
    scheme = rec["scheme"]
    n, g, y, T = hex_to_int(rec["N_hex"]), hex_to_int(rec["g_hex"]), hex_to_int(rec["y_hex"]), int(rec["T"])
    proof = [hex_to_int(h) for h in rec["proof_hex"]]
    lam = int(rec.get("lambda", max(8, n.bit_length())))
    if rec.get("mode") == "interactive":
        source = Replay([hex_to_int(c) for c in rec.get("challenges_hex", [])])
    else:
        source = FiatShamir()

    if scheme == "dwork_naor":
        field = PrimeField(n)
        return not proof and 0 < y < n and field.square_chain(y, T) == g % n
    group = UnknownOrderGroup(n)
    if scheme == "rsw":
        # public check of a time-lock solution: redo the chain
        return not proof and group.square_chain(g, T) == y
    try:
        if scheme == "pietrzak":
            ok = pietrzak_verify(group, g, y, T, proof, source, lam)
        elif scheme == "wesolowski":
            ok = len(proof) == 1 and wesolowski_verify(group, g, y, T, proof[0], source, lam)
        else:
            raise ValueError(f"no vector verifier for scheme {scheme!r}")
    except ChallengeRejected:
        return False
    if isinstance(source, Replay) and not source.exhausted:
        return False
    return bool(ok)


def check_vector(rec: dict) -> bool:
    """True when the verifier's verdict matches the recorded ``expect``."""
    return verify_vector(rec) == bool(rec["expect"])
