"""Verifiable delay functions over groups of unknown order, the rSVL search
problem, and executable reductions between the two."""
from .core import (
    FiatShamir,
    FiatShamirCompiled,
    Proof,
    Recorder,
    Replay,
    Statement,
    Transcript,
    VdfParams,
    VdfScheme,
    VerifierRandom,
    fs_compile,
    run_interactive,
    verify_transcript,
)
from .group import (
    OpCounter,
    PrimeField,
    UnknownOrderGroup,
    hash_to_group,
    hash_to_prime,
    measure,
    sample_field,
    sample_group,
)
from .reductions import (
    InjectiveOwf,
    IteratedStep,
    general_vdf_to_rsvl,
    perm_vdf_to_rsvl,
    rsvl_to_general_vdf,
    rsvl_to_perm_vdf,
)
from .schemes import SCHEMES, get_scheme
from .search import FalsePositive, RsvlInstance, Sink, check_rsvl_solution, walk

__all__ = [
    "FalsePositive", "FiatShamir", "FiatShamirCompiled", "InjectiveOwf", "IteratedStep",
    "OpCounter", "PrimeField", "Proof", "Recorder", "Replay", "RsvlInstance", "SCHEMES", "Sink",
    "Statement", "Transcript", "UnknownOrderGroup", "VdfParams", "VdfScheme", "VerifierRandom",
    "check_rsvl_solution", "fs_compile", "general_vdf_to_rsvl", "get_scheme", "hash_to_group",
    "hash_to_prime", "measure", "perm_vdf_to_rsvl", "rsvl_to_general_vdf", "rsvl_to_perm_vdf",
    "run_interactive", "sample_field", "sample_group", "verify_transcript", "walk",
]
