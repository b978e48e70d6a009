import json

import pytest

from vdfkit.core import (
    ChallengeRejected,
    FiatShamir,
    Proof,
    Recorder,
    Replay,
    Statement,
    Transcript,
    VdfParams,
    VerifierRandom,
    check_language_membership,
    from_envelope,
    fs_compile,
    run_interactive,
    to_envelope,
    verify_transcript,
)
from vdfkit.group import sample_group
from vdfkit.schemes import get_scheme

SCHEMES = ["dwork_naor", "rsw", "pietrzak", "wesolowski"]


def test_params_validation():
    g = sample_group(32, b"p")
    with pytest.raises(ValueError):
        VdfParams(32, 0, "rsw", g)
    with pytest.raises(ValueError):
        VdfParams(32, 2 ** 16, "rsw", g)
    with pytest.raises(ValueError):
        VdfParams(32, 4, "nope", g)
    with pytest.raises(ValueError):
        VdfParams(32, 4, "rsw", g, mode="batch")
    assert VdfParams(32, 1, "rsw", g).log_T == 1
    assert VdfParams(32, 1024, "rsw", g).log_T == 10


def test_replay_exhaustion():
    r = Replay([1, 2])
    assert (r.integer(b"", 8), r.prime(b"", 8)) == (1, 2)
    assert r.exhausted
    with pytest.raises(ChallengeRejected):
        r.integer(b"", 8)


def test_verifier_random_seeded():
    a, b = VerifierRandom(3), VerifierRandom(3)
    assert [a.integer(b"", 32) for _ in range(4)] == [b.integer(b"", 32) for _ in range(4)]
    assert a.prime(b"", 16).bit_length() == 16


@pytest.mark.parametrize("name", SCHEMES)
def test_interactive_completeness(name):
    s = get_scheme(name)
    params = s.setup(32, 16, b"i", mode="interactive")
    for seed in range(5):
        st, proof, tr, ok = run_interactive(s, params, b"input", VerifierRandom(seed))
        assert ok and tr.final_accept and not tr.aborted
        assert check_language_membership(s, params, st)


def test_interactive_abort_on_bad_challenge():
    s = get_scheme("pietrzak")
    params = s.setup(32, 16, b"i", mode="interactive")
    st, proof, tr, ok = run_interactive(s, params, b"input", Replay([2 ** 40]))
    assert tr.aborted and not ok
    assert not verify_transcript(s, params, st, tr)


def test_transcript_with_altered_message_rejects():
    s = get_scheme("pietrzak")
    params = s.setup(32, 16, b"i", mode="interactive")
    st, proof, tr, ok = run_interactive(s, params, b"input", VerifierRandom(1))
    bad = tr.copy()
    msg = bytearray(bad.rounds[2].message)
    msg[-1] ^= 1
    bad.rounds[2].message = bytes(msg)
    assert verify_transcript(s, params, st, tr)
    assert not verify_transcript(s, params, st, bad)


@pytest.mark.parametrize("name", SCHEMES)
def test_fiat_shamir_compiler(name):
    c = fs_compile(get_scheme(name))
    assert c.non_interactive and fs_compile(c) is c
    params = c.setup(32, 16, b"fs")
    st, proof, tr = c.prove(params, b"abc")
    assert c.verify_compiled(params, st, proof, tr)
    assert not c.verify_compiled(params, Statement(st.x, st.y ^ 1, st.T), proof, tr)


def test_compiled_rejects_foreign_challenges():
    c = fs_compile(get_scheme("pietrzak"))
    params = c.setup(32, 16, b"fs")
    st, proof, tr = c.prove(params, b"abc")
    bad = tr.copy()
    bad.rounds[1].challenge ^= 1
    assert not c.verify_compiled(params, st, proof, bad)


def test_fs_challenges_match_recorder():
    s = get_scheme("wesolowski")
    params = s.setup(32, 16, b"rec")
    y = s.eval(params, b"q")
    rec = Recorder(FiatShamir())
    proof, tr = s.open(params, b"q", y, rec)
    assert tr.challenges() == rec.seen


@pytest.mark.parametrize("name", SCHEMES)
def test_envelope_roundtrip(name):
    s = get_scheme(name)
    params = s.setup(32, 16, b"env", domain="bytes")
    y = s.eval(params, b"\x01\x02")
    proof, tr = s.open(params, b"\x01\x02", y)
    env = json.loads(json.dumps(to_envelope(params, Statement(b"\x01\x02", y, 16), proof, tr)))
    p2, st2, pr2, tr2 = from_envelope(env)
    assert st2 == Statement(b"\x01\x02", y, 16) and pr2 == proof
    assert [(r.message, r.challenge) for r in tr2.rounds] == [(r.message, r.challenge) for r in tr.rounds]
    assert "phi" not in json.dumps(env)
    if name != "rsw":
        assert s.verify(p2, st2.x, st2.y, pr2)


def test_default_source_needs_fs():
    s = get_scheme("pietrzak")
    params = s.setup(32, 16, b"m", mode="interactive")
    with pytest.raises(ValueError):
        s.open(params, b"x", 1)


def test_verify_rejects_out_of_range_output():
    s = get_scheme("wesolowski")
    params = s.setup(32, 16, b"r")
    assert not s.verify(params, b"x", 0, Proof("single", (1,)))
    assert not s.verify(params, b"x", params.group.modulus, Proof("single", (1,)))


def test_transcript_copy_is_deep():
    t = Transcript([], True)
    assert t.copy().rounds is not t.rounds
