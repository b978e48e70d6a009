"""Acceptance criteria 1-10, one test each, one printed PASS/FAIL line each."""
import math
import random
import time

import pytest

from vdfkit.core import FiatShamir, Replay, VdfParams
from vdfkit.group import UnknownOrderGroup, hash_to_group, measure, sample_group
from vdfkit.harness import (
    ProbeConfig,
    delay_scaling_probe,
    forgery_probe,
    mutation_soundness_probe,
    parallel_speedup_probe,
)
from vdfkit.reductions import (
    general_vdf_to_rsvl,
    perm_vdf_to_rsvl,
    rsvl_to_general_vdf,
    rsvl_to_perm_vdf,
    truncated_hash_owf,
)
from vdfkit.schemes import (
    get_scheme,
    pietrzak_merge,
    pietrzak_open,
    pietrzak_verify,
    wesolowski_open,
    wesolowski_verify,
)
from vdfkit.search import Sink, check_rsvl_solution, keyed_linear_family, toy_linear_family, toy_linear_instance, walk
from vdfkit.vectors import check_vector, load_vectors

SCHEMES = ["dwork_naor", "rsw", "pietrzak", "wesolowski"]


@pytest.fixture
def report(capsys):
    def emit(k: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[acceptance] criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
    return emit


def test_criterion_01_hand_vectors(report):
    t0 = time.perf_counter()
    vectors = load_vectors()
    results = {v["name"]: check_vector(v) for v in vectors}
    g35 = UnknownOrderGroup(35, 24)
    e = pow(2, 3, g35.trapdoor())
    trapdoor_ok = e == 8 and g35.pow(2, e) == 11 == g35.square_chain(2, 3)
    trace = []
    pietrzak_open(g35, 2, 16, 2, Replay([3]), 8, check_identity=True, trace=trace)
    trace_ok = (trace[0].g, trace[0].y) == (32, 9) and g35.square(32) == 9
    w_ok = wesolowski_open(g35, 2, 11, 3, Replay([3]), 8)[0].pi == 4 and g35.mul(g35.pow(4, 3), g35.pow(2, 2)) == 11
    elapsed = time.perf_counter() - t0
    schemes = {v["scheme"] for v in vectors}
    ok = all(results.values()) and trapdoor_ok and trace_ok and w_ok and elapsed < 1.0 \
        and schemes == set(SCHEMES)
    report(1, ok, f"{sum(results.values())}/{len(results)} vectors, trapdoor e=8, trace 32^2=9, "
                  f"W 256=11, {elapsed:.3f}s")
    assert ok


def test_criterion_02_cross_scheme_agreement(report):
    t0 = time.perf_counter()
    rng = random.Random(2)
    mismatches = 0
    for k in range(200):
        grp = sample_group(64, b"agree-%d" % (k % 8))
        g = rng.randrange(2, grp.modulus)
        if not grp.is_unit(g):
            g = 3
        T = rng.randint(1, 2 ** 12)
        ys = [get_scheme(s).eval(VdfParams(32, T, s, grp, domain="residue"), g)
              for s in ("rsw", "pietrzak", "wesolowski")]
        oracle = grp.trapdoor_pow2(g, T)
        if len(set(ys)) != 1 or ys[0] != oracle:
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 30
    report(2, ok, f"200 pairs, {mismatches} mismatches, {elapsed:.2f}s")
    assert ok


def test_criterion_03_proof_size_law(report):
    grp = sample_group(64, b"size")
    lam = 32
    bad = []
    for k in range(1, 13):
        T = 2 ** k
        y = grp.square_chain(3, T)
        proof, _ = pietrzak_open(grp, 3, y, T, FiatShamir(), lam)
        if len(proof) != k or not pietrzak_verify(grp, 3, y, T, proof, FiatShamir(), lam):
            bad.append(("pietrzak", T, len(proof)))
        wp, _ = wesolowski_open(grp, 3, y, T, FiatShamir(), lam)
        w = get_scheme("wesolowski")
        params = VdfParams(lam, T, "wesolowski", grp, domain="residue")
        opened, _ = w.open(params, 3, y)
        with measure() as c:
            ok = wesolowski_verify(grp, 3, y, T, wp.pi, FiatShamir(), lam)
        if len(opened) != 1 or not ok or c.squarings > 2 * wp.ell.bit_length():
            bad.append(("wesolowski", T, c.squarings))
    report(3, not bad, f"T=2^1..2^12, violations: {bad or 'none'}")
    assert not bad


def test_criterion_04_proof_merging(report):
    grp = sample_group(64, b"merge")
    bad = []
    for k in range(2, 7):
        T = 2 ** k
        h = grp.square_chain(5, T)
        y = grp.square_chain(h, T)
        oracle = FiatShamir()
        a, _ = pietrzak_open(grp, 5, h, T, oracle, 32)
        b, _ = pietrzak_open(grp, h, y, T, oracle, 32)
        merged = pietrzak_merge(grp, a, b, 5, h, y, T, 32, oracle)
        direct, _ = pietrzak_open(grp, 5, y, 2 * T, oracle, 32)
        if merged != direct or not pietrzak_verify(grp, 5, y, 2 * T, merged, oracle, 32):
            bad.append(T)
    report(4, not bad, f"T=2^2..2^6 merged == direct; failures: {bad or 'none'}")
    assert not bad


def test_criterion_05_reduction_round_trips(report):
    bad, runs = [], 0
    for name in SCHEMES:
        s = get_scheme(name)
        grid = (1, 32, 1024) if name == "pietrzak" else (1, 37, 1024)
        for T in grid:
            for construction in ("permutation", "general"):
                domain = "residue" if construction == "permutation" else "bytes"
                params = s.setup(32, T, b"rt", modulus_bits=64, domain=domain)
                if construction == "permutation":
                    x = params.group.hash_to_qr(b"x") if name == "dwork_naor" else hash_to_group(b"x", params.group)
                    inst = perm_vdf_to_rsvl(s, params, x)
                else:
                    x = b"round-trip input"
                    inst = general_vdf_to_rsvl(s, params, x)
                runs += 1
                sink = walk(inst, T)
                if sink != s.eval(params, x) or not check_rsvl_solution(inst, Sink(sink)):
                    bad.append((name, T, construction))
    report(5, not bad, f"{runs} (scheme, T, construction) runs; failures: {bad or 'none'}")
    assert not bad


def test_criterion_06_derived_vdf_exhaustive(report):
    t0 = time.perf_counter()
    fam = toy_linear_family(8, 5)
    T = 10
    vdf = rsvl_to_perm_vdf(fam)
    params = vdf.setup(None, T)
    proof, _ = vdf.open(params, 0, 0)
    accepted = {(x, y) for x in range(256) for y in range(256) if vdf.verify(params, x, y, proof)}
    expected = {(x, walk(toy_linear_instance(8, 5, x, T), T)) for x in range(256)}
    domain = [bytes([a, b]) for a in b"abcd" for b in b"abcd"]
    H = truncated_hash_owf(8, domain)
    gvdf = rsvl_to_general_vdf(fam, H)
    gp = gvdf.setup(None, T)
    g_acc = {(x, y) for x in domain for y in range(256) if gvdf.verify(gp, x, y, proof)}
    g_exp = {(x, walk(toy_linear_instance(8, 5, H(x), T), T)) for x in domain}
    elapsed = time.perf_counter() - t0
    ok = accepted == expected and g_acc == g_exp and elapsed < 10
    report(6, ok, f"n=8: {len(accepted)} accepted pairs == S^T graph; OWF variant {len(g_acc)} pairs; "
                  f"{elapsed:.2f}s")
    assert ok


def test_criterion_07_rsvl_promise(report):
    violations = 0
    for n, T in ((4, 16), (8, 64), (12, 64)):
        for v0 in (0, 1, 2 ** n - 1):
            inst = keyed_linear_family(n, b"promise").instance(v0, T)
            line = [walk(inst, i) for i in range(T + 1)]
            for i in range(1, T + 1):
                for v in range(2 ** n):
                    if inst.V(v, i) != (v == line[i]):
                        violations += 1
    rng = random.Random(7)
    derived = {}
    for name in SCHEMES:
        s = get_scheme(name)
        T = 64
        params = s.setup(32, T, b"promise", modulus_bits=64, domain="residue")
        x = params.group.hash_to_qr(b"p") if name == "dwork_naor" else hash_to_group(b"p", params.group)
        inst = perm_vdf_to_rsvl(s, params, x)
        on_line = all(inst.V(walk(inst, i), i) for i in range(1, T + 1))
        fp = probes = 0
        while probes < 10_000:
            i = rng.randint(1, T)
            v = rng.randrange(2 ** inst.n)
            if v == inst.line_vertex(i):
                continue
            probes += 1
            fp += inst.V(v, i)
        derived[name] = (on_line, fp, inst.false_positive_budget)
    ok = violations == 0 and all(on and fp <= b for on, fp, b in derived.values())
    report(7, ok, f"exhaustive toy violations={violations}; derived (on-line ok, FP, budget)={derived}")
    assert ok


def test_criterion_08_soundness_mutations(report):
    res = {s: mutation_soundness_probe(s, 1000, lam=32, T=64, seed=8) for s in SCHEMES}
    acc = {s: r.accepted_count for s, r in res.items()}
    selfcheck = sum(len(r.self_check_failures) for r in res.values())
    ok = all(v == 0 for v in acc.values()) and selfcheck == 0
    report(8, ok, f"1000 mutations/scheme at lambda=32, accepted={acc}, self-check failures={selfcheck}")
    assert ok


def test_criterion_09_forgery_calibration(report):
    toy = forgery_probe(ProbeConfig(forgery_lambda=8, forgery_queries=10_000), "dwork_naor", T=2, rng_seed=9)
    big = {s: forgery_probe(ProbeConfig(forgery_lambda=32, forgery_queries=10_000), s, T=2, rng_seed=9)
           for s in SCHEMES}
    ok = bool(toy.within_3sigma) and all(r.successes == 0 for r in big.values())
    report(9, ok, f"lambda=8 DN rate={toy.rate:.4f} vs exhaustive {toy.analytic_rate:.4f} "
                  f"(3 sigma={3 * toy.sigma:.4f}); lambda=32 successes="
                  f"{ {s: r.successes for s, r in big.items()} }")
    assert ok


@pytest.mark.slow
def test_criterion_10_sequentiality_evidence(report):
    t0 = time.perf_counter()
    cfg = ProbeConfig(repetitions=5, workers=[1, 2, 4, 8], seed=b"seq")
    delay = delay_scaling_probe(cfg, [2 ** 18, 2 ** 19, 2 ** 20], modulus_bits=2048)
    ratios_ok = all(1.8 <= r <= 2.2 for r in delay.ratios)
    par = parallel_speedup_probe(ProbeConfig(repetitions=3, workers=[1, 2, 4, 8], seed=b"seq"),
                                 "rsw", T=2 ** 18, modulus_bits=2048)
    race_ok = all(par.speedup[w] <= 1.1 for w in par.workers)
    tput_ok = all(par.throughput_scaling[w] >= 0.8 * w for w in par.workers)
    elapsed = time.perf_counter() - t0
    ok = ratios_ok and race_ok and tput_ok and elapsed < 300
    report(10, ok, f"delay ratios={[round(r, 3) for r in delay.ratios]} ({ratios_ok}); "
                   f"race speedup={ {w: round(v, 3) for w, v in par.speedup.items()} } ({race_ok}); "
                   f"throughput scaling={ {w: round(v, 2) for w, v in par.throughput_scaling.items()} } "
                   f"({tput_ok}, cpus={par.cpu_count}); {elapsed:.1f}s")
    assert ok
