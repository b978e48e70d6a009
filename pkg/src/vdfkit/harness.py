"""Benchmarks and adversary probes.

``bench`` reports op counts (deterministic) next to wall times (medians).
The probes collect evidence about sequentiality and soundness at desk
scale; none of them can rule out every adversary.
"""
from __future__ import annotations

import math
import os
import random
import statistics
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

from .core import FiatShamir, Proof, VdfParams
from .group import measure, sample_group
from .schemes import get_scheme, is_power_of_two

SCHEMA = 1

SEQUENTIALITY_CAVEAT = (
    "Finite experiment: workers race on one chain with no known split. "
    "Sequentiality is defined against every poly(lambda, T)-processor strategy; "
    "this run cannot refute strategies it does not try."
)


@dataclass
class ProbeConfig:
    T_grid: list = field(default_factory=lambda: [2 ** k for k in range(6, 13)])
    repetitions: int = 5
    workers: list = field(default_factory=lambda: [1, 2, 4, 8])
    sigma_threshold: float = 0.5
    forgery_lambda: int = 8
    forgery_queries: int = 10_000
    lam: int = 32
    modulus_bits: Optional[int] = None
    seed: bytes = b"vdfkit-bench"

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if not self.workers or min(self.workers) < 1:
            raise ValueError("worker counts must be at least 1")
        if not 0 < self.sigma_threshold < 1:
            raise ValueError("sigma_threshold must lie in (0, 1)")


def _median_ms(fn: Callable[[], object], reps: int) -> float:
    fn()  # warm-up, discarded
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(times)


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


@dataclass
class BenchRow:
    scheme: str
    T: int
    eval_squarings: int
    eval_group_ops: int
    eval_wall_ms: float
    open_group_ops: int
    verify_squarings: int
    verify_group_ops: int
    verify_wall_ms: float
    proof_elements: int
    setup_wall_ms: float
    verified: bool


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    lam: int = 0
    modulus_bits: int = 0
    schema: int = SCHEMA

    def to_json(self) -> dict:
        return {"schema": self.schema, "lambda": self.lam, "modulus_bits": self.modulus_bits,
                "rows": [asdict(r) for r in self.rows], "failures": list(self.failures)}

    def row(self, scheme: str, T: int) -> BenchRow:
        for r in self.rows:
            if r.scheme == scheme and r.T == T:
                return r
        raise KeyError((scheme, T))

    def to_table(self) -> str:
        cols = [("scheme", "scheme"), ("T", "T"), ("eval_sq", "eval_squarings"),
                ("eval_ms", "eval_wall_ms"), ("open_ops", "open_group_ops"),
                ("verify_sq", "verify_squarings"), ("verify_ops", "verify_group_ops"),
                ("verify_ms", "verify_wall_ms"), ("proof", "proof_elements"),
                ("setup_ms", "setup_wall_ms"), ("ok", "verified")]
        return format_table([c[0] for c in cols],
                            [[getattr(r, c[1]) for c in cols] for r in self.rows],
                            footer=[f"failed {f['scheme']} T={f['T']}: {f['error']}" for f in self.failures])


def format_table(header: list, rows: list, footer: Optional[list] = None) -> str:
    def cell(v):
        if isinstance(v, float):
            return f"{v:.3f}"
        return str(v)

    cells = [[cell(v) for v in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines += footer or []
    return "\n".join(lines)


def _bench_cell(scheme_id: str, T: int, config: ProbeConfig) -> BenchRow:
    scheme = get_scheme(scheme_id)
    if scheme_id == "pietrzak" and not is_power_of_two(T):
        raise ValueError(f"T={T} is not a power of two")
    bits = config.modulus_bits or config.lam
    t0 = time.perf_counter()
    params = scheme.setup(config.lam, T, config.seed, modulus_bits=bits)
    setup_ms = (time.perf_counter() - t0) * 1e3
    x = b"bench:" + scheme_id.encode()

    with measure() as ev:
        y = scheme.eval(params, x)
    eval_ms = _median_ms(lambda: scheme.eval(params, x), config.repetitions)
    with measure() as op:
        proof, _ = scheme.open(params, x, y)
    with measure() as ve:
        ok = scheme.verify(params, x, y, proof)
    verify_ms = _median_ms(lambda: scheme.verify(params, x, y, proof), config.repetitions)
    return BenchRow(scheme_id, T, ev.squarings, ev.group_ops, eval_ms, op.group_ops,
                    ve.squarings, ve.group_ops, verify_ms, len(proof), setup_ms, ok)


def bench(config: ProbeConfig, schemes: list) -> BenchReport:
    """One row per (scheme, T); a failing cell is recorded and the run continues."""
    report = BenchReport(lam=config.lam, modulus_bits=config.modulus_bits or config.lam)
    for scheme_id in schemes:
        for T in config.T_grid:
            try:
                report.rows.append(_bench_cell(scheme_id, T, config))
            except Exception as exc:  # noqa: BLE001 - recorded per cell
                report.failures.append({"scheme": scheme_id, "T": T,
                                        "error": f"{type(exc).__name__}: {exc}"})
    return report


# ---------------------------------------------------------------------------
# parallel speedup
# ---------------------------------------------------------------------------


def _chain_job(modulus: int, g: int, T: int) -> int:
    from .group import UnknownOrderGroup
    return UnknownOrderGroup(modulus).square_chain(g, T)


def _noop(_: int) -> int:
    return 0


@dataclass
class SpeedupReport:
    scheme: str
    T: int
    modulus_bits: int
    cpu_count: int
    workers: list
    race_wall_ms: dict
    speedup: dict
    throughput_per_s: dict
    throughput_scaling: dict
    sigma_threshold: float
    sigma_breaks: dict
    caveat: str = SEQUENTIALITY_CAVEAT
    schema: int = SCHEMA

    def to_json(self) -> dict:
        d = asdict(self)
        for k in ("race_wall_ms", "speedup", "throughput_per_s", "throughput_scaling", "sigma_breaks"):
            d[k] = {str(w): v for w, v in d[k].items()}
        return d

    def to_table(self) -> str:
        rows = [[w, self.race_wall_ms[w], self.speedup[w], self.throughput_per_s[w],
                 self.throughput_scaling[w], self.sigma_breaks[w]] for w in self.workers]
        head = [f"# {self.caveat}",
                f"# scheme={self.scheme} T={self.T} modulus_bits={self.modulus_bits} cpus={self.cpu_count}"]
        return "\n".join(head) + "\n" + format_table(
            ["workers", "race_ms", "speedup", "inst_per_s", "thr_scaling", "sigma_break"], rows)


def parallel_speedup_probe(config: ProbeConfig, scheme: str = "rsw", T: int = 2 ** 18,
                           modulus_bits: int = 2048) -> SpeedupReport:
    """Race ``Δ`` workers on one chain (first finisher wins), plus a throughput control.

    Race: the best honest strategy available here is redundancy, so the
    latency ratio wall(1)/wall(Δ) measures whether extra workers help.
    Control: ``Δ`` independent chains on ``Δ`` workers, instances per second
    relative to one worker.
    """
    if scheme not in ("rsw", "pietrzak", "wesolowski"):
        raise ValueError("parallel probe needs a squaring-chain scheme")
    group = sample_group(modulus_bits, config.seed)
    g = 3
    race, tput = {}, {}
    for w in config.workers:
        with ProcessPoolExecutor(max_workers=w) as pool:
            list(pool.map(_noop, range(w)))  # start every worker before timing
            lat = []
            for _ in range(config.repetitions):
                t0 = time.perf_counter()
                futs = [pool.submit(_chain_job, group.modulus, g, T) for _ in range(w)]
                done, _ = wait(futs, return_when=FIRST_COMPLETED)
                lat.append(time.perf_counter() - t0)
                # collect after join so the next repetition starts clean
                results = {f.result() for f in futs}
                if len(results) != 1:
                    raise RuntimeError("workers disagree on the chain output")
            race[w] = statistics.median(lat) * 1e3
            rates = []
            for _ in range(config.repetitions):
                t0 = time.perf_counter()
                futs = [pool.submit(_chain_job, group.modulus, g + k, T) for k in range(w)]
                for f in futs:
                    f.result()
                rates.append(w / (time.perf_counter() - t0))
            tput[w] = statistics.median(rates)
    base_w = min(config.workers)
    speedup = {w: race[base_w] / race[w] for w in config.workers}
    scaling = {w: tput[w] / tput[base_w] for w in config.workers}
    # a break means some worker count finished within sigma * (single-worker time)
    breaks = {w: race[w] < config.sigma_threshold * race[base_w] for w in config.workers}
    return SpeedupReport(scheme, T, group.bits, os.cpu_count() or 1, list(config.workers),
                         race, speedup, tput, scaling, config.sigma_threshold, breaks)


@dataclass
class DelayReport:
    modulus_bits: int
    T_grid: list
    wall_ms: list
    ratios: list
    schema: int = SCHEMA

    def to_json(self) -> dict:
        return asdict(self)

    def to_table(self) -> str:
        rows = [[T, ms, r] for T, ms, r in zip(self.T_grid, self.wall_ms, [float("nan")] + self.ratios)]
        return format_table(["T", "eval_ms", "ratio_vs_prev"], rows)


def delay_scaling_probe(config: ProbeConfig, T_grid: list, modulus_bits: int = 2048) -> DelayReport:
    """Median wall time of one squaring chain along ``T_grid``."""
    group = sample_group(modulus_bits, config.seed)
    walls = [_median_ms(lambda T=T: group.square_chain(3, T), config.repetitions) for T in T_grid]
    ratios = [b / a for a, b in zip(walls, walls[1:])]
    return DelayReport(group.bits, list(T_grid), walls, ratios)


# ---------------------------------------------------------------------------
# forgery
# ---------------------------------------------------------------------------


@dataclass
class ForgeryReport:
    scheme: str
    lam: int
    T: int
    queries: int
    successes: int
    rate: float
    bound: float
    analytic_rate: Optional[float]
    sigma: Optional[float]
    within_3sigma: Optional[bool]
    candidate_space: int
    seed: int
    schema: int = SCHEMA

    def to_json(self) -> dict:
        return asdict(self)

    def to_table(self) -> str:
        return format_table(list(asdict(self)), [list(asdict(self).values())])


def _forgery_setup(scheme_id: str, lam: int, T: int, seed: bytes):
    scheme = get_scheme(scheme_id)
    params = scheme.setup(lam, T, seed)
    x = b"forge"
    g = scheme.to_element(params, x)
    y = scheme.eval(params, x)
    return scheme, params, x, g, y


def _candidates(scheme, params: VdfParams, y: int, T: int):
    """(space size, sampler, enumerator) over forgery attempts ``(y', proof)``."""
    m = params.group.modulus
    if scheme.proof_kind == "empty":
        # proof-free: guess the output itself
        return (m - 1, lambda rng: (rng.randrange(1, m), Proof("empty")),
                lambda: ((v, Proof("empty")) for v in range(1, m)))
    wrong = y * 2 % m if y * 2 % m not in (0, y) else (y + 1) % m or 1
    k = 1 if scheme.proof_kind == "single" else T.bit_length() - 1
    kind = scheme.proof_kind

    def sample(rng):
        return wrong, Proof(kind, tuple(rng.randrange(1, m) for _ in range(k)))

    def enum():
        if k != 1:
            raise ValueError("exhaustive sweep only for one-element proofs")
        return ((wrong, Proof(kind, (e,))) for e in range(1, m))

    return (m - 1) ** k, sample, enum


def forgery_probe(config: ProbeConfig, scheme_id: str, T: int = 2, rng_seed: int = 0,
                  exhaustive_limit: int = 1 << 16) -> ForgeryReport:
    """Brute-force forgery at toy ``forgery_lambda`` with ``forgery_queries`` attempts.

    Proof-free schemes guess ``y``; the others fix a wrong ``y`` and guess
    the proof. When the candidate space is small the exact acceptance
    fraction is swept and the measured rate is compared at 3 sigma.
    """
    lam, q = config.forgery_lambda, config.forgery_queries
    scheme, params, x, g, y = _forgery_setup(scheme_id, lam, T, config.seed)
    space, sample, enum = _candidates(scheme, params, y, T)

    def accepts(cand) -> bool:
        yy, pr = cand
        try:
            return scheme.verify(params, x, yy, pr)
        except Exception:  # noqa: BLE001 - malformed attempt counts as rejected
            return False

    rng = random.Random(rng_seed)
    hits = sum(accepts(sample(rng)) for _ in range(q))
    rate = hits / q if q else 0.0
    analytic = sigma = within = None
    if space <= exhaustive_limit:
        try:
            analytic = sum(accepts(c) for c in enum()) / space
        except ValueError:
            analytic = None
    if analytic is not None and q:
        sigma = math.sqrt(analytic * (1 - analytic) / q)
        within = abs(rate - analytic) <= 3 * sigma
    return ForgeryReport(scheme_id, lam, T, q, hits, rate, q / 2 ** lam, analytic, sigma,
                         within, space, rng_seed)


# ---------------------------------------------------------------------------
# mutation soundness
# ---------------------------------------------------------------------------


@dataclass
class MutationReport:
    scheme: str
    lam: int
    T: int
    trials: int
    accepted: list
    self_check_failures: list
    schema: int = SCHEMA

    @property
    def accepted_count(self) -> int:
        return len(self.accepted)

    def to_json(self) -> dict:
        d = asdict(self)
        d["accepted_count"] = self.accepted_count
        return d

    def to_table(self) -> str:
        return format_table(["scheme", "lambda", "T", "trials", "accepted", "self_check_failures"],
                            [[self.scheme, self.lam, self.T, self.trials, self.accepted_count,
                              len(self.self_check_failures)]])


def mutation_soundness_probe(scheme_id: str, trials: int, lam: int = 32, T: int = 64,
                             seed: int = 0, setup_seed: bytes = b"mutation") -> MutationReport:
    """Mutate one field of an honest FS proof per trial; every mutant must be rejected.

    The field is ``y`` or one proof element. Reverting the mutation must
    restore acceptance (self-check of the harness).
    """
    scheme = get_scheme(scheme_id)
    params = scheme.setup(lam, T, setup_seed)
    m = params.group.modulus
    accepted, broken = [], []
    for t in range(trials):
        trial_seed = seed * 1_000_003 + t
        rng = random.Random(trial_seed)
        x = rng.randbytes(16)
        y = scheme.eval(params, x)
        proof, _ = scheme.open(params, x, y, FiatShamir())
        fields = ["y"] + [f"proof[{i}]" for i in range(len(proof))]
        target = rng.choice(fields)
        elems = list(proof.elements)
        old = y if target == "y" else elems[int(target[6:-1])]
        new = old
        while new == old:
            new = rng.randrange(1, m)
        if target == "y":
            y_m, p_m = new, proof
        else:
            elems[int(target[6:-1])] = new
            y_m, p_m = y, Proof(proof.kind, tuple(elems))
        if scheme.verify(params, x, y_m, p_m, FiatShamir()):
            accepted.append({"trial": t, "seed": trial_seed, "field": target,
                             "old": old, "new": new})
        if not scheme.verify(params, x, y, proof, FiatShamir()):
            broken.append({"trial": t, "seed": trial_seed})
    return MutationReport(scheme_id, lam, T, trials, accepted, broken)
