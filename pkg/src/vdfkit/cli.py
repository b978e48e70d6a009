"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .core import (
    Statement,
    VdfParams,
    decode_input,
    encode_input,
    from_envelope,
    fs_compile,
    group_descriptor,
    group_from_descriptor,
    to_envelope,
    verify_transcript,
)
from .group import MissingTrapdoor, hex_to_int, int_to_hex
from .harness import (
    ProbeConfig,
    bench,
    delay_scaling_probe,
    forgery_probe,
    mutation_soundness_probe,
    parallel_speedup_probe,
)
from .reductions import (
    general_vdf_to_rsvl,
    instance_from_descriptor,
    perm_vdf_to_rsvl,
    rsvl_to_general_vdf,
    rsvl_to_perm_vdf,
    truncated_hash_owf,
)
from .schemes import SCHEMES, get_scheme
from .search import (
    check_rsvl_solution,
    keyed_linear_family,
    solution_from_json,
    toy_linear_family,
    walk,
)
from .vectors import is_vector, verify_vector


class UsageError(Exception):
    pass


def _seed(args) -> bytes:
    s = args.seed if args.seed is not None else os.environ.get("VDF_FORGE_SEED", "vdfkit")
    return str(s).encode()


def _int_seed(args) -> int:
    s = args.seed if args.seed is not None else os.environ.get("VDF_FORGE_SEED", "0")
    try:
        return int(s)
    except ValueError:
        return int.from_bytes(str(s).encode()[:8], "big")


def _read_json(path: str, line: int = 0) -> dict:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise UsageError(f"{path}: empty input")
        if not 0 <= line < len(lines):
            raise UsageError(f"{path}: no record at line {line}")
        return json.loads(lines[line])


def _emit(args, payload, table: str | None = None) -> None:
    text = table if (getattr(args, "format", "json") == "table" and table is not None) \
        else json.dumps(payload, indent=2)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def _params(args) -> VdfParams:
    if getattr(args, "params", None):
        env = _read_json(args.params)
        return VdfParams(int(env["lambda"]), int(env["T"]), env["scheme"],
                         group_from_descriptor(env["group"]), env.get("mode", "fiat_shamir"),
                         env.get("domain", "bytes"))
    if not args.scheme:
        raise UsageError("give --params FILE or --scheme with --lambda/--T/--seed")
    scheme = get_scheme(args.scheme)
    kw = {"modulus_bits": args.modulus_bits}
    if args.domain:
        kw["domain"] = args.domain
    return scheme.setup(args.lam, args.T, _seed(args), **kw)


def _params_envelope(params: VdfParams) -> dict:
    return {"scheme": params.scheme_id, "lambda": params.lam, "T": params.T, "mode": params.mode,
            "domain": params.domain, "group": group_descriptor(params.group)}


def _input(params: VdfParams, x_hex: str):
    return decode_input(params, x_hex)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_setup(args) -> int:
    _emit(args, _params_envelope(_params(args)))
    return 0


def cmd_eval(args) -> int:
    params = _params(args)
    scheme = get_scheme(params.scheme_id)
    x = _input(params, args.x)
    y = scheme.eval(params, x)
    _emit(args, dict(_params_envelope(params), x_hex=encode_input(x), y_hex=int_to_hex(y)))
    return 0


def cmd_open(args) -> int:
    params = _params(args)
    scheme = get_scheme(params.scheme_id)
    x = _input(params, args.x)
    y = hex_to_int(args.y) if args.y else scheme.eval(params, x)
    proof, transcript = scheme.open(params, x, y)
    _emit(args, to_envelope(params, Statement(x, y, params.T), proof, transcript))
    return 0


def _verify_envelope(env: dict) -> bool:
    params, st, proof, transcript = from_envelope(env)
    scheme = get_scheme(params.scheme_id)
    if params.mode == "interactive":
        return verify_transcript(scheme, params, st, transcript)
    if params.scheme_id == "rsw" and not params.group.has_trapdoor:
        # no trapdoor after serialization: a time-lock solution is checked by redoing the chain
        return len(proof) == 0 and scheme.eval(params, st.x) == st.y
    compiled = fs_compile(scheme)
    return compiled.verify_compiled(params, st, proof, transcript if transcript.rounds else None)


def cmd_verify(args) -> int:
    rec = _read_json(args.input, args.line)
    ok = verify_vector(rec) if is_vector(rec) else _verify_envelope(rec)
    print(json.dumps({"accept": bool(ok)}))
    return 0 if ok else 1


def cmd_reduce(args) -> int:
    if args.direction == "vdf-to-rsvl":
        params = _params(args)
        scheme = get_scheme(params.scheme_id)
        x = _input(params, args.x)
        if args.construction == "permutation":
            inst = perm_vdf_to_rsvl(scheme, params, x)
        else:
            inst = general_vdf_to_rsvl(scheme, params, x)
        _emit(args, inst.to_json())
        return 0
    if args.family == "keyed_linear":
        fam = keyed_linear_family(args.n, _seed(args))
    else:
        fam = toy_linear_family(args.n, args.c)
    if args.owf:
        domain = [bytes([a, b]) for a in range(97, 101) for b in range(97, 101)]
        H = truncated_hash_owf(args.n, domain, _seed(args))
        vdf = rsvl_to_general_vdf(fam, H)
        params = vdf.setup(None, args.T)
        x = bytes.fromhex(args.x)
    else:
        vdf = rsvl_to_perm_vdf(fam)
        params = vdf.setup(None, args.T)
        x = hex_to_int(args.x)
    y = vdf.eval(params, x)
    proof, _ = vdf.open(params, x, y)
    _emit(args, {"scheme": vdf.scheme_id, "family": fam.descriptor, "T": params.T,
                 "owf": H.name if args.owf else None, "x_hex": encode_input(x),
                 "y_hex": int_to_hex(y), "proof_hex": [], "accept": vdf.verify(params, x, y, proof)})
    return 0


def cmd_walk(args) -> int:
    inst = instance_from_descriptor(_read_json(args.instance))
    i = inst.T if args.i is None else args.i
    if not 0 <= i <= inst.T:
        raise UsageError(f"step {i} outside [0, {inst.T}]")
    v = walk(inst, i)
    _emit(args, {"i": i, "v_hex": int_to_hex(v), "accepted": inst.V(v, i) if i else True})
    return 0


def cmd_check_solution(args) -> int:
    inst = instance_from_descriptor(_read_json(args.instance))
    sol = solution_from_json(_read_json(args.solution))
    ok = check_rsvl_solution(inst, sol)
    print(json.dumps({"valid": ok}))
    return 0 if ok else 1


def _figures(args, fn, report) -> list:
    if not args.out:
        return []
    from . import plotting

    return [str(p) for p in getattr(plotting, fn)(report, Path(args.out))]


def cmd_bench(args) -> int:
    cfg = ProbeConfig(T_grid=args.T_grid, repetitions=args.reps, lam=args.lam,
                      modulus_bits=args.modulus_bits, seed=_seed(args))
    schemes = args.scheme.split(",") if args.scheme else list(SCHEMES)
    report = bench(cfg, schemes)
    _emit(args, report.to_json(), report.to_table())
    for p in _figures(args, "bench_figures", report):
        print(f"figure: {p}", file=sys.stderr)
    return 0


def cmd_probe(args) -> int:
    cfg = ProbeConfig(repetitions=args.reps, workers=args.workers, forgery_lambda=args.lam,
                      forgery_queries=args.queries, lam=args.lam, seed=_seed(args))
    scheme = args.scheme or "rsw"
    if args.kind == "parallel":
        report = parallel_speedup_probe(cfg, scheme, args.T, args.modulus_bits or 2048)
        fig = "speedup_figure"
    elif args.kind == "delay":
        grid = args.T_grid or [args.T, 2 * args.T]
        report = delay_scaling_probe(cfg, grid, args.modulus_bits or 2048)
        fig = "delay_figure"
    elif args.kind == "forgery":
        report = forgery_probe(cfg, scheme, args.T, _int_seed(args))
        fig = "forgery_figure"
    else:
        report = mutation_soundness_probe(scheme, args.trials, args.lam, args.T, _int_seed(args))
        fig = None
    _emit(args, report.to_json(), report.to_table())
    if fig:
        for p in _figures(args, fig, report):
            print(f"figure: {p}", file=sys.stderr)
    if args.kind == "mutation" and (report.accepted or report.self_check_failures):
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _int_list(s: str) -> list:
    try:
        return [int(v, 0) for v in s.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def _common(p, *, T_default=16, lam_default=32):
    p.add_argument("--scheme", help="dwork_naor, rsw, pietrzak or wesolowski")
    p.add_argument("--lambda", dest="lam", type=int, default=lam_default)
    p.add_argument("--T", type=int, default=T_default)
    p.add_argument("--seed", default=None, help="defaults to $VDF_FORGE_SEED")
    p.add_argument("--out", help="write the report here (figures go alongside)")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--modulus-bits", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vdfkit", description="VDF toolkit: schemes, rSVL reductions, probes")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_params(p):
        _common(p)
        p.add_argument("--params", help="params envelope JSON from `setup`")
        p.add_argument("--domain", choices=("bytes", "residue"))

    p = sub.add_parser("setup", help="sample public parameters")
    with_params(p)
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("eval", help="evaluate y = Eval(pp, x)")
    with_params(p)
    p.add_argument("--x", required=True, help="input as hex (bytes, or a residue)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("open", help="produce a Fiat-Shamir proof envelope")
    with_params(p)
    p.add_argument("--x", required=True)
    p.add_argument("--y", help="claimed output (hex); evaluated when omitted")
    p.set_defaults(func=cmd_open)

    p = sub.add_parser("verify", help="verify an envelope or a test-vector record")
    p.add_argument("input", help="JSON envelope, or JSON-lines vector file ('-' for stdin)")
    p.add_argument("--line", type=int, default=0, help="record index in a JSON-lines file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="run a VDF <-> rSVL construction")
    p.add_argument("direction", choices=("vdf-to-rsvl", "rsvl-to-vdf"))
    with_params(p)
    p.add_argument("--x", required=True)
    p.add_argument("--construction", choices=("permutation", "general"), default="general")
    p.add_argument("--family", choices=("toy_linear", "keyed_linear"), default="toy_linear")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--c", type=int, default=5)
    p.add_argument("--owf", action="store_true", help="general variant through an injective H")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("walk", help="walk an rSVL instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--i", type=int, default=None, help="steps (default T)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("check-solution", help="check an rSVL solution")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_check_solution)

    p = sub.add_parser("bench", help="op-count and timing table per (scheme, T)")
    _common(p)
    p.add_argument("--T-grid", type=_int_list, default=[2 ** k for k in range(4, 11)])
    p.add_argument("--reps", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("probe", help="adversary probes")
    p.add_argument("kind", choices=("parallel", "delay", "forgery", "mutation"))
    _common(p, T_default=2, lam_default=8)
    p.add_argument("--T-grid", type=_int_list, default=None)
    p.add_argument("--workers", type=_int_list, default=[1, 2, 4, 8])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--queries", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_probe)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, TypeError, OSError, json.JSONDecodeError,
            MissingTrapdoor) as exc:
        print(f"vdfkit {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
