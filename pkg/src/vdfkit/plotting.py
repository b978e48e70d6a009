"""Figures for bench and probe reports (written as PNG files)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def bench_figures(report, stem: Path) -> list[Path]:
    by_scheme: dict = {}
    for r in report.rows:
        by_scheme.setdefault(r.scheme, []).append(r)
    out = []

    fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
    for name, rows in by_scheme.items():
        Ts = [r.T for r in rows]
        a.plot(Ts, [max(r.eval_wall_ms, 1e-3) for r in rows], marker="o", label=name)
        b.plot(Ts, [max(r.verify_group_ops, 1) for r in rows], marker="o", label=name)
    for ax, title in ((a, "eval wall time (ms, median)"), (b, "verify group ops")):
        ax.set_xscale("log", base=2)
        ax.set_yscale("log")
        ax.set_xlabel("T")
        ax.set_title(title)
        ax.legend()
    out.append(_save(fig, stem.with_name(stem.stem + "_cost.png")))

    fig, ax = plt.subplots(figsize=(5, 4))
    for name, rows in by_scheme.items():
        ax.plot([r.T for r in rows], [r.proof_elements for r in rows], marker="s", label=name)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("T")
    ax.set_ylabel("proof elements")
    ax.legend()
    out.append(_save(fig, stem.with_name(stem.stem + "_proof_size.png")))
    return out


def speedup_figure(report, stem: Path) -> list[Path]:
    ws = report.workers
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ws, [report.speedup[w] for w in ws], marker="o", label="one chain, racing workers")
    ax.plot(ws, [report.throughput_scaling[w] for w in ws], marker="s", label="independent chains (throughput)")
    ax.plot(ws, ws, linestyle=":", color="gray", label="linear")
    ax.set_xlabel("workers")
    ax.set_ylabel("ratio vs. one worker")
    ax.set_title(f"T={report.T}, {report.modulus_bits}-bit modulus, {report.cpu_count} cpu")
    ax.legend()
    return [_save(fig, stem.with_name(stem.stem + "_speedup.png"))]


def delay_figure(report, stem: Path) -> list[Path]:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(report.T_grid, report.wall_ms, marker="o")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    ax.set_xlabel("T (squarings)")
    ax.set_ylabel("eval wall time (ms, median)")
    return [_save(fig, stem.with_name(stem.stem + "_delay.png"))]


def forgery_figure(report, stem: Path) -> list[Path]:
    fig, ax = plt.subplots(figsize=(5, 4))
    labels = ["measured"]
    vals = [report.rate]
    errs = [0.0]
    if report.analytic_rate is not None:
        labels.append("exhaustive")
        vals.append(report.analytic_rate)
        errs = [3 * (report.sigma or 0.0), 0.0]
    ax.bar(labels, vals, yerr=errs, capsize=6)
    ax.set_ylabel("acceptance rate")
    ax.set_title(f"{report.scheme}, lambda={report.lam}, q={report.queries}")
    return [_save(fig, stem.with_name(stem.stem + "_forgery.png"))]
