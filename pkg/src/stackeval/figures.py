"""Report figures: pass@k curves and outcome-proportion bars.

Only the CLI report path imports this module; the metrics core stays free of
plotting so it can run headless and fast.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from stackeval.metrics import FOLDED_CLASSES, SuiteReport

_CLASS_COLORS = {
    "syntax": "#d62728",
    "runtime": "#ff7f0e",
    "test_failure": "#1f77b4",
    "correct": "#2ca02c",
}


def render_pass_at_k_figure(report: SuiteReport, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ks = list(report.ks)
    for temp in report.temperatures:
        table = report.pass_at_k.get(temp, {})
        ax.plot(
            ks,
            [table[k] * 100.0 for k in ks],
            marker="o",
            label=f"T={temp}",
        )
    if report.best_per_k:
        ax.plot(
            ks,
            [report.best_per_k[k].value * 100.0 for k in ks],
            marker="s",
            linestyle="--",
            color="black",
            label="best",
        )
    ax.set_xscale("log")
    ax.set_xticks(ks)
    ax.get_xaxis().set_major_formatter(matplotlib.ticker.ScalarFormatter())
    ax.set_xlabel("k")
    ax.set_ylabel("pass@k (%)")
    ax.set_title(f"{report.model_label} on {report.suite}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_outcomes_figure(report: SuiteReport, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    temps = [t for t in report.temperatures if t in report.proportions]
    x = range(len(temps))
    bottom = [0.0] * len(temps)
    for cls in FOLDED_CLASSES:
        heights = [report.proportions[t][cls] for t in temps]
        ax.bar(
            x,
            heights,
            bottom=bottom,
            label=cls,
            color=_CLASS_COLORS[cls],
            width=0.6,
        )
        bottom = [b + h for b, h in zip(bottom, heights)]
    ax.set_xticks(list(x))
    ax.set_xticklabels([f"T={t}" for t in temps])
    ax.set_ylabel("fraction of programs")
    ax.set_title(f"Outcome mix: {report.model_label} on {report.suite}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_figures(report: SuiteReport, out_dir: str, prefix: str = "") -> list[str]:
    """Render both report figures into out_dir; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    stem = prefix or f"{report.suite}"
    written = []
    if report.ks and report.pass_at_k:
        written.append(
            render_pass_at_k_figure(report, os.path.join(out_dir, f"{stem}_pass_at_k.png"))
        )
    if report.proportions:
        written.append(
            render_outcomes_figure(report, os.path.join(out_dir, f"{stem}_outcomes.png"))
        )
    return written
