"""Matplotlib renderings written next to the CSV outputs.

The CSV files are the data contract; these plots are the human-readable
report view of the same numbers.  Everything renders headlessly to PNG.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_mse_curves(
    sigma2_grid,
    psi_true,
    psi_postulated,
    se_line,
    points: dict[str, tuple[float, float]],
    path: Path,
) -> None:
    """MSE curves vs noise, the rate line, and the labeled crossing points."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.plot(sigma2_grid, se_line, "-", color="0.3", label="rate line")
    ax.plot(sigma2_grid, psi_true, "--", label="MSE, true prior")
    ax.plot(sigma2_grid, psi_postulated, "-.", label="MSE, postulated prior")
    for name, (x, y) in points.items():
        ax.plot([x], [y], "ko", ms=4)
        ax.annotate(name, (x, y), textcoords="offset points", xytext=(6, -2))
    ax.set_xlabel(r"$\sigma^2$")
    ax.set_ylabel("MSE")
    ax.set_ylim(bottom=0.0)
    ax.legend(loc="lower right", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_table_errors(thetas, rel_errors: dict[str, list], path: Path) -> None:
    """Relative error of each prediction across the mismatch sweep."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for label, errs in rel_errors.items():
        pairs = [(t, e) for t, e in zip(thetas, errs) if e is not None and e > 0]
        if pairs:
            ax.semilogy(*zip(*pairs), "o-", label=label)
    ax.set_xlabel("postulated sparsity")
    ax.set_ylabel("relative error of predicted excess MSE")
    ax.legend(fontsize=9)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_rate_sweep(
    deltas,
    curves: dict[str, list],
    crosses: tuple[list, list] | None,
    path: Path,
    errorbars: tuple[list, list] | None = None,
) -> None:
    """MSE-vs-measurement-rate curves with predicted points as crosses."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    styles = ["-.", "--", "-"]
    for (label, ys), style in zip(curves.items(), styles):
        ax.plot(deltas, ys, style, label=label)
    if errorbars is not None:
        ax.errorbar(deltas, errorbars[0], yerr=errorbars[1], fmt="none",
                    ecolor="0.5", capsize=2)
    if crosses is not None:
        ax.plot(crosses[0], crosses[1], "x", color="k", ms=8,
                label="predicted, window-2 in AMP")
    ax.set_xlabel(r"measurement rate $\delta$")
    ax.set_ylabel("MSE")
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_amp_traces(traces: list[dict], path: Path) -> None:
    """Per-iteration MSE trajectories of the simulated runs."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    seen = set()
    for t in traces:
        label = t["label"] if t["label"] not in seen else None
        seen.add(t["label"])
        ax.semilogy(range(1, len(t["mse"]) + 1), t["mse"],
                    color=t.get("color", "C0"), alpha=0.5, label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel("per-entry MSE")
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
