"""Render report figures to files next to the delimited outputs.

Every CLI command that writes a CSV report also drops a PNG rendering of
it here (convergence trace, metric-vs-percent curves, sweep curves,
ablation bars, top-feature scores). Figures are a convenience view; the
CSV/JSON files remain the canonical outputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import METRIC_NAMES, EvaluationReport
from .optimizer import FitResult
from .reconstruction import FeatureRanking

TERM_LABELS = ("fit residual", "reconstruction residual", "laplacian", "row sparsity")


def save_trace_figure(result: FitResult, path) -> Path:
    path = Path(path)
    fig, (ax_theta, ax_terms) = plt.subplots(1, 2, figsize=(9, 3.5))
    iters = np.arange(len(result.theta))
    ax_theta.plot(iters, result.theta, color="tab:blue")
    ax_theta.set_xlabel("iteration")
    ax_theta.set_ylabel("objective")
    ax_theta.set_yscale("log")
    ax_theta.set_title("objective trace")
    for idx, label in enumerate(TERM_LABELS):
        ax_terms.plot(iters, result.terms[:, idx], label=label)
    ax_terms.set_xlabel("iteration")
    ax_terms.set_yscale("log")
    ax_terms.set_title("objective terms")
    ax_terms.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_ranking_figure(ranking: FeatureRanking, feature_names, path, top: int = 30) -> Path:
    path = Path(path)
    count = min(top, len(ranking.order))
    idx = ranking.order[:count]
    fig, ax = plt.subplots(figsize=(max(6, 0.25 * count), 3.5))
    ax.bar(np.arange(count), ranking.scores[idx], color="tab:blue")
    ax.set_xticks(np.arange(count))
    ax.set_xticklabels([feature_names[i] for i in idx], rotation=90, fontsize=7)
    ax.set_ylabel("row L2 score")
    ax.set_title(f"top {count} features")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_report_figure(report: EvaluationReport, path) -> Path:
    """Mean metric across folds as a function of the selected percentage."""
    path = Path(path)
    percents = sorted({row["percent"] for row in report.rows})
    fig, axes = plt.subplots(2, 3, figsize=(11, 6))
    for ax, name in zip(axes.ravel(), METRIC_NAMES):
        means = []
        stds = []
        for p in percents:
            vals = [row["metrics"][name] for row in report.rows if row["percent"] == p]
            means.append(np.mean(vals))
            stds.append(np.std(vals))
        ax.errorbar(percents, means, yerr=stds, marker="o", markersize=3, capsize=2)
        ax.set_title(name)
        ax.set_xlabel("fraction of features")
    axes.ravel()[-1].axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_sweep_figure(points: list[dict], param: str, path) -> Path:
    """points: [{"value": v, "aggregates": {metric: {mean, std}}}, ...]."""
    path = Path(path)
    values = [pt["value"] for pt in points]
    fig, axes = plt.subplots(2, 3, figsize=(11, 6))
    for ax, name in zip(axes.ravel(), METRIC_NAMES):
        means = [pt["aggregates"][name]["mean"] for pt in points]
        stds = [pt["aggregates"][name]["std"] for pt in points]
        ax.errorbar(values, means, yerr=stds, marker="o", markersize=3, capsize=2)
        ax.set_xscale("log")
        ax.set_title(name)
        ax.set_xlabel(param)
    axes.ravel()[-1].axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_ablation_figure(variants: dict[str, dict], path) -> Path:
    """variants: name -> aggregates, grouped bars per metric."""
    path = Path(path)
    names = list(variants)
    width = 0.8 / len(names)
    fig, ax = plt.subplots(figsize=(9, 4))
    base = np.arange(len(METRIC_NAMES))
    for pos, name in enumerate(names):
        means = [variants[name][m]["mean"] for m in METRIC_NAMES]
        stds = [variants[name][m]["std"] for m in METRIC_NAMES]
        ax.bar(base + pos * width, means, width=width, yerr=stds, capsize=2, label=name)
    ax.set_xticks(base + width * (len(names) - 1) / 2)
    ax.set_xticklabels(METRIC_NAMES, fontsize=8)
    ax.set_ylabel("mean across folds and percents")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
