"""Downstream evaluation: deterministic classifier and the five metrics.

A closed-form binary-relevance ridge model (one least-squares scorer per
label, intercept unpenalized) replaces the usual kernel classifier so that
every report is exactly reproducible. Ranking Loss, Coverage and Average
Precision rank the raw scores per sample (ties resolved by ascending label
index); Macro/Micro-F1 threshold the scores at 0.5. Coverage is normalized
by the number of labels, so every metric lives in [0, 1].
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset, kfold_split
from .errors import ContractError, UndefinedMetricError
from .reconstruction import FeatureRanking

METRIC_NAMES = ("ranking_loss", "coverage", "average_precision", "macro_f1", "micro_f1")


# ---------------------------------------------------------------------------
# classifier


@dataclass
class RidgeBRModel:
    """Per-label linear scorers; coef row 0 holds the intercepts."""

    coef: np.ndarray

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.coef.shape[0] - 1:
            raise ContractError(f"expected {self.coef.shape[0] - 1} features, got shape {X.shape}")
        scores = X @ self.coef[1:] + self.coef[0]
        if not np.all(np.isfinite(scores)):
            raise ContractError("model produced non-finite scores")
        return scores


def train_br_ridge(X_sel, Y, lam: float = 1.0) -> RidgeBRModel:
    """Closed-form ridge regression per label, intercept unpenalized.

    Solves (Xa' Xa + lam P) B = Xa' Y with Xa = [1 | X] and P the identity
    with a zeroed intercept entry; lam > 0 makes the system nonsingular.
    """
    X = np.asarray(X_sel, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if lam <= 0:
        raise ContractError(f"lambda must be > 0, got {lam}")
    if X.ndim != 2 or X.shape[1] < 1:
        raise ContractError(f"need at least one feature, got shape {X.shape}")
    if Y.ndim != 2 or Y.shape[0] != X.shape[0]:
        raise ContractError(f"X {X.shape} and Y {Y.shape} must share the sample dimension")
    m, s = X.shape
    Xa = np.hstack([np.ones((m, 1)), X])
    penalty = np.eye(s + 1)
    penalty[0, 0] = 0.0
    coef = np.linalg.solve(Xa.T @ Xa + lam * penalty, Xa.T @ Y)
    return RidgeBRModel(coef=coef)


# ---------------------------------------------------------------------------
# ranking metrics


def _check_pair(S, Y, score_name: str) -> tuple[np.ndarray, np.ndarray]:
    S = np.asarray(S, dtype=np.float64)
    Y = np.asarray(Y)
    if S.ndim != 2 or S.shape != Y.shape:
        raise ContractError(f"{score_name} shape {S.shape} does not match labels {Y.shape}")
    if not np.all(np.isfinite(S)):
        raise ContractError(f"{score_name} contains NaN/Inf")
    if not np.isin(Y, (0, 1)).all():
        raise ContractError("ground-truth labels must be binary")
    return S, Y.astype(np.int8)


def _descending_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks, highest score first, ties by ascending label index."""
    order = np.lexsort((np.arange(scores.size), -scores))
    ranks = np.empty(scores.size, dtype=np.int64)
    ranks[order] = np.arange(1, scores.size + 1)
    return ranks


def _finish(values: list[float], skipped: int, metric: str) -> float:
    if not values:
        raise UndefinedMetricError(f"{metric}: no row had the required label pattern")
    if skipped:
        warnings.warn(f"{metric}: skipped {skipped} rows without the required label pattern", stacklevel=3)
    return float(np.mean(values))


def ranking_loss(S, Ytrue) -> float:
    """Mean fraction of wrongly ordered (positive, negative) pairs; ties count half.

    Rows lacking a positive or a negative are skipped (and counted in a
    warning); if every row is skipped the metric is undefined.
    """
    S, Y = _check_pair(S, Ytrue, "scores")
    values: list[float] = []
    skipped = 0
    for i in range(Y.shape[0]):
        pos = Y[i] == 1
        n_pos = int(pos.sum())
        n_neg = Y.shape[1] - n_pos
        if n_pos == 0 or n_neg == 0:
            skipped += 1
            continue
        sp = S[i, pos][:, None]
        sn = S[i, ~pos][None, :]
        bad = np.count_nonzero(sp < sn) + 0.5 * np.count_nonzero(sp == sn)
        values.append(bad / (n_pos * n_neg))
    return _finish(values, skipped, "ranking_loss")


def coverage(S, Ytrue) -> float:
    """Mean of (worst positive rank - 1) / q; 0 when positives lead every row."""
    S, Y = _check_pair(S, Ytrue, "scores")
    q = Y.shape[1]
    values: list[float] = []
    skipped = 0
    for i in range(Y.shape[0]):
        pos = Y[i] == 1
        if not pos.any():
            skipped += 1
            continue
        ranks = _descending_ranks(S[i])
        values.append((int(ranks[pos].max()) - 1) / q)
    return _finish(values, skipped, "coverage")


def average_precision(S, Ytrue) -> float:
    """Mean precision at each positive label's rank, averaged per sample."""
    S, Y = _check_pair(S, Ytrue, "scores")
    values: list[float] = []
    skipped = 0
    for i in range(Y.shape[0]):
        pos = Y[i] == 1
        if not pos.any():
            skipped += 1
            continue
        ranks = np.sort(_descending_ranks(S[i])[pos])
        values.append(float(np.mean(np.arange(1, ranks.size + 1) / ranks)))
    return _finish(values, skipped, "average_precision")


# ---------------------------------------------------------------------------
# F1 metrics (0/0 := 0 throughout)


def _check_binary_pair(pred, Ytrue) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred)
    Y = np.asarray(Ytrue)
    if pred.shape != Y.shape or pred.ndim != 2:
        raise ContractError(f"prediction shape {pred.shape} does not match labels {Y.shape}")
    for name, M in (("predictions", pred), ("labels", Y)):
        if not np.isin(M, (0, 1)).all():
            raise ContractError(f"{name} must be binary")
    return pred.astype(np.int8), Y.astype(np.int8)


def macro_f1(pred, Ytrue) -> float:
    pred, Y = _check_binary_pair(pred, Ytrue)
    tp = np.count_nonzero((pred == 1) & (Y == 1), axis=0)
    fp = np.count_nonzero((pred == 1) & (Y == 0), axis=0)
    fn = np.count_nonzero((pred == 0) & (Y == 1), axis=0)
    denom = 2 * tp + fp + fn
    per_label = np.divide(2 * tp, denom, out=np.zeros(Y.shape[1]), where=denom > 0)
    return float(np.mean(per_label))


def micro_f1(pred, Ytrue) -> float:
    pred, Y = _check_binary_pair(pred, Ytrue)
    tp = int(np.count_nonzero((pred == 1) & (Y == 1)))
    fp = int(np.count_nonzero((pred == 1) & (Y == 0)))
    fn = int(np.count_nonzero((pred == 0) & (Y == 1)))
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def score_all(S, pred, Ytrue) -> dict[str, float]:
    return {
        "ranking_loss": ranking_loss(S, Ytrue),
        "coverage": coverage(S, Ytrue),
        "average_precision": average_precision(S, Ytrue),
        "macro_f1": macro_f1(pred, Ytrue),
        "micro_f1": micro_f1(pred, Ytrue),
    }


# ---------------------------------------------------------------------------
# cross-validated selection protocol


@dataclass
class EvaluationReport:
    """Per-(fold, percent) metric values plus mean/std aggregates."""

    rows: list[dict]
    aggregates: dict[str, dict[str, float]]


def evaluate_selection(
    ds: Dataset,
    ranking: FeatureRanking,
    percents: list[float],
    folds: int = 10,
    seed: int = 0,
    lam: float = 1.0,
) -> EvaluationReport:
    """Cross-validate a ranking: top ceil(p*d) features per percent p.

    For every fold and percent, a ridge binary-relevance model is trained
    on the training fold's ground-truth labels over the selected features,
    the test fold is scored, and all five metrics are recorded. Aggregates
    are mean and (population) standard deviation across every
    (fold, percent) cell.
    """
    if ds.true_labels is None:
        raise ContractError("evaluation requires ground-truth labels")
    if ranking.scores.shape[0] != ds.d:
        raise ContractError(f"ranking covers {ranking.scores.shape[0]} features, dataset has {ds.d}")
    if not percents:
        raise ContractError("percents must be nonempty")
    counts = []
    for p in percents:
        count = math.ceil(p * ds.d)
        if count < 1 or count > ds.d:
            raise ContractError(f"percent {p} selects {count} of {ds.d} features")
        counts.append(count)

    X = ds.features
    Y = ds.true_labels
    rows: list[dict] = []
    for fold_id, split in enumerate(kfold_split(ds.n, folds, seed)):
        for p, count in zip(percents, counts):
            sel = ranking.top(count)
            model = train_br_ridge(X[split.train_indices][:, sel], Y[split.train_indices], lam)
            scores = model.predict(X[split.test_indices][:, sel])
            pred = (scores >= 0.5).astype(np.int8)
            metrics = score_all(scores, pred, Y[split.test_indices])
            rows.append(
                {"fold": fold_id, "percent": p, "n_features": count, "metrics": metrics}
            )
    aggregates = {}
    for name in METRIC_NAMES:
        values = np.array([row["metrics"][name] for row in rows])
        aggregates[name] = {"mean": float(values.mean()), "std": float(values.std())}
    return EvaluationReport(rows=rows, aggregates=aggregates)


def save_report_json(report: EvaluationReport, path) -> Path:
    path = Path(path)
    payload = {"rows": report.rows, "aggregates": report.aggregates}
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def save_report_csv(report: EvaluationReport, path) -> Path:
    """Flat CSV: fold, percent, metric, value."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", "percent", "metric", "value"])
        for row in report.rows:
            for name in METRIC_NAMES:
                writer.writerow(
                    [row["fold"], repr(float(row["percent"])), name, repr(float(row["metrics"][name]))]
                )
    return path


def load_report_json(path) -> EvaluationReport:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return EvaluationReport(rows=payload["rows"], aggregates=payload["aggregates"])
