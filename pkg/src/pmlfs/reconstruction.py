"""Label-confidence reconstruction and weight-matrix reconstruction.

Stage 1 turns the binary candidate matrix Y into confidence scores
T = (Y Z) * Y using the label MI matrix Z: a candidate backed by strongly
related co-candidates gets a large score, an isolated candidate a small
one. Stage 3 propagates learned feature weights through label connectivity
(W Z') so features that identify well-connected labels rise in the final
ranking by row norm.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, ParseError
from .infotheory import as_affinity

NORMALIZATIONS = ("row-max", "global-max", "none")


@dataclass
class ReconstructedLabels:
    """Nonnegative confidence scores with the zero pattern of Y."""

    values: np.ndarray
    normalization: str


@dataclass
class FeatureRanking:
    """Feature order by descending row-L2 score; ties broken by index."""

    order: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        self.order = np.asarray(self.order, dtype=np.int64)
        self.scores = np.asarray(self.scores, dtype=np.float64)
        d = self.scores.shape[0]
        if sorted(self.order.tolist()) != list(range(d)):
            raise ContractError("order must be a permutation of 0..d-1")
        ranked = self.scores[self.order]
        if np.any(ranked[1:] > ranked[:-1]):
            raise ContractError("scores must be non-increasing along order")

    def top(self, count: int) -> np.ndarray:
        return self.order[:count]


def reconstruct_labels(Y, Z, normalization: str = "row-max", include_diagonal: bool = True) -> ReconstructedLabels:
    """Stage 1: T = (Y Z) * Y, then normalize.

    row-max divides every nonzero row by its maximum (non-degenerate rows
    peak at exactly 1), global-max divides by the matrix maximum, none
    keeps the raw products. Candidates whose label column carries no MI at
    all (constant column, Z row identically zero) end up with confidence 0;
    they are reported in a warning because a silently dropped candidate
    breaks the at-least-one-true-label premise.
    """
    Y = np.asarray(Y)
    Zv = as_affinity(Z)
    if Y.ndim != 2:
        raise ContractError(f"Y must be 2-D, got shape {Y.shape}")
    if not np.isin(Y, (0, 1)).all():
        raise ContractError("Y must be binary")
    if Zv.shape != (Y.shape[1], Y.shape[1]):
        raise ContractError(f"Z shape {Zv.shape} does not match q={Y.shape[1]}")
    if normalization not in NORMALIZATIONS:
        raise ContractError(f"unknown normalization {normalization!r}")

    if not include_diagonal:
        Zv = Zv.copy()
        np.fill_diagonal(Zv, 0.0)

    Yf = Y.astype(np.float64)
    raw = (Yf @ Zv) * Yf

    dead = np.flatnonzero(~Zv.any(axis=1) & Y.any(axis=0))
    if dead.size:
        warnings.warn(
            f"candidate labels {dead.tolist()} have an all-zero MI row; their confidences are 0",
            stacklevel=2,
        )

    values = raw
    if normalization == "row-max":
        peaks = raw.max(axis=1)
        rows = peaks > 0
        values = raw.copy()
        values[rows] = raw[rows] / peaks[rows, None]
    elif normalization == "global-max":
        peak = raw.max()
        values = raw / peak if peak > 0 else raw
    return ReconstructedLabels(values=values, normalization=normalization)


def reconstruct_weights(W, Zp) -> np.ndarray:
    """Stage 3: spread each feature's label weights along label connectivity.

    Returns W @ Z' (entrywise: sum_k W[i,k] * Z'[k,j]); nonnegative inputs
    give a nonnegative result.
    """
    W = np.asarray(W, dtype=np.float64)
    Zv = as_affinity(Zp)
    if W.ndim != 2 or W.shape[1] != Zv.shape[0]:
        raise ContractError(f"W shape {W.shape} does not match affinity shape {Zv.shape}")
    return W @ Zv


def rank_features(W) -> FeatureRanking:
    """Rank features by descending row L2 norm; ties keep ascending index."""
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2:
        raise ContractError(f"W must be 2-D, got shape {W.shape}")
    scores = np.linalg.norm(W, axis=1)
    order = np.argsort(-scores, kind="stable")
    return FeatureRanking(order=order, scores=scores)


def save_ranking(ranking: FeatureRanking, feature_names: list[str], path) -> Path:
    """Serialize as CSV: feature_index, feature_name, score, rank."""
    path = Path(path)
    if len(feature_names) != ranking.scores.shape[0]:
        raise ContractError("feature_names length does not match the ranking")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature_index", "feature_name", "score", "rank"])
        for rank, idx in enumerate(ranking.order, start=1):
            writer.writerow([int(idx), feature_names[idx], repr(float(ranking.scores[idx])), rank])
    return path


def load_ranking(path) -> tuple[FeatureRanking, list[str]]:
    """Read a ranking CSV back into a FeatureRanking plus feature names."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["feature_index", "feature_name", "score", "rank"]:
            raise ParseError(f"{path}:1: unexpected ranking header {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append((int(row[0]), row[1], float(row[2]), int(row[3])))
            except (ValueError, IndexError) as e:
                raise ParseError(f"{path}:{lineno}: malformed ranking row") from e
    rows.sort(key=lambda r: r[3])
    d = len(rows)
    order = np.array([r[0] for r in rows], dtype=np.int64)
    scores = np.empty(d, dtype=np.float64)
    names = [""] * d
    for idx, name, score, _ in rows:
        if not 0 <= idx < d:
            raise ParseError(f"{path}: feature index {idx} out of range for {d} rows")
        scores[idx] = score
        names[idx] = name
    return FeatureRanking(order=order, scores=scores), names
