"""Multi-label data containers, loaders, candidate-noise injection, splits.

The primary on-disk format is a pair of CSV files (features, labels) plus a
small JSON sidecar giving dimensions and whether the label file holds ground
truth or already-noisy candidates. A dense ARFF-like reader covers the
MULAN-style benchmark files (numeric attributes = features, nominal {0,1}
attributes = labels).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ContractError, ParseError, ValidationError


@dataclass
class Dataset:
    """An immutable multi-label dataset.

    Parameters
    ----------
    features : (n, d) float array, finite
    candidate_labels : (n, q) binary array; every row has at least one 1
    true_labels : optional (n, q) binary array, evaluation only;
        candidate_labels >= true_labels elementwise (noise only adds positives)
    feature_names, label_names : column identifiers (generated if omitted)
    """

    features: np.ndarray
    candidate_labels: np.ndarray
    true_labels: Optional[np.ndarray] = None
    feature_names: list[str] = field(default_factory=list)
    label_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValidationError(f"features must be a non-empty 2-D matrix, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValidationError("features contain NaN/Inf")
        self.features = X

        self.candidate_labels = self._check_labels(self.candidate_labels, "candidate_labels")
        empty = np.flatnonzero(self.candidate_labels.sum(axis=1) == 0)
        if empty.size:
            raise ValidationError(f"candidate label rows {empty.tolist()} have no positive label")

        if self.true_labels is not None:
            self.true_labels = self._check_labels(self.true_labels, "true_labels")
            if np.any(self.candidate_labels < self.true_labels):
                raise ValidationError("candidate_labels must cover true_labels elementwise")

        if not self.feature_names:
            self.feature_names = [f"f{i}" for i in range(self.d)]
        if not self.label_names:
            self.label_names = [f"label{j}" for j in range(self.q)]
        if len(self.feature_names) != self.d:
            raise ValidationError(f"expected {self.d} feature names, got {len(self.feature_names)}")
        if len(self.label_names) != self.q:
            raise ValidationError(f"expected {self.q} label names, got {len(self.label_names)}")

        for arr in (self.features, self.candidate_labels, self.true_labels):
            if arr is not None:
                arr.setflags(write=False)

    def _check_labels(self, Y, name: str) -> np.ndarray:
        Y = np.asarray(Y)
        if Y.ndim != 2 or Y.shape[0] != self.n or Y.shape[1] < 1:
            raise ValidationError(f"{name} must be (n, q) with q >= 1, got shape {Y.shape}")
        if not np.isin(Y, (0, 1)).all():
            raise ValidationError(f"{name} must be binary")
        return Y.astype(np.int8)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def q(self) -> int:
        return self.candidate_labels.shape[1]


@dataclass
class FoldSplit:
    """One train/test split; test folds across a k-fold run partition 0..n."""

    train_indices: np.ndarray
    test_indices: np.ndarray

    def __post_init__(self):
        self.train_indices = np.asarray(self.train_indices, dtype=np.int64)
        self.test_indices = np.asarray(self.test_indices, dtype=np.int64)
        if np.intersect1d(self.train_indices, self.test_indices).size:
            raise ValidationError("train and test indices overlap")


# ---------------------------------------------------------------------------
# loading / saving


def load_dataset(path, format: str = "csv-pair", labels_are_truth: Optional[bool] = None) -> Dataset:
    """Load a dataset from disk.

    csv-pair: ``path`` is the JSON sidecar; it declares n/d/q, the label
    role, and (optionally) the feature/label CSV file names. arff-like:
    ``path`` is a single dense ARFF file; ``labels_are_truth`` defaults to
    True for benchmark files.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    if format == "csv-pair":
        return _load_csv_pair(path, labels_are_truth)
    if format == "arff-like":
        return _load_arff(path, True if labels_are_truth is None else labels_are_truth)
    raise ContractError(f"unknown dataset format {format!r}")


def _load_csv_pair(sidecar_path: Path, labels_are_truth: Optional[bool]) -> Dataset:
    try:
        meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"{sidecar_path}:{e.lineno}: invalid JSON sidecar: {e.msg}") from e
    for key in ("n", "d", "q", "labels_are_truth"):
        if key not in meta:
            raise ValidationError(f"{sidecar_path}: sidecar missing required key {key!r}")
    try:
        declared = {key: int(meta[key]) for key in ("n", "d", "q")}
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{sidecar_path}: sidecar dimensions must be integers") from e
    meta.update(declared)

    stem = sidecar_path.name.removesuffix(".json")
    feat_path = sidecar_path.parent / meta.get("features_csv", f"{stem}.features.csv")
    label_path = sidecar_path.parent / meta.get("labels_csv", f"{stem}.labels.csv")

    feature_names, X = _read_numeric_csv(feat_path)
    label_names, Y = _read_label_csv(label_path)

    if X.shape != (meta["n"], meta["d"]):
        raise ValidationError(
            f"{feat_path}: feature matrix is {X.shape}, sidecar declares ({meta['n']}, {meta['d']})"
        )
    if Y.shape != (meta["n"], meta["q"]):
        raise ValidationError(
            f"{label_path}: label matrix is {Y.shape}, sidecar declares ({meta['n']}, {meta['q']})"
        )

    truth = meta["labels_are_truth"] if labels_are_truth is None else labels_are_truth
    candidates = Y
    true = Y if truth else None
    if "candidate_labels_csv" in meta:
        cand_path = sidecar_path.parent / meta["candidate_labels_csv"]
        cand_names, candidates = _read_label_csv(cand_path)
        if candidates.shape != Y.shape or cand_names != label_names:
            raise ValidationError(f"{cand_path}: candidate labels do not match the label file layout")
        if not truth:
            raise ValidationError(f"{sidecar_path}: candidate file requires labels_are_truth=true")
    return Dataset(
        features=X,
        candidate_labels=candidates,
        true_labels=true,
        feature_names=feature_names,
        label_names=label_names,
    )


def _read_rows(path: Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    if not rows:
        raise ParseError(f"{path}:1: empty file")
    header = rows[0][1]
    body = rows[1:]
    for lineno, row in body:
        if len(row) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
    return header, body


def _read_numeric_csv(path: Path) -> tuple[list[str], np.ndarray]:
    header, body = _read_rows(path)
    data = np.empty((len(body), len(header)), dtype=np.float64)
    for i, (lineno, row) in enumerate(body):
        for j, cell in enumerate(row):
            try:
                data[i, j] = float(cell)
            except ValueError as e:
                raise ParseError(
                    f"{path}:{lineno}: cannot parse {cell!r} as a number (column {header[j]!r})"
                ) from e
    return header, data


def _read_label_csv(path: Path) -> tuple[list[str], np.ndarray]:
    header, body = _read_rows(path)
    data = np.empty((len(body), len(header)), dtype=np.int8)
    for i, (lineno, row) in enumerate(body):
        for j, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError as e:
                raise ParseError(
                    f"{path}:{lineno}: cannot parse {cell!r} as a label (column {header[j]!r})"
                ) from e
            if value not in (0.0, 1.0):
                raise ValidationError(
                    f"{path}:{lineno}: non-binary label value {cell!r} at row {i}, column {header[j]!r}"
                )
            data[i, j] = int(value)
        if not data[i].any():
            raise ValidationError(f"{path}:{lineno}: label row {i} has no positive label")
    return header, data


def _load_arff(path: Path, labels_are_truth: bool) -> Dataset:
    feature_cols: list[tuple[int, str]] = []
    label_cols: list[tuple[int, str]] = []
    data_rows: list[tuple[int, list[str]]] = []
    in_data = False
    n_attrs = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            lower = line.lower()
            if in_data:
                data_rows.append((lineno, next(csv.reader([line]))))
            elif lower.startswith("@attribute"):
                parts = line.split(None, 2)
                if len(parts) < 3:
                    raise ParseError(f"{path}:{lineno}: malformed @attribute line")
                name, kind = parts[1].strip("'\""), parts[2].strip()
                if kind.startswith("{"):
                    values = {v.strip().strip("'\"") for v in kind.strip("{}").split(",")}
                    if not values <= {"0", "1", "0.0", "1.0"}:
                        raise ValidationError(
                            f"{path}:{lineno}: nominal attribute {name!r} is not binary: {sorted(values)}"
                        )
                    label_cols.append((n_attrs, name))
                elif kind.lower() in ("numeric", "real", "integer"):
                    feature_cols.append((n_attrs, name))
                else:
                    raise ParseError(f"{path}:{lineno}: unsupported attribute type {kind!r}")
                n_attrs += 1
            elif lower.startswith("@data"):
                in_data = True
            elif lower.startswith("@relation"):
                continue
            else:
                raise ParseError(f"{path}:{lineno}: unexpected line {line[:40]!r}")
    if not in_data or not data_rows:
        raise ParseError(f"{path}: missing @data section or data rows")
    if not feature_cols or not label_cols:
        raise ValidationError(f"{path}: need at least one numeric and one binary nominal attribute")

    X = np.empty((len(data_rows), len(feature_cols)), dtype=np.float64)
    Y = np.empty((len(data_rows), len(label_cols)), dtype=np.int8)
    for i, (lineno, row) in enumerate(data_rows):
        if len(row) != n_attrs:
            raise ParseError(f"{path}:{lineno}: expected {n_attrs} fields, got {len(row)}")
        for j, (col, name) in enumerate(feature_cols):
            try:
                X[i, j] = float(row[col])
            except ValueError as e:
                raise ParseError(
                    f"{path}:{lineno}: cannot parse {row[col]!r} as a number (attribute {name!r})"
                ) from e
        for j, (col, name) in enumerate(label_cols):
            cell = row[col].strip()
            if cell not in ("0", "1", "0.0", "1.0"):
                raise ValidationError(
                    f"{path}:{lineno}: non-binary label value {cell!r} at row {i}, attribute {name!r}"
                )
            Y[i, j] = int(float(cell))
        if not Y[i].any():
            raise ValidationError(f"{path}:{lineno}: label row {i} has no positive label")
    return Dataset(
        features=X,
        candidate_labels=Y,
        true_labels=Y if labels_are_truth else None,
        feature_names=[name for _, name in feature_cols],
        label_names=[name for _, name in label_cols],
    )


def save_dataset(ds: Dataset, sidecar_path) -> Path:
    """Write the csv-pair representation; returns the sidecar path.

    Floats are written with repr so a reload reproduces the matrices
    bit-exactly. When ground truth is present the truth goes to the label
    file and the candidates to a separate candidate file.
    """
    sidecar_path = Path(sidecar_path)
    sidecar_path.parent.mkdir(parents=True, exist_ok=True)
    stem = sidecar_path.name.removesuffix(".json")
    truth = ds.true_labels is not None

    meta = {
        "n": ds.n,
        "d": ds.d,
        "q": ds.q,
        "labels_are_truth": truth,
        "features_csv": f"{stem}.features.csv",
        "labels_csv": f"{stem}.labels.csv",
    }
    _write_csv(
        sidecar_path.parent / meta["features_csv"],
        ds.feature_names,
        ds.features,
        lambda x: repr(float(x)),
    )
    primary = ds.true_labels if truth else ds.candidate_labels
    _write_csv(sidecar_path.parent / meta["labels_csv"], ds.label_names, primary, lambda x: str(int(x)))
    if truth and not np.array_equal(ds.candidate_labels, ds.true_labels):
        meta["candidate_labels_csv"] = f"{stem}.candidates.csv"
        _write_csv(
            sidecar_path.parent / meta["candidate_labels_csv"],
            ds.label_names,
            ds.candidate_labels,
            lambda x: str(int(x)),
        )
    sidecar_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return sidecar_path


def _write_csv(path: Path, header: list[str], matrix: np.ndarray, fmt) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in matrix:
            writer.writerow([fmt(x) for x in row])


# ---------------------------------------------------------------------------
# candidate noise, normalization, splits


def inject_candidate_noise(ds: Dataset, rate: float, seed: int, mode: str = "entry") -> Dataset:
    """Rebuild candidate labels from ground truth plus synthetic noise.

    entry mode flips each zero of the truth matrix to 1 independently with
    probability ``rate``. per-sample mode flips round(rate * #negatives)
    uniformly chosen negatives in every row. True positives are never
    removed, so candidate >= true always holds.
    """
    if ds.true_labels is None:
        raise ContractError("noise injection requires ground-truth labels")
    if not 0.0 <= rate <= 1.0:
        raise ContractError(f"noise rate must be in [0, 1], got {rate}")
    rng = np.random.default_rng(seed)
    truth = ds.true_labels
    if mode == "entry":
        flips = (truth == 0) & (rng.random(truth.shape) < rate)
    elif mode == "per-sample":
        flips = np.zeros(truth.shape, dtype=bool)
        for i in range(ds.n):
            zeros = np.flatnonzero(truth[i] == 0)
            count = int(round(rate * zeros.size))
            if count:
                flips[i, rng.choice(zeros, size=count, replace=False)] = True
    else:
        raise ContractError(f"unknown noise mode {mode!r}")
    candidates = truth | flips.astype(np.int8)
    return Dataset(
        features=ds.features,
        candidate_labels=candidates,
        true_labels=truth,
        feature_names=list(ds.feature_names),
        label_names=list(ds.label_names),
    )


def normalize_features(ds: Dataset) -> Dataset:
    """Min-max scale every feature column to [0, 1]; constant columns to 0."""
    X = ds.features
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    out = np.zeros_like(X)
    nz = span > 0
    out[:, nz] = (X[:, nz] - lo[nz]) / span[nz]
    return Dataset(
        features=out,
        candidate_labels=ds.candidate_labels,
        true_labels=ds.true_labels,
        feature_names=list(ds.feature_names),
        label_names=list(ds.label_names),
    )


def kfold_split(n: int, k: int, seed: int) -> list[FoldSplit]:
    """Deterministic shuffled k-fold; test-fold sizes differ by at most 1."""
    if not 2 <= k <= n:
        raise ContractError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    sizes = np.full(k, n // k, dtype=np.int64)
    sizes[: n % k] += 1
    folds = []
    start = 0
    for size in sizes:
        test = np.sort(perm[start : start + size])
        train = np.sort(np.concatenate([perm[:start], perm[start + size :]]))
        folds.append(FoldSplit(train_indices=train, test_indices=test))
        start += size
    return folds
