"""Pairwise mutual information between label columns.

Binary candidate-label columns get the exact plug-in estimate from their
2x2 joint histogram; real-valued reconstructed columns are discretized
first and estimated the same way. All values are in bits (log base 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError

MI_KINDS = ("binary-over-Y", "discretized-over-T")


@dataclass
class MIMatrix:
    """Symmetric q x q matrix of pairwise mutual information (bits).

    ``values[i][j]`` is the MI between label columns i and j; the diagonal
    holds each column's entropy. ``kind`` records which estimator produced
    it: "binary-over-Y" (exact, binary columns) or "discretized-over-T"
    (histogram over discretized codes).
    """

    values: np.ndarray
    kind: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.kind not in MI_KINDS:
            raise ContractError(f"unknown MI matrix kind {self.kind!r}")
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ContractError(f"MI matrix must be square, got shape {self.values.shape}")
        if not np.array_equal(self.values, self.values.T):
            raise ContractError("MI matrix must be exactly symmetric")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ContractError("MI matrix entries must be finite and nonnegative")

    @property
    def q(self) -> int:
        return self.values.shape[0]


def as_affinity(Z) -> np.ndarray:
    """Accept an MIMatrix or a plain symmetric nonnegative array."""
    if isinstance(Z, MIMatrix):
        return Z.values
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise ContractError(f"affinity must be square, got shape {Z.shape}")
    return Z


def _mi_from_joint(joint: np.ndarray) -> float:
    """Plug-in MI (bits) from an integer joint-count table.

    Terms are accumulated diagonal-first, then per unordered pair
    (term(u,v) + term(v,u)), so the result is bit-identical under
    transposition of the table. 0*log0 contributes nothing.
    """
    n = int(joint.sum())
    row = joint.sum(axis=1)
    col = joint.sum(axis=0)
    ra, rb = joint.shape
    total = 0.0
    for u in range(max(ra, rb)):
        if u < ra and u < rb and joint[u, u] > 0:
            total += (joint[u, u] / n) * np.log2(joint[u, u] * n / (row[u] * col[u]))
        for v in range(u + 1, max(ra, rb)):
            pair = 0.0
            if u < ra and v < rb and joint[u, v] > 0:
                pair += (joint[u, v] / n) * np.log2(joint[u, v] * n / (row[u] * col[v]))
            if v < ra and u < rb and joint[v, u] > 0:
                pair += (joint[v, u] / n) * np.log2(joint[v, u] * n / (row[v] * col[u]))
            total += pair
    # The estimate is a KL divergence, so negative totals can only be
    # floating-point residue; clamp to keep the >= 0 invariant.
    return total if total > 0.0 else 0.0


def _mi_of_codes(a: np.ndarray, levels_a: int, b: np.ndarray, levels_b: int) -> float:
    joint = np.bincount(a * levels_b + b, minlength=levels_a * levels_b)
    return _mi_from_joint(joint.reshape(levels_a, levels_b).astype(np.int64))


def _as_binary_codes(x, name: str) -> np.ndarray:
    x = np.asarray(x)
    if not np.isin(x, (0, 1)).all():
        raise ContractError(f"{name} must contain only 0/1 values")
    return x.astype(np.int64)


def binary_mi(a, b) -> float:
    """I(a, b) in bits for two binary columns.

    I = sum_{u,v in {0,1}} p(u,v) log2(p(u,v) / (p(u) p(v))), exact over the
    2x2 joint histogram. Symmetric in its arguments bit-for-bit.
    """
    a = _as_binary_codes(a, "a")
    b = _as_binary_codes(b, "b")
    if a.shape != b.shape or a.ndim != 1:
        raise ContractError(f"column length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ContractError("columns must have at least one sample")
    return _mi_of_codes(a, 2, b, 2)


def mi_matrix_binary(Y) -> MIMatrix:
    """Pairwise MI matrix of a binary label matrix (diagonal = entropies)."""
    Y = np.asarray(Y)
    if Y.ndim != 2:
        raise ContractError(f"label matrix must be 2-D, got shape {Y.shape}")
    cols = [_as_binary_codes(Y[:, j], f"column {j}") for j in range(Y.shape[1])]
    return MIMatrix(_pairwise(cols, [2] * len(cols)), kind="binary-over-Y")


def discretize_column(col, bins: int = 5, strategy: str = "quantile") -> np.ndarray:
    """Map a real column to integer codes in 0..bins.

    equal-width: uniform edges between min and max; a value on an edge goes
    to the upper bin. quantile: edges at the empirical quantiles (duplicates
    merged); a value on an edge stays in the lower bin, so a point mass
    sitting exactly on a quantile keeps its own code. Constant columns map
    to all zeros. Monotone: x <= y implies code(x) <= code(y).
    """
    col = np.asarray(col, dtype=np.float64)
    if col.ndim != 1:
        raise ContractError(f"expected 1-D column, got shape {col.shape}")
    if not np.all(np.isfinite(col)):
        raise ContractError("column contains NaN/Inf")
    if bins < 2:
        raise ContractError(f"bins must be >= 2, got {bins}")
    lo, hi = col.min(), col.max()
    if lo == hi:
        return np.zeros(col.shape, dtype=np.int64)
    if strategy == "equal-width":
        edges = np.linspace(lo, hi, bins + 1)[1:-1]
        return np.searchsorted(edges, col, side="right").astype(np.int64)
    if strategy == "quantile":
        edges = np.unique(np.quantile(col, np.linspace(0.0, 1.0, bins + 1)[1:-1]))
        return np.searchsorted(edges, col, side="left").astype(np.int64)
    raise ContractError(f"unknown discretization strategy {strategy!r}")


def mi_matrix_real(T, bins: int = 5, strategy: str = "quantile") -> MIMatrix:
    """Pairwise MI matrix over real-valued columns via discretized codes."""
    T = np.asarray(T, dtype=np.float64)
    if T.ndim != 2:
        raise ContractError(f"matrix must be 2-D, got shape {T.shape}")
    cols = [discretize_column(T[:, j], bins=bins, strategy=strategy) for j in range(T.shape[1])]
    levels = [int(c.max()) + 1 for c in cols]
    return MIMatrix(_pairwise(cols, levels), kind="discretized-over-T")


def _pairwise(cols: list[np.ndarray], levels: list[int]) -> np.ndarray:
    q = len(cols)
    Z = np.zeros((q, q), dtype=np.float64)
    for i in range(q):
        for j in range(i, q):
            v = _mi_of_codes(cols[i], levels[i], cols[j], levels[j])
            Z[i, j] = v
            Z[j, i] = v
    return Z
