"""Synthetic benchmark with planted informative features.

The first ``informative`` feature columns linearly determine per-label
logits through a fixed random coefficient matrix; the remaining columns
are independent noise. Coefficient columns are drawn in correlated groups
(a shared base direction plus per-label jitter), so some labels are
strongly connected to several others while the leftover group is not --
the connectivity pattern the weight-reconstruction stage exploits. Labels
are thresholded at a per-label quantile to fix their prevalence, every
sample keeps at least one positive, and candidate noise is layered on top
of the ground truth. The manifest records the planted indices, which
downstream recovery checks use as their oracle.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dataset import Dataset, inject_candidate_noise, save_dataset
from .errors import ContractError
from .seeding import derive_seed


def make_planted_dataset(
    n: int,
    d: int,
    q: int,
    informative: int,
    noise_rate: float,
    seed: int,
    prevalence: float = 0.3,
    group_size: int = 3,
    group_noise: float = 0.5,
) -> tuple[Dataset, dict]:
    """Generate the dataset and its manifest (planted indices, parameters)."""
    if not 1 <= informative <= d:
        raise ContractError(f"need 1 <= informative <= d, got informative={informative}, d={d}")
    if n < 1 or q < 1:
        raise ContractError(f"need n >= 1 and q >= 1, got n={n}, q={q}")
    if not 0.0 < prevalence < 1.0:
        raise ContractError(f"prevalence must be in (0, 1), got {prevalence}")
    if group_size < 1:
        raise ContractError(f"group_size must be >= 1, got {group_size}")

    rng_x = np.random.default_rng(derive_seed(seed, "synth-features"))
    X = rng_x.uniform(0.0, 1.0, (n, d))

    rng_c = np.random.default_rng(derive_seed(seed, "synth-coefficients"))
    group_sizes = [group_size] * (q // group_size)
    if q % group_size:
        group_sizes.append(q % group_size)
    columns = []
    for size in group_sizes:
        base = rng_c.normal(0.0, 1.0, informative)
        for _ in range(size):
            columns.append(base + group_noise * rng_c.normal(0.0, 1.0, informative))
    coef = np.column_stack(columns)

    logits = (X[:, :informative] - 0.5) @ coef
    thresholds = np.quantile(logits, 1.0 - prevalence, axis=0)
    truth = (logits > thresholds).astype(np.int8)
    for i in np.flatnonzero(truth.sum(axis=1) == 0):
        truth[i, int(np.argmax(logits[i]))] = 1

    ds = Dataset(features=X, candidate_labels=truth, true_labels=truth)
    if noise_rate > 0:
        ds = inject_candidate_noise(ds, noise_rate, derive_seed(seed, "noise"))

    manifest = {
        "planted_indices": list(range(informative)),
        "n": n,
        "d": d,
        "q": q,
        "informative": informative,
        "noise_rate": noise_rate,
        "prevalence": prevalence,
        "group_sizes": group_sizes,
        "group_noise": group_noise,
        "seed": seed,
    }
    return ds, manifest


def save_synth(ds: Dataset, manifest: dict, out_dir, name: str = "synthetic") -> Path:
    """Write the csv-pair files plus manifest.json; returns the sidecar path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sidecar = save_dataset(ds, out_dir / f"{name}.json")
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return sidecar
