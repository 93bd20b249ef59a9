"""End-to-end selection pipeline shared by the CLI commands.

Stage 1 disambiguates the candidate labels with their MI matrix, stage 2
fits the tri-factor model against the reconstructed confidences, stage 3
propagates the learned weights through label connectivity before ranking.
Either reconstruction stage can be skipped for ablations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, inject_candidate_noise, normalize_features
from .errors import PmlfsError, StageError
from .infotheory import MIMatrix, mi_matrix_binary, mi_matrix_real
from .optimizer import FitResult, HyperParams, fit
from .reconstruction import FeatureRanking, rank_features, reconstruct_labels, reconstruct_weights
from .seeding import derive_seed


@dataclass
class SelectionResult:
    """Everything the selection path produces, for reporting and ablation."""

    ranking: FeatureRanking
    fit_result: FitResult
    label_mi: MIMatrix
    confidence_mi: MIMatrix
    confidences: np.ndarray
    weights_raw: np.ndarray
    weights_final: np.ndarray


def run_stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except PmlfsError as e:
        raise StageError(f"stage {name}: {e}") from e


def prepare_dataset(ds: Dataset, noise_rate: float, seed: int, noise_mode: str = "entry") -> Dataset:
    """Candidate-noise injection (ground-truth inputs only) plus normalization."""
    if ds.true_labels is not None and noise_rate > 0:
        ds = run_stage("noise", inject_candidate_noise, ds, noise_rate, derive_seed(seed, "noise"), noise_mode)
    return run_stage("normalize", normalize_features, ds)


def run_selection(
    ds: Dataset,
    hp: HyperParams,
    seed: int,
    bins: int = 5,
    bin_strategy: str = "quantile",
    skip_stage1: bool = False,
    skip_stage3: bool = False,
    t_normalization: str = "row-max",
    include_diagonal: bool = True,
) -> SelectionResult:
    """Run stages 1-3 on a prepared (noisy, normalized) dataset."""
    Y = ds.candidate_labels
    Z = run_stage("label-mi", mi_matrix_binary, Y)
    if skip_stage1:
        T = Y.astype(np.float64)
    else:
        T = run_stage(
            "label-reconstruction",
            reconstruct_labels,
            Y,
            Z,
            normalization=t_normalization,
            include_diagonal=include_diagonal,
        ).values
    Zp = run_stage("confidence-mi", mi_matrix_real, T, bins=bins, strategy=bin_strategy)
    result = run_stage("factorization", fit, ds.features, T, Zp, hp, derive_seed(seed, "factors"))
    W = result.state.W
    W_final = W if skip_stage3 else run_stage("weight-reconstruction", reconstruct_weights, W, Zp)
    ranking = run_stage("ranking", rank_features, W_final)
    return SelectionResult(
        ranking=ranking,
        fit_result=result,
        label_mi=Z,
        confidence_mi=Zp,
        confidences=T,
        weights_raw=W,
        weights_final=W_final,
    )
