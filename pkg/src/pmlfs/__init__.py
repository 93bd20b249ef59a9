"""Feature selection for partial multi-label data.

Three stages: candidate labels are rebuilt into confidence scores via
their mutual-information matrix, a nonnegative tri-factor model learns a
feature-weight matrix against those confidences, and label connectivity
reshapes the weights before features are ranked by row norm. A
cross-validated evaluation harness, ablations, parameter sweeps, and a
planted-feature synthetic benchmark round out the toolkit.
"""

from . import _threads  # noqa: F401  (thread caps must precede numpy import)

from .dataset import (
    Dataset,
    FoldSplit,
    inject_candidate_noise,
    kfold_split,
    load_dataset,
    normalize_features,
    save_dataset,
)
from .errors import (
    ConfigError,
    ContractError,
    NumericError,
    ParseError,
    PmlfsError,
    StageError,
    UndefinedMetricError,
    ValidationError,
)
from .evaluation import (
    EvaluationReport,
    RidgeBRModel,
    average_precision,
    coverage,
    evaluate_selection,
    macro_f1,
    micro_f1,
    ranking_loss,
    train_br_ridge,
)
from .infotheory import (
    MIMatrix,
    binary_mi,
    discretize_column,
    mi_matrix_binary,
    mi_matrix_real,
)
from .optimizer import (
    FactorState,
    FitResult,
    HyperParams,
    LaplacianPair,
    build_laplacian,
    compute_q,
    default_latent_k,
    fit,
    init_factors,
    objective,
    step,
)
from .pipeline import SelectionResult, prepare_dataset, run_selection
from .reconstruction import (
    FeatureRanking,
    ReconstructedLabels,
    rank_features,
    reconstruct_labels,
    reconstruct_weights,
)
from .seeding import derive_seed
from .synth import make_planted_dataset

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContractError",
    "Dataset",
    "EvaluationReport",
    "FactorState",
    "FeatureRanking",
    "FitResult",
    "FoldSplit",
    "HyperParams",
    "LaplacianPair",
    "MIMatrix",
    "NumericError",
    "ParseError",
    "PmlfsError",
    "ReconstructedLabels",
    "RidgeBRModel",
    "SelectionResult",
    "StageError",
    "UndefinedMetricError",
    "ValidationError",
    "average_precision",
    "binary_mi",
    "build_laplacian",
    "compute_q",
    "coverage",
    "default_latent_k",
    "derive_seed",
    "discretize_column",
    "evaluate_selection",
    "fit",
    "init_factors",
    "inject_candidate_noise",
    "kfold_split",
    "load_dataset",
    "macro_f1",
    "make_planted_dataset",
    "mi_matrix_binary",
    "mi_matrix_real",
    "micro_f1",
    "normalize_features",
    "objective",
    "prepare_dataset",
    "rank_features",
    "ranking_loss",
    "reconstruct_labels",
    "reconstruct_weights",
    "run_selection",
    "save_dataset",
    "step",
    "train_br_ridge",
]
