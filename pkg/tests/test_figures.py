import numpy as np

from pmlfs.evaluation import evaluate_selection
from pmlfs.figures import (
    save_ablation_figure,
    save_ranking_figure,
    save_report_figure,
    save_sweep_figure,
    save_trace_figure,
)
from pmlfs.optimizer import HyperParams, fit
from pmlfs.reconstruction import rank_features
from pmlfs.synth import make_planted_dataset

PNG_MAGIC = b"\x89PNG"


def _is_png(path):
    return path.exists() and path.read_bytes()[:4] == PNG_MAGIC


def test_trace_and_ranking_figures(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.uniform(0, 1, (12, 6))
    T = rng.uniform(0, 1, (12, 3))
    result = fit(X, T, np.eye(3), HyperParams(k=3, max_iters=10, tol=1e-15), seed=0)
    assert _is_png(save_trace_figure(result, tmp_path / "trace.png"))
    ranking = rank_features(result.state.W)
    names = [f"f{i}" for i in range(6)]
    assert _is_png(save_ranking_figure(ranking, names, tmp_path / "ranking.png"))


def test_report_sweep_ablation_figures(tmp_path):
    ds, _ = make_planted_dataset(n=40, d=10, q=3, informative=4, noise_rate=0.1, seed=2)
    ranking = rank_features(np.eye(10))
    report = evaluate_selection(ds, ranking, [0.3, 0.6], folds=3, seed=2)
    assert _is_png(save_report_figure(report, tmp_path / "report.png"))
    points = [
        {"value": v, "aggregates": report.aggregates} for v in (0.01, 0.1, 1.0)
    ]
    assert _is_png(save_sweep_figure(points, "gamma", tmp_path / "sweep.png"))
    variants = {name: report.aggregates for name in ("stage2-only", "stage1+2", "full")}
    assert _is_png(save_ablation_figure(variants, tmp_path / "ablation.png"))
