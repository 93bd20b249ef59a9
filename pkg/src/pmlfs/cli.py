"""Command-line orchestration: select, evaluate, ablate, sweep, synth.

Every command resolves its configuration, writes it to config.json in the
output directory, and emits flat, greppable CSV/JSON files (plus PNG
figures unless --no-figures). All randomness flows from the single
--seed value through counter-based per-stage derivation, so reruns with
an identical config reproduce every output byte for byte. PMLFS_THREADS
caps the BLAS thread pools.
"""

from . import _threads  # noqa: F401  (thread caps must precede numpy import)

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from . import figures
from .dataset import Dataset, load_dataset, normalize_features
from .errors import ConfigError, PmlfsError, StageError
from .evaluation import (
    METRIC_NAMES,
    EvaluationReport,
    evaluate_selection,
    save_report_csv,
    save_report_json,
)
from .optimizer import HyperParams, default_latent_k, save_trace
from .pipeline import prepare_dataset, run_selection, run_stage
from .reconstruction import load_ranking, save_ranking
from .synth import make_planted_dataset, save_synth

DEFAULT_PERCENTS = [i / 100 for i in range(1, 21)]

ABLATION_VARIANTS = (
    ("stage2-only", True, True),
    ("stage1+2", False, True),
    ("full", False, False),
)


@dataclass
class RunConfig:
    """Resolved parameters of one run; serializes round-trip identical."""

    data: str = ""
    format: str = "csv-pair"
    noise: float = 0.2
    noise_mode: str = "entry"
    seed: int = 0
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    latent_k: int = 0  # 0 = derive from the data
    max_iters: int = 500
    tol: float = 1e-6
    update_mode: str = "corrected-split"
    bins: int = 5
    bin_strategy: str = "quantile"
    percents: list = field(default_factory=lambda: list(DEFAULT_PERCENTS))
    folds: int = 10
    ridge_lambda: float = 1.0
    skip_stage1: bool = False
    skip_stage3: bool = False
    figures: bool = True
    out: str = "run"

    @classmethod
    def from_dict(cls, payload: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in payload.items() if k in known})

    def save(self, path: Path, command: str) -> Path:
        payload = asdict(self)
        payload["command"] = command
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    def hyperparams(self, n: int, d: int) -> HyperParams:
        k = self.latent_k if self.latent_k > 0 else default_latent_k(n, d)
        return HyperParams(
            k=k,
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            max_iters=self.max_iters,
            tol=self.tol,
            update_mode=self.update_mode,
        )


def _load(cfg: RunConfig) -> Dataset:
    if not Path(cfg.data).exists():
        raise ConfigError(f"dataset path does not exist: {cfg.data}")
    return run_stage("load", load_dataset, cfg.data, cfg.format)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _verify_outputs(paths: list[Path]) -> None:
    for path in paths:
        if not path.exists():
            raise ConfigError(f"declared output missing: {path}")
        if path.suffix == ".json":
            json.loads(path.read_text(encoding="utf-8"))
        elif path.suffix == ".csv":
            with open(path, newline="", encoding="utf-8") as fh:
                if not list(csv.reader(fh)):
                    raise ConfigError(f"declared output empty: {path}")


# ---------------------------------------------------------------------------
# commands


def cmd_select(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    ds = _load(cfg)
    prepared = prepare_dataset(ds, cfg.noise, cfg.seed, cfg.noise_mode)
    hp = cfg.hyperparams(prepared.n, prepared.d)
    result = run_selection(
        prepared,
        hp,
        seed=cfg.seed,
        bins=cfg.bins,
        bin_strategy=cfg.bin_strategy,
        skip_stage1=cfg.skip_stage1,
        skip_stage3=cfg.skip_stage3,
    )
    resolved = replace(cfg, latent_k=hp.k)
    written = [
        resolved.save(out / "config.json", "select"),
        save_ranking(result.ranking, prepared.feature_names, out / "ranking.csv"),
        save_trace(result.fit_result, out / "trace.csv"),
    ]
    if cfg.figures:
        written.append(figures.save_trace_figure(result.fit_result, out / "trace.png"))
        written.append(
            figures.save_ranking_figure(result.ranking, prepared.feature_names, out / "ranking.png")
        )
    _verify_outputs(written)
    return written


def cmd_evaluate(cfg: RunConfig, ranking_path) -> list[Path]:
    out = _out_dir(cfg)
    ds = run_stage("normalize", normalize_features, _load(cfg))
    ranking, _names = run_stage("ranking-load", load_ranking, ranking_path)
    if ranking.scores.shape[0] != ds.d:
        raise ConfigError(
            f"ranking file covers {ranking.scores.shape[0]} features, dataset has {ds.d}"
        )
    report = run_stage(
        "evaluation",
        evaluate_selection,
        ds,
        ranking,
        cfg.percents,
        folds=cfg.folds,
        seed=cfg.seed,
        lam=cfg.ridge_lambda,
    )
    written = [
        cfg.save(out / "config.json", "evaluate"),
        save_report_json(report, out / "report.json"),
        save_report_csv(report, out / "report.csv"),
    ]
    if cfg.figures:
        written.append(figures.save_report_figure(report, out / "report.png"))
    _verify_outputs(written)
    return written


def _select_and_evaluate(cfg: RunConfig, ds: Dataset) -> tuple[EvaluationReport, list[Path]]:
    """Shared worker for ablate/sweep: run both halves in cfg.out."""
    out = _out_dir(cfg)
    prepared = prepare_dataset(ds, cfg.noise, cfg.seed, cfg.noise_mode)
    hp = cfg.hyperparams(prepared.n, prepared.d)
    result = run_selection(
        prepared,
        hp,
        seed=cfg.seed,
        bins=cfg.bins,
        bin_strategy=cfg.bin_strategy,
        skip_stage1=cfg.skip_stage1,
        skip_stage3=cfg.skip_stage3,
    )
    report = run_stage(
        "evaluation",
        evaluate_selection,
        prepared,
        result.ranking,
        cfg.percents,
        folds=cfg.folds,
        seed=cfg.seed,
        lam=cfg.ridge_lambda,
    )
    resolved = replace(cfg, latent_k=hp.k)
    written = [
        resolved.save(out / "config.json", "select+evaluate"),
        save_ranking(result.ranking, prepared.feature_names, out / "ranking.csv"),
        save_trace(result.fit_result, out / "trace.csv"),
        save_report_json(report, out / "report.json"),
        save_report_csv(report, out / "report.csv"),
    ]
    return report, written


def cmd_ablate(cfg: RunConfig) -> list[Path]:
    if cfg.skip_stage1 or cfg.skip_stage3:
        raise ConfigError("ablate runs all three variants itself; drop the skip flags")
    out = _out_dir(cfg)
    ds = _load(cfg)
    if ds.true_labels is None:
        raise ConfigError("ablation needs ground-truth labels for evaluation")
    variants: dict[str, dict] = {}
    written = [cfg.save(out / "config.json", "ablate")]
    for name, skip1, skip3 in ABLATION_VARIANTS:
        sub = replace(cfg, skip_stage1=skip1, skip_stage3=skip3, out=str(out / name), figures=False)
        report, sub_written = _select_and_evaluate(sub, ds)
        variants[name] = report.aggregates
        written.extend(sub_written)

    csv_path = out / "ablation.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "metric", "mean", "std"])
        for name, _, _ in ABLATION_VARIANTS:
            for metric in METRIC_NAMES:
                agg = variants[name][metric]
                writer.writerow([name, metric, repr(agg["mean"]), repr(agg["std"])])
    written.append(csv_path)
    json_path = out / "ablation.json"
    json_path.write_text(json.dumps(variants, indent=2) + "\n", encoding="utf-8")
    written.append(json_path)
    if cfg.figures:
        written.append(figures.save_ablation_figure(variants, out / "ablation.png"))
    _verify_outputs(written)
    return written


def cmd_sweep(cfg: RunConfig, param: str, grid: list[float]) -> list[Path]:
    if param not in ("alpha", "beta", "gamma"):
        raise ConfigError(f"sweep parameter must be alpha/beta/gamma, got {param!r}")
    if not grid:
        raise ConfigError("sweep grid must be nonempty")
    if any(v <= 0 for v in grid):
        raise ConfigError("sweep grid values must be positive")
    out = _out_dir(cfg)
    ds = _load(cfg)
    if ds.true_labels is None:
        raise ConfigError("sweep needs ground-truth labels for evaluation")
    points = []
    written = [cfg.save(out / "config.json", "sweep")]
    for value in grid:
        sub = replace(
            cfg, **{param: value}, out=str(out / f"{param}={value:g}"), figures=False
        )
        report, sub_written = _select_and_evaluate(sub, ds)
        points.append({"value": value, "aggregates": report.aggregates})
        written.extend(sub_written)

    csv_path = out / "sweep.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "value", "metric", "mean", "std"])
        for pt in points:
            for metric in METRIC_NAMES:
                agg = pt["aggregates"][metric]
                writer.writerow([param, repr(float(pt["value"])), metric, repr(agg["mean"]), repr(agg["std"])])
    written.append(csv_path)
    json_path = out / "sweep.json"
    json_path.write_text(
        json.dumps({"param": param, "points": points}, indent=2) + "\n", encoding="utf-8"
    )
    written.append(json_path)
    if cfg.figures:
        written.append(figures.save_sweep_figure(points, param, out / "sweep.png"))
    _verify_outputs(written)
    return written


def cmd_synth(args) -> list[Path]:
    ds, manifest = make_planted_dataset(
        n=args.n,
        d=args.d,
        q=args.q,
        informative=args.informative,
        noise_rate=args.noise,
        seed=args.seed,
        prevalence=args.prevalence,
    )
    out = Path(args.out)
    sidecar = save_synth(ds, manifest, out, name=args.name)
    config_path = out / "config.json"
    payload = {
        "command": "synth",
        "data": str(sidecar),
        "out": str(out),
        "name": args.name,
        **{k: manifest[k] for k in ("n", "d", "q", "informative", "noise_rate", "prevalence", "seed")},
    }
    config_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written = [config_path, sidecar, out / "manifest.json"]
    _verify_outputs(written)
    return written


# ---------------------------------------------------------------------------
# argument parsing


def _percents(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad percents list {text!r}") from e


def _grid(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from e


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="dataset sidecar (csv-pair) or ARFF file")
    p.add_argument("--format", default="csv-pair", choices=("csv-pair", "arff-like"))
    p.add_argument("--seed", type=int, default=0, help="master 64-bit seed")
    p.add_argument("--out", default="run", help="output directory")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")


def _add_select_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--noise", type=float, default=0.2, help="candidate noise rate (ground-truth inputs)")
    p.add_argument("--noise-mode", default="entry", choices=("entry", "per-sample"))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--latent-k", type=int, default=0, help="latent dimension k (0 = min(n,d)/4)")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--update-mode", default="corrected-split", choices=("corrected-split", "paper-faithful"))
    p.add_argument("--bins", type=int, default=5, help="bins for MI over reconstructed labels")
    p.add_argument("--bin-strategy", default="quantile", choices=("quantile", "equal-width"))
    p.add_argument("--skip-stage1", action="store_true", help="use raw candidates instead of reconstructed labels")
    p.add_argument("--skip-stage3", action="store_true", help="rank the raw weight matrix")


def _add_eval_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--percents", type=_percents, default=list(DEFAULT_PERCENTS),
                   help="comma-separated selection fractions (default 0.01..0.20)")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--ridge-lambda", type=float, default=1.0)


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(data=args.data, format=args.format, seed=args.seed, out=args.out,
                    figures=not args.no_figures)
    for name in ("noise", "noise_mode", "alpha", "beta", "gamma", "latent_k", "max_iters",
                 "tol", "update_mode", "bins", "bin_strategy", "skip_stage1", "skip_stage3",
                 "percents", "folds", "ridge_lambda"):
        if hasattr(args, name):
            cfg = replace(cfg, **{name: getattr(args, name)})
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmlfs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="run the three-stage selection pipeline")
    _add_data_flags(p)
    _add_select_flags(p)

    p = sub.add_parser("evaluate", help="cross-validate a ranking file")
    _add_data_flags(p)
    _add_eval_flags(p)
    p.add_argument("--ranking", required=True, help="ranking.csv from select")

    p = sub.add_parser("ablate", help="compare stage2-only, stage1+2, and the full pipeline")
    _add_data_flags(p)
    _add_select_flags(p)
    _add_eval_flags(p)

    p = sub.add_parser("sweep", help="grid sweep over one regularization parameter")
    _add_data_flags(p)
    _add_select_flags(p)
    _add_eval_flags(p)
    p.add_argument("--param", required=True, choices=("alpha", "beta", "gamma"))
    p.add_argument("--grid", required=True, type=_grid, help="comma-separated positive values")

    p = sub.add_parser("synth", help="generate a planted-feature benchmark")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--informative", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--prevalence", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="synthetic")
    p.add_argument("--out", default="synth")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "select":
            cmd_select(_config_from_args(args))
        elif args.command == "evaluate":
            cmd_evaluate(_config_from_args(args), args.ranking)
        elif args.command == "ablate":
            cmd_ablate(_config_from_args(args))
        elif args.command == "sweep":
            cmd_sweep(_config_from_args(args), args.param, args.grid)
        elif args.command == "synth":
            cmd_synth(args)
    except StageError as e:
        print(f"pmlfs {args.command}: {e}", file=sys.stderr)
        return 2
    except PmlfsError as e:
        print(f"pmlfs {args.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
