"""Experiment orchestration: the full protocols, aggregation and reports.

A protocol run is a pure function of its configuration and input files.
Seeds derive hierarchically (master -> per-resplit -> per-rep -> stream),
so enlarging a sweep never perturbs existing trials, and the classical and
quantum trainers of one trial consume the same seeded batch schedule,
which is asserted via schedule digests.  Trials are embarrassingly
parallel; results are always assembled in canonical order regardless of
worker count.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._version import __version__
from .classical import train_mlp
from .clustering import LARGE_CLUSTER_MIN_SIZE, butina_cluster, cluster_training_plan
from .data import (
    SCHEMA_PRESETS,
    UNDERSAMPLE_BY_DATASET,
    Dataset,
    SplitPlan,
    load_dataset,
    load_embeddings,
    make_split,
    subsample_fraction,
    undersample,
)
from .errors import ConfigError, InvariantViolation, QsarBenchError
from .fingerprint import Fingerprint, morgan_fingerprint
from .metrics import accuracy, recall  # noqa: F401  (re-exported metric ops)
from .pca import fit_pca, transform
from .quantum import train_quantum
from .rng import derive_seed
from .smiles import parse_smiles
from .training import OptimizerConfig, SupervisedSplit, batch_schedule

__all__ = [
    "ExperimentConfig",
    "TrialResult",
    "CellSummary",
    "ExperimentReport",
    "accuracy",
    "recall",
    "run_protocol",
    "run_fraction_sweep",
    "run_cluster_protocol",
    "emit_report",
    "write_report_files",
    "load_report",
]

logger = logging.getLogger(__name__)

WORKERS_ENV_VAR = "QSARBENCH_WORKERS"

# seed-path namespaces under the master seed
_NS_UNDERSAMPLE = 0
_NS_SPLIT = 1
_NS_REP = 2
_NS_FRACTION = 3
_NS_CLUSTER = 4
# streams under a rep seed
_STREAM_SCHEDULE = 0
_STREAM_MLP_INIT = 1
_STREAM_QUANTUM_INIT = 2

DATASET_NAMES = ("bace", "bbbp", "hiv")
EMBEDDING_NAMES = ("mgfp", "imgmol")

PROTOCOL_FEATURES = "feature_sweep"
PROTOCOL_FRACTIONS = "fraction_sweep"
PROTOCOL_CLUSTERS = "cluster_sweep"


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    dataset_path: str
    embedding: str = "mgfp"
    embedding_path: str | None = None
    n_list: tuple[int, ...] = (2, 3, 4, 8)
    reps: int = 20
    resplits: int = 5
    epochs: int = 100
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    fractions: tuple[float, ...] | None = None
    cluster_k: tuple[int, ...] | None = None
    cluster_cutoff: float = 0.65
    fingerprint_radius: int = 2
    fingerprint_bits: int = 512
    master_seed: int = 0
    undersample: bool | None = None
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "dataset", str(self.dataset).lower())
        object.__setattr__(self, "embedding", str(self.embedding).lower())
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.fractions is not None:
            object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))
        if self.cluster_k is not None:
            object.__setattr__(self, "cluster_k", tuple(int(k) for k in self.cluster_k))
        self._validate()

    def _validate(self) -> None:
        if self.dataset not in DATASET_NAMES:
            raise ConfigError(f"dataset must be one of {DATASET_NAMES}, got {self.dataset!r}")
        if self.embedding not in EMBEDDING_NAMES:
            raise ConfigError(f"embedding must be one of {EMBEDDING_NAMES}, got {self.embedding!r}")
        if self.embedding == "imgmol" and not self.embedding_path:
            raise ConfigError("imgmol embedding needs embedding_path")
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ConfigError(f"n_list entries must be >= 1, got {self.n_list}")
        if self.reps < 1 or self.resplits < 1 or self.epochs < 1:
            raise ConfigError("reps, resplits and epochs must all be >= 1")
        if self.fractions is not None and any(not 0.0 < f <= 1.0 for f in self.fractions):
            raise ConfigError(f"fractions must lie in (0, 1], got {self.fractions}")
        if self.cluster_k is not None and any(not 1 <= k <= 7 for k in self.cluster_k):
            raise ConfigError(f"cluster_k values must lie in 1..7, got {self.cluster_k}")
        if not 0.0 < self.cluster_cutoff <= 1.0:
            raise ConfigError(f"cluster_cutoff must lie in (0, 1], got {self.cluster_cutoff}")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        bits = self.fingerprint_bits
        if bits <= 0 or bits & (bits - 1):
            raise ConfigError(f"fingerprint_bits must be a power of two, got {bits}")
        if self.fingerprint_radius < 0:
            raise ConfigError("fingerprint_radius must be >= 0")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "dataset" not in raw or "dataset_path" not in raw:
            raise ConfigError("config needs at least dataset and dataset_path")
        try:
            return cls(**raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config value: {exc}") from exc

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as handle:
                raw = json.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["n_list"] = list(self.n_list)
        out["fractions"] = None if self.fractions is None else list(self.fractions)
        out["cluster_k"] = None if self.cluster_k is None else list(self.cluster_k)
        # execution knob, not part of the experiment definition: reports must
        # be byte-identical across worker counts
        del out["workers"]
        return out

    @property
    def should_undersample(self) -> bool:
        if self.undersample is not None:
            return self.undersample
        return UNDERSAMPLE_BY_DATASET[self.dataset]

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            learning_rate=self.learning_rate,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
            batch_size=self.batch_size,
            epochs=self.epochs,
        )

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return max(1, self.workers)
        env = os.environ.get(WORKERS_ENV_VAR)
        if env:
            try:
                return max(1, int(env))
            except ValueError as exc:
                raise ConfigError(f"{WORKERS_ENV_VAR}={env!r} is not an integer") from exc
        return os.cpu_count() or 1


@dataclass(frozen=True)
class TrialResult:
    model: str
    n: int
    x: float | None
    split_index: int
    rep_index: int
    split_seed: int
    rep_seed: int
    best_test_accuracy: float
    best_epoch: int
    final_train_loss: float
    test_recall_at_best: float | None
    schedule_digest: str

    def __post_init__(self):
        if not 0.0 <= self.best_test_accuracy <= 1.0:
            raise InvariantViolation(f"accuracy {self.best_test_accuracy} outside [0, 1]")
        if self.test_recall_at_best is not None and not 0.0 <= self.test_recall_at_best <= 1.0:
            raise InvariantViolation(f"recall {self.test_recall_at_best} outside [0, 1]")


@dataclass(frozen=True)
class CellSummary:
    model: str
    n: int
    x: float | None
    mean_accuracy: float
    spread: float
    per_split_means: tuple[float, ...]
    mean_recall: float | None


@dataclass
class ExperimentReport:
    protocol: str
    config: dict
    version: str
    skipped_rows: int
    trials: list[TrialResult]
    summaries: list[CellSummary] = field(default_factory=list)

    def summary_for(self, model: str, n: int, x: float | None = None) -> CellSummary:
        for cell in self.summaries:
            if cell.model == model and cell.n == n and _x_key(cell.x) == _x_key(x):
                return cell
        raise KeyError(f"no summary for model={model} n={n} x={x}")


def _x_key(x: float | None) -> float:
    return -1.0 if x is None else float(x)


def _trial_sort_key(trial: TrialResult) -> tuple:
    return (trial.n, _x_key(trial.x), trial.split_index, trial.rep_index, trial.model)


# --- data preparation ---------------------------------------------------------

def _load_with_features(config: ExperimentConfig) -> tuple[Dataset, list[Fingerprint] | None]:
    data = load_dataset(config.dataset_path, SCHEMA_PRESETS[config.dataset])
    if config.embedding == "mgfp":
        fps = [
            morgan_fingerprint(parse_smiles(s), config.fingerprint_radius, config.fingerprint_bits)
            for s in data.smiles
        ]
        features = np.array([fp.as_bit_array() for fp in fps], dtype=np.float64)
        return data.with_features(features), fps
    features = load_embeddings(config.embedding_path, data.ids)
    return data.with_features(features), None


def _signed_labels(labels: np.ndarray) -> np.ndarray:
    return (2 * labels - 1).astype(np.int64)


# --- trial execution ----------------------------------------------------------

@dataclass
class _CellTask:
    """Everything one worker needs to train all reps of a (split, n, x) cell."""

    n: int
    x: float | None
    split_index: int
    split_seed: int
    rep_seeds: tuple[int, ...]
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray
    optimizer: OptimizerConfig


def _run_cell(task: _CellTask) -> list[TrialResult]:
    if task.train_x.shape[1] != 1 << task.n:
        raise InvariantViolation(
            f"cell n={task.n} received {task.train_x.shape[1]} features instead of {1 << task.n}"
        )
    data = SupervisedSplit(task.train_x, task.train_y, task.test_x, task.test_y)
    results: list[TrialResult] = []
    for rep_index, rep_seed in enumerate(task.rep_seeds):
        schedule = batch_schedule(
            task.train_x.shape[0], task.optimizer.epochs, task.optimizer.batch_size,
            derive_seed(rep_seed, _STREAM_SCHEDULE),
        )
        classical = train_mlp(data, task.optimizer, derive_seed(rep_seed, _STREAM_MLP_INIT), schedule)
        quantum = train_quantum(data, task.optimizer, derive_seed(rep_seed, _STREAM_QUANTUM_INIT), schedule)
        if classical.schedule_digest != quantum.schedule_digest:
            raise InvariantViolation("paired trainers consumed different batch schedules")
        for model, outcome in (("classical", classical), ("quantum", quantum)):
            results.append(TrialResult(
                model=model,
                n=task.n,
                x=task.x,
                split_index=task.split_index,
                rep_index=rep_index,
                split_seed=task.split_seed,
                rep_seed=rep_seed,
                best_test_accuracy=outcome.best_test_accuracy,
                best_epoch=outcome.best_epoch,
                final_train_loss=outcome.final_train_loss,
                test_recall_at_best=outcome.test_recall_at_best,
                schedule_digest=outcome.schedule_digest,
            ))
    return results


def _map_cells(tasks: list[_CellTask], workers: int) -> list[TrialResult]:
    if workers <= 1 or len(tasks) <= 1:
        nested = [_run_cell(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            nested = list(pool.map(_run_cell, tasks))
    trials = [trial for cell in nested for trial in cell]
    return sorted(trials, key=_trial_sort_key)


def _make_cell(
    config: ExperimentConfig,
    subset: Dataset,
    plan: SplitPlan,
    n: int,
    x: float | None,
    split_index: int,
    split_seed: int,
) -> _CellTask:
    pca = fit_pca(subset.features[plan.train_indices], 1 << n)
    signed = _signed_labels(subset.labels)
    return _CellTask(
        n=n,
        x=x,
        split_index=split_index,
        split_seed=split_seed,
        rep_seeds=tuple(
            derive_seed(config.master_seed, _NS_REP, split_index, rep)
            for rep in range(config.reps)
        ),
        train_x=transform(pca, subset.features[plan.train_indices]),
        train_y=signed[plan.train_indices],
        test_x=transform(pca, subset.features[plan.test_indices]),
        test_y=signed[plan.test_indices],
        optimizer=config.optimizer_config(),
    )


def _resplit_subset(config: ExperimentConfig, data: Dataset, split_index: int) -> tuple[Dataset, int]:
    subset = data
    if config.should_undersample:
        subset = undersample(data, derive_seed(config.master_seed, _NS_UNDERSAMPLE, split_index))
    return subset, derive_seed(config.master_seed, _NS_SPLIT, split_index)


def _abort_context(config: ExperimentConfig, exc: Exception) -> None:
    logger.error(
        "experiment aborted: dataset=%s embedding=%s n_list=%s master_seed=%d: %s",
        config.dataset, config.embedding, config.n_list, config.master_seed, exc,
    )


# --- aggregation and reports ----------------------------------------------------

def _aggregate(trials: list[TrialResult], resplits: int) -> list[CellSummary]:
    cells: dict[tuple, dict[int, list[TrialResult]]] = {}
    for trial in trials:
        per_split = cells.setdefault((trial.model, trial.n, _x_key(trial.x), trial.x), {})
        per_split.setdefault(trial.split_index, []).append(trial)

    summaries = []
    for (model, n, _, x), per_split in sorted(cells.items(), key=lambda kv: (kv[0][1], kv[0][2], kv[0][0])):
        if sorted(per_split) != list(range(resplits)):
            raise InvariantViolation(f"cell {model} n={n} x={x} is missing resplits")
        split_means = [
            float(np.mean([t.best_test_accuracy for t in per_split[i]]))
            for i in range(resplits)
        ]
        recalls = [
            t.test_recall_at_best
            for i in range(resplits)
            for t in per_split[i]
            if t.test_recall_at_best is not None
        ]
        summaries.append(CellSummary(
            model=model,
            n=n,
            x=x,
            mean_accuracy=float(np.mean(split_means)),
            spread=float(np.std(split_means, ddof=1)) if resplits > 1 else 0.0,
            per_split_means=tuple(split_means),
            mean_recall=float(np.mean(recalls)) if recalls else None,
        ))
    return summaries


def _verify_aggregates(report: ExperimentReport, resplits: int) -> None:
    recomputed = {(c.model, c.n, _x_key(c.x)): c for c in _aggregate(report.trials, resplits)}
    if len(recomputed) != len(report.summaries):
        raise InvariantViolation("summary cells do not match trial cells")
    for cell in report.summaries:
        other = recomputed[(cell.model, cell.n, _x_key(cell.x))]
        if abs(cell.mean_accuracy - other.mean_accuracy) > 1e-12:
            raise InvariantViolation(
                f"aggregation identity violated for {cell.model} n={cell.n} x={cell.x}"
            )


def _build_report(config: ExperimentConfig, protocol: str, skipped: int,
                  trials: list[TrialResult]) -> ExperimentReport:
    report = ExperimentReport(
        protocol=protocol,
        config=config.to_dict(),
        version=__version__,
        skipped_rows=skipped,
        trials=trials,
        summaries=_aggregate(trials, config.resplits),
    )
    _verify_aggregates(report, config.resplits)
    return report


# --- protocols -------------------------------------------------------------------

def run_protocol(config: ExperimentConfig) -> ExperimentReport:
    """Feature sweep: the 5x20 resplit/rep protocol for each n in n_list."""
    try:
        data, _ = _load_with_features(config)
        tasks = []
        for split_index in range(config.resplits):
            subset, split_seed = _resplit_subset(config, data, split_index)
            plan = make_split(subset, split_seed)
            for n in config.n_list:
                tasks.append(_make_cell(config, subset, plan, n, float(n), split_index, split_seed))
        logger.info("feature sweep: %d cells on %d workers", len(tasks), config.resolved_workers())
        trials = _map_cells(tasks, config.resolved_workers())
        return _build_report(config, PROTOCOL_FEATURES, data.skipped_rows, trials)
    except QsarBenchError as exc:
        _abort_context(config, exc)
        raise


def run_fraction_sweep(config: ExperimentConfig) -> ExperimentReport:
    """Training-fraction sweep; PCA is refit on each subsampled training set."""
    if not config.fractions:
        raise ConfigError("fraction sweep needs a non-empty fractions list")
    try:
        data, _ = _load_with_features(config)
        tasks = []
        for split_index in range(config.resplits):
            subset, split_seed = _resplit_subset(config, data, split_index)
            plan = make_split(subset, split_seed)
            for fraction_index, fraction in enumerate(config.fractions):
                sub_plan = subsample_fraction(
                    plan, fraction,
                    derive_seed(config.master_seed, _NS_FRACTION, split_index, fraction_index),
                )
                for n in config.n_list:
                    tasks.append(_make_cell(config, subset, sub_plan, n, fraction, split_index, split_seed))
        logger.info("fraction sweep: %d cells on %d workers", len(tasks), config.resolved_workers())
        trials = _map_cells(tasks, config.resolved_workers())
        return _build_report(config, PROTOCOL_FRACTIONS, data.skipped_rows, trials)
    except QsarBenchError as exc:
        _abort_context(config, exc)
        raise


def run_cluster_protocol(config: ExperimentConfig) -> ExperimentReport:
    """Cluster-sampled training sets: k members from each large cluster."""
    if not config.cluster_k:
        raise ConfigError("cluster protocol needs a non-empty cluster_k list")
    if config.embedding != "mgfp":
        raise ConfigError("cluster protocol requires the mgfp embedding")
    try:
        data, fps = _load_with_features(config)

        shared_clustering = None
        if not config.should_undersample:
            shared_clustering = butina_cluster(fps, config.cluster_cutoff)

        tasks = []
        for split_index in range(config.resplits):
            subset, split_seed = _resplit_subset(config, data, split_index)
            if shared_clustering is None:
                subset_fps = [Fingerprint.from_bit_array(row) for row in subset.features]
                clustering = butina_cluster(subset_fps, config.cluster_cutoff)
            else:
                clustering = shared_clustering
            for k_index, k in enumerate(config.cluster_k):
                plan = cluster_training_plan(
                    clustering,
                    LARGE_CLUSTER_MIN_SIZE,
                    k,
                    derive_seed(config.master_seed, _NS_CLUSTER, split_index, k_index),
                )
                for n in config.n_list:
                    tasks.append(_make_cell(config, subset, plan, n, float(k), split_index, split_seed))
        logger.info("cluster sweep: %d cells on %d workers", len(tasks), config.resolved_workers())
        trials = _map_cells(tasks, config.resolved_workers())
        return _build_report(config, PROTOCOL_CLUSTERS, data.skipped_rows, trials)
    except QsarBenchError as exc:
        _abort_context(config, exc)
        raise


# --- serialization ----------------------------------------------------------------

def _trial_to_dict(trial: TrialResult) -> dict:
    return {
        "model": trial.model,
        "n": trial.n,
        "x": trial.x,
        "split_index": trial.split_index,
        "rep_index": trial.rep_index,
        "split_seed": trial.split_seed,
        "rep_seed": trial.rep_seed,
        "best_test_accuracy": trial.best_test_accuracy,
        "best_epoch": trial.best_epoch,
        "final_train_loss": trial.final_train_loss,
        "test_recall_at_best": trial.test_recall_at_best,
        "schedule_digest": trial.schedule_digest,
    }


def _summary_to_dict(cell: CellSummary) -> dict:
    return {
        "model": cell.model,
        "n": cell.n,
        "x": cell.x,
        "mean_accuracy": cell.mean_accuracy,
        "spread": cell.spread,
        "per_split_means": list(cell.per_split_means),
        "mean_recall": cell.mean_recall,
    }


def emit_report(report: ExperimentReport, fmt: str, path: str) -> str:
    """Write one report file; `fmt` is 'json' (full) or 'csv' (plot table)."""
    if not report.trials:
        raise InvariantViolation("refusing to emit a report with no trials")
    if fmt == "json":
        payload = {
            "version": report.version,
            "protocol": report.protocol,
            "config": report.config,
            "skipped_rows": report.skipped_rows,
            "summaries": [_summary_to_dict(c) for c in report.summaries],
            "trials": [_trial_to_dict(t) for t in sorted(report.trials, key=_trial_sort_key)],
        }
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
    elif fmt == "csv":
        dataset = report.config.get("dataset", "")
        embedding = report.config.get("embedding", "")
        lines = ["dataset,embedding,n,model,x,mean,spread"]
        for cell in report.summaries:
            x = "" if cell.x is None else repr(float(cell.x))
            lines.append(
                f"{dataset},{embedding},{cell.n},{cell.model},{x},"
                f"{cell.mean_accuracy!r},{cell.spread!r}"
            )
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    return path


def write_report_files(report: ExperimentReport, out_dir: str, stem: str) -> dict[str, str]:
    """Emit both formats under out_dir; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    return {
        "json": emit_report(report, "json", os.path.join(out_dir, f"{stem}.json")),
        "csv": emit_report(report, "csv", os.path.join(out_dir, f"{stem}.csv")),
    }


def load_report(path: str) -> ExperimentReport:
    """Reconstruct a report from its JSON file."""
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    trials = [TrialResult(**t) for t in payload["trials"]]
    summaries = [
        CellSummary(
            model=c["model"],
            n=c["n"],
            x=c["x"],
            mean_accuracy=c["mean_accuracy"],
            spread=c["spread"],
            per_split_means=tuple(c["per_split_means"]),
            mean_recall=c["mean_recall"],
        )
        for c in payload["summaries"]
    ]
    return ExperimentReport(
        protocol=payload["protocol"],
        config=payload["config"],
        version=payload["version"],
        skipped_rows=payload["skipped_rows"],
        trials=trials,
        summaries=summaries,
    )
