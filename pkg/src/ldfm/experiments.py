"""Experiment pipelines: feature curves, reconstruction, missing labels, sweeps.

Every run is driven by an ExperimentConfig and produces a RunRecord whose
config snapshot is enough to reproduce it bit-identically; the only
non-deterministic field is the wall time, kept in a clearly marked
``timing`` section.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import datasets, evaluation, model, pca

METRIC_FIELDS = ("hamming_loss", "average_precision", "micro_f1")


@dataclass(frozen=True)
class ExperimentConfig:
    train_path: str
    test_path: str
    xml_path: str
    lam: float = 1.0
    max_iterations: int = 100
    objective_tolerance: float = 1e-6
    pca_variance: float = 0.95       # 0 disables PCA
    standardize: bool = False
    feature_counts: tuple[int, ...] = (100,)
    seeds: tuple[int, ...] = (0,)
    missing_proportions: tuple[float, ...] = ()
    k_neighbors: int = 10
    output_dir: str = "results"
    output_format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "feature_counts", tuple(int(m) for m in self.feature_counts))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(
            self, "missing_proportions", tuple(float(p) for p in self.missing_proportions)
        )
        if not self.feature_counts:
            raise ValueError("feature_counts must be nonempty")
        if any(m < 1 for m in self.feature_counts):
            raise ValueError("feature_counts must be positive")
        if list(self.feature_counts) != sorted(self.feature_counts):
            raise ValueError("feature_counts must be ascending")
        if not 0.0 <= self.pca_variance <= 1.0:
            raise ValueError("pca_variance must be in [0, 1] (0 disables PCA)")
        if any(not 0.0 <= p <= 1.0 for p in self.missing_proportions):
            raise ValueError("missing proportions must be in [0, 1]")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.output_format!r}")

    def ldfm_config(self) -> model.LdfmConfig:
        return model.LdfmConfig(
            lam=self.lam,
            max_iterations=self.max_iterations,
            objective_tolerance=self.objective_tolerance,
        )

    def snapshot(self) -> dict:
        return {
            "train_path": self.train_path,
            "test_path": self.test_path,
            "xml_path": self.xml_path,
            "lam": self.lam,
            "max_iterations": self.max_iterations,
            "objective_tolerance": self.objective_tolerance,
            "pca_variance": self.pca_variance,
            "standardize": self.standardize,
            "feature_counts": list(self.feature_counts),
            "seeds": list(self.seeds),
            "missing_proportions": list(self.missing_proportions),
            "k_neighbors": self.k_neighbors,
            "output_dir": self.output_dir,
            "output_format": self.output_format,
        }


@dataclass
class RunRecord:
    experiment_id: str
    kind: str
    dataset: str
    config: dict
    seed: int | None = None
    metrics_by_feature_count: list[dict] = field(default_factory=list)
    reconstruction_errors: dict | None = None
    objective_trace: list[float] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)  # wall times only; not reproducible

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "kind": self.kind,
            "dataset": self.dataset,
            "config": self.config,
            "seed": self.seed,
            "metrics_by_feature_count": self.metrics_by_feature_count,
            "reconstruction_errors": self.reconstruction_errors,
            "objective_trace": self.objective_trace,
            "details": self.details,
            "timing": self.timing,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RunRecord":
        return cls(**payload)

    def deterministic_dict(self) -> dict:
        """Record contents minus the timing section, for replay comparisons."""
        payload = self.to_dict()
        payload.pop("timing")
        return payload


def load_pair(config: ExperimentConfig) -> datasets.DatasetPair:
    return datasets.load_mulan_pair(config.train_path, config.test_path, config.xml_path)


def preprocess_features(
    config: ExperimentConfig, pair: datasets.DatasetPair
) -> tuple[np.ndarray, np.ndarray]:
    """PCA-reduce train/test features (fit on train only), or pass through."""
    if config.pca_variance == 0.0:
        return pair.train.features, pair.test.features
    pca_model = pca.fit_pca(
        pair.train.features, config.pca_variance, standardize=config.standardize
    )
    return pca.apply_pca(pca_model, pair.train.features), pca.apply_pca(
        pca_model, pair.test.features
    )


def evaluate_feature_subset(
    x_train, y_train, x_test, y_test, indices, k_neighbors: int = 10
) -> evaluation.MetricsReport:
    """Restrict both splits to the given feature rows and run ML-KNN."""
    indices = np.asarray(indices, dtype=np.intp)
    classifier = evaluation.mlknn_train(x_train[indices], y_train, k_neighbors=k_neighbors)
    scores, predictions = evaluation.mlknn_predict(classifier, x_test[indices])
    return evaluation.evaluate_predictions(scores, predictions, y_test)


def _usable_counts(config: ExperimentConfig, dim: int) -> tuple[list[int], list[int]]:
    usable = [m for m in config.feature_counts if m <= dim]
    skipped = [m for m in config.feature_counts if m > dim]
    if not usable:
        raise ValueError(
            f"no requested feature count fits the {dim}-dimensional feature space"
        )
    return usable, skipped


def _experiment_id(kind: str, dataset: str, config: ExperimentConfig, seed=None) -> str:
    parts = [
        kind,
        dataset,
        f"lam{config.lam:g}",
        f"it{config.max_iterations}",
        f"pca{config.pca_variance:g}",
    ]
    if seed is not None:
        parts.append(f"seed{seed}")
    return "-".join(parts)


def run_feature_curve(config: ExperimentConfig) -> RunRecord:
    """Fit LDFM, rank features, and trace ML-KNN metrics over top-m subsets."""
    started = time.perf_counter()
    pair = load_pair(config)
    x_train, x_test = preprocess_features(config, pair)
    fitted = model.fit(x_train, pair.train.labels, config.ldfm_config())
    ranking = model.rank_features(fitted)
    ranked_indices = [idx for idx, _ in ranking]

    counts, skipped = _usable_counts(config, x_train.shape[0])
    rows = []
    for m in counts:
        report = evaluate_feature_subset(
            x_train,
            pair.train.labels,
            x_test,
            pair.test.labels,
            ranked_indices[:m],
            k_neighbors=config.k_neighbors,
        )
        rows.append({"feature_count": m, **report.as_dict()})

    record = RunRecord(
        experiment_id=_experiment_id("feature-curve", pair.name, config),
        kind="feature-curve",
        dataset=pair.name,
        config=config.snapshot(),
        metrics_by_feature_count=rows,
        objective_trace=list(fitted.objective_trace),
        details={
            "ranked_features": ranked_indices,
            "skipped_feature_counts": skipped,
            "post_preprocessing_dim": int(x_train.shape[0]),
        },
    )
    record.timing["wall_time_seconds"] = time.perf_counter() - started
    return record


def run_reconstruction(config: ExperimentConfig) -> RunRecord:
    """Fit LDFM and measure decoder reconstruction errors.

    Three errors on the space the model was fit in: training features from the
    logical training labels, from the learned numeric labels, and test
    features from the logical test labels.
    """
    started = time.perf_counter()
    pair = load_pair(config)
    x_train, x_test = preprocess_features(config, pair)
    fitted = model.fit(x_train, pair.train.labels, config.ldfm_config())
    errors = {
        "logical_train": model.reconstruction_error(x_train, fitted.w, pair.train.labels),
        "predicted_train": model.reconstruction_error(x_train, fitted.w, fitted.y_numeric),
        "logical_test": model.reconstruction_error(x_test, fitted.w, pair.test.labels),
    }
    record = RunRecord(
        experiment_id=_experiment_id("reconstruct", pair.name, config),
        kind="reconstruct",
        dataset=pair.name,
        config=config.snapshot(),
        reconstruction_errors=errors,
        objective_trace=list(fitted.objective_trace),
    )
    record.timing["wall_time_seconds"] = time.perf_counter() - started
    return record


def _fit_rank_evaluate(
    config: ExperimentConfig,
    x_train,
    y_train_corrupt,
    x_test,
    y_test,
    counts,
    learn_numeric_labels: bool,
) -> list[dict]:
    fitted = model.fit(
        x_train,
        y_train_corrupt,
        config.ldfm_config(),
        learn_numeric_labels=learn_numeric_labels,
    )
    if not learn_numeric_labels and not np.array_equal(fitted.y_numeric, y_train_corrupt):
        raise AssertionError("frozen baseline modified its numeric labels")
    ranked = [idx for idx, _ in model.rank_features(fitted)]
    rows = []
    for m in counts:
        report = evaluate_feature_subset(
            x_train, y_train_corrupt, x_test, y_test, ranked[:m],
            k_neighbors=config.k_neighbors,
        )
        rows.append({"feature_count": m, **report.as_dict()})
    return rows


def _average_metric_rows(rows_by_seed: list[list[dict]]) -> list[dict]:
    averaged = []
    for entry_idx in range(len(rows_by_seed[0])):
        base = {"feature_count": rows_by_seed[0][entry_idx]["feature_count"]}
        for metric in METRIC_FIELDS:
            base[metric] = float(
                np.mean([rows[entry_idx][metric] for rows in rows_by_seed])
            )
        averaged.append(base)
    return averaged


def run_missing_labels(config: ExperimentConfig) -> RunRecord:
    """Corrupt training labels per proportion/seed and compare two arms.

    The frozen baseline keeps the numeric labels pinned to the corrupted
    logical matrix; the full LDFM arm learns them. Both arms select features
    with their own W and are scored by ML-KNN, trained on the corrupted
    labels, against the untouched test labels. Metrics are averaged over
    seeds, with per-seed values kept alongside.
    """
    if not config.missing_proportions:
        raise ValueError("missing_proportions must be nonempty")
    started = time.perf_counter()
    pair = load_pair(config)
    x_train, x_test = preprocess_features(config, pair)
    counts, skipped = _usable_counts(config, x_train.shape[0])

    results = []
    for proportion in config.missing_proportions:
        per_seed = []
        base_rows_by_seed = []
        ldfm_rows_by_seed = []
        for seed in config.seeds:
            corrupted = datasets.corrupt_labels(pair.train, proportion, seed)
            base_rows = _fit_rank_evaluate(
                config, x_train, corrupted.labels, x_test, pair.test.labels,
                counts, learn_numeric_labels=False,
            )
            ldfm_rows = _fit_rank_evaluate(
                config, x_train, corrupted.labels, x_test, pair.test.labels,
                counts, learn_numeric_labels=True,
            )
            base_rows_by_seed.append(base_rows)
            ldfm_rows_by_seed.append(ldfm_rows)
            per_seed.append({"seed": seed, "base": base_rows, "ldfm": ldfm_rows})
        results.append(
            {
                "proportion": proportion,
                "base": _average_metric_rows(base_rows_by_seed),
                "ldfm": _average_metric_rows(ldfm_rows_by_seed),
                "per_seed": per_seed,
            }
        )

    record = RunRecord(
        experiment_id=_experiment_id("missing-labels", pair.name, config),
        kind="missing-labels",
        dataset=pair.name,
        config=config.snapshot(),
        details={
            "missing_label_results": results,
            "skipped_feature_counts": skipped,
            "post_preprocessing_dim": int(x_train.shape[0]),
            "baseline": "numeric labels frozen at the corrupted logical matrix",
        },
    )
    record.timing["wall_time_seconds"] = time.perf_counter() - started
    return record


DEFAULT_LAMBDA_GRID = tuple(round(0.2 * i, 10) for i in range(1, 11))
DEFAULT_ITERATION_GRID = (1, 20, 40, 60, 80, 100)


def run_sweep(
    config: ExperimentConfig,
    lambda_grid=DEFAULT_LAMBDA_GRID,
    iteration_grid=DEFAULT_ITERATION_GRID,
) -> list[RunRecord]:
    """Full feature-curve run for every (lambda, max_iterations) grid point."""
    if not lambda_grid or not iteration_grid:
        raise ValueError("sweep grids must be nonempty")
    records = []
    for lam in lambda_grid:
        for iterations in iteration_grid:
            point = ExperimentConfig(
                **{
                    **config.snapshot(),
                    "lam": float(lam),
                    "max_iterations": int(iterations),
                }
            )
            records.append(run_feature_curve(point))
    return records


def random_feature_baseline(
    x_train, y_train, x_test, y_test, subset_size: int, seeds, k_neighbors: int = 10
) -> list[evaluation.MetricsReport]:
    """ML-KNN metrics for seeded uniformly random feature subsets."""
    dim = x_train.shape[0]
    if subset_size > dim:
        raise ValueError(f"subset size {subset_size} exceeds dimensionality {dim}")
    reports = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        indices = np.sort(rng.choice(dim, size=subset_size, replace=False))
        reports.append(
            evaluate_feature_subset(x_train, y_train, x_test, y_test, indices, k_neighbors)
        )
    return reports


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def emit_results(records, output_format: str, output_dir) -> list[Path]:
    """Write result tables and plot-data files; returns the paths written.

    The summary table is ``summary.csv`` or ``summary.json`` depending on the
    format (header-only when there are no records). Plot data is always CSV:
    ``<id>_curve.csv`` (feature count vs metrics), ``<id>_objective.csv``
    (iteration vs objective), ``<id>_reconstruction.csv`` and
    ``<id>_missing.csv`` where applicable. JSON mode additionally writes one
    ``<id>.json`` per record with the full RunRecord payload.
    """
    if output_format not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {output_format!r}")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    summary_header = ["experiment_id", "kind", "dataset", "feature_count", *METRIC_FIELDS]
    summary_rows = []
    for record in records:
        for row in record.metrics_by_feature_count:
            summary_rows.append(
                [record.experiment_id, record.kind, record.dataset, row["feature_count"]]
                + [row[m] for m in METRIC_FIELDS]
            )

    if output_format == "csv":
        summary_path = out / "summary.csv"
        _write_csv(summary_path, summary_header, summary_rows)
        written.append(summary_path)
    else:
        summary_path = out / "summary.json"
        with open(summary_path, "w", encoding="utf-8") as handle:
            json.dump([dict(zip(summary_header, row)) for row in summary_rows], handle, indent=2)
            handle.write("\n")
        written.append(summary_path)
        for record in records:
            record_path = out / f"{record.experiment_id}.json"
            with open(record_path, "w", encoding="utf-8") as handle:
                json.dump(record.to_dict(), handle, indent=2)
                handle.write("\n")
            written.append(record_path)

    for record in records:
        if record.metrics_by_feature_count:
            path = out / f"{record.experiment_id}_curve.csv"
            _write_csv(
                path,
                ["feature_count", *METRIC_FIELDS],
                [
                    [row["feature_count"]] + [row[m] for m in METRIC_FIELDS]
                    for row in record.metrics_by_feature_count
                ],
            )
            written.append(path)
        if record.objective_trace:
            path = out / f"{record.experiment_id}_objective.csv"
            _write_csv(
                path,
                ["iteration", "objective"],
                [[i + 1, v] for i, v in enumerate(record.objective_trace)],
            )
            written.append(path)
        if record.reconstruction_errors is not None:
            path = out / f"{record.experiment_id}_reconstruction.csv"
            _write_csv(
                path,
                ["labels_used", "relative_error"],
                [[key, value] for key, value in record.reconstruction_errors.items()],
            )
            written.append(path)
        if "missing_label_results" in record.details:
            path = out / f"{record.experiment_id}_missing.csv"
            rows = []
            for entry in record.details["missing_label_results"]:
                for arm in ("base", "ldfm"):
                    for row in entry[arm]:
                        rows.append(
                            [entry["proportion"], arm, row["feature_count"]]
                            + [row[m] for m in METRIC_FIELDS]
                        )
            _write_csv(
                path,
                ["proportion", "arm", "feature_count", *METRIC_FIELDS],
                rows,
            )
            written.append(path)
    return written
