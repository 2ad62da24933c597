"""ML-KNN multi-label classifier and the evaluation metrics.

ML-KNN scores each test instance per label with a Bayesian posterior over how
many of its K nearest training neighbors are positive for that label. Training
statistics use leave-one-out neighbor counts with Laplace smoothing; neighbor
lookup is plain Euclidean distance with ties broken by ascending instance
index, which keeps everything deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, rankdata


class TooFewInstancesError(ValueError):
    pass


class ShapeMismatchError(ValueError):
    pass


class TooFewSamplesError(ValueError):
    pass


@dataclass(frozen=True)
class MlknnModel:
    k_neighbors: int
    smoothing: float
    train_features: np.ndarray        # r x n
    train_labels: np.ndarray          # k x n binary
    prior_positive: np.ndarray        # (k,)
    conditional_positive: np.ndarray  # k x (K+1), rows sum to 1
    conditional_negative: np.ndarray  # k x (K+1), rows sum to 1


@dataclass(frozen=True)
class MetricsReport:
    hamming_loss: float
    average_precision: float
    micro_f1: float

    def as_dict(self) -> dict:
        return {
            "hamming_loss": self.hamming_loss,
            "average_precision": self.average_precision,
            "micro_f1": self.micro_f1,
        }


def _sq_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between columns of a (r x na) and b (r x nb)."""
    aa = np.sum(a * a, axis=0)
    bb = np.sum(b * b, axis=0)
    d2 = aa[:, None] + bb[None, :] - 2.0 * (a.T @ b)
    return np.maximum(d2, 0.0)


def _nearest_indices(d2: np.ndarray, k: int) -> np.ndarray:
    # stable argsort keeps ascending-index order on distance ties
    return np.argsort(d2, axis=1, kind="stable")[:, :k]


def _positive_neighbor_counts(labels: np.ndarray, neighbor_idx: np.ndarray) -> np.ndarray:
    """For each label j and query q: how many of q's neighbors are positive for j."""
    return labels[:, neighbor_idx].sum(axis=2).astype(np.int64)


def mlknn_train(x, y, k_neighbors: int = 10, smoothing: float = 1.0) -> MlknnModel:
    """Fit ML-KNN priors and neighbor-count conditionals on a training split.

    The neighbor statistics for a training instance exclude the instance
    itself. Conditionals are Laplace-smoothed histograms over the neighbor
    count c in 0..K, one per label, separately for positive and negative
    instances.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
        raise ShapeMismatchError(f"incompatible shapes x {x.shape}, y {y.shape}")
    n = x.shape[1]
    if n <= k_neighbors:
        raise TooFewInstancesError(f"need more than {k_neighbors} instances, got {n}")
    if smoothing <= 0.0:
        raise ValueError("smoothing must be positive")

    k = y.shape[0]
    s = float(smoothing)
    positives = y.sum(axis=1)
    prior_positive = (s + positives) / (2.0 * s + n)

    d2 = _sq_distances(x, x)
    np.fill_diagonal(d2, np.inf)
    neighbor_idx = _nearest_indices(d2, k_neighbors)
    counts = _positive_neighbor_counts(y, neighbor_idx)  # k x n

    cond_pos = np.empty((k, k_neighbors + 1))
    cond_neg = np.empty((k, k_neighbors + 1))
    for j in range(k):
        is_pos = y[j] == 1.0
        pos_hist = np.bincount(counts[j, is_pos], minlength=k_neighbors + 1)
        neg_hist = np.bincount(counts[j, ~is_pos], minlength=k_neighbors + 1)
        cond_pos[j] = (s + pos_hist) / (s * (k_neighbors + 1) + is_pos.sum())
        cond_neg[j] = (s + neg_hist) / (s * (k_neighbors + 1) + (~is_pos).sum())

    return MlknnModel(
        k_neighbors=k_neighbors,
        smoothing=s,
        train_features=x,
        train_labels=y,
        prior_positive=prior_positive,
        conditional_positive=cond_pos,
        conditional_negative=cond_neg,
    )


def mlknn_predict(model: MlknnModel, x_test) -> tuple[np.ndarray, np.ndarray]:
    """Score and classify test instances.

    Returns (scores, predictions), both k x m. The score is the posterior
    probability of relevance; the hard prediction is 1 iff the positive
    posterior strictly exceeds the negative one (ties go to 0).
    """
    x_test = np.asarray(x_test, dtype=np.float64)
    if x_test.ndim != 2 or x_test.shape[0] != model.train_features.shape[0]:
        raise ShapeMismatchError(
            f"test features must have {model.train_features.shape[0]} rows"
        )
    k = model.train_labels.shape[0]
    m = x_test.shape[1]
    if m == 0:
        return np.zeros((k, 0)), np.zeros((k, 0))

    d2 = _sq_distances(x_test, model.train_features)
    neighbor_idx = _nearest_indices(d2, model.k_neighbors)
    counts = _positive_neighbor_counts(model.train_labels, neighbor_idx)  # k x m

    rows = np.arange(k)[:, None]
    post_pos = model.prior_positive[:, None] * model.conditional_positive[rows, counts]
    post_neg = (1.0 - model.prior_positive)[:, None] * model.conditional_negative[rows, counts]
    scores = post_pos / (post_pos + post_neg)
    predictions = (post_pos > post_neg).astype(np.float64)
    return scores, predictions


def _check_binary_pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise ShapeMismatchError(f"shapes {a.shape} and {b.shape} must match")
    for name, m in (("predictions", a), ("truth", b)):
        if not np.all((m == 0.0) | (m == 1.0)):
            raise ValueError(f"{name} must be binary")
    return a, b


def hamming_loss(predictions, truth) -> float:
    """Fraction of instance-label pairs predicted incorrectly."""
    predictions, truth = _check_binary_pair(predictions, truth)
    return float(np.mean(predictions != truth))


def average_precision(scores, truth) -> float:
    """Mean per-instance precision of the label ranking induced by the scores.

    For each instance, every relevant label contributes the fraction of
    labels ranked at or above it that are themselves relevant; instances
    without any relevant label are skipped.
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if scores.shape != truth.shape or scores.ndim != 2:
        raise ShapeMismatchError(f"shapes {scores.shape} and {truth.shape} must match")
    if not np.all((truth == 0.0) | (truth == 1.0)):
        raise ValueError("truth must be binary")

    per_instance = []
    for i in range(scores.shape[1]):
        relevant = truth[:, i] == 1.0
        n_relevant = int(relevant.sum())
        if n_relevant == 0:
            continue
        order = np.argsort(-scores[:, i], kind="stable")
        relevant_sorted = relevant[order]
        ranks = np.flatnonzero(relevant_sorted) + 1          # 1-based ranks of relevant labels
        hits = np.cumsum(relevant_sorted)[ranks - 1]          # relevant at-or-above each
        per_instance.append(float(np.mean(hits / ranks)))
    if not per_instance:
        return 0.0
    return float(np.mean(per_instance))


def micro_f1(predictions, truth) -> float:
    """F1 with true/false positives pooled over all instance-label pairs."""
    predictions, truth = _check_binary_pair(predictions, truth)
    tp = float(np.sum((predictions == 1.0) & (truth == 1.0)))
    fp = float(np.sum((predictions == 1.0) & (truth == 0.0)))
    fn = float(np.sum((predictions == 0.0) & (truth == 1.0)))
    denom = 2.0 * tp + fp + fn
    if denom == 0.0:
        return 0.0
    return 2.0 * tp / denom


def evaluate_predictions(scores, predictions, truth) -> MetricsReport:
    return MetricsReport(
        hamming_loss=hamming_loss(predictions, truth),
        average_precision=average_precision(scores, truth),
        micro_f1=micro_f1(predictions, truth),
    )


def friedman_test(results) -> tuple[float, float]:
    """Friedman rank test across methods (rows) and datasets (columns).

    Values must be oriented so that higher is better; rank 1 goes to the best
    method within each dataset, with average ranks on ties. Returns the
    chi-square statistic with (methods - 1) degrees of freedom and its
    p-value.
    """
    results = np.asarray(results, dtype=np.float64)
    if results.ndim != 2:
        raise ShapeMismatchError("results must be a methods x datasets matrix")
    n_methods, n_datasets = results.shape
    if n_methods < 2 or n_datasets < 2:
        raise TooFewSamplesError("need at least 2 methods and 2 datasets")

    ranks = np.empty_like(results)
    for j in range(n_datasets):
        ranks[:, j] = rankdata(-results[:, j], method="average")
    rank_sums = ranks.sum(axis=1)
    expected = n_datasets * (n_methods + 1) / 2.0
    statistic = (
        12.0 / (n_datasets * n_methods * (n_methods + 1))
        * float(np.sum((rank_sums - expected) ** 2))
    )
    p_value = float(chi2.sf(statistic, df=n_methods - 1))
    return statistic, p_value
