"""The LDFM optimizer: a linear encoder-decoder between features and labels.

Training alternates two exact minimizations of

    ||X - W^T Ynum||_F^2  +  lam * ||W X - Ynum||_F^2

where X is d x n, W is the k x d encoder (its transpose is the decoder) and
Ynum is the k x n numeric label matrix, seeded from the logical labels via
Jaccard correlation. The W step is a symmetric-PSD Sylvester solve, the Ynum
step reduces to an SPD linear solve because its right-hand operator is lam*I.
Both steps solve a convex subproblem exactly, so the objective never
increases.

Feature m is scored by the Euclidean norm of W's m-th column: features the
encoder leans on across all labels rank highest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .labels import NonBinaryInputError, _check_binary, init_numeric_labels, jaccard_correlation
from .linalg import solve_spd, solve_sylvester_sympsd

MODEL_FORMAT_VERSION = 1


class ZeroInputError(ValueError):
    pass


@dataclass(frozen=True)
class LdfmConfig:
    """Optimizer settings.

    ``lam`` weights the encoder penalty against the reconstruction term.
    ``objective_tolerance`` is the relative per-iteration decrease below which
    the loop stops early; 0 disables early stopping.
    """

    lam: float = 1.0
    max_iterations: int = 100
    objective_tolerance: float = 1e-6

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.objective_tolerance < 0.0:
            raise ValueError("objective_tolerance must be nonnegative")


@dataclass(frozen=True)
class LdfmModel:
    w: np.ndarray                      # k x d encoder; w.T is the decoder
    y_numeric: np.ndarray              # k x n learned numeric labels
    objective_trace: tuple[float, ...] # one value per completed iteration
    iterations_run: int
    config: LdfmConfig = field(default_factory=LdfmConfig)

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        y_numeric = np.asarray(self.y_numeric, dtype=np.float64)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "y_numeric", y_numeric)
        object.__setattr__(self, "objective_trace", tuple(float(v) for v in self.objective_trace))
        w.flags.writeable = False
        y_numeric.flags.writeable = False

    @property
    def n_labels(self) -> int:
        return self.w.shape[0]

    @property
    def n_features(self) -> int:
        return self.w.shape[1]


def objective(w, y_numeric, x, lam: float) -> float:
    """Value of the relaxed encoder-decoder objective at (w, y_numeric)."""
    w = np.asarray(w, dtype=np.float64)
    y_numeric = np.asarray(y_numeric, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if w.shape != (y_numeric.shape[0], x.shape[0]) or y_numeric.shape[1] != x.shape[1]:
        raise ValueError(
            f"shape mismatch: w {w.shape}, y_numeric {y_numeric.shape}, x {x.shape}"
        )
    decode_residual = x - w.T @ y_numeric
    encode_residual = w @ x - y_numeric
    return float(np.sum(decode_residual**2) + lam * np.sum(encode_residual**2))


def update_w(y_numeric, x, lam: float) -> np.ndarray:
    """Exact minimizer in W with the numeric labels fixed.

    Stationarity gives P W + W Q = R with P = Ynum Ynum^T, Q = lam X X^T and
    R = (lam+1) Ynum X^T, solved by the symmetric-PSD Sylvester routine.
    """
    y_numeric = np.asarray(y_numeric, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    p = y_numeric @ y_numeric.T
    q = lam * (x @ x.T)
    r = (lam + 1.0) * (y_numeric @ x.T)
    return solve_sylvester_sympsd(0.5 * (p + p.T), 0.5 * (q + q.T), r)


def update_y(w, x, lam: float) -> np.ndarray:
    """Exact minimizer in the numeric labels with W fixed.

    The right-hand Sylvester operator is lam*I, so the system collapses to
    (W W^T + lam I) Ynum = (lam+1) W X, which is SPD for lam > 0.
    """
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    a = w @ w.T + lam * np.eye(w.shape[0])
    d = (lam + 1.0) * (w @ x)
    return solve_spd(a, d)


def fit(x, y, config: LdfmConfig | None = None, learn_numeric_labels: bool = True) -> LdfmModel:
    """Alternately minimize over W and the numeric labels.

    The numeric labels start at (Jaccard correlation) @ Y; W needs no explicit
    initialization because each iteration computes it first, from the current
    labels alone. ``learn_numeric_labels=False`` freezes the numeric labels at
    the logical Y and iterates only the W update (the frozen baseline used in
    the missing-label study).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("x must be a d x n matrix")
    try:
        y = _check_binary(y)
    except NonBinaryInputError as exc:
        raise NonBinaryInputError(f"fit requires logical labels: {exc}") from exc
    if x.shape[1] != y.shape[1]:
        raise ValueError(
            f"x has {x.shape[1]} instances but y has {y.shape[1]}"
        )
    cfg = config if config is not None else LdfmConfig()

    if learn_numeric_labels:
        y_numeric = init_numeric_labels(y, jaccard_correlation(y))
    else:
        y_numeric = y.copy()

    trace: list[float] = []
    w = None
    for _ in range(cfg.max_iterations):
        w = update_w(y_numeric, x, cfg.lam)
        if learn_numeric_labels:
            y_numeric = update_y(w, x, cfg.lam)
        trace.append(objective(w, y_numeric, x, cfg.lam))
        if cfg.objective_tolerance > 0.0 and len(trace) > 1:
            prev, current = trace[-2], trace[-1]
            if (prev - current) < cfg.objective_tolerance * max(abs(prev), 1e-300):
                break

    return LdfmModel(
        w=w,
        y_numeric=y_numeric,
        objective_trace=tuple(trace),
        iterations_run=len(trace),
        config=cfg,
    )


def encode(model: LdfmModel, sample) -> np.ndarray:
    """Embed a feature vector into the numeric label space: W x."""
    sample = np.asarray(sample, dtype=np.float64)
    if sample.shape != (model.n_features,):
        raise ValueError(f"sample must have length {model.n_features}, got {sample.shape}")
    return model.w @ sample


def decode(model: LdfmModel, embedding) -> np.ndarray:
    """Reconstruct a feature vector from a numeric label vector: W^T y."""
    embedding = np.asarray(embedding, dtype=np.float64)
    if embedding.shape != (model.n_labels,):
        raise ValueError(f"embedding must have length {model.n_labels}, got {embedding.shape}")
    return model.w.T @ embedding


def rank_features(model: LdfmModel) -> list[tuple[int, float]]:
    """All features sorted by decreasing encoder column norm; ties keep index order."""
    scores = np.linalg.norm(model.w, axis=0)
    order = np.argsort(-scores, kind="stable")
    return [(int(i), float(scores[i])) for i in order]


def reconstruction_error(x, w, labels) -> float:
    """Relative Frobenius error of decoding the given labels back to features.

    ||X - W^T L||_F / ||X||_F for a d x m feature matrix and k x m label
    matrix (logical or numeric).
    """
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if x.shape != (w.shape[1], labels.shape[1]) or labels.shape[0] != w.shape[0]:
        raise ValueError(
            f"shape mismatch: x {x.shape}, w {w.shape}, labels {labels.shape}"
        )
    denom = np.linalg.norm(x)
    if denom == 0.0:
        raise ZeroInputError("feature matrix has zero Frobenius norm")
    return float(np.linalg.norm(x - w.T @ labels) / denom)


def model_to_dict(model: LdfmModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "n_labels": model.n_labels,
        "n_features": model.n_features,
        "n_instances": model.y_numeric.shape[1],
        "config": {
            "lam": model.config.lam,
            "max_iterations": model.config.max_iterations,
            "objective_tolerance": model.config.objective_tolerance,
        },
        "w": model.w.tolist(),
        "y_numeric": model.y_numeric.tolist(),
        "objective_trace": list(model.objective_trace),
        "iterations_run": model.iterations_run,
    }


def model_from_dict(payload: dict) -> LdfmModel:
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    cfg = LdfmConfig(**payload["config"])
    w = np.array(payload["w"], dtype=np.float64)
    y_numeric = np.array(payload["y_numeric"], dtype=np.float64)
    if w.shape != (payload["n_labels"], payload["n_features"]):
        raise ValueError("stored dimensions disagree with the W matrix")
    if y_numeric.shape != (payload["n_labels"], payload["n_instances"]):
        raise ValueError("stored dimensions disagree with the numeric label matrix")
    return LdfmModel(
        w=w,
        y_numeric=y_numeric,
        objective_trace=tuple(payload["objective_trace"]),
        iterations_run=int(payload["iterations_run"]),
        config=cfg,
    )


def save_model(model: LdfmModel, path) -> None:
    """Write the model as versioned JSON; floats round-trip bit-exactly."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model_to_dict(model), handle)
        handle.write("\n")


def load_model(path) -> LdfmModel:
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_dict(json.load(handle))
