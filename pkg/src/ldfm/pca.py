"""PCA over column-sample matrices, fitted on training features only.

Data is laid out d x n (features in rows, instances in columns) to match the
rest of the pipeline. Components come from the eigendecomposition of the
sample covariance (divisor n-1) of the column-centered data; the retained
count is the smallest one whose cumulative explained-variance ratio reaches
the requested level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateDataError(ValueError):
    pass


# Relative eigenvalue cutoff: components below this fraction of the total
# variance count as rank deficiency, not signal.
_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray                      # (d,)
    components: np.ndarray                # (d, r), orthonormal columns
    explained_variance_ratio: np.ndarray  # (r,), positive, non-increasing
    scale: np.ndarray | None = None       # (d,) per-feature std when standardizing

    @property
    def n_components(self) -> int:
        return self.components.shape[1]


def fit_pca(x, variance_retained: float, standardize: bool = False) -> PcaModel:
    """Fit PCA on a d x n matrix, keeping enough components for the target variance.

    ``standardize=True`` additionally divides each feature row by its standard
    deviation before the covariance (off by default; zero-variance rows keep
    scale 1). Component signs are fixed by forcing each component's
    largest-magnitude entry positive, so fits are reproducible.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"x must be 2-D, got ndim={x.ndim}")
    d, n = x.shape
    if n < 2:
        raise ValueError(f"need at least 2 instances to fit PCA, got {n}")
    if not 0.0 < variance_retained <= 1.0:
        raise ValueError(f"variance_retained must be in (0, 1], got {variance_retained}")

    mean = x.mean(axis=1)
    centered = x - mean[:, None]
    scale = None
    if standardize:
        scale = centered.std(axis=1, ddof=1)
        scale = np.where(scale > 0.0, scale, 1.0)
        centered = centered / scale[:, None]

    cov = (centered @ centered.T) / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    eigvals = np.maximum(eigvals[::-1], 0.0)  # descending, clip roundoff negatives
    eigvecs = eigvecs[:, ::-1]

    total = eigvals.sum()
    if total <= 0.0:
        raise DegenerateDataError("data has zero total variance")
    eigvals[eigvals <= _RANK_RTOL * total] = 0.0

    ratios = eigvals / total
    cumulative = np.cumsum(ratios)
    r = int(np.searchsorted(cumulative, variance_retained - 1e-12) + 1)
    r = min(r, int(np.count_nonzero(eigvals)))

    components = eigvecs[:, :r].copy()
    # sign convention: largest-|entry| of each component is positive
    flip = components[np.argmax(np.abs(components), axis=0), np.arange(r)] < 0.0
    components[:, flip] *= -1.0

    return PcaModel(
        mean=mean,
        components=components,
        explained_variance_ratio=ratios[:r].copy(),
        scale=scale,
    )


def apply_pca(model: PcaModel, x) -> np.ndarray:
    """Project a d x m matrix into the fitted component space (r x m)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != model.mean.shape[0]:
        rows = x.shape[0] if x.ndim == 2 else None
        raise ValueError(
            f"x must have {model.mean.shape[0]} rows, got {rows}"
        )
    centered = x - model.mean[:, None]
    if model.scale is not None:
        centered = centered / model.scale[:, None]
    return model.components.T @ centered
