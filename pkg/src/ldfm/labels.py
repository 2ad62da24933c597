"""Label correlation and the numeric label matrix that seeds the optimizer.

Logical labels are binary relevance flags; the numeric label matrix spreads
each instance's active labels onto correlated labels, giving every label a
real-valued strength. Correlation between two labels is the Jaccard index of
their positive-instance sets.
"""

from __future__ import annotations

import numpy as np


class NonBinaryInputError(ValueError):
    pass


def _check_binary(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2:
        raise ValueError(f"label matrix must be 2-D, got ndim={y.ndim}")
    if not np.all((y == 0.0) | (y == 1.0)):
        raise NonBinaryInputError("label matrix entries must be exactly 0 or 1")
    return y


def jaccard_correlation(y) -> np.ndarray:
    """Jaccard similarity between every pair of label rows of a k x n binary matrix.

    Returns a symmetric k x k matrix with entries in [0, 1]. Pairs with an
    empty union (both labels never positive) get similarity 0 off-diagonal;
    the diagonal is fixed at 1 even for unused labels so that downstream
    numeric labels never fall below the logical ones.
    """
    y = _check_binary(y)
    inter = y @ y.T
    counts = y.sum(axis=1)
    union = counts[:, None] + counts[None, :] - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(union > 0.0, inter / np.where(union > 0.0, union, 1.0), 0.0)
    np.fill_diagonal(c, np.where(counts > 0.0, np.diagonal(c), 1.0))
    return c


def init_numeric_labels(y, c) -> np.ndarray:
    """Initial numeric labels: correlation-weighted accumulation C @ Y (k x n).

    Entry (j, i) sums instance i's active labels weighted by their correlation
    with label j, so unrepresented but correlated labels acquire positive mass.
    """
    y = np.asarray(y, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"correlation matrix must be square, got shape {c.shape}")
    if y.ndim != 2 or y.shape[0] != c.shape[0]:
        raise ValueError(
            f"label matrix rows ({y.shape[0]}) must match correlation size ({c.shape[0]})"
        )
    return c @ y
