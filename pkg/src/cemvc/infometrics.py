"""Entropy and mutual-information estimators used to score views.

Continuous entropies come from a leave-one-out Gaussian-product-kernel
density (Silverman bandwidths, resubstitution average of -log density).
Discrete quantities operate on hard label vectors via contingency counts.
All values are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .numcore import as_matrix

SIGMA_FLOOR = 1e-6
_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    sample_count: int
    bandwidths: np.ndarray


def silverman_bandwidths(samples: np.ndarray) -> np.ndarray:
    """Per-dimension bandwidth 1.06 * sigma * n^(-1/(4+d)), sigma floored."""
    n, d = samples.shape
    sigma = np.maximum(samples.std(axis=0, ddof=1), SIGMA_FLOOR)
    return 1.06 * sigma * n ** (-1.0 / (4.0 + d))


def kde_entropy(samples) -> EntropyEstimate:
    """Leave-one-out kernel-density entropy of an (n, d) sample matrix."""
    x = as_matrix(samples, "samples")
    n, d = x.shape
    if n < 2:
        raise ValueError(f"need at least 2 samples for a leave-one-out density, got {n}")
    h = silverman_bandwidths(x)
    # Centering is a no-op for the estimator but keeps the pairwise
    # distances well conditioned for large offsets.
    z = (x - x.mean(axis=0)) / h
    sq_norms = np.einsum("ij,ij->i", z, z)
    sq_dist = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (z @ z.T)
    np.maximum(sq_dist, 0.0, out=sq_dist)
    np.fill_diagonal(sq_dist, np.inf)
    log_density = (
        logsumexp(-0.5 * sq_dist, axis=1)
        - np.log(n - 1)
        - np.log(h).sum()
        - 0.5 * d * _LOG_2PI
    )
    return EntropyEstimate(float(-log_density.mean()), n, h)


def joint_entropy(a, b) -> EntropyEstimate:
    """Entropy of the column-concatenation of two equal-length samples."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"row counts differ: {a.shape[0]} vs {b.shape[0]}")
    return kde_entropy(np.hstack([a, b]))


def total_conditional_entropy(reps: Sequence[np.ndarray]) -> np.ndarray:
    """Per-view sum over other views u of H(view, u) - H(u).

    Low values flag views whose content is largely shared with the rest;
    an unrelated noise view gets the largest value.
    """
    mats = [as_matrix(r, f"view {v}") for v, r in enumerate(reps)]
    n_views = len(mats)
    if n_views < 2:
        raise ValueError("conditional entropy needs at least 2 views")
    rows = {m.shape[0] for m in mats}
    if len(rows) != 1:
        raise ValueError(f"views have differing row counts: {sorted(rows)}")
    marginal = np.array([kde_entropy(m).value for m in mats])
    joint = np.zeros((n_views, n_views))
    for v in range(n_views):
        for u in range(v + 1, n_views):
            joint[v, u] = joint[u, v] = joint_entropy(mats[v], mats[u]).value
    out = np.empty(n_views)
    for v in range(n_views):
        others = [u for u in range(n_views) if u != v]
        out[v] = float(sum(joint[v, u] - marginal[u] for u in others))
    return out


def _as_labels(labels, name: str) -> np.ndarray:
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D label vector, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.issubdtype(arr.dtype, np.integer):
        rounded = np.rint(arr)
        if not np.array_equal(rounded, arr):
            raise ValueError(f"{name} contains non-integer labels")
        arr = rounded.astype(np.int64)
    if arr.min() < 0:
        raise ValueError(f"{name} contains negative labels")
    return arr.astype(np.int64)


def _entropy_from_counts(counts: np.ndarray) -> float:
    total = counts.sum()
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def label_entropy(labels, num_classes: int | None = None) -> float:
    """Shannon entropy of the empirical label marginal, in nats."""
    arr = _as_labels(labels, "labels")
    k = int(arr.max()) + 1 if num_classes is None else int(num_classes)
    if arr.max() >= k:
        raise ValueError(f"label {arr.max()} out of range for {k} classes")
    counts = np.bincount(arr, minlength=k)
    return _entropy_from_counts(counts)


def _contingency(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ka = int(a.max()) + 1
    kb = int(b.max()) + 1
    return np.bincount(a * kb + b, minlength=ka * kb).reshape(ka, kb)


def mutual_information(a, b) -> float:
    """Mutual information of two labelings from their contingency table."""
    a = _as_labels(a, "a")
    b = _as_labels(b, "b")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"label lengths differ: {a.shape[0]} vs {b.shape[0]}")
    table = _contingency(a, b)
    h_a = _entropy_from_counts(table.sum(axis=1))
    h_b = _entropy_from_counts(table.sum(axis=0))
    h_ab = _entropy_from_counts(table.ravel())
    return h_a + h_b - h_ab


def nmi(a, b) -> float:
    """Normalized mutual information 2*MI/(H(a)+H(b)), with 0/0 -> 0."""
    a = _as_labels(a, "a")
    b = _as_labels(b, "b")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"label lengths differ: {a.shape[0]} vs {b.shape[0]}")
    table = _contingency(a, b)
    h_a = _entropy_from_counts(table.sum(axis=1))
    h_b = _entropy_from_counts(table.sum(axis=0))
    if h_a + h_b == 0.0:
        return 0.0
    h_ab = _entropy_from_counts(table.ravel())
    mi = (h_a + h_b) - h_ab
    return float(min(1.0, max(0.0, 2.0 * mi / (h_a + h_b))))
