"""Evaluation measures: confusion counts, precision, rank-based AUC, and a
kernel two-sample discrepancy (MMD) with a permutation test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seeding import derive_seed

__all__ = [
    "ConfusionMatrix",
    "MmdResult",
    "PermutationTestResult",
    "confusion",
    "precision",
    "auc",
    "median_heuristic",
    "mmd2",
    "mmd_permutation_test",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(y_true, y_pred) -> ConfusionMatrix:
    """Count prediction outcomes for binary labels (positive class = 1)."""
    t = np.asarray(y_true).ravel().astype(int)
    p = np.asarray(y_pred).ravel().astype(int)
    if t.size == 0:
        raise ValueError("confusion requires at least one instance")
    if t.size != p.size:
        raise ValueError(f"length mismatch: {t.size} labels vs {p.size} predictions")
    tp = int(np.sum((t == 1) & (p == 1)))
    fp = int(np.sum((t == 0) & (p == 1)))
    tn = int(np.sum((t == 0) & (p == 0)))
    fn = int(np.sum((t == 1) & (p == 0)))
    return ConfusionMatrix(tp, fp, tn, fn)


def precision(cm: ConfusionMatrix) -> float:
    """tp / (tp + fp), defined as 0.0 when nothing was predicted positive."""
    denom = cm.tp + cm.fp
    return cm.tp / denom if denom else 0.0


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean rank of their tie group."""
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    boundaries = np.flatnonzero(sorted_vals[1:] != sorted_vals[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [values.size]))
    group_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(values.size)
    ranks[order] = np.repeat(group_rank, ends - starts)
    return ranks


def auc(y_true, scores) -> float:
    """Area under the ROC curve via the rank (Mann-Whitney) formulation.

    Equals the fraction of (positive, negative) pairs in which the positive
    instance scores strictly higher, with ties counted as 1/2.
    """
    y = np.asarray(y_true).ravel().astype(int)
    s = np.asarray(scores, dtype=float).ravel()
    if y.size != s.size:
        raise ValueError(f"length mismatch: {y.size} labels vs {s.size} scores")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("auc requires both classes in y_true")
    ranks = _average_ranks(s)
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


# ---------------------------------------------------------------------------
# Two-sample discrepancy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MmdResult:
    mmd2_unbiased: float  # may be slightly negative (U-statistic)
    bandwidth: float
    n_a: int
    n_b: int


@dataclass(frozen=True)
class PermutationTestResult:
    result: MmdResult
    p_value: float
    threshold_95: float
    n_permutations: int

    @property
    def distributions_similar(self) -> bool:
        """True when the observed statistic is inside the permutation bulk."""
        return self.result.mmd2_unbiased <= self.threshold_95


def _as_matrix(x, name: str) -> np.ndarray:
    m = np.asarray(x, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={m.ndim}")
    return m


def _zscore_pooled(pooled: np.ndarray) -> np.ndarray:
    mean = pooled.mean(axis=0)
    std = pooled.std(axis=0)
    safe = np.where(std > 0, std, 1.0)
    z = (pooled - mean) / safe
    z[:, std == 0] = 0.0
    return z


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d2 = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    return np.maximum(d2, 0.0)


def median_heuristic(a, b) -> float:
    """RBF bandwidth: median pairwise distance of the pooled, z-scored rows.

    Self-distances are excluded. A zero median (all pooled rows identical)
    falls back to 1.0.
    """
    A = _as_matrix(a, "a")
    B = _as_matrix(b, "b")
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"column mismatch: {A.shape[1]} vs {B.shape[1]}")
    pooled = np.vstack([A, B])
    if pooled.shape[0] < 2:
        raise ValueError("median heuristic needs at least 2 pooled rows")
    z = _zscore_pooled(pooled)
    d2 = _sq_dists(z, z)
    upper = d2[np.triu_indices(len(z), k=1)]
    med = float(np.median(np.sqrt(upper)))
    return med if med > 0.0 else 1.0


def _mmd2_from_kernel(k: np.ndarray, idx_a: np.ndarray, idx_b: np.ndarray) -> float:
    kaa = k[np.ix_(idx_a, idx_a)]
    kbb = k[np.ix_(idx_b, idx_b)]
    kab = k[np.ix_(idx_a, idx_b)]
    m = len(idx_a)
    n = len(idx_b)
    term_a = (kaa.sum() - np.trace(kaa)) / (m * (m - 1))
    term_b = (kbb.sum() - np.trace(kbb)) / (n * (n - 1))
    if m == n:
        # Matched cross pairs excluded too, so identical samples cancel to 0
        # exactly instead of producing the U-statistic's negative bias.
        cross = (kab.sum() - np.trace(kab)) / (m * (m - 1))
    else:
        cross = kab.mean()
    return float(term_a + term_b - 2.0 * cross)


def _pooled_kernel(a: np.ndarray, b: np.ndarray, bandwidth: float) -> np.ndarray:
    z = _zscore_pooled(np.vstack([a, b]))
    return np.exp(-_sq_dists(z, z) / (2.0 * bandwidth * bandwidth))


def mmd2(a, b, bandwidth: float) -> MmdResult:
    """Unbiased squared MMD with the RBF kernel exp(-||x-y||^2 / (2*sigma^2)).

    Columns are z-scored with the pooled mean/std before kernel evaluation.
    The estimator averages off-diagonal within-sample kernel values minus
    twice the cross term; for equal sample counts the matched cross pairs are
    excluded as well (see `_mmd2_from_kernel`).
    """
    A = _as_matrix(a, "a")
    B = _as_matrix(b, "b")
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"column mismatch: {A.shape[1]} vs {B.shape[1]}")
    if A.shape[0] < 2 or B.shape[0] < 2:
        raise ValueError("mmd2 requires at least 2 rows per sample")
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    k = _pooled_kernel(A, B, bandwidth)
    m = A.shape[0]
    idx_a = np.arange(m)
    idx_b = np.arange(m, m + B.shape[0])
    value = _mmd2_from_kernel(k, idx_a, idx_b)
    return MmdResult(value, float(bandwidth), m, B.shape[0])


def mmd_permutation_test(
    a,
    b,
    n_permutations: int = 200,
    seed: int = 0,
    bandwidth: float | None = None,
) -> PermutationTestResult:
    """Permutation test for the MMD statistic.

    The kernel matrix over the pooled rows is computed once (bandwidth and
    z-scoring are fixed by the original pooling, both permutation-invariant)
    and each resampled split re-indexes it. Each permutation draws from its
    own seed derived from (seed, index), so results do not depend on
    evaluation order. p = (1 + #{permuted >= observed}) / (1 + N).
    """
    A = _as_matrix(a, "a")
    B = _as_matrix(b, "b")
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"column mismatch: {A.shape[1]} vs {B.shape[1]}")
    if A.shape[0] < 2 or B.shape[0] < 2:
        raise ValueError("permutation test requires at least 2 rows per sample")
    if n_permutations < 1:
        raise ValueError("n_permutations must be >= 1")
    if bandwidth is None:
        bandwidth = median_heuristic(A, B)
    k = _pooled_kernel(A, B, bandwidth)
    m = A.shape[0]
    total = m + B.shape[0]
    observed = _mmd2_from_kernel(k, np.arange(m), np.arange(m, total))
    stats = np.empty(n_permutations)
    for i in range(n_permutations):
        rng = np.random.default_rng(derive_seed(seed, i))
        perm = rng.permutation(total)
        stats[i] = _mmd2_from_kernel(k, perm[:m], perm[m:])
    p_value = float((1 + np.sum(stats >= observed)) / (1 + n_permutations))
    threshold = float(np.quantile(stats, 0.95))
    return PermutationTestResult(
        MmdResult(observed, float(bandwidth), m, B.shape[0]),
        p_value,
        threshold,
        n_permutations,
    )
