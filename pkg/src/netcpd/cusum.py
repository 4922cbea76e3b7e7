"""Two-sided contrast (CUSUM) statistics for sequences of symmetric matrices.

Time indexing convention, used across the whole package: a sequence of T
snapshots is stored as an array of shape (T, n, n), where entry ``seq[i]``
is the snapshot at time ``i + 1``.  A *window* is a half-open integer pair
``(start, end)`` with ``0 <= start < end <= T`` covering snapshots
``start+1 .. end``, i.e. the Python slice ``seq[start:end]``.  A candidate
split ``t`` satisfies ``start < t < end`` and partitions the window into
``seq[start:t]`` and ``seq[t:end]``.  A change point ``eta`` labels the last
snapshot of a segment: ``seq[:eta]`` has one expectation, ``seq[eta:]`` the
next.

The contrast statistic of a window at split ``t`` is the weighted difference
of the two block sums,

    C(t) = sqrt((e-t) / ((e-s)(t-s))) * sum(seq[s:t])
         - sqrt((t-s) / ((e-s)(e-t))) * sum(seq[t:e]),

which has zero expectation when the window contains no change and is
translation invariant (adding a constant matrix to every snapshot leaves it
unchanged, because the weights sum to zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CusumTriple:
    """A contrast evaluation point: window ``(start, end)`` with split ``split``.

    Valid only when ``start < split < end``; construction enforces this.
    """

    start: int
    split: int
    end: int

    def __post_init__(self) -> None:
        if not self.start < self.split < self.end:
            raise ValueError(
                f"need start < split < end, got ({self.start}, {self.split}, {self.end})"
            )


def _check_triple(start: int, split: int, end: int, n_steps: int) -> None:
    if not 0 <= start < split < end <= n_steps:
        raise ValueError(
            f"need 0 <= start < split < end <= {n_steps}, "
            f"got ({start}, {split}, {end})"
        )


def cusum_weights(start: int, split: int, end: int) -> tuple[float, float]:
    """Left and right block weights of the contrast at a split.

    Returns ``(w_left, w_right)`` such that the statistic equals
    ``w_left * sum(seq[start:split]) - w_right * sum(seq[split:end])``.
    The per-snapshot weight vector has unit squared sum and zero sum.
    """
    s, t, e = start, split, end
    w_left = math.sqrt((e - t) / ((e - s) * (t - s)))
    w_right = math.sqrt((t - s) / ((e - s) * (e - t)))
    return w_left, w_right


def matrix_cusum(seq: np.ndarray, start: int, split: int, end: int) -> np.ndarray:
    """Contrast matrix of a snapshot sequence at one split.

    Parameters
    ----------
    seq : ndarray, shape (T, n, n)
        Snapshot sequence (adjacency matrices or expectations).
    start, split, end : int
        Window and split per the module's indexing convention.

    Returns
    -------
    ndarray, shape (n, n)
    """
    seq = np.asarray(seq)
    _check_triple(start, split, end, seq.shape[0])
    w_left, w_right = cusum_weights(start, split, end)
    left = seq[start:split].sum(axis=0, dtype=np.float64)
    right = seq[split:end].sum(axis=0, dtype=np.float64)
    return w_left * left - w_right * right


def scalar_cusum(values: np.ndarray, start: int, split: int, end: int) -> float:
    """Contrast of a scalar series at one split (same weights as the matrix case)."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("values must be one-dimensional")
    _check_triple(start, split, end, values.shape[0])
    w_left, w_right = cusum_weights(start, split, end)
    return float(w_left * values[start:split].sum() - w_right * values[split:end].sum())


def cusum_inner_product(
    seq_a: np.ndarray, seq_b: np.ndarray, start: int, split: int, end: int
) -> float:
    """Frobenius inner product of the contrast matrices of two sequences.

    The detection statistic of the random-interval segmenter: an unbiased,
    cross-sample estimate of the squared contrast of the common expectation.
    """
    ca = matrix_cusum(seq_a, start, split, end)
    cb = matrix_cusum(seq_b, start, split, end)
    return float(np.tensordot(ca, cb, axes=2))


class PrefixSums:
    """Cumulative snapshot sums supporting O(n^2) contrast evaluation per split.

    Stores ``P[u] = seq[:u].sum(axis=0)`` flattened to shape (T+1, n*n).
    Snapshot entries are 0/1 or probabilities, so the cumulative sums (and any
    inner products of them used downstream) stay exactly representable in
    float64 at the scales this package targets.
    """

    def __init__(self, seq: np.ndarray):
        seq = np.asarray(seq)
        if seq.ndim != 3 or seq.shape[1] != seq.shape[2]:
            raise ValueError(f"expected shape (T, n, n), got {seq.shape}")
        self.n_steps = seq.shape[0]
        self.n_nodes = seq.shape[1]
        flat = seq.reshape(self.n_steps, -1).astype(np.float64)
        self.flat = np.zeros((self.n_steps + 1, flat.shape[1]))
        np.cumsum(flat, axis=0, out=self.flat[1:])

    def window_sum(self, start: int, end: int) -> np.ndarray:
        return self.flat[end] - self.flat[start]

    def cusum(self, start: int, split: int, end: int) -> np.ndarray:
        """Contrast matrix at one split, from the precomputed sums."""
        _check_triple(start, split, end, self.n_steps)
        w_left, w_right = cusum_weights(start, split, end)
        n = self.n_nodes
        flat = w_left * self.window_sum(start, split) - w_right * self.window_sum(
            split, end
        )
        return flat.reshape(n, n)

    def projection_profile(
        self,
        start: int,
        end: int,
        direction: np.ndarray,
        splits: np.ndarray | None = None,
    ) -> np.ndarray:
        """Inner products of the contrast matrices with a fixed direction.

        Evaluates ``<C(t), direction>`` for every split ``t`` in ``splits``
        (default: all valid splits ``start+1 .. end-1``) in O(1) per split
        after an O(T n^2) projection of the prefix sums.
        """
        if splits is None:
            splits = np.arange(start + 1, end)
        splits = np.asarray(splits, dtype=np.int64)
        if splits.size == 0:
            return np.zeros(0)
        if splits.min() <= start or splits.max() >= end:
            raise ValueError("splits must lie strictly inside the window")
        proj = self.flat @ np.asarray(direction, dtype=np.float64).ravel()
        w_left, w_right = _weight_arrays(start, end, splits)
        return w_left * (proj[splits] - proj[start]) - w_right * (
            proj[end] - proj[splits]
        )


def _weight_arrays(
    start: int, end: int, splits: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    s, e = start, end
    t = splits.astype(np.float64)
    w_left = np.sqrt((e - t) / ((e - s) * (t - s)))
    w_right = np.sqrt((t - s) / ((e - s) * (e - t)))
    return w_left, w_right


class CusumGram:
    """Cross inner products of two sequences' prefix sums.

    Precomputes ``G[u, v] = <PA[u], PB[v]>`` for all ``0 <= u, v <= T`` with a
    single BLAS matrix product, after which the detection statistic
    ``<CA(t), CB(t)>`` of any window/split pair costs O(1).  Snapshot entries
    are 0/1, so every Gram entry is an exact small integer in float64.
    """

    def __init__(self, seq_a: np.ndarray, seq_b: np.ndarray):
        pa = PrefixSums(seq_a)
        pb = PrefixSums(seq_b)
        if pa.flat.shape != pb.flat.shape:
            raise ValueError("sequences must share (T, n, n) shape")
        self.n_steps = pa.n_steps
        self.n_nodes = pa.n_nodes
        self.gram = pa.flat @ pb.flat.T

    def inner_profile(self, start: int, end: int, splits: np.ndarray) -> np.ndarray:
        """Detection statistic ``<CA(t), CB(t)>`` for each split t in ``splits``."""
        splits = np.asarray(splits, dtype=np.int64)
        if splits.size == 0:
            return np.zeros(0)
        if splits.min() <= start or splits.max() >= end:
            raise ValueError("splits must lie strictly inside the window")
        g = self.gram
        s, e = start, end
        dg = g.diagonal()[splits]
        g_ts = g[splits, s]
        g_st = g[s, splits]
        g_te = g[splits, e]
        g_et = g[e, splits]
        s11 = dg - g_ts - g_st + g[s, s]
        s12 = g_te - dg - g[s, e] + g_st
        s21 = g_et - dg - g[e, s] + g_ts
        s22 = g[e, e] - g_et - g_te + dg
        w_left, w_right = _weight_arrays(start, end, splits)
        return w_left**2 * s11 - w_left * w_right * (s12 + s21) + w_right**2 * s22

    def inner_product(self, start: int, split: int, end: int) -> float:
        _check_triple(start, split, end, self.n_steps)
        return float(self.inner_profile(start, end, np.array([split]))[0])


def one_change_population_norm(
    start: int, end: int, change: int, jump: float, split: int
) -> float:
    """Frobenius norm of the population contrast in a one-change window.

    For expectations constant on ``(start, change]`` and ``(change, end]``
    with Frobenius jump ``jump`` between the two levels, the contrast norm at
    split ``t`` has the closed form

        ||C(t)|| = sqrt((t-s) / ((e-s)(e-t))) * (e - change) * jump,  t <= change,
        ||C(t)|| = sqrt((e-t) / ((e-s)(t-s))) * (change - s) * jump,  t >= change,

    the two branches agreeing at ``t == change``, where the norm is maximal.
    """
    s, e, t = start, end, split
    if not s < t < e:
        raise ValueError("need start < split < end")
    if not s < change < e:
        raise ValueError("change must lie strictly inside the window")
    if jump < 0:
        raise ValueError("jump must be nonnegative")
    if t <= change:
        return math.sqrt((t - s) / ((e - s) * (e - t))) * (e - change) * jump
    return math.sqrt((e - t) / ((e - s) * (t - s))) * (change - s) * jump
