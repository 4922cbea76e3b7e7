"""Recursive binary segmentation over randomly drawn intervals.

Each candidate interval is clipped to the segment under examination and
trimmed at both ends; the split maximizing the two-sample CUSUM inner
product is scored.  If the best score across intervals clears the
detection threshold, the split is recorded and both sides are searched
recursively with the same interval pool.

The two input sequences play symmetric roles and must be independent
copies (in practice: the two halves of a parity split) for the scores to
concentrate; the scan correlates one sequence's CUSUM with the other's.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .cusum import CusumGram
from .intervals import IntervalSet

_TABLE_FIELDS = ("estimate", "score", "win_start", "win_end", "depth")


@dataclass(frozen=True)
class BinsegConfig:
    """Detector knobs: score threshold, interval pool, trim fraction."""

    threshold: float
    intervals: IntervalSet
    trim: float = 0.05

    def __post_init__(self) -> None:
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if not 0 < self.trim < 0.5:
            raise ValueError("trim must lie in (0, 1/2)")


@dataclass(frozen=True)
class Detection:
    """One accepted split: location, score, winning window, recursion depth."""

    estimate: int
    score: float
    win_start: int
    win_end: int
    depth: int


@dataclass(frozen=True)
class DetectionResult:
    """All accepted splits, ordered by location."""

    detections: tuple[Detection, ...]
    n_steps: int

    def __post_init__(self) -> None:
        previous = 0
        for det in self.detections:
            if not previous < det.estimate < self.n_steps:
                raise ValueError("estimates must be strictly increasing in (0, T)")
            previous = det.estimate

    @property
    def estimates(self) -> tuple[int, ...]:
        return tuple(det.estimate for det in self.detections)

    def __len__(self) -> int:
        return len(self.detections)


def estimate_density(*sequences: np.ndarray) -> float:
    """Largest per-snapshot mean entry across the given sequences.

    A cheap stand-in for the largest edge probability; averaging the whole
    matrix slightly dilutes it when the diagonal is structurally zero.
    """
    dens = 0.0
    for seq in sequences:
        seq = np.asarray(seq)
        if seq.size:
            dens = max(dens, float(seq.reshape(seq.shape[0], -1).mean(axis=1).max()))
    return dens


def default_threshold(
    n_nodes: int, density_hat: float, n_steps: int, scale: float = 1.5
) -> float:
    """Detection threshold ``scale * density_hat * n_nodes * log(T)^{3/2}``.

    Returns 0 for a degenerate zero density estimate; callers should treat
    that as "no usable calibration" rather than a real threshold.
    """
    if n_nodes < 1 or n_steps < 2 or density_hat < 0:
        raise ValueError("need n_nodes >= 1, n_steps >= 2, density_hat >= 0")
    return scale * density_hat * n_nodes * math.log(n_steps) ** 1.5


def _scan_interval(
    gram: CusumGram, lo: int, hi: int, trim: float
) -> tuple[float, int]:
    """Best (score, split) on the clipped interval [lo, hi], or (-1, -1)."""
    pad = trim * (hi - lo)
    inner_lo = math.ceil(lo + pad)
    inner_hi = math.floor(hi - pad)
    if inner_hi - inner_lo < 1:
        return -1.0, -1
    splits = np.arange(inner_lo + 1, inner_hi)
    if splits.size == 0:
        return -1.0, -1
    profile = gram.inner_profile(inner_lo, inner_hi, splits)
    best = int(np.argmax(profile))  # first max: smallest split wins ties
    return float(profile[best]), int(splits[best])


def binseg_detect(
    seq_a: np.ndarray,
    seq_b: np.ndarray,
    config: BinsegConfig,
    start: int = 0,
    end: int | None = None,
) -> DetectionResult:
    """Run the recursive segmentation on the window (start, end]."""
    seq_a = np.asarray(seq_a)
    seq_b = np.asarray(seq_b)
    if seq_a.shape != seq_b.shape:
        raise ValueError("the two sequences must have identical shape")
    n_steps = seq_a.shape[0]
    if end is None:
        end = n_steps
    if not 0 <= start < end <= n_steps:
        raise ValueError(f"need 0 <= start < end <= {n_steps}")
    if config.intervals.n_steps != n_steps:
        raise ValueError("interval pool was drawn for a different horizon")

    gram = CusumGram(seq_a, seq_b)
    found: list[Detection] = []

    def recurse(seg_start: int, seg_end: int, depth: int) -> None:
        if seg_end - seg_start < 2:
            return
        best_score, best_split = -1.0, -1
        best_window = (seg_start, seg_end)
        for alpha, beta in config.intervals.pairs:
            lo, hi = max(alpha, seg_start), min(beta, seg_end)
            if hi - lo < 2:
                continue
            score, split = _scan_interval(gram, lo, hi, config.trim)
            if score > best_score:  # strict: earliest interval wins ties
                best_score, best_split = score, split
                best_window = (lo, hi)
        if best_score > config.threshold:
            found.append(
                Detection(
                    estimate=best_split,
                    score=best_score,
                    win_start=best_window[0],
                    win_end=best_window[1],
                    depth=depth,
                )
            )
            recurse(seg_start, best_split, depth + 1)
            recurse(best_split + 1, seg_end, depth + 1)

    recurse(start, end, 0)
    found.sort(key=lambda det: det.estimate)
    return DetectionResult(detections=tuple(found), n_steps=n_steps)


def save_detections(path, result: DetectionResult) -> None:
    """Write detections as a CSV table with a schema comment line."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# netcpd-detections v1 n_steps={result.n_steps}\n")
        writer = csv.writer(fh)
        writer.writerow(_TABLE_FIELDS)
        for det in result.detections:
            writer.writerow(
                [det.estimate, repr(det.score), det.win_start, det.win_end,
                 det.depth]
            )


def load_detections(path) -> DetectionResult:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# netcpd-detections v1"):
            raise ValueError("missing detections header")
        fields = dict(
            item.split("=") for item in header.split() if "=" in item
        )
        reader = csv.DictReader(fh)
        detections = tuple(
            Detection(
                estimate=int(row["estimate"]),
                score=float(row["score"]),
                win_start=int(row["win_start"]),
                win_end=int(row["win_end"]),
                depth=int(row["depth"]),
            )
            for row in reader
        )
    return DetectionResult(detections=detections, n_steps=int(fields["n_steps"]))
