"""Random search windows for the interval-scanned segmentation.

Windows are pairs ``(a, b)`` with ``0 <= a < b <= n_steps`` in the package's
half-open time convention (the window covers snapshots ``a+1 .. b``).  Pairs
are drawn uniformly over all ordered pairs, optionally rejection-sampled to a
maximum length, which is how a known minimal spacing between change points is
exploited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import as_rng

_FORMAT_TAG = "netcpd-intervals v1"


@dataclass(frozen=True)
class IntervalSet:
    """A drawn collection of search windows over a fixed time range."""

    n_steps: int
    pairs: tuple[tuple[int, int], ...]
    length_cap: int | None = None

    def __post_init__(self) -> None:
        for a, b in self.pairs:
            if not 0 <= a < b <= self.n_steps:
                raise ValueError(f"invalid window ({a}, {b}) for n_steps={self.n_steps}")
            if self.length_cap is not None and b - a > self.length_cap:
                raise ValueError(f"window ({a}, {b}) exceeds length cap {self.length_cap}")

    def __len__(self) -> int:
        return len(self.pairs)


def draw_intervals(
    n_steps: int,
    n_intervals: int,
    seed_or_rng=None,
    length_cap: int | None = None,
) -> IntervalSet:
    """Draw windows uniformly over ordered pairs, rejecting over-long ones.

    Parameters
    ----------
    n_steps : int
        Time range; endpoints live in ``{0, .., n_steps}``.
    n_intervals : int
        Number of windows to draw.
    seed_or_rng : int, Generator, or None
        Randomness source.
    length_cap : int or None
        If given, only windows with ``b - a <= length_cap`` are kept
        (resampled until enough accepted).  Must be at least 1.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    if n_intervals < 1:
        raise ValueError("n_intervals must be positive")
    if length_cap is not None and length_cap < 1:
        raise ValueError("length_cap must be at least 1")
    rng = as_rng(seed_or_rng)
    pairs: list[tuple[int, int]] = []
    while len(pairs) < n_intervals:
        need = n_intervals - len(pairs)
        # Acceptance rate is >= cap/n_steps for distinct sorted pairs, so a
        # modest oversample keeps the loop short.
        batch = max(64, int(2.5 * need * (n_steps / (length_cap or n_steps))) + need)
        a = rng.integers(0, n_steps + 1, size=batch)
        b = rng.integers(0, n_steps + 1, size=batch)
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        keep = lo < hi
        if length_cap is not None:
            keep &= hi - lo <= length_cap
        lo, hi = lo[keep], hi[keep]
        pairs.extend((int(x), int(y)) for x, y in zip(lo[:need], hi[:need]))
    return IntervalSet(n_steps=n_steps, pairs=tuple(pairs), length_cap=length_cap)


def recommended_interval_count(
    n_steps: int, min_spacing: int, factor: float = 4.0
) -> int:
    """Advisory number of windows for a given minimal change-point spacing.

    ``ceil(factor * (T / spacing)^2 * log(T / spacing))``, floored at 1.  The
    squared-ratio-times-log shape makes the probability that every change
    point is flanked by some window (see :func:`flanking_probability_bound`)
    tend to one; the prefactor is a pinned package default, and the value is
    advisory because the true spacing is unknown in practice.
    """
    if not 1 <= min_spacing <= n_steps:
        raise ValueError("need 1 <= min_spacing <= n_steps")
    ratio = n_steps / min_spacing
    return max(1, math.ceil(factor * ratio * ratio * math.log(ratio)))


def flanking_sets(change_point: int, min_spacing: int) -> tuple[range, range]:
    """Integer start/end bands that closely bracket one change point.

    A window ``(a, b)`` *flanks* the change point when ``a`` falls in
    ``[eta - 3*spacing/4, eta - spacing/2]`` and ``b`` in
    ``[eta + spacing/2, eta + 3*spacing/4]``.
    """
    lo_a = math.ceil(change_point - 0.75 * min_spacing)
    hi_a = math.floor(change_point - 0.5 * min_spacing)
    lo_b = math.ceil(change_point + 0.5 * min_spacing)
    hi_b = math.floor(change_point + 0.75 * min_spacing)
    return range(lo_a, hi_a + 1), range(lo_b, hi_b + 1)


def flanking_event(
    intervals: IntervalSet, change_points: list[int], min_spacing: int
) -> bool:
    """Whether every change point is flanked by at least one window."""
    for eta in change_points:
        band_a, band_b = flanking_sets(eta, min_spacing)
        hit = any(a in band_a and b in band_b for a, b in intervals.pairs)
        if not hit:
            return False
    return True


def flanking_probability_bound(
    n_steps: int, min_spacing: int, n_intervals: int
) -> float:
    """Lower bound on the probability that the flanking event holds.

    ``1 - exp(log(T / spacing) - M * spacing^2 / (16 T^2))``; can be
    negative (vacuous) when ``n_intervals`` is small.
    """
    t, d, m = float(n_steps), float(min_spacing), float(n_intervals)
    return 1.0 - math.exp(math.log(t / d) - m * d * d / (16.0 * t * t))


def save_intervals(path, intervals: IntervalSet) -> None:
    """Write a window set as a two-column integer text table."""
    cap = 0 if intervals.length_cap is None else intervals.length_cap
    lines = [f"# {_FORMAT_TAG} n_steps={intervals.n_steps} length_cap={cap}"]
    lines.extend(f"{a} {b}" for a, b in intervals.pairs)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_intervals(path) -> IntervalSet:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header.startswith(f"# {_FORMAT_TAG}"):
            raise ValueError(f"not a {_FORMAT_TAG} file: {path}")
        fields = dict(
            item.split("=") for item in header.split() if "=" in item
        )
        n_steps = int(fields["n_steps"])
        cap = int(fields["length_cap"])
        pairs = []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b = line.split()
            pairs.append((int(a), int(b)))
    return IntervalSet(
        n_steps=n_steps, pairs=tuple(pairs), length_cap=cap if cap > 0 else None
    )
