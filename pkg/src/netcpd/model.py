"""Piecewise-constant Bernoulli network models and simulators.

A scenario is a sequence of T symmetric edge-probability matrices that stay
constant between change points.  A change point ``eta`` labels the last
snapshot drawn from the old expectation; snapshot ``eta + 1`` is the first
from the new one.  Adjacency snapshots are symmetric 0/1 matrices whose
upper-triangle entries (diagonal included only when self-loops are allowed)
are independent Bernoulli draws.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ._util import as_rng

_SCENARIO_FORMAT = "netcpd-scenario"
_SCENARIO_VERSION = 1


# ---------------------------------------------------------------------------
# Block models


@dataclass(frozen=True, eq=False)
class SbmSpec:
    """A stochastic block model: community labels plus block edge probabilities.

    ``connectivity`` entries lie in [0, 1] and are multiplied by ``density``,
    so the expectation is ``density * connectivity[labels[i], labels[j]]``
    with the diagonal zeroed when ``self_loops`` is False.
    """

    labels: tuple[int, ...]
    connectivity: Any  # (r, r) array-like, symmetric, entries in [0, 1]
    density: float = 1.0
    self_loops: bool = True

    def __post_init__(self) -> None:
        q = np.asarray(self.connectivity, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("connectivity must be square")
        if not np.allclose(q, q.T):
            raise ValueError("connectivity must be symmetric")
        if q.min() < 0 or q.max() > 1:
            raise ValueError("connectivity entries must lie in [0, 1]")
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        labels = np.asarray(self.labels)
        if labels.min() < 0 or labels.max() >= q.shape[0]:
            raise ValueError("labels must index connectivity rows")

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_communities(self) -> int:
        return np.asarray(self.connectivity).shape[0]


def sbm_theta(spec: SbmSpec) -> np.ndarray:
    """Edge-probability matrix of a block model."""
    labels = np.asarray(spec.labels)
    q = np.asarray(spec.connectivity, dtype=np.float64)
    theta = spec.density * q[np.ix_(labels, labels)]
    if not spec.self_loops:
        np.fill_diagonal(theta, 0.0)
    return theta


# ---------------------------------------------------------------------------
# Scenarios


@dataclass(frozen=True, eq=False)
class Scenario:
    """Piecewise-constant edge probabilities over a time range.

    ``thetas`` holds one (n, n) matrix per segment (K+1 of them for K change
    points); ``change_points`` are strictly increasing in ``1 .. n_steps-1``.
    """

    thetas: tuple[np.ndarray, ...]
    change_points: tuple[int, ...]
    n_steps: int
    self_loops: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.thetas) != len(self.change_points) + 1:
            raise ValueError("need exactly one more segment than change points")
        if self.n_steps < 1:
            raise ValueError("n_steps must be positive")
        n = self.thetas[0].shape[0]
        for theta in self.thetas:
            theta = np.asarray(theta)
            if theta.shape != (n, n):
                raise ValueError("all segments must share the same shape")
            if not np.allclose(theta, theta.T, atol=1e-12):
                raise ValueError("edge probabilities must be symmetric")
            if theta.min() < 0 or theta.max() > 1:
                raise ValueError("edge probabilities must lie in [0, 1]")
            if not self.self_loops and np.abs(np.diagonal(theta)).max() > 0:
                raise ValueError("diagonal must be zero without self-loops")
        previous = -1
        for eta in self.change_points:
            if not 0 < eta < self.n_steps:
                raise ValueError(f"change point {eta} outside 1..{self.n_steps - 1}")
            if eta <= previous:
                raise ValueError("change points must be strictly increasing")
            previous = eta
        for k in range(len(self.change_points)):
            if np.array_equal(self.thetas[k], self.thetas[k + 1]):
                raise ValueError(f"segments {k} and {k + 1} are identical")

    @property
    def n_nodes(self) -> int:
        return self.thetas[0].shape[0]

    @property
    def n_changes(self) -> int:
        return len(self.change_points)

    def segment_of(self, t: int) -> int:
        """Segment index of the snapshot at (1-based) time t."""
        if not 1 <= t <= self.n_steps:
            raise ValueError(f"time {t} outside 1..{self.n_steps}")
        return int(np.searchsorted(np.asarray(self.change_points), t, side="left"))

    def theta_at(self, t: int) -> np.ndarray:
        return self.thetas[self.segment_of(t)]


@dataclass(frozen=True)
class ScenarioParameters:
    """Derived quantities of a scenario used by theory-facing checks.

    ``min_spacing`` includes the sentinel boundaries at 0 and T;
    ``density`` is the largest edge probability across segments;
    ``jump_sizes`` are Frobenius norms of consecutive segment differences;
    ``min_rel_jump`` is the smallest jump divided by ``n_nodes * density``.
    """

    min_spacing: int
    density: float
    jump_sizes: tuple[float, ...]
    min_rel_jump: float
    n_nodes: int
    n_steps: int

    @property
    def snr(self) -> float:
        """Detection difficulty coordinate: density * rel_jump^2 * n * spacing."""
        return (
            self.density * self.min_rel_jump**2 * self.n_nodes * self.min_spacing
        )

    @property
    def snr_root(self) -> float:
        """The square-root coordinate sqrt(density) * rel_jump."""
        return math.sqrt(self.density) * self.min_rel_jump


def scenario_parameters(scenario: Scenario) -> ScenarioParameters:
    bounds = [0, *scenario.change_points, scenario.n_steps]
    min_spacing = min(b - a for a, b in zip(bounds[:-1], bounds[1:]))
    density = max(float(np.max(theta)) for theta in scenario.thetas)
    jumps = tuple(
        float(np.linalg.norm(np.asarray(b) - np.asarray(a)))
        for a, b in zip(scenario.thetas[:-1], scenario.thetas[1:])
    )
    if jumps:
        min_rel_jump = min(jumps) / (scenario.n_nodes * density)
    else:
        min_rel_jump = math.nan
    return ScenarioParameters(
        min_spacing=min_spacing,
        density=density,
        jump_sizes=jumps,
        min_rel_jump=min_rel_jump,
        n_nodes=scenario.n_nodes,
        n_steps=scenario.n_steps,
    )


# ---------------------------------------------------------------------------
# Samplers


def sample_adjacency(
    theta: np.ndarray, seed_or_rng=None, self_loops: bool = True
) -> np.ndarray:
    """One symmetric 0/1 snapshot with independent upper-triangle edges."""
    rng = as_rng(seed_or_rng)
    theta = np.asarray(theta, dtype=np.float64)
    n = theta.shape[0]
    rows, cols = np.triu_indices(n, k=0 if self_loops else 1)
    edges = (rng.random(rows.size) < theta[rows, cols]).astype(np.uint8)
    adj = np.zeros((n, n), dtype=np.uint8)
    adj[rows, cols] = edges
    adj[cols, rows] = edges
    return adj


def generate_sequence(scenario: Scenario, seed_or_rng=None) -> np.ndarray:
    """Sample the full (T, n, n) adjacency sequence of a scenario."""
    rng = as_rng(seed_or_rng)
    n = scenario.n_nodes
    t_total = scenario.n_steps
    rows, cols = np.triu_indices(n, k=0 if scenario.self_loops else 1)
    probs = np.empty((t_total, rows.size))
    bounds = [0, *scenario.change_points, t_total]
    for k, theta in enumerate(scenario.thetas):
        probs[bounds[k] : bounds[k + 1]] = np.asarray(theta)[rows, cols]
    edges = (rng.random((t_total, rows.size)) < probs).astype(np.uint8)
    seq = np.zeros((t_total, n, n), dtype=np.uint8)
    seq[:, rows, cols] = edges
    seq[:, cols, rows] = edges
    return seq


# ---------------------------------------------------------------------------
# Canonical scenario families


def lecam_hard_instance(
    n_nodes: int,
    density: float,
    contrast: float,
    spacing: int,
    n_steps: int,
    side: str = "early",
    seed_or_rng=None,
) -> Scenario:
    """Two-point testing instance: flat graph versus a hidden two-community split.

    One segment has all edge probabilities equal to ``density``; the other
    raises within-community probabilities to ``density * (1 + contrast)`` and
    lowers cross-community ones to ``density * (1 - contrast)``, for a random
    balanced-in-expectation sign split of the nodes.  ``side="early"`` puts
    the change at ``spacing``, ``side="late"`` at ``n_steps - spacing``;
    distinguishing the two sides is what makes the instance hard at low
    signal.  Requires ``density <= 1/2``, ``contrast <= 1`` and
    ``spacing <= n_steps / 3``.
    """
    if not 0 < density <= 0.5:
        raise ValueError("density must lie in (0, 1/2]")
    if not 0 < contrast <= 1:
        raise ValueError("contrast must lie in (0, 1]")
    if not 1 <= spacing <= n_steps / 3:
        raise ValueError("spacing must lie in [1, n_steps / 3]")
    if side not in ("early", "late"):
        raise ValueError("side must be 'early' or 'late'")
    rng = as_rng(seed_or_rng)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n_nodes)
    flat = np.full((n_nodes, n_nodes), density)
    split = density * (1.0 + contrast * np.outer(signs, signs))
    if side == "early":
        thetas = (split, flat)
        change = spacing
    else:
        thetas = (flat, split)
        change = n_steps - spacing
    return Scenario(
        thetas=thetas,
        change_points=(change,),
        n_steps=n_steps,
        self_loops=True,
        meta={
            "family": "lecam",
            "side": side,
            "signs": [int(s) for s in signs],
            "nominal_density": density,
            "nominal_contrast": contrast,
            "nominal_spacing": spacing,
        },
    )


def two_block_swap_scenario(
    n_nodes: int,
    density: float,
    rel_jump: float,
    change_points: tuple[int, ...],
    n_steps: int,
    cross_frac: float = 0.6,
    self_loops: bool = True,
) -> Scenario:
    """Alternating two-community scenario whose jumps have rank two.

    Two equal communities keep a fixed cross-community probability while the
    two within-community probabilities swap between ``density`` and
    ``density - swing`` at every change point.  ``swing`` is chosen so the
    relative jump size ``||difference||_F / (n * density)`` equals
    ``rel_jump`` (with self-loops; slightly smaller without).
    """
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    n_first = (n_nodes + 1) // 2
    n_second = n_nodes - n_first
    block_norm = math.sqrt(n_first**2 + n_second**2)
    swing = rel_jump * n_nodes * density / block_norm
    if swing > density + 1e-12:
        raise ValueError(
            f"rel_jump {rel_jump} too large: needs swing {swing:.4f} > density"
        )
    swing = min(swing, density)
    labels = np.repeat([0, 1], [n_first, n_second])
    high, low, cross = density, density - swing, cross_frac * density
    same = np.equal.outer(labels, labels)
    in_first = np.outer(labels == 0, labels == 0)
    theta_a = np.where(same, np.where(in_first, high, low), cross)
    theta_b = np.where(same, np.where(in_first, low, high), cross)
    if not self_loops:
        theta_a = theta_a.copy()
        theta_b = theta_b.copy()
        np.fill_diagonal(theta_a, 0.0)
        np.fill_diagonal(theta_b, 0.0)
    pattern = [theta_a, theta_b]
    thetas = tuple(pattern[k % 2] for k in range(len(change_points) + 1))
    return Scenario(
        thetas=thetas,
        change_points=tuple(int(c) for c in change_points),
        n_steps=n_steps,
        self_loops=self_loops,
        meta={
            "family": "two_block_swap",
            "nominal_density": density,
            "nominal_rel_jump": rel_jump,
            "swing": swing,
        },
    )


# ---------------------------------------------------------------------------
# Sample splitting


@dataclass(frozen=True, eq=False)
class SplitSample:
    """Parity split of one sequence into two interleaved half sequences.

    ``first`` holds the odd-time snapshots (1, 3, 5, ...), ``second`` the
    even-time ones (2, 4, 6, ...), both truncated to length ``n_steps // 2``
    (the last odd snapshot is dropped when the original length is odd).  A
    change point at ``eta`` in the original sequence appears at
    ``ceil(eta / 2)`` in ``first`` and ``floor(eta / 2)`` in ``second``.
    """

    first: np.ndarray
    second: np.ndarray
    n_steps_original: int

    @property
    def n_steps(self) -> int:
        return self.first.shape[0]

    def to_original(self, t: int) -> int:
        """Map a half-scale time back to the original scale (within one step)."""
        return 2 * t


def split_sample(seq: np.ndarray) -> SplitSample:
    seq = np.asarray(seq)
    half = seq.shape[0] // 2
    if half < 1:
        raise ValueError("need at least two snapshots to split")
    return SplitSample(
        first=seq[0::2][:half], second=seq[1::2][:half], n_steps_original=seq.shape[0]
    )


# ---------------------------------------------------------------------------
# Serialization and digests


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "format": _SCENARIO_FORMAT,
        "version": _SCENARIO_VERSION,
        "n_steps": scenario.n_steps,
        "n_nodes": scenario.n_nodes,
        "self_loops": scenario.self_loops,
        "change_points": [int(c) for c in scenario.change_points],
        "segments": [
            {"kind": "dense", "theta": np.asarray(t).tolist()} for t in scenario.thetas
        ],
        "meta": scenario.meta,
    }


def scenario_from_dict(data: dict) -> Scenario:
    if data.get("format") != _SCENARIO_FORMAT:
        raise ValueError("not a scenario document")
    if data.get("version") != _SCENARIO_VERSION:
        raise ValueError(f"unsupported scenario version {data.get('version')}")
    thetas = []
    for segment in data["segments"]:
        kind = segment.get("kind")
        if kind == "dense":
            thetas.append(np.asarray(segment["theta"], dtype=np.float64))
        elif kind == "sbm":
            spec = SbmSpec(
                labels=tuple(segment["labels"]),
                connectivity=np.asarray(segment["connectivity"], dtype=np.float64),
                density=float(segment.get("density", 1.0)),
                self_loops=bool(data.get("self_loops", True)),
            )
            thetas.append(sbm_theta(spec))
        else:
            raise ValueError(f"unknown segment kind {kind!r}")
    return Scenario(
        thetas=tuple(thetas),
        change_points=tuple(int(c) for c in data["change_points"]),
        n_steps=int(data["n_steps"]),
        self_loops=bool(data.get("self_loops", True)),
        meta=dict(data.get("meta", {})),
    )


def save_scenario(path, scenario: Scenario) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def scenario_digest(scenario: Scenario) -> str:
    """Stable short digest identifying a scenario's exact contents."""
    payload = json.dumps(scenario_to_dict(scenario), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]
