"""Contrast-statistic correctness: oracle agreement and structural invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netcpd.cusum import (
    CusumGram,
    CusumTriple,
    PrefixSums,
    cusum_inner_product,
    cusum_weights,
    matrix_cusum,
    one_change_population_norm,
    scalar_cusum,
)
from oracles import (
    naive_cusum,
    naive_inner_product,
    naive_scalar_cusum,
    piecewise_theta_sequence,
    rel_fro_diff,
)


def random_triple(rng, n_steps):
    start = int(rng.integers(0, n_steps - 2))
    end = int(rng.integers(start + 2, n_steps + 1))
    split = int(rng.integers(start + 1, end))
    return start, split, end


def test_triple_validation():
    CusumTriple(0, 1, 2)
    with pytest.raises(ValueError):
        CusumTriple(0, 0, 2)
    with pytest.raises(ValueError):
        CusumTriple(2, 3, 3)
    with pytest.raises(ValueError):
        matrix_cusum(np.zeros((4, 2, 2)), 1, 3, 5)


def test_weights_zero_sum_unit_square_sum():
    rng = np.random.default_rng(7)
    for _ in range(200):
        s, t, e = random_triple(rng, 50)
        w_left, w_right = cusum_weights(s, t, e)
        assert abs((t - s) * w_left - (e - t) * w_right) < 1e-12
        assert abs((t - s) * w_left**2 + (e - t) * w_right**2 - 1.0) < 1e-12


def test_matrix_cusum_matches_naive_oracle():
    rng = np.random.default_rng(11)
    for _ in range(60):
        n_steps = int(rng.integers(3, 40))
        n = int(rng.integers(1, 8))
        seq = rng.binomial(1, 0.4, size=(n_steps, n, n)).astype(np.uint8)
        s, t, e = random_triple(rng, n_steps)
        got = matrix_cusum(seq, s, t, e)
        want = naive_cusum(seq, s, t, e)
        assert rel_fro_diff(got, want) < 1e-9


def test_prefix_sums_cusum_matches_direct():
    rng = np.random.default_rng(12)
    seq = rng.binomial(1, 0.3, size=(30, 6, 6))
    prefix = PrefixSums(seq)
    for _ in range(50):
        s, t, e = random_triple(rng, 30)
        assert rel_fro_diff(prefix.cusum(s, t, e), matrix_cusum(seq, s, t, e)) < 1e-9


def test_gram_inner_profile_matches_naive_oracle():
    rng = np.random.default_rng(13)
    for _ in range(25):
        n_steps = int(rng.integers(4, 30))
        n = int(rng.integers(1, 7))
        seq_a = rng.binomial(1, 0.5, size=(n_steps, n, n))
        seq_b = rng.binomial(1, 0.5, size=(n_steps, n, n))
        gram = CusumGram(seq_a, seq_b)
        s, t, e = random_triple(rng, n_steps)
        got = gram.inner_product(s, t, e)
        want = naive_inner_product(seq_a, seq_b, s, t, e)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))
        assert abs(cusum_inner_product(seq_a, seq_b, s, t, e) - want) <= 1e-9 * max(
            1.0, abs(want)
        )


def test_gram_profile_full_window():
    rng = np.random.default_rng(14)
    seq_a = rng.binomial(1, 0.4, size=(20, 5, 5))
    seq_b = rng.binomial(1, 0.4, size=(20, 5, 5))
    gram = CusumGram(seq_a, seq_b)
    splits = np.arange(1, 20)
    profile = gram.inner_profile(0, 20, splits)
    for i, t in enumerate(splits):
        want = naive_inner_product(seq_a, seq_b, 0, int(t), 20)
        assert abs(profile[i] - want) <= 1e-9 * max(1.0, abs(want))


def test_projection_profile_matches_direct():
    rng = np.random.default_rng(15)
    seq = rng.binomial(1, 0.5, size=(25, 6, 6))
    direction = rng.normal(size=(6, 6))
    prefix = PrefixSums(seq)
    profile = prefix.projection_profile(2, 20, direction)
    for i, t in enumerate(range(3, 20)):
        want = float(np.tensordot(naive_cusum(seq, 2, t, 20), direction, axes=2))
        assert abs(profile[i] - want) <= 1e-9 * max(1.0, abs(want))


def test_scalar_cusum_matches_naive_and_matrix():
    rng = np.random.default_rng(16)
    values = rng.normal(size=40)
    for _ in range(40):
        s, t, e = random_triple(rng, 40)
        got = scalar_cusum(values, s, t, e)
        assert abs(got - naive_scalar_cusum(values, s, t, e)) < 1e-9
        # A scalar series is the 1x1 matrix case.
        as_matrix = matrix_cusum(values.reshape(-1, 1, 1), s, t, e)
        assert abs(got - as_matrix[0, 0]) < 1e-12


@settings(max_examples=120, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10**9), shift=st.floats(-7, 7))
def test_translation_invariance(seed, shift):
    rng = np.random.default_rng(seed)
    n_steps = int(rng.integers(3, 30))
    n = int(rng.integers(1, 6))
    seq = rng.random(size=(n_steps, n, n))
    s, t, e = random_triple(rng, n_steps)
    base = matrix_cusum(seq, s, t, e)
    shifted = matrix_cusum(seq + shift, s, t, e)
    assert np.max(np.abs(base - shifted)) < 1e-9


@settings(max_examples=150, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10**9))
def test_one_change_population_norm_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n_steps = int(rng.integers(4, 40))
    n = int(rng.integers(1, 6))
    eta = int(rng.integers(1, n_steps))
    theta_a = rng.random((n, n))
    theta_b = rng.random((n, n))
    jump = float(np.linalg.norm(theta_a - theta_b))
    seq = piecewise_theta_sequence([theta_a, theta_b], [eta], n_steps)
    s = int(rng.integers(0, eta))
    e = int(rng.integers(eta + 1, n_steps + 1))
    t = int(rng.integers(s + 1, e))
    direct = float(np.linalg.norm(matrix_cusum(seq, s, t, e)))
    closed = one_change_population_norm(s, e, eta, jump, t)
    assert abs(direct - closed) <= 1e-9 * max(1.0, closed)


@settings(max_examples=150, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10**9))
def test_population_norm_maximized_at_change(seed):
    rng = np.random.default_rng(seed)
    n_steps = int(rng.integers(4, 40))
    eta = int(rng.integers(1, n_steps))
    s = int(rng.integers(0, eta))
    e = int(rng.integers(eta + 1, n_steps + 1))
    if e - s < 2:
        return
    values = [one_change_population_norm(s, e, eta, 1.0, t) for t in range(s + 1, e)]
    best = int(np.argmax(values)) + s + 1
    assert best == eta


@settings(max_examples=150, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10**9))
def test_boundary_scaling_before_first_change(seed):
    """Left of the first change the contrast is a scalar multiple of its peak."""
    rng = np.random.default_rng(seed)
    n_steps = int(rng.integers(5, 40))
    n = int(rng.integers(1, 5))
    eta = int(rng.integers(2, n_steps))
    thetas = [rng.random((n, n)), rng.random((n, n))]
    extra_changes = [eta]
    if eta + 2 <= n_steps - 1 and rng.random() < 0.5:
        eta2 = int(rng.integers(eta + 1, n_steps))
        extra_changes.append(eta2)
        thetas.append(rng.random((n, n)))
    seq = piecewise_theta_sequence(thetas, extra_changes, n_steps)
    peak = matrix_cusum(seq, 0, eta, n_steps)
    for t in range(1, eta):
        factor = math.sqrt(
            t * (n_steps - eta) / (eta * (n_steps - t))
        )
        got = matrix_cusum(seq, 0, t, n_steps)
        assert np.max(np.abs(got - factor * peak)) < 1e-9


def _segment_shape_ok(values, tol=1e-10):
    """Monotone, or decreasing then increasing, up to tolerance."""
    diffs = np.diff(values)
    signs = np.where(diffs > tol, 1, np.where(diffs < -tol, -1, 0))
    signs = signs[signs != 0]
    if signs.size == 0:
        return True
    # Allowed: all +1, all -1, or -1 block followed by +1 block.
    first_up = np.argmax(signs == 1) if (signs == 1).any() else len(signs)
    return not (signs[first_up:] == -1).any()


@settings(max_examples=150, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10**9))
def test_population_profile_segmentwise_shape(seed):
    """Between change points the norm profile is monotone or dips once."""
    rng = np.random.default_rng(seed)
    n_steps = int(rng.integers(8, 36))
    n = int(rng.integers(1, 5))
    n_changes = int(rng.integers(1, 4))
    change_points = sorted(rng.choice(np.arange(1, n_steps), n_changes, replace=False))
    thetas = [rng.random((n, n)) for _ in range(n_changes + 1)]
    seq = piecewise_theta_sequence(thetas, [int(c) for c in change_points], n_steps)
    profile = np.array(
        [np.linalg.norm(matrix_cusum(seq, 0, t, n_steps)) for t in range(1, n_steps)]
    )
    bounds = [0, *[int(c) for c in change_points], n_steps]
    # Profile index i corresponds to split t = i + 1.
    for k in range(len(bounds) - 1):
        lo, hi = bounds[k], bounds[k + 1]
        segment = profile[max(lo - 1, 0) : hi]
        assert _segment_shape_ok(segment)


@settings(max_examples=100, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10**9))
def test_population_profile_peaks_at_change_points(seed):
    """The global maximizer of the norm profile is one of the change points."""
    rng = np.random.default_rng(seed)
    n_steps = int(rng.integers(8, 36))
    n = int(rng.integers(1, 5))
    n_changes = int(rng.integers(1, 4))
    change_points = sorted(
        int(c) for c in rng.choice(np.arange(1, n_steps), n_changes, replace=False)
    )
    thetas = [rng.random((n, n)) for _ in range(n_changes + 1)]
    seq = piecewise_theta_sequence(thetas, change_points, n_steps)
    profile = [
        np.linalg.norm(matrix_cusum(seq, 0, t, n_steps)) for t in range(1, n_steps)
    ]
    best_t = int(np.argmax(profile)) + 1
    peak = profile[best_t - 1]
    at_changes = max(profile[c - 1] for c in change_points)
    assert peak <= at_changes + 1e-9 * max(1.0, at_changes)


def test_inner_product_consistent_with_squared_norm():
    rng = np.random.default_rng(17)
    seq = rng.binomial(1, 0.5, size=(24, 5, 5))
    for _ in range(30):
        s, t, e = random_triple(rng, 24)
        inner = cusum_inner_product(seq, seq, s, t, e)
        norm = np.linalg.norm(matrix_cusum(seq, s, t, e))
        assert abs(inner - norm**2) <= 1e-9 * max(1.0, norm**2)
