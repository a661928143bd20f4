import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wxds.hapod import (HapodConfig, PodResult, dominant_pair, incremental_hapod, numerical_rank, partition,
                        pod, principal_angles, truncated_svd)

HILBERT = np.array([[1 / 2, 1 / 3], [1 / 3, 1 / 4]])


def mean_projection_error(U, S):
    R = S - U @ (U.T @ S)
    return np.sum(R ** 2) / S.shape[1]


def flat_modes(S, n):
    U, _, _ = np.linalg.svd(S, full_matrices=False)
    return U[:, :n]


def assert_orthonormal(U, tol=1e-10):
    assert np.abs(U.T @ U - np.eye(U.shape[1])).max(initial=0.0) <= tol


def decaying_matrix(rng, N, K, rate=0.8):
    """Random matrix with geometrically decaying singular values."""
    U, _ = np.linalg.qr(rng.standard_normal((N, min(N, K))))
    V, _ = np.linalg.qr(rng.standard_normal((K, min(N, K))))
    return U @ np.diag(rate ** np.arange(min(N, K))) @ V.T


def test_config_validation():
    assert HapodConfig(1e-3).omega == 0.75 and HapodConfig(1e-3).partition_width == 64
    for kw in ({'epsilon': 1e-3, 'omega': 0.0}, {'epsilon': 1e-3, 'omega': 1.0},
               {'epsilon': -1.0}, {'epsilon': 1e-3, 'partition_width': 0}):
        with pytest.raises(ValueError):
            HapodConfig(**kw)


def test_pod_identity():
    res = pod(np.eye(3), 0.0)
    assert np.allclose(np.abs(res.modes), np.eye(3)[:, np.argmax(np.abs(res.modes), axis=0)])
    assert np.allclose(res.singular_values, 1.0)
    assert res.rank == 3


def test_pod_single_column():
    v = np.array([3.0, -4.0, 0.0])
    res = pod(v[:, None], 0.0)
    assert res.rank == 1
    assert np.allclose(res.singular_values, [5.0])
    assert np.allclose(np.abs(res.modes[:, 0]), np.abs(v) / 5.0)


def test_pod_truncates_small_tail(rng):
    U, _ = np.linalg.qr(rng.standard_normal((5, 2)))
    V, _ = np.linalg.qr(rng.standard_normal((2, 2)))
    S = U @ np.diag([1.0, 1e-4]) @ V.T
    res = pod(S, 1e-3)
    assert res.rank == 1
    assert np.allclose(res.discarded, [1e-4])
    assert res.tolerance_used == 1e-3


def test_pod_zero_input_is_empty():
    res = pod(np.zeros((4, 3)), 1e-3)
    assert res.rank == 0 and res.modes.shape == (4, 0)


def test_pod_argument_errors():
    with pytest.raises(ValueError):
        pod(np.zeros((3, 0)), 0.0)
    with pytest.raises(ValueError):
        pod(np.eye(2), -1.0)


def test_sign_convention_largest_entry_positive(rng):
    res = pod(rng.standard_normal((10, 6)), 0.0)
    idx = np.abs(res.modes).argmax(axis=0)
    assert np.all(res.modes[idx, np.arange(res.rank)] > 0)


def test_numerical_rank():
    assert numerical_rank(np.array([1.0, 1e-20]), (3, 3)) == 1
    assert numerical_rank(np.zeros(2), (2, 2)) == 0
    assert numerical_rank(np.zeros(0), (2, 0)) == 0


def test_truncated_svd_discards_exact_tail(rng):
    S = decaying_matrix(rng, 12, 12)
    res = truncated_svd(S, 1e-2)
    assert np.sum(res.discarded ** 2) <= 1e-2
    assert res.rank + len(res.discarded) == 12


def test_partition_widths():
    blocks = partition(np.zeros((3, 10)), 4)
    assert [b.shape[1] for b in blocks] == [4, 4, 2]


def test_incremental_single_partition_matches_pod(rng):
    S = rng.standard_normal((8, 5))
    a = incremental_hapod([S], HapodConfig(1e-2))
    b = pod(S, 1e-2)
    assert np.array_equal(a.modes, b.modes) and np.array_equal(a.singular_values, b.singular_values)


def test_incremental_unit_columns_span_space():
    res = incremental_hapod([np.eye(4)[:, [i]] for i in range(4)], HapodConfig(0.0))
    assert res.rank == 4
    assert_orthonormal(res.modes)


def test_incremental_random_blocks(rng):
    S = rng.standard_normal((100, 256))
    res = incremental_hapod(partition(S, 64), HapodConfig(1e-4))
    assert mean_projection_error(res.modes, S) * 256 <= 256 * 1e-8
    assert principal_angles(res.modes, flat_modes(S, res.rank)).max() <= 1e-3


def test_incremental_rejects_row_mismatch():
    with pytest.raises(ValueError):
        incremental_hapod([np.zeros((3, 2)), np.zeros((4, 2))], HapodConfig(0.0))
    with pytest.raises(ValueError):
        incremental_hapod([], HapodConfig(0.0))


def test_incremental_discarded_accounts_for_error(rng):
    S = decaying_matrix(rng, 30, 120, rate=0.7)
    res = incremental_hapod(partition(S, 30), HapodConfig(1e-3))
    err = np.sum((S - res.modes @ (res.modes.T @ S)) ** 2)
    assert err <= np.sum(res.discarded ** 2) * (1 + 1e-8) + 1e-28


def test_dominant_pair_symmetric_positive_definite(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    d = np.array([5.0, 2.0, 1.0, 0.5, 0.1, 0.01])
    W = Q @ np.diag(d) @ Q.T
    res = dominant_pair([W], [W.T], HapodConfig(0.0))
    assert np.allclose(res.singular_values, np.sqrt(2) * d, rtol=1e-10)
    assert principal_angles(res.modes, Q).max() <= 1e-8


def test_dominant_pair_zero_gramian():
    res = dominant_pair([np.zeros((3, 3))], [np.zeros((3, 3))], HapodConfig(1e-3))
    assert res.rank == 0 and res.modes.shape == (3, 0)


def test_dominant_pair_hilbert_example():
    res = dominant_pair([HILBERT], [HILBERT.T], HapodConfig(0.0))
    left, right = res.branches
    flat = np.linalg.svd(np.hstack([left.scaled_modes, right.scaled_modes]), compute_uv=False)
    assert res.rank == 2
    assert np.allclose(res.singular_values, flat, rtol=1e-10)
    assert_orthonormal(res.modes)


def test_dominant_pair_rejects_mismatched_branches():
    with pytest.raises(ValueError):
        dominant_pair([np.zeros((3, 3))], [np.zeros((4, 4))], HapodConfig(0.0))


def test_dominant_pair_exact_reproduces_flat_svd(rng):
    W = rng.standard_normal((40, 40))
    res = dominant_pair(partition(W, 16), partition(W.T, 16), HapodConfig(0.0))
    flat = flat_modes(np.hstack([W, W.T]), res.rank)
    assert principal_angles(res.modes, flat).max() <= 1e-8


def test_dominant_pair_mean_error_bound(rng):
    W = decaying_matrix(rng, 50, 50, rate=0.85)
    eps = 1e-3
    res = dominant_pair(partition(W, 16), partition(W.T, 16), HapodConfig(eps))
    assert mean_projection_error(res.modes, np.hstack([W, W.T])) <= eps ** 2
    assert res.rank < 50


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), width=st.integers(1, 40), omega=st.floats(0.05, 0.95),
       log_eps=st.floats(-8, 0), rate=st.floats(0.3, 0.99))
def test_hapod_bound_property(seed, width, omega, log_eps, rate):
    rng = np.random.default_rng(seed)
    S = decaying_matrix(rng, 20, 60, rate)
    eps = 10.0 ** log_eps
    res = incremental_hapod(partition(S, width), HapodConfig(eps, omega))
    assert mean_projection_error(res.modes, S) <= eps ** 2 * (1 + 1e-9) + 1e-28
    assert_orthonormal(res.modes)
    s = res.singular_values
    assert np.all(s > 0) and np.all(np.diff(s) <= 0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), width=st.integers(1, 30))
def test_reordering_partitions_keeps_subspace(seed, width):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((15, 45))
    blocks = partition(S, width)
    order = rng.permutation(len(blocks))
    a = incremental_hapod(blocks, HapodConfig(0.0))
    b = incremental_hapod([blocks[i] for i in order], HapodConfig(0.0))
    assert a.rank == b.rank
    assert principal_angles(a.modes, b.modes).max() <= 1e-6


def test_pod_result_scaled_modes():
    r = PodResult(np.eye(2), np.array([2.0, 1.0]), 0.0)
    assert np.array_equal(r.scaled_modes, np.diag([2.0, 1.0]))
