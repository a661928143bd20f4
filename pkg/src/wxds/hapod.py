"""Tolerance-driven POD and the hierarchical approximate POD (HAPOD).

Two tree topologies are combined: an incremental HAPOD (maximally unbalanced
binary tree) for each of two partitioned data sets, joined by a single
distributed (star) root node. Nodes pass on their modes scaled by the
singular values, so the squared projection errors of all nodes add up and a
mean projection error target ``epsilon`` can be distributed over the tree.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla


@dataclass(frozen=True)
class PodResult:
    """Orthonormal modes (columns) with their descending singular values.

    ``discarded`` collects the singular values dropped at every node that
    contributed to the result, in descending order; their squared sum is the
    squared Frobenius norm of the input data not captured by the scaled modes.
    """

    modes: np.ndarray
    singular_values: np.ndarray
    tolerance_used: float
    branches: tuple = ()
    discarded: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def rank(self):
        return len(self.singular_values)

    @property
    def scaled_modes(self):
        return self.modes * self.singular_values


@dataclass(frozen=True)
class HapodConfig:
    """HAPOD parameters.

    ``epsilon`` is the target mean squared column projection error (square
    root thereof), ``omega`` the share of the error budget spent at the root
    node and ``partition_width`` the number of columns per leaf.
    """

    epsilon: float
    omega: float = 0.75
    partition_width: int = 64

    def __post_init__(self):
        if not 0 < self.omega < 1:
            raise ValueError(f'omega must lie in (0, 1), got {self.omega}')
        if not self.epsilon >= 0:
            raise ValueError(f'epsilon must be non-negative, got {self.epsilon}')
        if self.partition_width < 1:
            raise ValueError('partition_width must be positive')


def partition(S, width):
    """Split the columns of `S` into consecutive blocks of at most `width`."""
    return [S[:, i:i + width] for i in range(0, S.shape[1], width)]


def _svd(S):
    try:
        return spla.svd(S, full_matrices=False, lapack_driver='gesdd')
    except np.linalg.LinAlgError:
        return spla.svd(S, full_matrices=False, lapack_driver='gesvd')


def _fix_signs(U):
    if U.shape[1] == 0:
        return U
    idx = np.abs(U).argmax(axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def numerical_rank(svals, shape):
    """Count of singular values above ``sigma_1 * max(shape) * eps``."""
    if len(svals) == 0 or svals[0] == 0:
        return 0
    return int(np.sum(svals > svals[0] * max(shape) * np.finfo(float).eps))


def truncated_svd(S, total_err_sq, tolerance_used=None):
    """Left singular vectors of `S` leaving a squared Frobenius tail ``<= total_err_sq``."""
    S = np.asarray(S, dtype=float)
    N = S.shape[0]
    if S.size == 0:
        return PodResult(np.zeros((N, 0)), np.zeros(0), tolerance_used or 0.0)
    U, s, _ = _svd(S)
    r = numerical_rank(s, S.shape)
    # tail[n] = sum_{k >= n} s_k^2
    tail = np.append(np.cumsum((s[:r] ** 2)[::-1])[::-1], 0.0)
    n = int(np.argmax(tail <= total_err_sq))
    if tolerance_used is None:
        tolerance_used = float(np.sqrt(total_err_sq / max(S.shape[1], 1)))
    return PodResult(_fix_signs(U[:, :n]), s[:n].copy(), tolerance_used, discarded=s[n:].copy())


def pod(snapshots, epsilon):
    """POD with mean projection error ``epsilon``.

    Retains the fewest modes with ``sum_{k>n} sigma_k^2 <= epsilon^2 K`` for
    ``K`` snapshot columns; numerically zero singular values are always dropped.
    """
    S = np.atleast_2d(np.asarray(snapshots, dtype=float))
    if S.shape[1] < 1:
        raise ValueError('pod needs at least one snapshot')
    if epsilon < 0:
        raise ValueError('epsilon must be non-negative')
    return truncated_svd(S, epsilon ** 2 * S.shape[1], tolerance_used=float(epsilon))


def _check_rows(partitions):
    if len(partitions) == 0:
        raise ValueError('at least one partition is required')
    rows = {p.shape[0] for p in partitions}
    if len(rows) != 1:
        raise ValueError(f'inconsistent partition row counts {sorted(rows)}')


def _incremental(partitions, node_budget, root_budget=None):
    """Fold `partitions` left to right.

    `node_budget(count)` gives the squared error allowed at a node that has
    seen `count` columns; if `root_budget` is given the last node uses it.
    """
    result = None
    count = 0
    dropped = []
    for i, part in enumerate(partitions):
        part = np.asarray(part, dtype=float)
        count += part.shape[1]
        data = part if result is None else np.hstack([result.scaled_modes, part])
        last = i == len(partitions) - 1
        budget = root_budget(count) if (last and root_budget is not None) else node_budget(count)
        result = truncated_svd(data, budget)
        dropped.append(result.discarded)
    discarded = np.sort(np.concatenate(dropped))[::-1]
    return PodResult(result.modes, result.singular_values, result.tolerance_used, discarded=discarded), count


def incremental_hapod(partitions, config):
    """Incremental HAPOD of the column concatenation of `partitions`.

    The mean squared projection error over all columns is bounded by
    ``config.epsilon**2``: every node but the last receives the share
    ``(1 - omega^2) / (P - 1)`` of the squared budget scaled by its cumulative
    column count, the final node the share ``omega^2``.
    """
    partitions = [np.atleast_2d(np.asarray(p, dtype=float)) for p in partitions]
    _check_rows(partitions)
    eps, omega = config.epsilon, config.omega
    P = len(partitions)
    if P == 1:
        res = pod(partitions[0], eps)
        return res
    inner = (1 - omega ** 2) * eps ** 2 / (P - 1)
    res, count = _incremental(partitions, lambda c: c * inner, lambda c: c * omega ** 2 * eps ** 2)
    return PodResult(res.modes, res.singular_values, float(eps), discarded=res.discarded)


def dominant_pair(W_blocks, Wt_blocks, config):
    """Cross-Gramian dominant subspace via two incremental branches and a star root.

    The branches compress the column partitions of ``W_X`` and ``W_X^T``,
    yielding ``U_X D_X`` and ``V_X D_X``; the root POD of their conjunction
    returns the basis ``U_1`` with singular values ``D_1``; the two branch
    results are kept in ``branches``. The mean squared
    projection error over all columns of ``W_X`` and ``W_X^T`` is at most
    ``config.epsilon**2``.
    """
    W_blocks = [np.atleast_2d(np.asarray(p, dtype=float)) for p in W_blocks]
    Wt_blocks = [np.atleast_2d(np.asarray(p, dtype=float)) for p in Wt_blocks]
    _check_rows(W_blocks)
    _check_rows(Wt_blocks)
    if W_blocks[0].shape[0] != Wt_blocks[0].shape[0]:
        raise ValueError('branches have different row counts')
    eps, omega = config.epsilon, config.omega
    depth = max(len(W_blocks), len(Wt_blocks))
    inner = (1 - omega ** 2) * eps ** 2 / depth
    left, n_left = _incremental(W_blocks, lambda c: c * inner)
    right, n_right = _incremental(Wt_blocks, lambda c: c * inner)
    conjoined = np.hstack([left.scaled_modes, right.scaled_modes])
    root = truncated_svd(conjoined, (n_left + n_right) * omega ** 2 * eps ** 2)
    N = conjoined.shape[0]
    s = root.singular_values
    keep = int(np.sum(s > s[0] * N * np.finfo(float).eps)) if len(s) else 0
    return PodResult(root.modes[:, :keep], s[:keep], float(eps), (left, right),
                     np.sort(np.concatenate([root.discarded, s[keep:]]))[::-1])


def principal_angles(U, V):
    """Principal angles (radians) between the column spans of `U` and `V`."""
    if U.shape[1] == 0 or V.shape[1] == 0:
        return np.zeros(0)
    return spla.subspace_angles(U, V)
