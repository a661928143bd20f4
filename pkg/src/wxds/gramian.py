"""Empirical system Gramians from simulated trajectories and dense Kronecker oracles."""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from wxds.lti import adjoint
from wxds.sim import IMPULSE, march, num_steps


class DimensionError(ValueError):
    pass


class OracleError(RuntimeError):
    pass


DEFAULT_BLOCK_WIDTH = 64
ORACLE_MAX_ORDER = 64


@dataclass(frozen=True)
class GramianFactor:
    """Tall factor ``Z`` with ``Z @ Z.T`` approximating a Gramian."""

    data: np.ndarray
    kind: str
    step: float

    def __post_init__(self):
        if self.kind not in ('controllability', 'observability'):
            raise ValueError(f'unknown factor kind {self.kind!r}')

    @property
    def gramian(self):
        return self.data @ self.data.T


@dataclass(frozen=True)
class CrossGramian:
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise DimensionError(f'cross Gramian must be square, got {self.data.shape}')

    @property
    def N(self):
        return self.data.shape[0]

    @property
    def T(self):
        return CrossGramian(self.data.T)

    def blocks(self, width=DEFAULT_BLOCK_WIDTH):
        """Column blocks of at most `width` columns, left to right."""
        return [self.data[:, i:i + width] for i in range(0, self.N, width)]


def channel_trajectories(sys, excitation, h, T):
    """State trajectories of every input channel, shape ``M x N x K``.

    Channel ``m`` starts at ``E^{-1} b_m`` for an impulse and at zero, driven
    by ``b_m u_m(t)``, for a binary excitation.
    """
    K = num_steps(h, T)
    if excitation.kind == 'impulse':
        return march(sys.E, sys.A, np.linalg.solve(sys.E, sys.B), h, K)
    U = excitation.sample(K, sys.M)
    B = sys.B
    return march(sys.E, sys.A, np.zeros_like(B), h, K, forcing=lambda k: B * U[k - 1])


def _cross(X, Z, h):
    W = np.zeros((X.shape[1], Z.shape[1]))
    for m in range(X.shape[0]):
        W += X[m] @ Z[m].T
    return h * W


def empirical_cross_gramian(sys, h, T, excitation=IMPULSE):
    """Empirical cross Gramian ``h * sum_m sum_k x^m(t_k) z^m(t_k)^T``.

    ``x^m`` are primal trajectories of input channel ``m`` and ``z^m`` forward
    trajectories of the adjoint system driven through output channel ``m``.
    Non-square systems must be averaged first (see
    :func:`wxds.lti.average_system`).
    """
    if sys.M != sys.Q:
        raise DimensionError(f'cross Gramian needs a square system, got M={sys.M}, Q={sys.Q}')
    X = channel_trajectories(sys, excitation, h, T)
    Z = channel_trajectories(adjoint(sys), excitation, h, T)
    return CrossGramian(_cross(X, Z, h))


def _factor(states, h, kind):
    p, N, K = states.shape
    return GramianFactor(np.sqrt(h) * states.transpose(1, 0, 2).reshape(N, p * K), kind, h)


def empirical_factors(sys, excitation, h, T):
    """Low-rank factors ``(Z_C, Z_O)`` of the empirical controllability and observability Gramians."""
    X = channel_trajectories(sys, excitation, h, T)
    Z = channel_trajectories(adjoint(sys), excitation, h, T)
    return _factor(X, h, 'controllability'), _factor(Z, h, 'observability')


def empirical_gramians(sys, excitation, h, T):
    """Cross Gramian and both factors from one shared set of simulations.

    Returns ``(W_X, Z_C, Z_O)``; ``W_X`` is ``None`` for non-square systems.
    """
    X = channel_trajectories(sys, excitation, h, T)
    Z = channel_trajectories(adjoint(sys), excitation, h, T)
    W = CrossGramian(_cross(X, Z, h)) if sys.M == sys.Q else None
    return W, _factor(X, h, 'controllability'), _factor(Z, h, 'observability')


def _check_oracle(sys, max_order):
    if sys.N > max_order:
        raise OracleError(f'dense oracle limited to N <= {max_order}, got N={sys.N}')
    ev = spla.eigvals(sys.A, sys.E)
    if not np.all(np.isfinite(ev)) or ev.real.max() >= 0:
        raise OracleError('pencil (A, E) is not asymptotically stable')


def _kron_solve(K, rhs, N):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', spla.LinAlgWarning)
            lu = spla.lu_factor(K)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise OracleError(str(e)) from e
    if np.abs(np.diag(lu[0])).min() <= K.shape[0] * np.finfo(float).eps * np.abs(K).max():
        raise OracleError('singular Kronecker system')
    return spla.lu_solve(lu, -rhs.reshape(-1, order='F')).reshape(N, N, order='F')


def dense_cross_gramian_oracle(sys, max_order=ORACLE_MAX_ORDER):
    """Solve ``A W E + E W A = -B C`` through its ``N^2 x N^2`` Kronecker form."""
    _check_oracle(sys, max_order)
    E, A = sys.E, sys.A
    return CrossGramian(_kron_solve(np.kron(E.T, A) + np.kron(A.T, E), sys.B @ sys.C, sys.N))


def dense_controllability_oracle(sys, max_order=ORACLE_MAX_ORDER):
    """Solve ``A W E^T + E W A^T = -B B^T``."""
    _check_oracle(sys, max_order)
    E, A = sys.E, sys.A
    return _kron_solve(np.kron(E, A) + np.kron(A, E), sys.B @ sys.B.T, sys.N)


def dense_observability_oracle(sys, max_order=ORACLE_MAX_ORDER):
    """Solve ``A^T W E + E^T W A = -C^T C``."""
    _check_oracle(sys, max_order)
    E, A = sys.E, sys.A
    return _kron_solve(np.kron(E.T, A.T) + np.kron(A.T, E.T), sys.C.T @ sys.C, sys.N)


def sylvester_residual(sys, W):
    """``|A W E + E W A + B C|_F / |B C|_F`` (absolute residual if ``B C = 0``)."""
    W = W.data if isinstance(W, CrossGramian) else np.asarray(W)
    if W.shape != (sys.N, sys.N):
        raise DimensionError(f'expected {(sys.N, sys.N)}, got {W.shape}')
    BC = sys.B @ sys.C
    r = np.linalg.norm(sys.A @ W @ sys.E + sys.E @ W @ sys.A + BC)
    nbc = np.linalg.norm(BC)
    return float(r / nbc) if nbc > 0 else float(r)


def projected_exponential_residual(A, U):
    """Relative gap ``|U e^{U^T A U} U^T - U U^T e^{A U U^T}|_F / |e^A|_F``."""
    P = U @ U.T
    lhs = U @ spla.expm(U.T @ A @ U) @ U.T
    rhs = P @ spla.expm(A @ P)
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(spla.expm(A)))
