"""Projection-based reduction: cross-Gramian dominant subspaces (WXDS), plain and
refined dominant subspaces (DSPMR, DSPMR-R) and low-rank balanced truncation (LREBT).
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from wxds.gramian import GramianFactor
from wxds.hapod import HapodConfig, _fix_signs, _svd, incremental_hapod, numerical_rank, partition, pod
from wxds.lti import LtiSystem


class Method(str, Enum):
    WXDS = 'WXDS'
    DSPMR = 'DSPMR'
    DSPMR_R = 'DSPMR-R'
    LREBT = 'LREBT'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Projector:
    """Lifting basis ``U1`` (``N x n``) and reducing map ``V1`` (``n x N``).

    ``singular_values`` carries the diagnostic values of the final SVD (``D_1``
    for dominant subspaces, Hankel values for balanced truncation).
    """

    U1: np.ndarray
    V1: np.ndarray
    galerkin: bool
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def order(self):
        return self.U1.shape[1]

    @classmethod
    def orthogonal(cls, U1, singular_values=None):
        U1 = np.asarray(U1, dtype=float)
        sv = np.zeros(0) if singular_values is None else np.asarray(singular_values, dtype=float)
        return cls(U1, U1.T.copy(), True, sv)

    @classmethod
    def empty(cls, N):
        return cls.orthogonal(np.zeros((N, 0)))

    def biorthogonality_error(self, E=None):
        """``|V1 E U1 - I|`` in the max norm (``E = I`` if omitted)."""
        EU = self.U1 if E is None else E @ self.U1
        return float(np.abs(self.V1 @ EU - np.eye(self.order)).max()) if self.order else 0.0


@dataclass(frozen=True)
class Reduction:
    projector: Projector
    rom: LtiSystem
    method: Method
    discarded_svals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def order(self):
        return self.projector.order


def project(sys, p):
    """Reduced system ``(V1 E U1, V1 A U1, V1 B, C U1)``."""
    if p.order == 0:
        raise ValueError('cannot project onto an empty basis')
    if p.U1.shape[0] != sys.N or p.V1.shape[1] != sys.N:
        raise ValueError(f'projector of size {p.U1.shape[0]} does not match N={sys.N}')
    V1, U1 = p.V1, p.U1
    return LtiSystem(V1 @ sys.A @ U1, V1 @ sys.B, sys.C @ U1, E=V1 @ sys.E @ U1)


def reduce(sys, p, method, discarded=None):
    return Reduction(p, project(sys, p), Method(method),
                     np.zeros(0) if discarded is None else np.asarray(discarded, dtype=float))


def _array(X):
    """Plain array behind a |GramianFactor|, |CrossGramian| or array-like."""
    if isinstance(X, np.ndarray):
        return X
    return np.asarray(getattr(X, 'data', X), dtype=float)


def _rank_revealing(S):
    S = np.asarray(S, dtype=float)
    if S.size == 0 or not np.any(S):
        return np.zeros((S.shape[0], 0)), np.zeros(0)
    U, s, _ = _svd(S)
    r = numerical_rank(s, S.shape)
    return _fix_signs(U[:, :r]), s[:r]


def wxds(U_X, D_X, V_X):
    """Galerkin basis from the SVD of ``[U_X D_X, V_X D_X]``.

    `D_X` may be a vector of singular values or a diagonal matrix. The
    retained singular values ``D_1`` are kept on the projector.
    """
    U_X = np.asarray(U_X, dtype=float)
    V_X = np.asarray(V_X, dtype=float)
    d = np.asarray(D_X, dtype=float)
    d = np.diag(d) if d.ndim == 2 else d
    if d.size == 0:
        return Projector.empty(U_X.shape[0])
    U1, D1 = _rank_revealing(np.hstack([U_X * d, V_X * d]))
    return Projector.orthogonal(U1, D1)


def cross_gramian_tsvd(W, epsilon):
    """Truncated SVD ``U_X, D_X, V_X`` of ``W`` at mean projection error `epsilon`.

    Returns ``(U_X, D_X, V_X, discarded)`` where `discarded` are the trailing
    singular values.
    """
    W = _array(W)
    U, s, Vt = _svd(W)
    n = pod(W, epsilon).rank
    return U[:, :n], s[:n], Vt[:n].T, s[n:]


def dspmr(Z_C, Z_O, refined=False, tol=0.0):
    """Dominant subspaces projection from Gramian factors.

    Unrefined: POD of each factor at mean error `tol`, then the rank-revealing
    SVD of ``[U_C, U_O]``. Refined: rank-revealing SVD of
    ``[w_C Z_C, Z_O]`` with ``w_C = |Z_O|_F / |Z_C|_F``.
    """
    ZC = _array(Z_C)
    ZO = _array(Z_O)
    N = ZC.shape[0]
    nc, no = np.linalg.norm(ZC), np.linalg.norm(ZO)
    if nc == 0 or no == 0:
        return Projector.empty(N)
    if refined:
        U1, s = _rank_revealing(np.hstack([(no / nc) * ZC, ZO]))
    else:
        U1, s = _rank_revealing(np.hstack([pod(ZC, tol).modes, pod(ZO, tol).modes]))
    return Projector.orthogonal(U1, s)


def _left_factor(Z):
    """``L`` with ``Z = L Q^T`` for orthonormal ``Q``; ``L`` has at most ``N`` columns."""
    if Z.size == 0:
        return np.zeros((Z.shape[0], 0))
    U, s, _ = _svd(Z)
    return U * s


def balanced_truncation(Z_C, Z_O, E=None, tol=0.0):
    """Square-root balanced truncation from Gramian factors.

    With ``Z_O^T E Z_C = U S V^T`` keeps the values ``S_i > tol * S_1`` (and
    above the numerical rank threshold) and returns the Petrov-Galerkin pair
    ``U1 = Z_C V_r S_r^{-1/2}``, ``V1 = S_r^{-1/2} U_r^T Z_O^T`` so that
    ``V1 E U1 = I``.

    Wide factors are first replaced by their left factors ``Z = L Q^T``, so
    only a core of size at most ``N x N`` is decomposed.
    """
    ZC = _array(Z_C)
    ZO = _array(Z_O)
    N = ZC.shape[0]
    empty = Projector(np.zeros((N, 0)), np.zeros((0, N)), False)
    if not np.any(ZC) or not np.any(ZO):
        return empty
    LC, LO = _left_factor(ZC), _left_factor(ZO)
    core = LO.T @ (LC if E is None else E @ LC)
    if not np.any(core):
        return empty
    U, s, Vt = _svd(core)
    r = min(numerical_rank(s, (N, ZO.shape[1], ZC.shape[1])), int(np.sum(s > tol * s[0])))
    if r == 0:
        return empty
    scale = 1.0 / np.sqrt(s[:r])
    U1 = LC @ (Vt[:r].T * scale)
    V1 = (U[:, :r] * scale).T @ LO.T
    return Projector(U1, V1, False, s.copy())


def compress_factor(Z, config):
    """Low-rank factor ``U sqrt(D)`` from the HAPOD of the Gramian ``Z Z^T``.

    The Gramian matrix is compressed column-block-wise with the same mean
    projection error that is used for the cross Gramian, so all methods work
    with Gramians of equal projection error.
    """
    data = _array(Z)
    G = data @ data.T
    res = incremental_hapod(partition(G, config.partition_width), config)
    compressed = res.modes * np.sqrt(res.singular_values)
    if isinstance(Z, GramianFactor):
        return GramianFactor(compressed, Z.kind, Z.step)
    return compressed


__all__ = ['Method', 'Projector', 'Reduction', 'project', 'reduce', 'wxds', 'cross_gramian_tsvd',
           'dspmr', 'balanced_truncation', 'compress_factor', 'HapodConfig']
