"""Generalized linear time-invariant systems ``E x' = A x + B u, y = C x``."""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    a.setflags(write=False)
    return a


class LtiSystem:
    """Dense generalized LTI system given by the quadruple ``(E, A, B, C)``.

    Matrices are copied on construction and stored read-only, so a system can
    be shared freely. ``E`` may be omitted, in which case the identity is used.

    Parameters
    ----------
    A
        System matrix, ``N x N``.
    B
        Input matrix, ``N x M``. A 1-d array is taken as a single column.
    C
        Output matrix, ``Q x N``. A 1-d array is taken as a single row.
    E
        Mass matrix, ``N x N``; identity if ``None``.
    """

    __slots__ = ('E', 'A', 'B', 'C')

    def __init__(self, A, B, C, E=None):
        A = _frozen(A)
        N = A.shape[0]
        B = _frozen(B)
        C = np.array(C, dtype=float)
        if C.ndim == 1:
            C = C.reshape(1, -1)
        C = _frozen(C)
        E = _frozen(np.eye(N) if E is None else E)
        if A.shape != (N, N):
            raise ValueError(f'A must be square, got shape {A.shape}')
        if E.shape != (N, N):
            raise ValueError(f'E must have shape {(N, N)}, got {E.shape}')
        if B.shape[0] != N:
            raise ValueError(f'B must have {N} rows, got shape {B.shape}')
        if C.shape[1] != N:
            raise ValueError(f'C must have {N} columns, got shape {C.shape}')
        if N == 0 or B.shape[1] == 0 or C.shape[0] == 0:
            raise ValueError('system dimensions must be positive')
        object.__setattr__(self, 'E', E)
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'B', B)
        object.__setattr__(self, 'C', C)

    def __setattr__(self, name, value):
        raise AttributeError('LtiSystem is immutable')

    @property
    def N(self):
        return self.A.shape[0]

    @property
    def M(self):
        return self.B.shape[1]

    @property
    def Q(self):
        return self.C.shape[0]

    @property
    def has_identity_mass(self):
        return np.array_equal(self.E, np.eye(self.N))

    def __eq__(self, other):
        if not isinstance(other, LtiSystem):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k)) for k in self.__slots__)

    __hash__ = None

    def __repr__(self):
        return f'LtiSystem(N={self.N}, M={self.M}, Q={self.Q})'


@dataclass(frozen=True)
class DissipativityReport:
    is_square: bool
    is_siso: bool
    symmetric_part_negative_definite: bool
    mass_positive_definite: bool
    mass_nonsingular: bool = True

    @property
    def stability_preserving(self):
        """Galerkin projections of the system keep the pencil stable."""
        return self.symmetric_part_negative_definite and self.mass_positive_definite


def mass_is_nonsingular(E):
    """LU-based non-singularity check with an ``N * eps * max|E|`` pivot floor."""
    E = np.asarray(E, dtype=float)
    N = E.shape[0]
    scale = np.abs(E).max() if E.size else 0.0
    if scale == 0.0:
        return False
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', spla.LinAlgWarning)
        lu, _ = spla.lu_factor(E, check_finite=True)
    return bool(np.abs(np.diag(lu)).min() > N * np.finfo(float).eps * scale)


def validate(sys):
    """Check the strict dissipativity condition ``A + A^T < 0`` and ``E > 0``.

    A singular mass matrix is reported through ``mass_nonsingular`` (and
    clears both definiteness flags) instead of raising.
    """
    N = sys.N
    tol = N * np.finfo(float).eps * max(np.abs(sys.A).max(), np.abs(sys.E).max())
    nonsingular = mass_is_nonsingular(sys.E)
    neg = bool(np.linalg.eigvalsh(0.5 * (sys.A + sys.A.T)).max() < -tol)
    pos = nonsingular and bool(np.linalg.eigvalsh(0.5 * (sys.E + sys.E.T)).min() > tol)
    return DissipativityReport(
        is_square=sys.M == sys.Q,
        is_siso=sys.M == 1 and sys.Q == 1,
        symmetric_part_negative_definite=neg,
        mass_positive_definite=pos,
        mass_nonsingular=nonsingular,
    )


def adjoint(sys):
    """Return ``(E^T, A^T, C^T, B^T)``."""
    return LtiSystem(sys.A.T, sys.C.T, sys.B.T, E=sys.E.T)


def average_system(sys):
    """Single-input single-output system with summed input columns and output rows."""
    return LtiSystem(sys.A, sys.B.sum(axis=1, keepdims=True), sys.C.sum(axis=0, keepdims=True), E=sys.E)


def random_stable_system(N, M=1, Q=1, rng=None, identity_mass=False, spread=(0.5, 5.0)):
    """Random dense strictly dissipative system for tests and demos.

    The state matrix is ``-S + K`` with ``S`` symmetric positive definite with
    eigenvalues in `spread` and ``K`` skew-symmetric, so ``A + A^T < 0``. The
    mass matrix is a random well-conditioned positive definite matrix unless
    `identity_mass` is set. Both properties together make the pencil stable.
    """
    rng = np.random.default_rng(rng)
    Qm, _ = np.linalg.qr(rng.standard_normal((N, N)))
    S = Qm @ np.diag(rng.uniform(*spread, size=N)) @ Qm.T
    K = rng.standard_normal((N, N))
    K = 0.5 * (K - K.T) * (spread[0] / np.sqrt(N))
    A = -S + K
    B = rng.standard_normal((N, M))
    C = rng.standard_normal((Q, N))
    if identity_mass:
        E = np.eye(N)
    else:
        G = rng.standard_normal((N, N)) / np.sqrt(N)
        E = np.eye(N) + 0.25 * (G @ G.T)
    return LtiSystem(A, B, C, E=E)
