"""Implicit Euler time stepping, excitations and discrete L2 norms."""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla


class IntegrationError(RuntimeError):
    """Raised when the implicit Euler step matrix ``E - h A`` is singular."""

    def __init__(self, step):
        super().__init__(f'E - h*A is singular for step size h={step!r}')
        self.step = step


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled time series.

    ``values[:, k]`` holds the sample at ``t = (k + 1) * step``, so the
    initial value is not part of the series.
    """

    step: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v.reshape(1, -1)
        object.__setattr__(self, 'values', v)
        if not self.step > 0:
            raise ValueError('step must be positive')

    @property
    def times(self):
        return self.step * np.arange(1, self.values.shape[1] + 1)

    def __len__(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class Excitation:
    """Input signal descriptor.

    ``impulse`` is a Dirac input in every channel; ``binary`` holds an
    independent uniform draw from ``{0, amplitude}`` per channel and step.
    """

    kind: str = 'impulse'
    seed: int | None = None
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ('impulse', 'binary'):
            raise ValueError(f'unknown excitation kind {self.kind!r}')
        if self.kind == 'impulse' and self.seed is not None:
            raise ValueError('impulse excitation takes no seed')
        if self.kind == 'binary' and self.seed is None:
            raise ValueError('binary excitation needs a seed')

    def sample(self, steps, channels):
        """Input values ``u_1 .. u_K`` as a ``steps x channels`` array (binary only)."""
        if self.kind != 'binary':
            raise ValueError('only binary excitations can be sampled')
        rng = np.random.default_rng(self.seed)
        return self.amplitude * rng.integers(0, 2, size=(steps, channels)).astype(float)


IMPULSE = Excitation('impulse')


def num_steps(h, T):
    if not h > 0:
        raise ValueError(f'step size must be positive, got {h}')
    if T < h:
        raise ValueError(f'horizon T={T} is shorter than one step h={h}')
    return int(round(T / h))


def step_factorization(E, A, h):
    """LU factors of ``E - h A``; raises `IntegrationError` if numerically singular."""
    S = E - h * A
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', spla.LinAlgWarning)
        lu, piv = spla.lu_factor(S)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= S.shape[0] * np.finfo(float).eps * max(np.abs(S).max(), 1e-300):
        raise IntegrationError(h)
    return lu, piv


def march(E, A, X0, h, K, forcing=None, identity_mass=None):
    """Run ``K`` implicit Euler steps for one or several initial states.

    Parameters
    ----------
    E, A
        Mass and system matrix.
    X0
        Initial states, ``N`` or ``N x p``.
    h
        Step size.
    K
        Number of steps.
    forcing
        ``None`` or a callable ``k -> N x p`` array returning ``B u_k`` for
        step ``k = 1..K`` (without the factor ``h``).

    Returns
    -------
    Array of shape ``p x N x K`` with the states at ``t = h .. K h``.
    """
    X = np.array(X0, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    N, p = X.shape
    if identity_mass is None:
        identity_mass = np.array_equal(E, np.eye(N))
    factors = step_factorization(E, A, h)
    out = np.empty((p, N, K))
    for k in range(K):
        rhs = X if identity_mass else E @ X
        if forcing is not None:
            rhs = rhs + h * forcing(k + 1)
        X = spla.lu_solve(factors, rhs, check_finite=False)
        out[:, :, k] = X.T
    return out


def integrate(sys, u, x0, h, T):
    """Implicit Euler solution of ``E x' = A x + B u`` from ``x0``.

    Each step solves ``(E - h A) x_{k+1} = E x_k + h B u_{k+1}`` with a single
    LU factorization reused for all steps.

    Parameters
    ----------
    sys
        The |LtiSystem|.
    u
        ``None`` (zero input), an `Excitation`, or a sampled input of shape
        ``K x M`` with row ``k`` applied in step ``k + 1``. An impulse is
        realized exactly as the initial state ``E^{-1} B 1``.
    x0
        Initial state; ``None`` means zero.
    h, T
        Step size and horizon.

    Returns
    -------
    `Trajectory` of states at ``t = h, 2h, .., T``.
    """
    K = num_steps(h, T)
    x0 = np.zeros(sys.N) if x0 is None else np.asarray(x0, dtype=float).reshape(-1)
    forcing = None
    if isinstance(u, Excitation):
        if u.kind == 'impulse':
            x0 = x0 + np.linalg.solve(sys.E, sys.B.sum(axis=1))
        else:
            u = u.sample(K, sys.M)
    if isinstance(u, np.ndarray) or (u is not None and not isinstance(u, Excitation)):
        U = np.asarray(u, dtype=float).reshape(K, sys.M)
        BU = U @ sys.B.T
        forcing = lambda k: BU[k - 1][:, None]
    states = march(sys.E, sys.A, x0, h, K, forcing)
    return Trajectory(h, states[0])


def impulse_response(sys, h, T):
    """Output trajectory for a Dirac impulse in every input channel."""
    traj = integrate(sys, IMPULSE, None, h, T)
    return Trajectory(h, sys.C @ traj.values)


def l2_norm(traj):
    """Rectangle-rule ``L2`` norm ``sqrt(h * sum_k |y_k|^2)``.

    The values are scaled by their largest magnitude first, so tiny or huge
    signals neither underflow nor overflow when squared.
    """
    scale = np.abs(traj.values).max(initial=0.0)
    if scale == 0 or not np.isfinite(scale):
        return float(scale)
    return float(scale * np.sqrt(traj.step * np.sum((traj.values / scale) ** 2)))
