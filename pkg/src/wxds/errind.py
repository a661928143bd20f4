"""Impulse-response L2 (H2) error indicator for cross-Gramian dominant subspaces."""

from dataclasses import dataclass, field

import numpy as np

from wxds.lti import average_system


@dataclass(frozen=True)
class IndicatorInputs:
    """Scalars entering the indicator.

    ``b_norm`` is ``|E^{-1} B|_2``, ``c_norm`` is ``|C|_2``, ``discarded`` the
    trailing singular values of the cross Gramian beyond the reduced order.
    """

    b_norm: float
    c_norm: float
    discarded: np.ndarray = field(default_factory=lambda: np.zeros(0))
    epsilon: float = 0.0
    N: int = 0

    def __post_init__(self):
        d = np.asarray(self.discarded, dtype=float).ravel()
        object.__setattr__(self, 'discarded', d)
        if self.b_norm < 0 or self.c_norm < 0:
            raise ValueError('norms must be non-negative')
        if np.any(d < 0):
            raise ValueError('discarded singular values must be non-negative')


def operator_norms(sys, siso='average'):
    """``(|E^{-1} b|_2, |c|_2)`` of the SISO surrogate of `sys`.

    `siso` selects the surrogate for MIMO systems: ``'average'`` sums input
    columns and output rows, ``'select'`` picks the channel pair of
    :func:`select_siso_subsystem`.
    """
    if siso == 'average':
        s = average_system(sys)
        b, c = s.B, s.C
    elif siso == 'select':
        k, l = select_siso_subsystem(sys)
        b, c = sys.B[:, [k - 1]], sys.C[[l - 1], :]
    else:
        raise ValueError(f'unknown SISO surrogate {siso!r}')
    Eb = b if np.array_equal(sys.E, np.eye(sys.N)) else np.linalg.solve(sys.E, b)
    return float(np.linalg.norm(Eb, 2)), float(np.linalg.norm(c, 2))


def h2_indicator(inp):
    """``sqrt(|E^{-1}B|_2 |C|_2 sqrt(sum discarded^2))``."""
    return float(np.sqrt(inp.b_norm * inp.c_norm * np.sqrt(np.sum(inp.discarded ** 2))))


def h2_apriori(b_norm, c_norm, epsilon, N=None):
    """Predicted error ``sqrt(epsilon |E^{-1}B|_2 |C|_2)``.

    `epsilon` must bound the total (not mean) tail ``sqrt(sum sigma_k^2)`` of the
    cross Gramian; see :func:`total_epsilon`. `N` is accepted for symmetry with
    :class:`IndicatorInputs` and does not enter the formula.
    """
    if epsilon < 0:
        raise ValueError('epsilon must be non-negative')
    return float(np.sqrt(epsilon * b_norm * c_norm))


def total_epsilon(epsilon_mean, columns):
    """Convert a mean-per-column projection error to the total tail bound."""
    return float(epsilon_mean * np.sqrt(columns))


def select_siso_subsystem(sys):
    """1-based ``(k, l)`` maximizing ``<|b_k|, |c_l|>``; ties go to the smallest indices."""
    G = np.abs(sys.B).T @ np.abs(sys.C).T
    k, l = np.unravel_index(np.argmax(G), G.shape)
    return int(k) + 1, int(l) + 1
