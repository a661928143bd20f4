"""Built-in benchmark systems."""

import numpy as np
import scipy.linalg as spla

from wxds.lti import LtiSystem


def fom_system():
    """SISO "FOM" benchmark of order 1006 with ``E = I`` and ``B = C^T``.

    Three lightly damped oscillators at frequencies 100, 200 and 400 and the
    real poles ``-1, .., -1000``; the first six states are weighted by 10 in
    the input and output.
    """
    blocks = [np.array([[-1.0, w], [-w, -1.0]]) for w in (100.0, 200.0, 400.0)]
    A = spla.block_diag(*blocks, np.diag(-np.arange(1.0, 1001.0)))
    C = np.concatenate([np.full(6, 10.0), np.ones(1000)])[None, :]
    return LtiSystem(A, C.T, C)


def diagonal_example():
    """Two-state SISO system ``A = diag(-1, -2)``, ``B = C^T = (1, 1)``.

    Its cross Gramian is ``[[1/2, 1/3], [1/3, 1/4]]``.
    """
    return LtiSystem(np.diag([-1.0, -2.0]), np.ones((2, 1)), np.ones((1, 2)))
