"""
A two-state walk-through
========================

The smallest interesting case: ``x' = diag(-1, -2) x + [1, 1]^T u`` with
output ``y = [1, 1] x``. Its cross Gramian is the 2x2 Hilbert matrix, so
every step below can be checked by hand.
"""

import numpy as np

from wxds.errind import IndicatorInputs, h2_indicator, operator_norms
from wxds.gramian import dense_cross_gramian_oracle, empirical_cross_gramian, sylvester_residual
from wxds.harness.benchmarks import diagonal_example
from wxds.reduce import cross_gramian_tsvd, project, wxds
from wxds.sim import Trajectory, impulse_response, l2_norm

sys = diagonal_example()

# The Sylvester equation A W + W A = -B C, solved densely.
W = dense_cross_gramian_oracle(sys).data
print('oracle cross Gramian\n', W)

# The same Gramian from simulations: primal and adjoint impulse responses,
# integrated with implicit Euler and summed over the time grid.
for h in (1e-2, 1e-3):
    We = empirical_cross_gramian(sys, h, 20.0)
    print(f'h = {h:g}: Sylvester residual {sylvester_residual(sys, We):.2e}')

# The system is symmetric, so the Hankel singular values are |eig(W)|.
print('Hankel singular values', np.sort(np.abs(np.linalg.eigvals(W)))[::-1])

# Keep one dominant direction and look at what it costs.
U, d, V, tail = cross_gramian_tsvd(W, 0.1)
rom = project(sys, wxds(U, d, V))
indicator = h2_indicator(IndicatorInputs(*operator_norms(sys), tail))

h, T = 1e-3, 20.0
y = impulse_response(sys, h, T)
yr = impulse_response(rom, h, T)
err = l2_norm(Trajectory(h, y.values - yr.values))
print(f'order {rom.N}: indicator {indicator:.4f}, measured L2 error {err:.4f}')
