"""
Compressing snapshots tree-wise
===============================

The HAPOD never sees the whole snapshot matrix. Each node compresses the
scaled modes of its predecessor together with one new block, and the
error budget is split so the mean projection error of all columns stays
below the target. Here the result is compared with the flat SVD.
"""

import numpy as np

from wxds.hapod import HapodConfig, incremental_hapod, partition, pod, principal_angles

rng = np.random.default_rng(0)
U, _ = np.linalg.qr(rng.standard_normal((200, 200)))
V, _ = np.linalg.qr(rng.standard_normal((1024, 200)))
S = U @ np.diag(0.9 ** np.arange(200)) @ V.T

print(' epsilon  flat  hapod  mean error / eps^2  largest angle')
for eps in (1e-2, 1e-3, 1e-4, 1e-6):
    flat = pod(S, eps)
    tree = incremental_hapod(partition(S, 128), HapodConfig(eps))
    R = S - tree.modes @ (tree.modes.T @ S)
    ratio = np.sum(R ** 2) / S.shape[1] / eps ** 2
    n = min(flat.rank, tree.rank)
    angle = principal_angles(flat.modes[:, :n], tree.modes[:, :n]).max()
    print(f'{eps:8.0e}  {flat.rank:4d}  {tree.rank:5d}  {ratio:18.3f}  {angle:13.2e}')

# The tree typically keeps a few more modes than the flat POD: that is the
# price for never holding more than one block plus the current basis.
