import numpy as np
import pytest
import scipy.linalg as spla
from hypothesis import given, settings
from hypothesis import strategies as st

from wxds.gramian import GramianFactor, dense_cross_gramian_oracle, empirical_factors
from wxds.hapod import HapodConfig, pod, principal_angles
from wxds.lti import LtiSystem, random_stable_system, validate
from wxds.reduce import (Method, Projector, balanced_truncation, compress_factor, cross_gramian_tsvd, dspmr,
                         project, reduce, wxds)
from wxds.sim import IMPULSE

HILBERT = np.array([[1 / 2, 1 / 3], [1 / 3, 1 / 4]])


def rom_poles(rom):
    return spla.eigvals(rom.A, rom.E)


def test_method_names():
    assert [str(m) for m in Method] == ['WXDS', 'DSPMR', 'DSPMR-R', 'LREBT']
    assert Method('DSPMR-R') is Method.DSPMR_R


def test_identity_projection_is_exact(rng):
    s = random_stable_system(6, M=2, Q=3, rng=rng)
    assert project(s, Projector.orthogonal(np.eye(6))) == s


def test_coordinate_selection(diag_sys):
    rom = project(diag_sys, Projector.orthogonal(np.eye(2)[:, :1]))
    assert rom == LtiSystem([[-1.0]], [[1.0]], [[1.0]], E=[[1.0]])


def test_project_rejects_bad_projectors(diag_sys):
    with pytest.raises(ValueError):
        project(diag_sys, Projector.empty(2))
    with pytest.raises(ValueError):
        project(diag_sys, Projector.orthogonal(np.eye(3)[:, :1]))


def test_reduce_wraps_projection(diag_sys):
    r = reduce(diag_sys, Projector.orthogonal(np.eye(2)[:, :1]), 'WXDS', [0.019])
    assert r.method is Method.WXDS and r.order == 1 and r.rom.N == 1
    assert np.array_equal(r.discarded_svals, [0.019])


def test_projecting_rom_with_identity_is_noop(rng):
    s = random_stable_system(8, rng=rng)
    U, _ = np.linalg.qr(rng.standard_normal((8, 3)))
    rom = project(s, Projector.orthogonal(U))
    assert project(rom, Projector.orthogonal(np.eye(3))) == rom


@pytest.mark.parametrize('seed', range(5))
def test_galerkin_stability_preservation(seed):
    rng = np.random.default_rng(seed)
    s = random_stable_system(12, rng=rng)
    assert validate(s).stability_preserving
    for n in (1, 4, 11):
        U, _ = np.linalg.qr(rng.standard_normal((12, n)))
        assert rom_poles(project(s, Projector.orthogonal(U))).real.max() < 0


def test_wxds_symmetric_duplicates(rng):
    U, _ = np.linalg.qr(rng.standard_normal((7, 3)))
    d = np.array([3.0, 1.0, 0.2])
    p = wxds(U, d, U)
    assert p.galerkin and p.order == 3
    assert np.allclose(p.singular_values, np.sqrt(2) * d, rtol=1e-12)
    assert principal_angles(p.U1, U).max() <= 1e-8


def test_wxds_orthogonal_pair():
    p = wxds(np.eye(3)[:, :1], [2.0], np.eye(3)[:, 1:2])
    assert p.order == 2
    assert np.allclose(p.singular_values, [2.0, 2.0])
    assert principal_angles(p.U1, np.eye(3)[:, :2]).max() <= 1e-12


def test_wxds_accepts_diagonal_matrix_and_empty(rng):
    U, _ = np.linalg.qr(rng.standard_normal((5, 2)))
    a = wxds(U, np.diag([2.0, 1.0]), U)
    b = wxds(U, [2.0, 1.0], U)
    assert np.array_equal(a.U1, b.U1)
    assert wxds(np.zeros((5, 0)), [], np.zeros((5, 0))).order == 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), flips=st.lists(st.booleans(), min_size=4, max_size=4))
def test_wxds_sign_flip_invariance(seed, flips):
    rng = np.random.default_rng(seed)
    U_X, d, Vt = np.linalg.svd(rng.standard_normal((9, 9)))
    U_X, d, V_X = U_X[:, :4], d[:4], Vt[:4].T
    sign = np.where(flips, -1.0, 1.0)
    a = wxds(U_X, d, V_X)
    b = wxds(U_X * sign, d, V_X * sign)
    assert a.order == b.order
    assert principal_angles(a.U1, b.U1).max() <= 1e-6


def test_cross_gramian_tsvd_exact_and_truncated():
    U, d, V, tail = cross_gramian_tsvd(HILBERT, 0.0)
    assert np.allclose(U * d @ V.T, HILBERT) and tail.size == 0
    U, d, V, tail = cross_gramian_tsvd(HILBERT, 0.1)
    assert len(d) == 1 and np.allclose(tail, [np.linalg.svd(HILBERT, compute_uv=False)[1]])


def test_dspmr_equal_factors(rng):
    Z = rng.standard_normal((8, 3)) @ rng.standard_normal((3, 40))
    p = dspmr(Z, Z, refined=True)
    q = pod(Z, 0.0)
    assert p.order == q.rank == 3
    assert principal_angles(p.U1, q.modes).max() <= 1e-8
    assert principal_angles(dspmr(Z, Z).U1, q.modes).max() <= 1e-8


def test_dspmr_refined_weights():
    ZC = 4.0 * np.eye(3)[:, :1]
    ZO = np.eye(3)[:, 1:2]
    p = dspmr(ZC, ZO, refined=True)
    # w_C = 1/4 equalizes both columns
    assert np.allclose(p.singular_values, [1.0, 1.0])


def test_dspmr_separate_directions():
    for refined in (False, True):
        p = dspmr(np.eye(3)[:, :1], np.eye(3)[:, 1:2], refined=refined)
        assert p.order == 2 and p.galerkin
        assert principal_angles(p.U1, np.eye(3)[:, :2]).max() <= 1e-12


def test_dspmr_zero_factor_is_empty():
    assert dspmr(np.zeros((3, 2)), np.eye(3)).order == 0


def test_dspmr_tolerance_truncates(rng):
    ZC = np.diag([1.0, 1e-6, 0.0])
    ZO = np.diag([1.0, 0.0, 1e-6])
    assert dspmr(ZC, ZO).order == 3
    assert dspmr(ZC, ZO, tol=1e-3).order == 1


def test_balanced_truncation_unit_factors():
    e1 = np.eye(3)[:, :1]
    p = balanced_truncation(e1, e1)
    assert p.order == 1 and not p.galerkin
    assert np.allclose(p.U1, e1) and np.allclose(p.V1, e1.T)


def test_balanced_truncation_empty():
    p = balanced_truncation(np.eye(3)[:, :1], np.eye(3)[:, 1:2])
    assert p.order == 0 and p.V1.shape == (0, 3)


def test_balanced_truncation_biorthogonal_with_mass(rng):
    s = random_stable_system(10, rng=rng)
    zc, zo = empirical_factors(s, IMPULSE, 1e-2, 10.0)
    p = balanced_truncation(zc, zo, s.E, tol=1e-6)
    assert p.biorthogonality_error(s.E) <= 1e-8
    rom = project(s, p)
    assert np.abs(rom.E - np.eye(p.order)).max() <= 1e-8


def test_balanced_truncation_hankel_values(diag_sys):
    zc, zo = empirical_factors(diag_sys, IMPULSE, 1e-3, 20.0)
    p = balanced_truncation(zc, zo)
    hsv = np.sort(np.abs(np.linalg.eigvals(dense_cross_gramian_oracle(diag_sys).data)))[::-1]
    assert np.allclose(hsv, [0.731, 0.019], atol=1e-3)
    assert np.allclose(p.singular_values[:2], hsv, atol=1e-2)


def test_balanced_truncation_symmetric_is_galerkin_subspace(rng):
    S = rng.standard_normal((6, 6))
    A = -(S @ S.T + 6 * np.eye(6))
    b = rng.standard_normal((6, 1))
    s = LtiSystem(A, b, b.T)
    zc, zo = empirical_factors(s, IMPULSE, 1e-3, 5.0)
    p = balanced_truncation(zc, zo, tol=1e-4)
    assert principal_angles(p.U1, p.V1.T).max() <= 1e-6


def test_compress_factor_keeps_gramian(rng):
    Z = rng.standard_normal((10, 4)) @ rng.standard_normal((4, 300)) * 0.05
    f = GramianFactor(Z, 'controllability', 0.01)
    c = compress_factor(f, HapodConfig(0.0, partition_width=4))
    assert c.kind == 'controllability' and c.data.shape == (10, 4)
    assert np.allclose(c.gramian, f.gramian, atol=1e-10 * np.abs(f.gramian).max())
    raw = compress_factor(Z, HapodConfig(0.0, partition_width=4))
    assert np.array_equal(raw, c.data)


def test_projector_biorthogonality_error():
    p = Projector(np.eye(2), 2 * np.eye(2), False)
    assert p.biorthogonality_error() == 1.0
    assert Projector.empty(3).biorthogonality_error() == 0.0
