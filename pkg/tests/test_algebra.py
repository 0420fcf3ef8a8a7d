"""Operator algebra: spin matrices, tensor products, exact propagators."""

import numpy as np
import pytest
import scipy.linalg

from spindd.algebra import (
    DensityMatrix,
    Operator,
    basis_dm,
    basis_ket,
    eig_hermitian,
    embed,
    herm_propagator,
    identity,
    partial_trace,
    spin_ops,
    tensor,
)


def test_spin_half_matrices():
    ops = spin_ops(2)
    assert np.allclose(np.diag(ops.sz.mat), [0.5, -0.5])
    assert np.allclose(ops.sx.mat, [[0.0, 0.5], [0.5, 0.0]])
    assert np.allclose(ops.sy.mat, [[0.0, -0.5j], [0.5j, 0.0]])


def test_spin_one_matrices():
    ops = spin_ops(3)
    assert np.allclose(np.diag(ops.sz.mat), [1.0, 0.0, -1.0])
    # raising element <m+1|Sx|m> = sqrt(2)/2 for spin 1
    assert abs(ops.sx.mat[0, 1] - 1.0 / np.sqrt(2)) < 1e-15


@pytest.mark.parametrize("d", [2, 3])
def test_spin_commutators_and_casimir(d):
    ops = spin_ops(d)
    comm = ops.sx.mat @ ops.sy.mat - ops.sy.mat @ ops.sx.mat
    assert np.allclose(comm, 1j * ops.sz.mat, atol=1e-14)
    s = (d - 1) / 2.0
    casimir = ops.sx.mat @ ops.sx.mat + ops.sy.mat @ ops.sy.mat + ops.sz.mat @ ops.sz.mat
    assert np.allclose(casimir, s * (s + 1) * np.eye(d), atol=1e-14)


def test_spin_ops_rejects_other_dimensions():
    with pytest.raises(ValueError, match="expected 2 or 3"):
        spin_ops(4)


def test_operator_infers_single_site_dims():
    op = Operator(np.eye(2))
    assert op.dims == (2,)
    assert op.shape == (2, 2)


def test_operator_validation():
    with pytest.raises(ValueError, match="square"):
        Operator(np.ones((2, 3)))
    with pytest.raises(ValueError, match="multiply"):
        Operator(np.eye(3), dims=(2, 2))
    with pytest.raises(ValueError, match="Hermitian"):
        Operator(np.array([[0.0, 1.0], [0.0, 0.0]]), herm=True)


def test_operator_is_immutable():
    op = Operator(np.eye(2))
    with pytest.raises(ValueError):
        op.mat[0, 0] = 5.0
    with pytest.raises(AttributeError):
        op.herm = True


def test_operator_arithmetic_and_dagger():
    a = Operator(np.array([[0.0, 1.0j], [0.0, 0.0]]))
    b = Operator(np.eye(2))
    assert np.allclose((a + b).mat, a.mat + np.eye(2))
    assert np.allclose((a - b).mat, a.mat - np.eye(2))
    assert np.allclose((2.0 * a).mat, 2.0 * a.mat)
    assert np.allclose((-a).mat, -a.mat)
    assert np.allclose((a @ b).mat, a.mat)
    assert np.allclose(a.dag().mat, a.mat.conj().T)
    assert abs(b.trace() - 2.0) < 1e-15
    assert b.is_hermitian()
    assert not a.is_hermitian()
    assert a.allclose(Operator(a.mat.copy()))
    assert not a.allclose(b)


def test_tensor_product_entries_by_hand():
    ops = spin_ops(2)
    t = tensor([ops.sz, ops.sx])
    assert t.dims == (2, 2)
    # sz (x) sx: upper-left block +sx/2, lower-right block -sx/2
    assert t.mat[0, 1] == pytest.approx(0.25)
    assert t.mat[1, 0] == pytest.approx(0.25)
    assert t.mat[2, 3] == pytest.approx(-0.25)
    assert t.mat[0, 2] == 0.0
    with pytest.raises(ValueError, match="empty"):
        tensor([])


def test_embed_matches_explicit_kron():
    ops = spin_ops(2)
    dims = (2, 2, 2)
    at0 = embed(ops.sz, 0, dims)
    at2 = embed(ops.sx, 2, dims)
    assert np.allclose(at0.mat, np.kron(ops.sz.mat, np.eye(4)))
    assert np.allclose(at2.mat, np.kron(np.eye(4), ops.sx.mat))
    assert at0.dims == dims
    with pytest.raises(ValueError, match="outside"):
        embed(ops.sz, 3, (2, 2))


def test_identity():
    op = identity((2, 3))
    assert op.dims == (2, 3)
    assert np.allclose(op.mat, np.eye(6))


def test_basis_states():
    k = basis_ket((2, 2), (0, 1))
    assert k.shape == (4,)
    assert np.allclose(k, [0.0, 1.0, 0.0, 0.0])
    dm = basis_dm((3, 2), (1, 0), label="ms0")
    assert dm.label == "ms0"
    assert dm.mat[2, 2] == pytest.approx(1.0)
    assert abs(np.trace(dm.mat) - 1.0) < 1e-15
    with pytest.raises(ValueError, match="outside dimension"):
        basis_dm((2, 2), (0, 2))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(Operator(2.0 * np.eye(2)))  # trace 4
    with pytest.raises(ValueError):
        DensityMatrix(Operator(np.array([[0.5, 0.3], [0.1, 0.5]])))
    neg = np.diag([1.2, -0.2])
    with pytest.raises(ValueError):
        DensityMatrix(Operator(neg))


def test_density_matrix_purity():
    pure = basis_dm((2,), (0,))
    assert pure.purity() == pytest.approx(1.0)
    mixed = DensityMatrix(Operator(np.eye(4) / 4.0, dims=(2, 2)))
    assert mixed.purity() == pytest.approx(0.25)


def test_eig_hermitian_ascending_and_reconstruction():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = Operator(a + a.conj().T)
    w, v = eig_hermitian(h)
    assert np.all(np.diff(w) >= 0)
    recon = v.mat @ np.diag(w) @ v.mat.conj().T
    assert np.allclose(recon, h.mat, atol=1e-12)


def test_herm_propagator_matches_expm():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = Operator(a + a.conj().T, dims=(2, 2))
    u = herm_propagator(h, 0.37)
    ref = scipy.linalg.expm(-2j * np.pi * 0.37 * h.mat)
    assert np.allclose(u.mat, ref, atol=1e-12)
    assert np.max(np.abs(u.mat @ u.mat.conj().T - np.eye(4))) < 1e-12
    with pytest.raises(ValueError, match="negative"):
        herm_propagator(h, -0.1)


def test_herm_propagator_zero_duration_is_identity():
    h = Operator(np.diag([1.0, -1.0]), herm=True)
    assert np.allclose(herm_propagator(h, 0.0).mat, np.eye(2))


def test_partial_trace_product_state():
    a = basis_dm((2,), (0,)).mat
    b = np.array([[0.75, 0.1], [0.1, 0.25]])
    rho = DensityMatrix(Operator(np.kron(a, b), dims=(2, 2)))
    red0 = partial_trace(rho, {0})
    red1 = partial_trace(rho, {1})
    assert isinstance(red0, DensityMatrix)
    assert np.max(np.abs(red0.mat - a)) < 1e-12
    assert np.max(np.abs(red1.mat - b)) < 1e-12


def test_partial_trace_bell_state_is_maximally_mixed():
    psi = (basis_ket((2, 2), (0, 0)) + basis_ket((2, 2), (1, 1))) / np.sqrt(2)
    rho = DensityMatrix(Operator(np.outer(psi, psi.conj()), dims=(2, 2)))
    red = partial_trace(rho, {1})
    assert np.max(np.abs(red.mat - np.eye(2) / 2.0)) < 1e-12


def test_partial_trace_three_sites_and_trace_preservation():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    rho_m = a @ a.conj().T
    rho_m = rho_m / np.trace(rho_m)
    rho = DensityMatrix(Operator(rho_m, dims=(3, 2, 2)))
    red = partial_trace(rho, {0, 2})
    assert red.dims == (3, 2)
    assert abs(np.trace(red.mat) - 1.0) < 1e-12
    # summing the middle site by hand
    by_hand = np.zeros((6, 6), dtype=complex)
    full = rho_m.reshape(3, 2, 2, 3, 2, 2)
    for j in range(2):
        by_hand += full[:, j, :, :, j, :].reshape(6, 6)
    assert np.max(np.abs(red.mat - by_hand)) < 1e-12
    with pytest.raises(ValueError, match="at least one"):
        partial_trace(rho, set())


def test_partial_trace_operator_input_returns_operator():
    op = identity((2, 2))
    red = partial_trace(op, {0})
    assert isinstance(red, Operator)
    assert np.allclose(red.mat, 2.0 * np.eye(2))
