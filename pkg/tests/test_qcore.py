import numpy as np
import pytest
from hypothesis import given, settings

from conftest import random_density, seeds
from monoq.qcore import (
    ContractViolation,
    DensityMatrix,
    Ket,
    LabelError,
    eig_hermitian,
    partial_trace,
    partial_transpose,
    ptrace_array,
    ptranspose_array,
    tensor,
    von_neumann_entropy,
)


def test_ptrace_of_product_recovers_factors(rng):
    a, b, c = (random_density(rng, 1) for _ in range(3))
    rho = tensor(a, b, c)
    assert np.allclose(ptrace_array(rho, [0], 3), a, atol=1e-14)
    assert np.allclose(ptrace_array(rho, [1], 3), b, atol=1e-14)
    assert np.allclose(ptrace_array(rho, [0, 2], 3), tensor(a, c), atol=1e-14)
    # keep order is honoured, so this swaps the two factors
    assert np.allclose(ptrace_array(rho, [2, 0], 3), tensor(c, a), atol=1e-14)


def test_labelled_partial_trace_keeps_register_order(rng):
    a, b = random_density(rng, 1), random_density(rng, 1)
    rho = DensityMatrix(tensor(a, b), register=(5, 9))
    red = partial_trace(rho, [9])
    assert red.register == (9,)
    assert np.allclose(red.matrix, b)
    with pytest.raises(LabelError):
        partial_trace(rho, [3])


def test_bell_partial_transpose_spectrum():
    bell = np.zeros(4)
    bell[[0, 3]] = 1 / np.sqrt(2)
    pt = ptranspose_array(np.outer(bell, bell), [0], 2)
    assert np.allclose(np.sort(np.linalg.eigvalsh(pt)), [-0.5, 0.5, 0.5, 0.5])


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_partial_transpose_is_an_involution(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    rho = random_density(rng, n)
    part = [int(q) for q in rng.choice(n, size=int(rng.integers(1, n)), replace=False)]
    twice = ptranspose_array(ptranspose_array(rho, part, n), part, n)
    assert np.allclose(twice, rho, atol=1e-14)
    # transposing a part equals fully transposing the complement
    rest = [q for q in range(n) if q not in part]
    assert np.allclose(ptranspose_array(rho, part, n), ptranspose_array(rho, rest, n).T, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_entropy_identities(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density(rng, 1), random_density(rng, 2)
    s_a = von_neumann_entropy(DensityMatrix(a))
    s_b = von_neumann_entropy(DensityMatrix(b))
    s_ab = von_neumann_entropy(DensityMatrix(tensor(a, b)))
    assert s_ab == pytest.approx(s_a + s_b, abs=1e-10)
    assert 0 <= s_b <= 2 + 1e-12
    # pure bipartite states have equal marginal entropies
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    rho = DensityMatrix(np.outer(psi, psi.conj()) / np.vdot(psi, psi).real)
    assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-10)
    assert von_neumann_entropy(partial_trace(rho, [1])) == pytest.approx(
        von_neumann_entropy(partial_trace(rho, [2, 3])), abs=1e-10
    )


def test_maximally_mixed_entropy():
    assert von_neumann_entropy(DensityMatrix(np.eye(8) / 8)) == pytest.approx(3.0)


def test_density_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(3) / 3)
    rho = DensityMatrix(np.diag([1.2, -0.2]))
    assert not rho.is_valid()
    with pytest.raises(ContractViolation):
        rho.check()
    with pytest.raises(ValueError):
        Ket(np.array([1.0, 1.0]))


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))
    w, v = eig_hermitian(np.diag([2.0, 1.0]).astype(complex))
    assert np.allclose(w, [1.0, 2.0])


def test_partial_transpose_labels():
    rho = DensityMatrix(np.eye(4) / 4, register=(1, 2))
    assert np.allclose(partial_transpose(rho, [2]), np.eye(4) / 4)
