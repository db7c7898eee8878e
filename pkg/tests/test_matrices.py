import numpy as np
import pytest

from redfield_lab.matrices import (ComplexSpectrum, NotHermitian, Spectrum,
                                   general_eigenvalues_4x4,
                                   hermitian_eigenvalues,
                                   hermitian_eigenvalues_batch,
                                   partial_trace_first, partial_trace_second,
                                   tensor_product)
from util import random_complex, random_density, random_hermitian, rng


def test_tensor_product_block_structure():
    r = rng(1)
    A = random_complex(r, (2, 2))
    B = random_complex(r, (2, 2))
    K = tensor_product(A, B)
    assert K.shape == (4, 4)
    for i in range(2):
        for j in range(2):
            block = K[2 * i:2 * i + 2, 2 * j:2 * j + 2]
            assert np.allclose(block, A[i, j] * B, atol=1e-15)


def test_partial_traces_on_products():
    r = rng(2)
    for _ in range(20):
        A = random_density(r, 2)
        B = random_density(r, 2)
        K = tensor_product(A, B)
        assert np.abs(partial_trace_second(K) - A).max() < 1e-14
        assert np.abs(partial_trace_first(K) - B).max() < 1e-14


def test_partial_trace_linearity_and_trace():
    r = rng(3)
    rho = random_density(r, 4)
    for pt in (partial_trace_first, partial_trace_second):
        red = pt(rho)
        assert abs(np.trace(red) - 1.0) < 1e-13
        assert np.abs(red - red.conj().T).max() < 1e-13


def test_hermitian_eigenvalues_match_reference():
    r = rng(4)
    for n in (2, 3, 4):
        for _ in range(40):
            H = random_hermitian(r, n)
            spec = hermitian_eigenvalues(H)
            ref = np.linalg.eigvalsh(H)[::-1]
            assert np.abs(spec.values - ref).max() < 1e-11
            assert np.all(np.diff(spec.values) <= 0)
            assert spec.residual < 1e-12 * max(1.0, np.abs(H).max())


def test_hermitian_eigenvalues_batch_shape():
    r = rng(5)
    H = np.stack([random_hermitian(r, 4) for _ in range(17)])
    values, residual = hermitian_eigenvalues_batch(H)
    assert values.shape == (17, 4)
    for k in range(17):
        ref = np.linalg.eigvalsh(H[k])[::-1]
        assert np.abs(values[k] - ref).max() < 1e-11


def test_hermitian_eigenvalues_rejects_non_hermitian():
    r = rng(6)
    M = random_complex(r, (3, 3))
    M[0, 1] += 1.0  # guarantee asymmetry
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues(M)


def test_hermitian_eigenvalue_sum_is_trace():
    r = rng(7)
    for _ in range(30):
        H = random_hermitian(r, 4)
        spec = hermitian_eigenvalues(H)
        assert abs(spec.values.sum() - np.trace(H).real) < 1e-11


def test_general_eigenvalues_on_hermitian_products():
    # R = rho (s2 x s2) rho* (s2 x s2) is the non-Hermitian-but-real-spectrum
    # shape this solver exists for
    r = rng(8)
    s2 = np.array([[0.0, -1j], [1j, 0.0]])
    F = np.kron(s2, s2).real
    for _ in range(40):
        rho = random_density(r, 4)
        R = rho @ (F @ rho.conj() @ F)
        spec = general_eigenvalues_4x4(R)
        ref = np.sort(np.linalg.eigvals(R).real)[::-1]
        assert np.abs(spec.values - ref).max() < 1e-9
        assert np.all(spec.values >= 0.0)


def test_general_eigenvalues_rejects_complex_spectrum():
    # 2x2 rotation block has eigenvalues e^{+-i}, padded to 4x4
    M = np.zeros((4, 4))
    M[0, 0], M[0, 1], M[1, 0], M[1, 1] = np.cos(1.0), -np.sin(1.0), np.sin(1.0), np.cos(1.0)
    M[2, 2] = M[3, 3] = 1.0
    with pytest.raises(ComplexSpectrum):
        general_eigenvalues_4x4(M)


def test_general_eigenvalues_clamps_roundoff_negatives():
    # rank-deficient PSD product: exact zeros may come out at -1e-17
    r = rng(9)
    v = random_complex(r, 4)
    rho = np.outer(v, v.conj())
    rho = rho / np.trace(rho).real
    s2 = np.array([[0.0, -1j], [1j, 0.0]])
    F = np.kron(s2, s2).real
    R = rho @ (F @ rho.conj() @ F)
    spec = general_eigenvalues_4x4(R)
    assert np.all(spec.values >= 0.0)


def test_spectrum_is_frozen():
    spec = Spectrum(np.array([1.0, 0.0]), 0.0)
    with pytest.raises(AttributeError):
        spec.residual = 1.0
