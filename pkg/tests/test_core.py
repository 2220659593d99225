import math

import numpy as np
import pytest

from gravlocc import core
from gravlocc.core import (PROJ_0, PROJ_1, SIGMA_X, SIGMA_Z, FockParams, InvalidStateError,
                           TruncationError, coherent_ket, coherent_state, displacement,
                           expm_hermitian_generator, fock_operators, kron, negativity,
                           partial_trace, partial_transpose, random_density_matrix,
                           random_product_state, validate_density_matrix)


def _kron_loops(a, b):
    # independent oracle: explicit quadruple loop
    n = b.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(n):
                for l in range(n):
                    out[i * n + k, j * n + l] = a[i, j] * b[k, l]
    return out


def _expm_taylor(A, terms=30):
    out = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


def test_fock_params_validation():
    assert FockParams(7).dim == 14
    for bad in (1, 2.5, 0):
        with pytest.raises(ValueError):
            FockParams(bad)
    with pytest.raises(ValueError):
        FockParams(5, x0=0.0)


def test_kron_matches_loop_oracle():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert np.allclose(kron(a, b), _kron_loops(a, b), atol=1e-14)
    with pytest.raises(ValueError):
        kron(np.eye(3), b)


def test_qubit_major_ordering():
    rho = kron(PROJ_1, np.diag([0, 0, 1.0]))
    # |1> (x) |2> sits at index 1 * 3 + 2
    assert rho[5, 5] == 1


def test_partial_trace_duality():
    rng = np.random.default_rng(2)
    n = 6
    for _ in range(100):
        rho = random_density_matrix(2 * n, rng)
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        N = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert abs(np.trace(partial_trace(rho, "qubit") @ M)
                   - np.trace(rho @ kron(M, np.eye(n)))) < 1e-10
        assert abs(np.trace(partial_trace(rho, "fock") @ N)
                   - np.trace(rho @ kron(np.eye(2), N))) < 1e-10


def test_partial_trace_of_product():
    q = np.array([[0.7, 0.2j], [-0.2j, 0.3]])
    f = coherent_state(0.5, FockParams(12))
    rho = kron(q, f)
    assert np.allclose(partial_trace(rho, 0), q)
    assert np.allclose(partial_trace(rho, "fock"), f)
    with pytest.raises(ValueError):
        partial_trace(rho, "atom")


def test_partial_transpose_is_involution_and_product_safe():
    rng = np.random.default_rng(3)
    rho = random_density_matrix(8, rng)
    assert np.allclose(partial_transpose(partial_transpose(rho)), rho)
    q = np.array([[0.6, 0.1 + 0.2j], [0.1 - 0.2j, 0.4]])
    f = random_density_matrix(4, rng)
    assert np.allclose(partial_transpose(kron(q, f)), kron(q.T, f))


def test_negativity_bell_and_product():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)  # (|0,0> + |1,1>)/sqrt2 with n_cut = 2
    assert abs(negativity(np.outer(psi, psi.conj())) - 0.5) < 1e-12
    rng = np.random.default_rng(4)
    for _ in range(10):
        assert negativity(random_product_state(6, rng)) < 1e-12


def test_negativity_of_cat_state_matches_gram_oracle():
    delta = 1.0
    fock = FockParams(30)
    a, b = coherent_ket(delta, fock), coherent_ket(-delta, fock)
    psi = (np.kron([1, 0], a) + np.kron([0, 1], b)) / np.sqrt(2)
    # oracle: Schmidt coefficients from the 2x2 Gram matrix of {a, b}
    s = abs(np.vdot(a, b))
    # Schmidt weights (1 +- s) / 2, so ((sum sqrt w)^2 - 1) / 2 = sqrt(1 - s^2) / 2
    expected = math.sqrt(1 - s ** 2) / 2
    assert abs(negativity(np.outer(psi, psi.conj())) - expected) < 1e-10
    assert abs(s - math.exp(-2 * delta ** 2)) < 1e-10


def test_validate_density_matrix():
    rho = kron(PROJ_0, np.diag([1.0, 0.0]))
    validate_density_matrix(rho)
    with pytest.raises(InvalidStateError):
        validate_density_matrix(2 * rho)
    with pytest.raises(InvalidStateError):
        validate_density_matrix(rho + 1e-3 * np.triu(np.ones((4, 4)), 1))
    bad = kron(np.diag([1.5, -0.5]), np.diag([1.0, 0.0]))
    with pytest.raises(InvalidStateError):
        validate_density_matrix(bad)
    with pytest.raises(ValueError):
        validate_density_matrix(np.eye(3) / 3)


def test_fock_operators_commutator():
    n_cut = 12
    ops = fock_operators(FockParams(n_cut))
    comm = ops["X"] @ ops["P"] - ops["P"] @ ops["X"]
    # truncation only spoils the last level: [X, P] = 2i (I - n_cut |N-1><N-1|)
    expected = 2j * np.eye(n_cut)
    expected[-1, -1] = 2j * (1 - n_cut)
    assert np.allclose(comm, expected, atol=1e-12)
    assert np.allclose(ops["adag"] @ ops["a"], ops["n"])


def test_coherent_state_statistics_and_overlap():
    fock = FockParams(40)
    ops = fock_operators(fock)
    for delta in (0.5, 1.0, 1.5 - 0.5j, 2.0):
        psi = coherent_ket(delta, fock)
        assert abs(np.linalg.norm(psi) - 1) < 1e-14
        assert abs(np.vdot(psi, ops["n"] @ psi) - abs(delta) ** 2) < 1e-8
        assert abs(np.vdot(psi, ops["a"] @ psi) - delta) < 1e-8
        overlap = abs(np.vdot(coherent_ket(-delta, fock), psi)) ** 2
        assert abs(overlap - math.exp(-4 * abs(delta) ** 2)) < 1e-10
    assert np.allclose(coherent_ket(0, fock)[0], 1)


def test_coherent_state_truncation_guard():
    with pytest.raises(TruncationError):
        coherent_ket(3.0, FockParams(10))


def test_displacement_matches_coherent_state():
    fock = FockParams(40)
    vac = np.zeros(40, dtype=complex)
    vac[0] = 1
    for beta in (0.7, 1.2 + 0.4j):
        assert np.allclose(displacement(beta, fock) @ vac, coherent_ket(beta, fock), atol=1e-9)


def test_expm_against_taylor_and_unitarity():
    rng = np.random.default_rng(5)
    for _ in range(20):
        A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        H = 0.3 * (A + A.conj().T)
        U = expm_hermitian_generator(H, 0.8)
        assert np.allclose(U, _expm_taylor(-0.8j * H), atol=1e-10)
        assert np.max(np.abs(U.conj().T @ U - np.eye(6))) < 1e-10
    with pytest.raises(ValueError):
        expm_hermitian_generator(np.array([[0, 1], [0, 0]], dtype=complex))


def test_random_product_state_is_valid():
    rng = np.random.default_rng(6)
    rho = random_product_state(8, rng, fock_levels=3)
    validate_density_matrix(rho)
    osc = partial_trace(rho, "fock")
    assert np.allclose(np.diag(osc)[3:], 0)


def test_pauli_conventions():
    assert np.allclose(SIGMA_Z @ np.array([1, 0]), [1, 0])
    assert np.allclose(SIGMA_X @ SIGMA_X, np.eye(2))
    assert np.allclose(PROJ_0 + PROJ_1, core.QUBIT_ID)
