import time

import numpy as np
import pytest

from gravlocc.channel import apply, extract_generator, is_product_operator, validate
from gravlocc.core import (PROJ_0, PROJ_1, QUBIT_ID, SIGMA_Z, FockParams, fock_operators,
                           ket_to_dm, kron, random_density_matrix)
from gravlocc.lindblad import check_c_prime, rhs_expectation, superoperator
from gravlocc.models import (PhysicalParams, atom_noise_model, derive_couplings,
                             free_oscillator, gaussian_window_povm, gravity_hamiltonian,
                             locc_channel, locc_lindblad, measure_feedback_channel,
                             position_basis, stochastic_force_coupling, stochastic_force_model)

# frozen with 30-digit mpmath arithmetic at M=1 mg, omega=1e-3 rad/s, d=1 mm,
# m=2.207e-25 kg, ell=0.1 mm
BENCH = {
    "gamma": 3.33715e-5,
    "x0": 2.29627069070699937e-13,
    "alpha": 25157343600.4586802,
    "beta": 5.55222573262123073e-13,
    "lam": 6.41482738059279981e-15,
    "alpha_tilde": 0.182678679653647595,
    "beta_tilde": 1.75576793984801312e-11,
}


def test_coupling_benchmark_values():
    p = PhysicalParams(M_osc=1e-6, omega=1e-3, d=1e-3)
    elapsed = []
    for _ in range(5):
        t0 = time.perf_counter()
        c = derive_couplings(p)
        elapsed.append(time.perf_counter() - t0)
    assert min(elapsed) < 1e-3
    for key, ref in BENCH.items():
        assert getattr(c, key) == pytest.approx(ref, rel=1e-12), key
    assert c.lambda_tilde == pytest.approx(c.lam / 1e-3, rel=1e-14)
    assert c.n_gamma == c.gamma


def test_coupling_identities():
    c = derive_couplings(PhysicalParams(M_osc=3e-6, omega=2.0, d=5e-3, ell=1e-3, n_atoms=7))
    p = PhysicalParams(M_osc=3e-6, omega=2.0, d=5e-3, ell=1e-3, n_atoms=7)
    assert c.lam == pytest.approx(2 * c.alpha * c.beta * c.x0, rel=1e-12)
    # the heating rate in SI time is the dimensionless coupling squared times omega
    assert c.gamma == pytest.approx(c.alpha_tilde ** 2 * p.omega, rel=1e-12)
    assert c.n_gamma == pytest.approx(7 * c.gamma, rel=1e-15)


def test_n_atom_benchmark():
    c = derive_couplings(PhysicalParams(M_osc=1e-6, omega=1.0, d=1e-3, n_atoms=10 ** 8))
    assert 3.0 <= c.n_gamma <= 3.7
    assert c.n_gamma == pytest.approx(3.33715, rel=1e-9)


def test_physical_params_validation():
    with pytest.raises(ValueError):
        PhysicalParams(M_osc=0)
    with pytest.raises(ValueError):
        PhysicalParams(d=1e-5, ell=1e-4)


def test_measure_feedback_channels_are_complete_and_product():
    fock = FockParams(12)
    for measured in ("fock", "qubit"):
        c = measure_feedback_channel(0.3, 0.2, 0.01, fock, measured)
        assert validate(c) < 1e-12
        assert all(is_product_operator(k).is_product for k in c.kraus)
    with pytest.raises(ValueError):
        measure_feedback_channel(0.3, 0.2, 0.01, fock, "both")


def test_locc_lindblad_structure():
    fock = FockParams(8)
    gen = locc_lindblad(0.3, 0.2, fock)
    X = fock_operators(fock)["X"]
    assert np.allclose(gen.H, -2 * 0.3 * 0.2 * kron(SIGMA_Z, X))
    assert len(gen.jumps) == 2
    # alpha^2 part of the dissipator is -alpha^2 [X, [X, rho]]
    rho = random_density_matrix(16, np.random.default_rng(0))
    only_x = locc_lindblad(0.3, 0.0, fock).without_hamiltonian()
    Xf = kron(QUBIT_ID, X)
    dc = Xf @ (Xf @ rho - rho @ Xf) - (Xf @ rho - rho @ Xf) @ Xf
    assert np.allclose(superoperator(only_x) @ rho.flatten("F"), (-0.09 * dc).flatten("F"))


def test_locc_channel_generator_at_small_dt():
    fock = FockParams(6)
    G = extract_generator(lambda dt: locc_channel(0.3, 0.2, dt, fock), 1e-6)
    assert np.max(np.abs(G - superoperator(locc_lindblad(0.3, 0.2, fock)))) < 1e-4


def test_stochastic_force_jumps_and_law():
    fock = FockParams(25)
    gen = stochastic_force_model(0.2, 2.0, fock)
    assert check_c_prime(gen).verdict
    P = kron(QUBIT_ID, fock_operators(fock)["P"])
    sz = kron(SIGMA_Z, np.eye(25))
    vac = np.zeros((25, 25))
    vac[0, 0] = 1
    for q in (PROJ_0, PROJ_1, 0.5 * np.ones((2, 2))):
        rho = kron(q, vac)
        lhs = rhs_expectation(gen, rho, P)
        assert abs(lhs - 2 * 2.0 * 0.2 * np.trace(rho @ sz).real) < 1e-10
    with pytest.raises(ValueError):
        stochastic_force_model(0.2, 0.0, fock)


def test_stochastic_force_coupling_reproduces_force():
    p = PhysicalParams()
    c = derive_couplings(p)
    a = stochastic_force_coupling(p, gamma_rate=10.0)
    # momentum p = hbar P / (2 x0); d<p>/dt = hbar/(2 x0) * 2 gamma a = F
    assert p.hbar / (2 * c.x0) * 2 * 10.0 * a == pytest.approx(c.force, rel=1e-12)


def test_gaussian_window_povm_is_complete():
    fock = FockParams(20)
    windows = gaussian_window_povm(fock)
    total = sum(w.conj().T @ w for w in windows)
    assert np.max(np.abs(total - np.eye(20))) < 1e-12
    with pytest.raises(ValueError):
        gaussian_window_povm(fock, np.linspace(-10, 10, 6))
    with pytest.raises(ValueError):
        gaussian_window_povm(fock, np.linspace(-3, 3, 41))
    with pytest.raises(ValueError):
        gaussian_window_povm(fock, np.array([0.0, 1.0, 3.0]))


def test_atom_noise_model_modes():
    fock = FockParams(12)
    gen = atom_noise_model(0.3, fock)
    assert all(is_product_operator(E).is_product for _, E in gen.jumps)
    assert np.allclose(gen.decay_operator, np.eye(24), atol=1e-12)
    assert check_c_prime(gen).verdict
    op = atom_noise_model(0.3, fock, phase="operator")
    assert not check_c_prime(op).verdict
    with pytest.raises(ValueError):
        atom_noise_model(0.3, fock, phase="other")


def test_position_basis_diagonalizes_x():
    fock = FockParams(10)
    U = position_basis(fock)
    Xf = kron(QUBIT_ID, fock_operators(fock)["X"])
    D = U.conj().T @ Xf @ U
    assert np.allclose(D, np.diag(np.diag(D)), atol=1e-12)


def test_gravity_hamiltonian_and_free_motion():
    fock = FockParams(10)
    ops = fock_operators(fock)
    gen = gravity_hamiltonian(-0.18, 1.0, fock)
    assert gen.jumps == ()
    assert np.allclose(gen.H, kron(QUBIT_ID, ops["n"]) - 0.18 * kron(SIGMA_Z, ops["X"]))
    assert np.allclose(free_oscillator(2.0, fock), 2 * kron(QUBIT_ID, ops["n"]))


def test_locc_channel_preserves_qubit_populations():
    fock = FockParams(10)
    step = locc_channel(0.3, 0.3, 1e-2, fock)
    rho = kron(np.array([[0.7, 0.2], [0.2, 0.3]]), ket_to_dm(np.eye(10)[0]))
    out = apply(step, rho)
    sz = kron(SIGMA_Z, np.eye(10))
    assert abs(np.trace(out @ sz) - 0.4) < 1e-12
