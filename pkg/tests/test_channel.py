import numpy as np
import pytest

from gravlocc import channel as ch
from gravlocc.core import (SIGMA_X, SIGMA_Z, FockParams, expm_hermitian_generator, kron,
                           negativity, random_density_matrix, random_product_state,
                           random_unitary)
from gravlocc.lindblad import superoperator
from gravlocc.models import locc_channel, locc_lindblad, measure_feedback_channel


def _apply_loop(kraus, rho):
    out = np.zeros_like(rho)
    for k in kraus:
        out += k @ rho @ k.conj().T
    return out


def test_vec_convention():
    rng = np.random.default_rng(0)
    A, B, R = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
    assert np.allclose(ch.vec(A @ R @ B), np.kron(B.T, A) @ ch.vec(R))
    assert np.allclose(ch.unvec(ch.vec(R), 4), R)


def test_apply_matches_loop_and_preserves_trace():
    fock = FockParams(6)
    c = locc_channel(0.3, 0.2, 0.01, fock)
    rng = np.random.default_rng(1)
    rho = random_density_matrix(12, rng)
    out = ch.apply(c, rho)
    assert np.allclose(out, _apply_loop(c.kraus, rho), atol=1e-14)
    assert abs(np.trace(out) - 1) < 1e-12
    assert ch.validate(c) <= 1e-10
    with pytest.raises(ch.ChannelError):
        ch.apply(c, np.eye(4) / 4)


def test_printed_half_normalization_is_rejected():
    fock = FockParams(6)
    bad = measure_feedback_channel(0.3, 0.2, 0.01, fock, "fock", norm=0.5)
    # sum K^dag K = I / 2 with the 1/2 prefactor
    assert abs(ch.validate(bad) - 0.5) < 1e-12
    with pytest.raises(ch.ChannelError):
        ch.apply(bad, np.eye(12) / 12)
    with pytest.raises(ch.ChannelError):
        ch.compose(bad, bad)


def test_kraus_channel_shape_and_product_form_checks():
    with pytest.raises(ch.ChannelError):
        ch.KrausChannel(())
    with pytest.raises(ch.ChannelError):
        ch.KrausChannel((np.eye(4), np.eye(6)))
    with pytest.raises(ch.ChannelError):
        ch.KrausChannel((np.eye(4),), ((SIGMA_Z, np.eye(2)),))
    good = ch.product_channel([(SIGMA_X, np.eye(3))])
    assert good.product_form is not None and len(good) == 1


def test_compose_order_and_product_form():
    fock = FockParams(5)
    rng = np.random.default_rng(2)
    U = ch.unitary_channel(random_unitary(10, rng))
    V = ch.unitary_channel(random_unitary(10, rng))
    rho = random_density_matrix(10, rng)
    assert np.allclose(ch.apply(ch.compose(U, V), rho), ch.apply(U, ch.apply(V, rho)))
    c = locc_channel(0.2, 0.3, 0.01, fock)
    assert c.product_form is not None and len(c) == 4
    assert ch.compose(c, U).product_form is None


def test_choi_matches_definition():
    rng = np.random.default_rng(3)
    c = ch.mix_kraus(locc_channel(0.3, 0.2, 0.02, FockParams(2)), random_unitary(4, rng))
    d = c.dim
    ref = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d))
            E[i, j] = 1
            ref += np.kron(E, ch.apply(c, E))
    assert np.allclose(ch.choi(c), ref, atol=1e-14)
    assert abs(np.trace(ch.choi(c)) - d) < 1e-12


def test_identity_channel():
    rho = random_density_matrix(6, np.random.default_rng(4))
    assert np.allclose(ch.apply(ch.identity_channel(3), rho), rho)


def test_mixing_invariance_and_product_loss():
    c = locc_channel(0.3, 0.2, 0.01, FockParams(5))
    rng = np.random.default_rng(5)
    for _ in range(5):
        m = ch.mix_kraus(c, random_unitary(4, rng))
        assert ch.channels_equal(m, c)
        assert m.product_form is None
        assert not all(ch.is_product_operator(k).is_product for k in m.kraus)
    with pytest.raises(ch.ChannelError):
        ch.mix_kraus(c, np.ones((4, 4)))
    with pytest.raises(ch.ChannelError):
        ch.mix_kraus(c, np.eye(3))


def test_product_operator_ranks():
    rng = np.random.default_rng(6)
    B = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    C = rng.normal(size=(5, 5))
    r = ch.is_product_operator(kron(SIGMA_Z, B))
    assert r.is_product and r.schmidt_rank == 1 and r.gap < 1e-12
    r = ch.is_product_operator(kron(SIGMA_Z, B) + kron(SIGMA_X, C))
    assert not r.is_product and r.schmidt_rank == 2
    r = ch.is_product_operator(np.zeros((10, 10)))
    assert r.is_product and r.schmidt_rank == 0
    # a CNOT-like controlled unitary has operator Schmidt rank 2
    U = random_unitary(5, rng)
    ctrl = kron(np.diag([1, 0]), np.eye(5)) + kron(np.diag([0, 1]), U)
    assert ch.is_product_operator(ctrl).schmidt_rank == 2


def test_locc_channel_kraus_are_products():
    c = locc_channel(0.3, 0.3, 1e-3, FockParams(10))
    assert all(ch.is_product_operator(k).is_product for k in c.kraus)


def test_locc_channel_never_entangles():
    fock = FockParams(10)
    step = locc_channel(0.4, 0.4, 1e-2, fock)
    rng = np.random.default_rng(7)
    for _ in range(3):
        rho = random_product_state(10, rng, fock_levels=4)
        for _ in range(50):
            rho = ch.apply(step, rho)
            assert negativity(rho) <= 1e-8


def test_locc_channel_argument_guard():
    with pytest.raises(ValueError):
        locc_channel(0.3, 0.2, -1e-3, FockParams(5))
    with pytest.raises(ValueError):
        locc_channel(5.0, 0.2, 0.5, FockParams(30))


def test_extract_generator_identity_and_unitary():
    rng = np.random.default_rng(8)
    A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    H = A + A.conj().T

    def family(dt):
        return ch.unitary_channel(expm_hermitian_generator(H, dt))

    target = -1j * (np.kron(np.eye(6), H) - np.kron(H.T, np.eye(6)))
    G = ch.extract_generator(family, 1e-6)
    assert np.max(np.abs(G - target)) < 1e-4
    assert np.allclose(ch.extract_generator(lambda dt: ch.identity_channel(3), 0.1), 0)


def test_generator_residual_paths_agree():
    fock = FockParams(4)
    gen = locc_lindblad(0.3, 0.2, fock)

    def family(dt):
        return locc_channel(0.3, 0.2, dt, fock)

    r_mat = ch.generator_residual(family, 1e-4, superoperator(gen))
    r_free = ch.generator_residual(family, 1e-4, gen, chunk=7)
    G = ch.extract_generator(family, 1e-4, chunk=5)
    assert abs(r_mat - r_free) < 1e-12
    assert abs(r_mat - np.max(np.abs(G - superoperator(gen)))) < 1e-12


def test_convergence_study_slope_and_guards():
    fock = FockParams(8)

    def family(dt):
        return locc_channel(0.3, 0.2, dt, fock)

    gen = locc_lindblad(0.3, 0.2, fock)
    res, slope = ch.convergence_study(family, gen, [1e-3, 1e-4, 1e-5, 1e-6])
    assert slope > 0.9 and res[-1] < 1e-4
    assert np.all(np.diff(res) < 0)
    with pytest.raises(ValueError):
        ch.convergence_study(family, gen, [1e-3, 1e-4, 1e-5])
    with pytest.raises(ValueError):
        ch.convergence_study(family, gen, [1e-6, 1e-5, 1e-4, 1e-3])
    with pytest.raises(ValueError):
        ch.convergence_study(lambda dt: ch.identity_channel(2), np.zeros((16, 16)),
                             [1e-3, 1e-4, 1e-5, 1e-6])


def test_fit_log_slope():
    xs = np.array([1e-1, 1e-2, 1e-3])
    assert abs(ch.fit_log_slope(xs, 3 * xs ** 2) - 2) < 1e-12


def test_product_rank_scale_invariant():
    rng = np.random.default_rng(9)
    A = kron(SIGMA_Z, rng.normal(size=(4, 4))) + kron(SIGMA_X, rng.normal(size=(4, 4)))
    for c in (1e-8, -3.0, 2j, 1e6):
        assert ch.is_product_operator(c * A).schmidt_rank == 2
        assert ch.is_product_operator(c * kron(SIGMA_X, np.eye(4))).schmidt_rank == 1


def test_product_form_channel_keeps_products_separable():
    c = locc_channel(0.4, 0.3, 5e-2, FockParams(10))
    rng = np.random.default_rng(10)
    for _ in range(20):
        assert negativity(ch.apply(c, random_product_state(10, rng, fock_levels=5))) <= 1e-9
