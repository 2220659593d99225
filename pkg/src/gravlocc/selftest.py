"""Quick invariant battery run by ``gravlocc --scenario=selftest``."""
from __future__ import annotations

import numpy as np

from . import channel as ch
from .core import (SIGMA_Z, FockParams, embed_qubit, expm_hermitian_generator, kron,
                   negativity, partial_trace, random_density_matrix, random_product_state,
                   random_unitary)
from .experiments import (ProtocolConfig, analytic_boosted_rate, boosted_protocol,
                          heating_series, unboosted_revival)
from .lindblad import (check_c_prime, damped_oscillator, evolve, rhs, step_halving_order,
                       superoperator)
from .models import (PhysicalParams, atom_noise_model, derive_couplings, locc_channel,
                     locc_lindblad, stochastic_force_model)

SEED = 20240521


def _couplings():
    c = derive_couplings(PhysicalParams(M_osc=1e-6, omega=1e-3, d=1e-3))
    assert 3.0e-5 <= c.gamma <= 3.5e-5, c.gamma


def _trace_duality():
    rng = np.random.default_rng(SEED)
    for _ in range(20):
        rho = random_density_matrix(12, rng)
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        lhs = np.trace(partial_trace(rho, "qubit") @ M)
        assert abs(lhs - np.trace(rho @ kron(M, np.eye(6)))) < 1e-10


def _expm_unitary():
    rng = np.random.default_rng(SEED)
    for _ in range(10):
        A = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        U = expm_hermitian_generator(A + A.conj().T, 0.7)
        assert np.max(np.abs(U.conj().T @ U - np.eye(10))) < 1e-10


def _locc_generator():
    f = FockParams(8)
    res, slope = ch.convergence_study(lambda dt: locc_channel(0.3, 0.2, dt, f),
                                      superoperator(locc_lindblad(0.3, 0.2, f)),
                                      [1e-3, 1e-4, 1e-5, 1e-6])
    assert slope >= 0.5 and res[-1] < 1e-4, (slope, res)


def _locc_separable():
    f = FockParams(10)
    step = locc_channel(0.3, 0.3, 1e-3, f)
    rng = np.random.default_rng(SEED)
    rho = random_product_state(10, rng, fock_levels=4)
    for _ in range(100):
        rho = ch.apply(step, rho)
        assert negativity(rho) <= 1e-8


def _mixing():
    f = FockParams(5)
    base = locc_channel(0.3, 0.2, 0.01, f)
    rng = np.random.default_rng(SEED)
    mixed = ch.mix_kraus(base, random_unitary(4, rng))
    assert np.max(np.abs(ch.choi(mixed) - ch.choi(base))) <= 1e-10
    assert not all(ch.is_product_operator(k).is_product for k in mixed.kraus)


def _predicate():
    f = FockParams(8)
    assert check_c_prime(stochastic_force_model(0.2, 1.0, f)).verdict
    assert check_c_prime(atom_noise_model(0.3, f)).verdict
    rep = check_c_prime(locc_lindblad(0.3, 0.2, f))
    assert not rep.verdict and rep.witnesses == ["H"]


def _sigma_z():
    f = FockParams(8)
    sz = embed_qubit(SIGMA_Z, 8)
    rng = np.random.default_rng(SEED)
    rho = random_density_matrix(16, rng)
    for gen in (locc_lindblad(0.3, 0.2, f), stochastic_force_model(0.2, 1.0, f),
                atom_noise_model(0.3, f)):
        assert abs(np.trace(sz @ rhs(gen, rho))) < 1e-9


def _rk4_order():
    gen = damped_oscillator()
    psi = np.zeros(16, dtype=complex)
    psi[[2, 5, 10, 14]] = 0.5
    rho0 = np.outer(psi, psi.conj())
    # T is a whole number of steps for every dt; errors stay above roundoff
    _, slope = step_halving_order(gen, rho0, 1.5, [0.015, 0.0075, 0.00375, 0.001875])
    assert slope >= 3.5, slope


def _revival():
    s = unboosted_revival(ProtocolConfig(model="gravity", n_cut=20, alpha_t=0.3, beta_t=0.3))
    assert s.visibility[-1] >= 1 - 1e-5


def _heating():
    r = heating_series(ProtocolConfig(model="locc", alpha_t=0.3, n_cut=25, t_max=1.0))
    assert abs(r.fitted_dn_dt / (2 * 0.3 ** 2) - 1) < 0.01


def _boosted():
    r = boosted_protocol(ProtocolConfig(model="locc", alpha_t=0.3, delta=1.0, n_cut=25))
    assert abs(r.fitted_decay / r.oracle_rate - 1) < 0.02
    assert abs(r.oracle_rate / analytic_boosted_rate(0.3, 0.3, 1.0) - 1) < 0.02


def _trace_drift():
    f = FockParams(10)
    rho = random_product_state(10, np.random.default_rng(SEED), fock_levels=3)
    traj = evolve(locc_lindblad(0.3, 0.2, f), rho, 1.0, 1e-3)
    assert np.max(np.abs(np.trace(traj.states, axis1=1, axis2=2) - 1)) <= 1e-8


CHECKS = [
    ("coupling benchmark", _couplings),
    ("partial-trace duality", _trace_duality),
    ("expm unitarity", _expm_unitary),
    ("channel-to-Lindblad convergence", _locc_generator),
    ("LOCC channel stays separable", _locc_separable),
    ("Kraus mixing keeps Choi, breaks product form", _mixing),
    ("separability predicate", _predicate),
    ("sigma_z conservation", _sigma_z),
    ("RK4 step-halving order", _rk4_order),
    ("gravity revival", _revival),
    ("heating law", _heating),
    ("boosted dephasing rate", _boosted),
    ("trace drift", _trace_drift),
]


def run_selftest(out=print) -> bool:
    ok = True
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as exc:  # report every failure, keep going
            ok = False
            out(f"FAIL {name}: {exc!r}")
        else:
            out(f"PASS {name}")
    return ok
