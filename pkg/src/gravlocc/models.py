"""Concrete qubit-oscillator models and the SI coupling pipeline.

Dynamics use dimensionless couplings in units where the simulation time
unit is arbitrary (``alpha_t``, ``beta_t`` carry ``1/sqrt(time)``).
SI quantities only enter through :func:`derive_couplings`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import KrausChannel, compose, product_channel
from .core import (PROJ_0, PROJ_1, QUBIT_ID, SIGMA_Z, FockParams, fock_operators, kron)
from .lindblad import LindbladGenerator

G_NEWTON = 6.67430e-11
HBAR = 1.054571817e-34


@dataclass(frozen=True)
class PhysicalParams:
    """SI experiment parameters.

    Defaults are illustrative: a caesium atom, a 1 mg oscillator at
    1 mrad/s, 1 mm away, with 0.1 mm arm separation.
    """

    G_N: float = G_NEWTON
    hbar: float = HBAR
    m_atom: float = 2.207e-25
    M_osc: float = 1e-6
    ell: float = 1e-4
    d: float = 1e-3
    omega: float = 1e-3
    n_atoms: int = 1

    def __post_init__(self):
        for name in ("G_N", "hbar", "m_atom", "M_osc", "ell", "d", "omega", "n_atoms"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.d > self.ell:
            raise ValueError("atom-oscillator distance d must exceed the arm separation ell")


@dataclass(frozen=True)
class DerivedCouplings:
    """Couplings derived from :class:`PhysicalParams`.

    ``alpha`` multiplies the SI position (1/(m sqrt(s))), ``beta`` the qubit
    Pauli operator (1/sqrt(s)).  The ``*_tilde`` values measure time in
    units of ``1/omega`` and position in units of ``x0``.
    """

    x0: float
    alpha: float
    beta: float
    gamma: float
    lam: float
    alpha_tilde: float
    beta_tilde: float
    lambda_tilde: float
    n_gamma: float
    force: float


def derive_couplings(p: PhysicalParams) -> DerivedCouplings:
    x0 = np.sqrt(p.hbar / (2 * p.M_osc * p.omega))
    root = np.sqrt(p.G_N / p.hbar) / p.d ** 1.5
    alpha = p.M_osc * root
    beta = p.m_atom * p.ell * root
    gamma = p.G_N * p.M_osc / (2 * p.omega * p.d ** 3)
    lam = 2 * p.G_N * p.m_atom * p.M_osc * p.ell * x0 / (p.hbar * p.d ** 3)
    return DerivedCouplings(
        x0=x0,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        lam=lam,
        alpha_tilde=alpha * x0 / np.sqrt(p.omega),
        beta_tilde=beta / np.sqrt(p.omega),
        lambda_tilde=lam / p.omega,
        n_gamma=p.n_atoms * gamma,
        force=p.G_N * p.m_atom * p.M_osc * p.ell / p.d ** 3,
    )


def stochastic_force_coupling(p: PhysicalParams, gamma_rate: float) -> float:
    """Dimensionless kick size that makes ``gamma_rate`` kicks reproduce the Newtonian force.

    With ``p = hbar P / (2 x0)`` the mean force ``F sigma_z`` requires
    ``2 gamma alpha_sf = 2 x0 F / hbar``.
    """
    c = derive_couplings(p)
    return c.x0 * c.force / (p.hbar * gamma_rate)


def _x_spectrum(fock: FockParams):
    X = fock_operators(fock)["X"]
    x, v = np.linalg.eigh(X)
    return x, v


def _fock_fn(x, v, values):
    return (v * values) @ v.conj().T


def position_basis(fock: FockParams) -> np.ndarray:
    """Composite unitary ``I (x) V`` whose columns diagonalize the truncated X."""
    return kron(QUBIT_ID, _x_spectrum(fock)[1])


def free_oscillator(omega: float, fock: FockParams) -> np.ndarray:
    return omega * kron(QUBIT_ID, fock_operators(fock)["n"])


def stochastic_force_model(alpha_sf: float, gamma_rate: float, fock: FockParams) -> LindbladGenerator:
    """Separable stochastic-force model: random momentum kicks conditioned on the qubit.

    Jumps ``|0><0| (x) exp(+i alpha X)`` and ``|1><1| (x) exp(-i alpha X)``
    at rate ``gamma_rate`` each; each kick shifts ``P`` by ``+-2 alpha``, so
    ``d<P>/dt = 2 gamma alpha <sigma_z>``.
    """
    if not gamma_rate > 0:
        raise ValueError("gamma_rate must be positive")
    x, v = _x_spectrum(fock)
    kick_up = _fock_fn(x, v, np.exp(1j * alpha_sf * x))
    kick_down = _fock_fn(x, v, np.exp(-1j * alpha_sf * x))
    jumps = ((gamma_rate, kron(PROJ_0, kick_up)), (gamma_rate, kron(PROJ_1, kick_down)))
    return LindbladGenerator(np.zeros((fock.dim, fock.dim), dtype=complex), jumps)


def default_z_grid() -> np.ndarray:
    return np.linspace(-10.0, 10.0, 81)


def gaussian_window_povm(fock: FockParams, z_grid=None, width: float = 1.0,
                         tol: float = 1e-6) -> list[np.ndarray]:
    """Position windows ``P(z) ~ exp(-(X - z)^2 / width^2)`` normalized to a POVM.

    The family is rescaled in the X eigenbasis so that
    ``sum_z P(z)^2 = I`` exactly.  The raw quadrature must already be
    complete to ``tol`` on the grid interior, otherwise the grid is too
    coarse and ValueError is raised.
    """
    z = default_z_grid() if z_grid is None else np.asarray(z_grid, dtype=float)
    if not width > 0:
        raise ValueError("width must be positive")
    if len(z) < 2:
        raise ValueError("z grid needs at least two points")
    dz = np.diff(z)
    if not np.allclose(dz, dz[0], rtol=1e-9, atol=0):
        raise ValueError("z grid must be uniform")
    dz = dz[0]
    x, v = _x_spectrum(fock)
    g = np.exp(-((x[None, :] - z[:, None]) / width) ** 2)
    s = np.sum(g ** 2, axis=0)
    if np.any(s < 1e-12):
        raise ValueError("z grid does not cover the position spectrum")
    interior = np.abs(x) <= np.max(np.abs(z)) - 4 * width
    if not np.any(interior):
        raise ValueError("z grid too narrow for the window width")
    exact = np.sqrt(np.pi / 2) * width / dz
    ripple = np.max(np.abs(s[interior] / exact - 1))
    if ripple > tol:
        raise ValueError(f"z grid too coarse: completeness residual {ripple:.2e} > {tol:g}")
    amps = g / np.sqrt(s)[None, :]
    return [_fock_fn(x, v, a) for a in amps]


def atom_noise_model(beta_tilde: float, fock: FockParams, z_grid=None, width: float = 1.0,
                     rate: float = 1.0, phase: str = "window") -> LindbladGenerator:
    """Stochastic force on the atom from position-resolved kicks.

    Each grid point contributes a jump ``exp(i beta z sigma_z) (x) P(z)``:
    the oscillator position is localized to a window near ``z`` and the
    qubit receives the phase that position would imprint.  With
    ``phase="operator"`` the jump is ``P(z) exp(i beta X sigma_z)`` instead,
    which is not a product operator.
    """
    z = default_z_grid() if z_grid is None else np.asarray(z_grid, dtype=float)
    windows = gaussian_window_povm(fock, z, width)
    if phase == "window":
        jumps = []
        for zk, w in zip(z, windows):
            q = np.diag([np.exp(1j * beta_tilde * zk), np.exp(-1j * beta_tilde * zk)])
            jumps.append((rate, kron(q, w)))
    elif phase == "operator":
        x, v = _x_spectrum(fock)
        coupling = (kron(PROJ_0, _fock_fn(x, v, np.exp(1j * beta_tilde * x)))
                    + kron(PROJ_1, _fock_fn(x, v, np.exp(-1j * beta_tilde * x))))
        jumps = [(rate, kron(QUBIT_ID, w) @ coupling) for w in windows]
    else:
        raise ValueError(f"unknown phase mode {phase!r}")
    return LindbladGenerator(np.zeros((fock.dim, fock.dim), dtype=complex), tuple(jumps),
                             position_basis(fock))


def _x_norm(fock: FockParams) -> float:
    return float(np.max(np.abs(_x_spectrum(fock)[0])))


def measure_feedback_channel(alpha_t: float, beta_t: float, dt: float, fock: FockParams,
                             measured: str, norm: float = 1 / np.sqrt(2)) -> KrausChannel:
    """Two-outcome measure-and-feedback channel.

    ``measured="fock"``:  ``K_pm = exp(+-i beta sigma_z s) [cos(alpha X s) +- sin(alpha X s)] * norm``
    ``measured="qubit"``: ``K_pm = exp(+-i alpha X s) [cos(beta sigma_z s) +- sin(beta sigma_z s)] * norm``
    with ``s = sqrt(dt)``.  Only ``norm = 1/sqrt(2)`` is trace preserving.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    s = np.sqrt(dt)
    x, v = _x_spectrum(fock)
    factors = []
    for sign in (1, -1):
        if measured == "fock":
            q = np.diag(np.exp(sign * 1j * beta_t * s * np.array([1.0, -1.0])))
            f = _fock_fn(x, v, (np.cos(alpha_t * x * s) + sign * np.sin(alpha_t * x * s)) * norm)
        elif measured == "qubit":
            zs = beta_t * s * np.array([1.0, -1.0])
            q = np.diag((np.cos(zs) + sign * np.sin(zs)) * norm).astype(complex)
            f = _fock_fn(x, v, np.exp(sign * 1j * alpha_t * x * s))
        else:
            raise ValueError(f"measured must be 'fock' or 'qubit', got {measured!r}")
        factors.append((q, f))
    return product_channel(factors)


def locc_channel(alpha_t: float, beta_t: float, dt: float, fock: FockParams) -> KrausChannel:
    """Separable channel ``L_ab = K'_a K_b`` built from two measure-and-feedback steps."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    arg = abs(alpha_t) * np.sqrt(dt) * _x_norm(fock)
    if arg >= np.pi / 2:
        raise ValueError(f"alpha*sqrt(dt)*||X|| = {arg:.3g} must stay below pi/2")
    inner = measure_feedback_channel(alpha_t, beta_t, dt, fock, "fock")
    outer = measure_feedback_channel(alpha_t, beta_t, dt, fock, "qubit")
    return compose(outer, inner)


def locc_lindblad(alpha_t: float, beta_t: float, fock: FockParams) -> LindbladGenerator:
    """Continuous-time limit of :func:`locc_channel`.

    ``H = -2 alpha beta sigma_z (x) X`` with jumps ``i sqrt(2) alpha X`` and
    ``sqrt(2) beta sigma_z`` at unit rate.
    """
    ops = fock_operators(fock)
    X = ops["X"]
    H = -2 * alpha_t * beta_t * kron(SIGMA_Z, X)
    jumps = ((1.0, 1j * np.sqrt(2) * alpha_t * kron(QUBIT_ID, X)),
             (1.0, np.sqrt(2) * beta_t * kron(SIGMA_Z, np.eye(fock.n_cut))))
    return LindbladGenerator(H, jumps)


def gravity_hamiltonian(lambda_c: float, omega_sim: float, fock: FockParams) -> LindbladGenerator:
    """Entangling model ``H = omega n + lambda sigma_z (x) X`` with no jumps."""
    X = fock_operators(fock)["X"]
    H = free_oscillator(omega_sim, fock) + lambda_c * kron(SIGMA_Z, X)
    return LindbladGenerator(H)
