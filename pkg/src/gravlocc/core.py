"""Dense linear algebra on the composite qubit x truncated-Fock space.

Operators and density matrices are plain complex ``numpy`` arrays of shape
``(2 * n_cut, 2 * n_cut)``, ordered qubit-major: index ``q * n_cut + n`` is
``|q> (x) |n>``.  The oscillator uses the dimensionless quadratures
``X = a + a^dag`` and ``P = i (a^dag - a)`` with ``hbar = 1`` and
``[X, P] = 2i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

QUBIT_DIM = 2

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
TAIL_TOL = 1e-8
TAIL_MARGIN = 5

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PROJ_0 = np.array([[1, 0], [0, 0]], dtype=complex)
PROJ_1 = np.array([[0, 0], [0, 1]], dtype=complex)
QUBIT_ID = np.eye(2, dtype=complex)


class TruncationError(ValueError):
    """A state puts too much population near the Fock cutoff."""


class InvalidStateError(ValueError):
    pass


@dataclass(frozen=True)
class FockParams:
    """Fock truncation and the zero-point length used for unit conversion."""

    n_cut: int = 40
    x0: float = 1.0

    def __post_init__(self):
        if int(self.n_cut) != self.n_cut or self.n_cut < 2:
            raise ValueError(f"n_cut must be an integer >= 2, got {self.n_cut}")
        if not self.x0 > 0:
            raise ValueError("x0 must be positive")

    @property
    def dim(self) -> int:
        return QUBIT_DIM * self.n_cut


def fock_dim(op: np.ndarray) -> int:
    """Oscillator dimension of a composite operator, checking its shape."""
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1] or op.shape[0] % QUBIT_DIM:
        raise ValueError(f"not a square qubit x Fock operator: shape {op.shape}")
    n = op.shape[0] // QUBIT_DIM
    if n < 2:
        raise ValueError("Fock dimension must be at least 2")
    return n


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Composite operator ``a (x) b`` from a qubit factor and a Fock factor."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (QUBIT_DIM, QUBIT_DIM):
        raise ValueError(f"qubit factor must be 2x2, got {a.shape}")
    if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] < 2:
        raise ValueError(f"Fock factor must be square N_c x N_c, got {b.shape}")
    return np.kron(a, b)


def embed_qubit(a: np.ndarray, n_cut: int) -> np.ndarray:
    return kron(a, np.eye(n_cut))


def embed_fock(b: np.ndarray) -> np.ndarray:
    return kron(QUBIT_ID, b)


def _subsystem_axis(keep) -> int:
    if keep in ("qubit", 0):
        return 0
    if keep in ("fock", "oscillator", 1):
        return 1
    raise ValueError(f"invalid subsystem id {keep!r}; use 'qubit' or 'fock'")


def partial_trace(rho: np.ndarray, keep="qubit") -> np.ndarray:
    """Reduced operator on ``keep`` ('qubit' or 'fock')."""
    axis = _subsystem_axis(keep)
    n = fock_dim(rho)
    r = np.asarray(rho).reshape(QUBIT_DIM, n, QUBIT_DIM, n)
    if axis == 0:
        return np.einsum("injn->ij", r)
    return np.einsum("iaib->ab", r)


def partial_transpose(rho: np.ndarray, subsystem="qubit") -> np.ndarray:
    """Transpose the indices of one subsystem."""
    axis = _subsystem_axis(subsystem)
    n = fock_dim(rho)
    r = np.asarray(rho).reshape(QUBIT_DIM, n, QUBIT_DIM, n)
    if axis == 0:
        r = r.transpose(2, 1, 0, 3)
    else:
        r = r.transpose(0, 3, 2, 1)
    return r.reshape(QUBIT_DIM * n, QUBIT_DIM * n)


def negativity(rho: np.ndarray) -> float:
    """Entanglement negativity ``(||rho^T_qubit||_1 - Tr rho) / 2``.

    Using ``Tr rho`` in place of 1 keeps the value non-negative when the
    trace carries round-off.
    """
    pt = partial_transpose(rho, "qubit")
    pt = 0.5 * (pt + dagger(pt))
    ev = np.linalg.eigvalsh(pt)
    return float(max(0.0, -ev[ev < 0].sum()))


def validate_density_matrix(rho: np.ndarray, positivity_tol: float = POSITIVITY_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the array."""
    rho = np.asarray(rho, dtype=complex)
    fock_dim(rho)
    herm = np.max(np.abs(rho - dagger(rho)))
    if herm > HERMITIAN_TOL:
        raise InvalidStateError(f"density matrix not Hermitian (residual {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise InvalidStateError(f"density matrix trace {tr.real:.12g} != 1")
    eigmin = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0]
    if eigmin < -positivity_tol:
        raise InvalidStateError(f"density matrix not positive (eigmin {eigmin:.3e})")
    return rho


def fock_operators(p: FockParams) -> dict:
    """Truncated ladder operators and quadratures on the oscillator alone.

    Returns a dict with keys ``a``, ``adag``, ``n``, ``X``, ``P``.
    """
    a = np.diag(np.sqrt(np.arange(1, p.n_cut)), k=1).astype(complex)
    adag = a.conj().T
    return {
        "a": a,
        "adag": adag,
        "n": np.diag(np.arange(p.n_cut)).astype(complex),
        "X": a + adag,
        "P": 1j * (adag - a),
    }


def tail_population(probs: np.ndarray, margin: int = TAIL_MARGIN) -> float:
    """Population on Fock levels above ``n_cut - margin``."""
    return float(np.sum(probs[len(probs) - margin + 1:]))


def coherent_ket(delta: complex, p: FockParams) -> np.ndarray:
    """Normalized truncated coherent state vector on the oscillator.

    Raises TruncationError when the untruncated state puts more than
    ``TAIL_TOL`` of its population above level ``n_cut - 5``.
    """
    delta = complex(delta)
    mean_n = abs(delta) ** 2
    tail = poisson.sf(p.n_cut - TAIL_MARGIN, mean_n) if mean_n > 0 else 0.0
    if tail >= TAIL_TOL:
        raise TruncationError(
            f"coherent state |delta|^2={mean_n:.3g} leaks {tail:.2e} above level "
            f"{p.n_cut - TAIL_MARGIN} (n_cut={p.n_cut})"
        )
    n = np.arange(p.n_cut)
    if delta == 0:
        psi = np.zeros(p.n_cut, dtype=complex)
        psi[0] = 1.0
        return psi
    logmag = n * np.log(abs(delta)) - 0.5 * gammaln(n + 1) - 0.5 * mean_n
    psi = np.exp(logmag) * np.exp(1j * n * np.angle(delta))
    return psi / np.linalg.norm(psi)


def coherent_state(delta: complex, p: FockParams) -> np.ndarray:
    """Coherent state density matrix on the oscillator."""
    psi = coherent_ket(delta, p)
    return np.outer(psi, psi.conj())


def fock_ket(k: int, p: FockParams) -> np.ndarray:
    psi = np.zeros(p.n_cut, dtype=complex)
    psi[k] = 1.0
    return psi


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def product_state(qubit_rho: np.ndarray, fock_rho: np.ndarray) -> np.ndarray:
    return kron(qubit_rho, fock_rho)


def plus_state() -> np.ndarray:
    return 0.5 * np.ones((2, 2), dtype=complex)


def expm_hermitian_generator(H: np.ndarray, t: float = 1.0, tol: float = 1e-10) -> np.ndarray:
    """``exp(-i H t)`` for Hermitian ``H`` through its eigendecomposition."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"generator must be square, got {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - dagger(H))) > tol * scale:
        raise ValueError("generator is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (H + dagger(H)))
    return (v * np.exp(-1j * w * t)) @ dagger(v)


def hermitian_function(H: np.ndarray, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix spectrally."""
    w, v = np.linalg.eigh(0.5 * (H + dagger(H)))
    return (v * f(w)) @ dagger(v)


def displacement(beta: complex, p: FockParams) -> np.ndarray:
    """Truncated displacement operator ``exp(beta a^dag - beta* a)``."""
    ops = fock_operators(p)
    gen = 1j * (beta * ops["adag"] - np.conj(beta) * ops["a"])
    return expm_hermitian_generator(gen, 1.0)


def expect(rho: np.ndarray, op: np.ndarray) -> complex:
    return complex(np.einsum("ij,ji->", rho, op))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state from a Ginibre matrix (Hilbert-Schmidt measure)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho)


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_product_state(n_cut: int, rng: np.random.Generator, fock_levels: int | None = None) -> np.ndarray:
    """Random pure product state; the oscillator part lives on the lowest levels."""
    levels = n_cut if fock_levels is None else min(fock_levels, n_cut)
    q = random_ket(2, rng)
    f = np.zeros(n_cut, dtype=complex)
    f[:levels] = random_ket(levels, rng)
    return kron(ket_to_dm(q), ket_to_dm(f))
