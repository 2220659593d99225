"""Lindblad generators, the local-separability predicate and an RK4 integrator."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .channel import is_product_operator
from .core import QUBIT_DIM, dagger, expect, fock_dim

HERMITIAN_TOL = 1e-10
LOCALITY_TOL = 1e-10
STABILITY_LIMIT = 0.1
TRACE_DRIFT_TOL = 1e-8
POSITIVITY_FAIL = -1e-7
IMAG_TOL = 1e-9


class StabilityError(ValueError):
    pass


class PositivityError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    """``drho/dt = -i[H, rho] + sum_k r_k (E_k rho E_k^dag - {E_k^dag E_k, rho}/2)``.

    ``jumps`` is a sequence of ``(rate, E)`` pairs; rates stay separate from
    the operators and are folded in as ``sqrt(rate) * E`` on assembly.
    ``jump_basis`` optionally names a unitary ``U`` in which every jump is
    diagonal; the integrator then evaluates the jump sum as an elementwise
    kernel, which pays off for large jump families.
    """

    H: np.ndarray
    jumps: tuple = field(default_factory=tuple)
    jump_basis: np.ndarray | None = None

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        fock_dim(H)
        scale = max(1.0, float(np.max(np.abs(H))))
        if np.max(np.abs(H - dagger(H))) > HERMITIAN_TOL * scale:
            raise ValueError("Hamiltonian is not Hermitian")
        jumps = []
        for rate, op in self.jumps:
            op = np.asarray(op, dtype=complex)
            if op.shape != H.shape:
                raise ValueError(f"jump operator shape {op.shape} does not match H {H.shape}")
            if rate < 0:
                raise ValueError(f"jump rates must be non-negative, got {rate}")
            jumps.append((float(rate), op))
        object.__setattr__(self, "H", 0.5 * (H + dagger(H)))
        object.__setattr__(self, "jumps", tuple(jumps))
        if self.jump_basis is not None:
            U = np.asarray(self.jump_basis, dtype=complex)
            if U.shape != H.shape or np.max(np.abs(dagger(U) @ U - np.eye(len(U)))) > 1e-10:
                raise ValueError("jump_basis must be a unitary of the system dimension")
            object.__setattr__(self, "jump_basis", U)
            self.jump_kernel  # validates diagonality

    @cached_property
    def jump_kernel(self) -> np.ndarray | None:
        """``K_ij = sum_k d_k[i] conj(d_k[j])`` for the diagonals ``d_k`` of ``U^dag L_k U``."""
        U = self.jump_basis
        if U is None or not self.jumps:
            return None
        rotated = dagger(U)[None] @ self.scaled_jumps @ U[None]
        diag = np.einsum("kii->ki", rotated)
        off = rotated.copy()
        idx = np.arange(self.dim)
        off[:, idx, idx] = 0
        scale = max(1.0, float(np.max(np.abs(diag))))
        if np.max(np.abs(off)) > 1e-10 * scale:
            raise ValueError("jumps are not diagonal in jump_basis")
        return np.einsum("ki,kj->ij", diag, diag.conj())

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def n_cut(self) -> int:
        return self.dim // QUBIT_DIM

    @cached_property
    def scaled_jumps(self) -> np.ndarray:
        if not self.jumps:
            return np.zeros((0, self.dim, self.dim), dtype=complex)
        return np.stack([np.sqrt(r) * op for r, op in self.jumps])

    @cached_property
    def stacked_jumps_dagger(self) -> np.ndarray:
        L = self.scaled_jumps
        k, d, _ = L.shape
        return dagger(L.transpose(1, 0, 2).reshape(d, k * d))

    @cached_property
    def decay_operator(self) -> np.ndarray:
        """``sum_k r_k E_k^dag E_k``."""
        L = self.scaled_jumps
        return np.einsum("kji,kjl->il", L.conj(), L)

    @cached_property
    def effective_hamiltonian(self) -> np.ndarray:
        return self.H - 0.5j * self.decay_operator

    @cached_property
    def rate_bound(self) -> float:
        """Upper bound on the modulus of the generator's eigenvalues."""
        w = np.linalg.eigvalsh(self.H)
        spread = float(w[-1] - w[0])
        decay = float(np.linalg.norm(self.decay_operator, 2)) if self.jumps else 0.0
        return spread + 2.0 * decay

    def plus(self, H_extra=None, jumps=()) -> "LindbladGenerator":
        H = self.H if H_extra is None else self.H + H_extra
        basis = self.jump_basis if not jumps else None
        return LindbladGenerator(H, self.jumps + tuple(jumps), basis)

    def without_hamiltonian(self) -> "LindbladGenerator":
        return LindbladGenerator(np.zeros_like(self.H), self.jumps, self.jump_basis)

    def superoperator_columns(self, cols: np.ndarray) -> np.ndarray:
        """Rows ``vec(rhs(E_c))`` for column-stacked matrix units ``E_c``."""
        d = self.dim
        units = np.zeros((len(cols), d, d), dtype=complex)
        units[np.arange(len(cols)), cols % d, cols // d] = 1.0
        out = _rhs_batch(self, units)
        return out.transpose(0, 2, 1).reshape(len(cols), d * d)


def _rhs_batch(gen: LindbladGenerator, rho: np.ndarray) -> np.ndarray:
    Heff = gen.effective_hamiltonian
    out = -1j * (Heff @ rho - rho @ dagger(Heff))
    L = gen.scaled_jumps
    if len(L):
        Ld = dagger(L)
        for k in range(len(L)):
            out += L[k] @ rho @ Ld[k]
    return out


def rhs(gen: LindbladGenerator, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != gen.H.shape:
        raise ValueError(f"state shape {rho.shape} does not match generator {gen.H.shape}")
    Heff = gen.effective_hamiltonian
    out = -1j * (Heff @ rho - rho @ dagger(Heff))
    L = gen.scaled_jumps
    if len(L):
        k, d, _ = L.shape
        # sum_k L_k rho L_k^dag as one GEMM: [L_1 rho ... L_k rho] [L_1 ... L_k]^dag
        left = (L @ rho).transpose(1, 0, 2).reshape(d, k * d)
        right = L.transpose(1, 0, 2).reshape(d, k * d)
        out += left @ dagger(right)
    return out


def _rhs_hermitian(gen: LindbladGenerator, rho: np.ndarray) -> np.ndarray:
    # rho Heff^dag = (Heff rho)^dag for Hermitian rho
    A = gen.effective_hamiltonian @ rho
    out = -1j * (A - dagger(A))
    K = gen.jump_kernel
    if K is not None:
        U = gen.jump_basis
        out += U @ (K * (dagger(U) @ rho @ U)) @ dagger(U)
        return out
    L = gen.scaled_jumps
    if len(L):
        k, d, _ = L.shape
        left = (L @ rho).transpose(1, 0, 2).reshape(d, k * d)
        out += left @ gen.stacked_jumps_dagger
    return out


def superoperator(gen: LindbladGenerator) -> np.ndarray:
    """``D^2 x D^2`` matrix ``G`` with ``G vec(rho) = vec(rhs(gen, rho))``."""
    d = gen.dim
    eye = np.eye(d)
    Heff = gen.effective_hamiltonian
    G = -1j * (np.kron(eye, Heff) - np.kron(Heff.conj(), eye))
    for L in gen.scaled_jumps:
        G += np.kron(L.conj(), L)
    return G


def local_projection(op: np.ndarray) -> np.ndarray:
    """Hilbert-Schmidt projection onto ``span{M (x) I, I (x) N}``."""
    n = fock_dim(op)
    r = np.asarray(op).reshape(QUBIT_DIM, n, QUBIT_DIM, n)
    qubit_part = np.einsum("injn->ij", r) / n
    fock_part = np.einsum("iaib->ab", r) / QUBIT_DIM
    scalar = np.trace(op) / (QUBIT_DIM * n)
    return (np.kron(qubit_part, np.eye(n)) + np.kron(np.eye(QUBIT_DIM), fock_part)
            - scalar * np.eye(QUBIT_DIM * n))


def locality_residual(op: np.ndarray) -> float:
    """Distance (max norm) of ``op`` from the sums of one-sided operators."""
    return float(np.max(np.abs(op - local_projection(op))))


def is_local_sum(op: np.ndarray, tol: float = LOCALITY_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(op))))
    return locality_residual(op) <= tol * scale


@dataclass(frozen=True)
class SeparabilityReport:
    h_is_product: bool
    jumps_all_product: bool
    completeness_local: bool
    verdict: bool
    witnesses: list
    h_schmidt_rank: int = 0


def check_c_prime(gen: LindbladGenerator) -> SeparabilityReport:
    """Decide whether a generator is separable in the local Lindblad sense.

    ``h_is_product`` asks whether H is a sum of one-sided terms
    ``M (x) I + I (x) N``; a rank-one operator such as ``sigma_z (x) X``
    factorizes but couples both sides and fails.  Every jump must have
    operator Schmidt rank <= 1 and ``sum_k r_k E_k^dag E_k`` must be a sum
    of one-sided terms.  Witnesses name the offending pieces: ``"H"``,
    ``"jump[k]"`` or ``"completeness"``.
    """
    witnesses = []
    h_local = is_local_sum(gen.H)
    if not h_local:
        witnesses.append("H")
    jumps_ok = True
    for k, (_, op) in enumerate(gen.jumps):
        if not is_product_operator(op).is_product:
            jumps_ok = False
            witnesses.append(f"jump[{k}]")
    comp_local = is_local_sum(gen.decay_operator) if gen.jumps else True
    if not comp_local:
        witnesses.append("completeness")
    return SeparabilityReport(
        h_is_product=h_local,
        jumps_all_product=jumps_ok,
        completeness_local=comp_local,
        verdict=h_local and jumps_ok and comp_local,
        witnesses=witnesses,
        h_schmidt_rank=is_product_operator(gen.H).schmidt_rank,
    )


class Trajectory(NamedTuple):
    times: np.ndarray
    states: np.ndarray


def default_dt(*rates: float) -> float:
    return 1e-3 / max([abs(r) for r in rates] + [1.0])


def evolve(gen: LindbladGenerator, rho0: np.ndarray, t_max: float, dt: float | None = None,
           sample_every: int = 1) -> Trajectory:
    """Integrate the master equation with fixed-step classical RK4.

    The step is shrunk so that an integer number of steps lands on
    ``t_max``.  States are Hermitized after each step, never clipped.
    Every ``sample_every``-th state and the final one are stored and
    checked: trace drift above 1e-8 or an eigenvalue below -1e-7 raises.
    When ``dt`` is None it defaults to ``1e-3``, reduced further if the
    stability guard needs it.
    """
    rho = np.array(rho0, dtype=complex)
    if rho.shape != gen.H.shape:
        raise ValueError(f"state shape {rho.shape} does not match generator {gen.H.shape}")
    if t_max < 0:
        raise ValueError("t_max must be non-negative")
    bound = gen.rate_bound
    if dt is None:
        dt = default_dt()
        if bound > 0:
            dt = min(dt, 0.5 * STABILITY_LIMIT / bound)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n_steps = int(np.ceil(t_max / dt - 1e-9)) if t_max > 0 else 0
    h = t_max / n_steps if n_steps else 0.0
    if h * bound >= STABILITY_LIMIT:
        raise StabilityError(
            f"dt * rate bound = {h * bound:.3g} >= {STABILITY_LIMIT}; reduce dt below "
            f"{STABILITY_LIMIT / bound:.3g}"
        )
    sample_every = max(1, int(sample_every))
    tr0 = np.trace(rho).real
    times, states = [0.0], [rho.copy()]
    for step in range(1, n_steps + 1):
        k1 = _rhs_hermitian(gen, rho)
        k2 = _rhs_hermitian(gen, rho + 0.5 * h * k1)
        k3 = _rhs_hermitian(gen, rho + 0.5 * h * k2)
        k4 = _rhs_hermitian(gen, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + dagger(rho))
        if step % sample_every == 0 or step == n_steps:
            _check_state(rho, tr0, step * h)
            times.append(step * h)
            states.append(rho.copy())
    return Trajectory(np.array(times), np.array(states))


def _check_state(rho, tr0, t):
    drift = abs(np.trace(rho).real - tr0)
    if drift > TRACE_DRIFT_TOL:
        raise PositivityError(f"trace drift {drift:.3e} at t={t:.6g}")
    eigmin = np.linalg.eigvalsh(rho)[0]
    if eigmin < POSITIVITY_FAIL:
        raise PositivityError(
            f"state lost positivity (eigmin {eigmin:.3e}) at t={t:.6g}; "
            "check the Fock cutoff or the step size"
        )


def expectation_series(traj: Trajectory, observable: np.ndarray) -> np.ndarray:
    """``Tr(rho(t) O)`` along a trajectory, as a real array."""
    O = np.asarray(observable, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(O))))
    if np.max(np.abs(O - dagger(O))) > HERMITIAN_TOL * scale:
        raise ValueError("observable is not Hermitian")
    vals = np.einsum("tij,ji->t", traj.states, O)
    imag = np.max(np.abs(vals.imag)) if len(vals) else 0.0
    if imag > IMAG_TOL * scale:
        raise ValueError(f"expectation has imaginary residue {imag:.3e}")
    return vals.real


def rhs_expectation(gen: LindbladGenerator, rho: np.ndarray, observable: np.ndarray) -> float:
    """Instantaneous ``d<O>/dt`` from the exact right-hand side."""
    return expect(rhs(gen, rho), observable).real


def damped_oscillator(n_cut: int = 8, omega: float = 0.5, kappa: float = 0.2) -> LindbladGenerator:
    """Reference problem ``H = omega n`` with loss ``sqrt(kappa) a`` on both qubit branches."""
    a = np.diag(np.sqrt(np.arange(1, n_cut)), k=1).astype(complex)
    eye2 = np.eye(QUBIT_DIM)
    H = omega * np.kron(eye2, a.conj().T @ a)
    return LindbladGenerator(H, ((kappa, np.kron(eye2, a)),))


def step_halving_order(gen: LindbladGenerator, rho0: np.ndarray, t_max: float,
                       dts: Sequence[float]) -> tuple[np.ndarray, float]:
    """Differences ``max |rho(T; dt) - rho(T; dt/2)|`` and their log-log slope."""
    diffs = []
    for dt in dts:
        full = evolve(gen, rho0, t_max, dt, sample_every=10**9).states[-1]
        half = evolve(gen, rho0, t_max, dt / 2, sample_every=10**9).states[-1]
        diffs.append(float(np.max(np.abs(full - half))))
    diffs = np.array(diffs)
    slope = float(np.polyfit(np.log(dts), np.log(diffs), 1)[0])
    return diffs, slope
