"""End-to-end protocol simulations: revival, boosted dephasing, heating, entanglement."""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple

import numpy as np

from .core import (PROJ_0, PROJ_1, FockParams, TruncationError, coherent_ket, displacement,
                   fock_operators, ket_to_dm, kron, negativity, partial_trace, plus_state,
                   tail_population)
from .lindblad import LindbladGenerator, Trajectory, default_dt, evolve, rhs
from .models import (atom_noise_model, free_oscillator, gravity_hamiltonian, locc_lindblad,
                     stochastic_force_model)

MODELS = ("gravity", "locc", "stochastic-force", "atom-noise")
VISIBILITY_FLOOR = 1e-6
MIN_FIT_SAMPLES = 5
SERIES_COLUMNS = ("t", "visibility", "negativity", "mean_n", "mean_X", "mean_P", "trace_error")


@dataclass
class ProtocolConfig:
    """Protocol settings in simulation units.

    ``alpha_t``/``beta_t`` are the oscillator/qubit noise couplings; the
    stochastic-force model reads ``alpha_t`` as its kick size and
    ``gamma_rate`` as the kick rate, the atom-noise model reads ``beta_t``
    and ``gamma_rate``.  ``t_max=None`` means one oscillator period where
    that makes sense.
    """

    model: str = "gravity"
    alpha_t: float = 0.3
    beta_t: float = 0.3
    omega_sim: float = 1.0
    delta: complex = 1.0
    t_max: float | None = None
    dt: float | None = None
    n_cut: int = 40
    n_atoms: int = 1
    gamma_rate: float = 1.0
    samples: int = 200

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")

    @property
    def fock(self) -> FockParams:
        return FockParams(self.n_cut)

    @property
    def lambda_c(self) -> float:
        """Coherent coupling of the noise model's Hamiltonian, ``-2 alpha beta``."""
        return -2.0 * self.alpha_t * self.beta_t

    @property
    def period(self) -> float:
        if self.omega_sim <= 0:
            raise ValueError("a positive omega_sim is needed to define the oscillator period")
        return 2 * np.pi / self.omega_sim


@dataclass
class TimeSeries:
    t: np.ndarray
    visibility: np.ndarray
    negativity: np.ndarray
    mean_n: np.ndarray
    mean_X: np.ndarray
    mean_P: np.ndarray
    trace_error: np.ndarray
    meta: dict = field(default_factory=dict)

    def rows(self) -> np.ndarray:
        return np.column_stack([getattr(self, c) for c in SERIES_COLUMNS])

    def check(self):
        """Column invariants; raises AssertionError on violation."""
        assert np.all(self.visibility >= 0) and np.all(self.visibility <= 1 + 1e-9)
        assert np.all(self.negativity >= -1e-10)
        assert np.all(self.trace_error <= 1e-8)
        return self


def visibility(rho: np.ndarray) -> float:
    """Qubit fringe contrast ``2 |<0| Tr_osc rho |1>|``."""
    return float(2 * abs(partial_trace(rho, "qubit")[0, 1]))


def recombination_unitary(delta: complex, fock: FockParams) -> np.ndarray:
    """``|0><0| (x) D(-delta) + |1><1| (x) D(delta)``: undoes the cat-state displacements."""
    return kron(PROJ_0, displacement(-delta, fock)) + kron(PROJ_1, displacement(delta, fock))


def readout_visibility(rho: np.ndarray, delta: complex, fock: FockParams,
                       U: np.ndarray | None = None) -> float:
    """Visibility after recombining the two oscillator branches."""
    U = recombination_unitary(delta, fock) if U is None else U
    return visibility(U @ rho @ U.conj().T)


def cat_state(delta: complex, fock: FockParams) -> np.ndarray:
    """``(|delta, 0> + |-delta, 1>) / sqrt(2)`` as a density matrix."""
    psi = (np.kron([1, 0], coherent_ket(delta, fock))
           + np.kron([0, 1], coherent_ket(-delta, fock))) / np.sqrt(2)
    return ket_to_dm(psi)


def plus_vacuum(fock: FockParams) -> np.ndarray:
    vac = np.zeros((fock.n_cut, fock.n_cut), dtype=complex)
    vac[0, 0] = 1
    return kron(plus_state(), vac)


def build_generator(cfg: ProtocolConfig) -> LindbladGenerator:
    """Generator for ``cfg.model``, including free oscillator motion at ``omega_sim``."""
    fock = cfg.fock
    if cfg.model == "gravity":
        return gravity_hamiltonian(cfg.lambda_c, cfg.omega_sim, fock)
    if cfg.model == "locc":
        gen = locc_lindblad(cfg.alpha_t, cfg.beta_t, fock)
    elif cfg.model == "stochastic-force":
        gen = stochastic_force_model(cfg.alpha_t, cfg.gamma_rate, fock)
    else:
        gen = atom_noise_model(cfg.beta_t, fock, rate=cfg.gamma_rate)
    return gen.plus(free_oscillator(cfg.omega_sim, fock))


def step_size(cfg: ProtocolConfig, gen: LindbladGenerator) -> float:
    if cfg.dt is not None:
        return cfg.dt
    dt = default_dt(cfg.omega_sim, cfg.gamma_rate, cfg.lambda_c)
    if gen.rate_bound > 0:
        dt = min(dt, 0.05 / gen.rate_bound)
    return dt


def run(gen: LindbladGenerator, rho0: np.ndarray, t_max: float, dt: float,
        samples: int) -> Trajectory:
    n_steps = max(1, int(np.ceil(t_max / dt - 1e-9)))
    return evolve(gen, rho0, t_max, dt, sample_every=max(1, n_steps // samples))


def series_from_trajectory(traj: Trajectory, fock: FockParams, vis_fn=visibility,
                           tail_guard: bool = False) -> TimeSeries:
    ops = fock_operators(fock)
    cols = {c: [] for c in SERIES_COLUMNS[1:]}
    for rho in traj.states:
        osc = partial_trace(rho, "fock")
        if tail_guard:
            tail = tail_population(np.diag(osc).real)
            if tail >= 1e-8:
                raise TruncationError(
                    f"population {tail:.2e} above level {fock.n_cut - 5}; raise n_cut or shorten t_max")
        cols["visibility"].append(vis_fn(rho))
        cols["negativity"].append(negativity(rho))
        cols["mean_n"].append(np.trace(osc @ ops["n"]).real)
        cols["mean_X"].append(np.trace(osc @ ops["X"]).real)
        cols["mean_P"].append(np.trace(osc @ ops["P"]).real)
        cols["trace_error"].append(abs(np.trace(rho) - 1))
    return TimeSeries(traj.times, *(np.array(cols[c]) for c in SERIES_COLUMNS[1:]))


def unboosted_revival(cfg: ProtocolConfig, periods: int = 1) -> TimeSeries:
    """Qubit ``|+>`` with the oscillator in vacuum, evolved for whole oscillator periods."""
    if cfg.model not in ("gravity", "locc", "stochastic-force"):
        raise ValueError(f"revival protocol does not support model {cfg.model!r}")
    fock = cfg.fock
    gen = build_generator(cfg)
    traj = run(gen, plus_vacuum(fock), periods * cfg.period, step_size(cfg, gen), cfg.samples)
    series = series_from_trajectory(traj, fock)
    series.meta["model"] = cfg.model
    return series


def is_revival(series: TimeSeries, dip: float = 0.1, recovery: float = 0.9) -> bool:
    """Final visibility recovers to ``recovery * v(0)`` after dipping ``dip`` below it."""
    v = series.visibility
    return bool(v[-1] - v.min() >= dip and v[-1] >= recovery * v[0])


def noise_generator(cfg: ProtocolConfig) -> LindbladGenerator:
    """The oscillator and qubit noise of the LOCC model with its Hamiltonian removed."""
    return locc_lindblad(cfg.alpha_t, cfg.beta_t, cfg.fock).without_hamiltonian()


class BoostedResult(NamedTuple):
    series: TimeSeries
    fitted_decay: float
    effective_rate: float
    oracle_rate: float


def fit_decay(t: np.ndarray, v: np.ndarray, floor: float = VISIBILITY_FLOOR) -> float:
    """Decay rate from a least-squares fit of ``log v`` against ``t``."""
    keep = v > floor
    if np.count_nonzero(keep) < MIN_FIT_SAMPLES:
        raise ValueError(f"visibility fell below {floor:g} before {MIN_FIT_SAMPLES} samples")
    return float(-np.polyfit(t[keep], np.log(v[keep]), 1)[0])


def coherence_block(gen: LindbladGenerator, rho: np.ndarray) -> np.ndarray:
    """The ``<0| . |1>`` qubit block of the generator applied to ``rho``."""
    n = gen.n_cut
    return rhs(gen, rho)[:n, n:]


def coherence_decay_rate(gen: LindbladGenerator, rho0: np.ndarray, delta: complex,
                         fock: FockParams) -> float:
    """Decay rate of the readout coherence from the generator's coherence block.

    The readout is ``f = Tr(W rho_01)`` with ``W = D(-delta)^2``.  ``W`` is an
    eigen-operator of the adjoint coherence-block generator, so
    ``df/dt = mu f`` and the rate is ``-Re mu``; ``mu`` is evaluated on the
    initial state.
    """
    n = fock.n_cut
    D = displacement(-delta, fock)
    W = D @ D
    f0 = np.trace(W @ rho0[:n, n:])
    df = np.trace(W @ coherence_block(gen, rho0))
    return float(-(df / f0).real)


def boosted_protocol(cfg: ProtocolConfig) -> BoostedResult:
    """Cat-state dephasing under the LOCC noise terms alone.

    The cat ``(|delta, 0> + |-delta, 1>)/sqrt(2)`` is prepared ideally, then
    evolved under :func:`noise_generator`.  The series' visibility column
    is the readout visibility after recombining the branches.  The
    effective rate for ``n_atoms`` atoms is ``n_atoms`` times the fitted
    single-atom rate.
    """
    if cfg.model != "locc":
        raise ValueError("boosted protocol runs the locc noise model")
    fock = cfg.fock
    gen = noise_generator(cfg)
    rho0 = cat_state(cfg.delta, fock)
    t_max = 1.0 if cfg.t_max is None else cfg.t_max
    dt = cfg.dt if cfg.dt is not None else min(default_dt(), 0.05 / gen.rate_bound)
    traj = run(gen, rho0, t_max, dt, cfg.samples)
    U = recombination_unitary(cfg.delta, fock)
    series = series_from_trajectory(traj, fock, lambda r: readout_visibility(r, cfg.delta, fock, U))
    decay = fit_decay(series.t, series.visibility)
    oracle = coherence_decay_rate(gen, rho0, cfg.delta, fock)
    series.meta.update(fitted_decay=decay, effective_rate=cfg.n_atoms * decay, oracle_rate=oracle)
    return BoostedResult(series, decay, cfg.n_atoms * decay, oracle)


def analytic_boosted_rate(alpha_t: float, beta_t: float, delta: complex) -> float:
    """Untruncated readout decay rate ``16 alpha^2 Re(delta)^2 + 4 beta^2``."""
    return 16 * alpha_t ** 2 * complex(delta).real ** 2 + 4 * beta_t ** 2


class HeatingResult(NamedTuple):
    series: TimeSeries
    fitted_dn_dt: float
    effective_rate: float


def heating_series(cfg: ProtocolConfig) -> HeatingResult:
    """Occupation growth from vacuum under the LOCC noise terms.

    The Hamiltonian only displaces the two qubit branches; heating is
    measured on :func:`noise_generator`.  Aborts with TruncationError when
    population approaches the Fock cutoff.
    """
    if cfg.model != "locc":
        raise ValueError("heating series runs the locc noise model")
    fock = cfg.fock
    gen = noise_generator(cfg)
    t_max = 1.0 if cfg.t_max is None else cfg.t_max
    dt = cfg.dt if cfg.dt is not None else min(default_dt(), 0.05 / gen.rate_bound)
    traj = run(gen, plus_vacuum(fock), t_max, dt, cfg.samples)
    series = series_from_trajectory(traj, fock, tail_guard=True)
    slope = float(np.polyfit(series.t, series.mean_n, 1)[0])
    series.meta.update(fitted_dn_dt=slope, effective_rate=cfg.n_atoms * slope)
    return HeatingResult(series, slope, cfg.n_atoms * slope)


def entanglement_series(cfg: ProtocolConfig, rho0: np.ndarray | None = None) -> TimeSeries:
    """Negativity (and the other observables) from a product start, default ``|+> (x) |0>``."""
    fock = cfg.fock
    gen = build_generator(cfg)
    rho0 = plus_vacuum(fock) if rho0 is None else rho0
    if cfg.t_max is not None:
        t_max = cfg.t_max
    elif cfg.omega_sim > 0:
        t_max = cfg.period
    else:
        t_max = 1.0
    traj = run(gen, rho0, t_max, step_size(cfg, gen), cfg.samples)
    return series_from_trajectory(traj, fock)


@dataclass
class MimicryReport:
    t: np.ndarray
    visibility_gravity: np.ndarray
    visibility_locc: np.ndarray
    deficit: float

    def rows(self) -> np.ndarray:
        return np.column_stack([self.t, self.visibility_gravity, self.visibility_locc])


def mimicry_report(alpha_t: float, beta_t: float, omega_sim: float = 1.0,
                   fock: FockParams | None = None, samples: int = 200,
                   dt: float | None = None) -> MimicryReport:
    """Gravity versus LOCC revival at the same coherent coupling ``-2 alpha beta``.

    ``deficit`` is ``v_gravity(T) - v_locc(T)`` at one oscillator period.
    """
    fock = FockParams() if fock is None else fock
    base = ProtocolConfig(alpha_t=alpha_t, beta_t=beta_t, omega_sim=omega_sim,
                          n_cut=fock.n_cut, samples=samples, dt=dt)
    g_cfg, l_cfg = replace(base, model="gravity"), replace(base, model="locc")
    if dt is None:
        shared = min(step_size(c, build_generator(c)) for c in (g_cfg, l_cfg))
        g_cfg, l_cfg = replace(g_cfg, dt=shared), replace(l_cfg, dt=shared)
    grav = unboosted_revival(g_cfg)
    locc = unboosted_revival(l_cfg)
    return MimicryReport(grav.t, grav.visibility, locc.visibility,
                         float(grav.visibility[-1] - locc.visibility[-1]))


def config_fields() -> dict:
    return {f.name: f for f in fields(ProtocolConfig)}
