"""Kraus channels: application, composition, Choi matrices and generators.

Superoperators act on column-stacked density matrices,
``vec(rho) = rho.flatten(order="F")``, so ``vec(A rho B) = (B^T (x) A) vec(rho)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .core import QUBIT_DIM, dagger, fock_dim, kron

COMPLETENESS_TOL = 1e-10
PRODUCT_FORM_TOL = 1e-12
PRODUCT_RANK_TOL = 1e-10
DEGENERATE_RESIDUAL = 1e-13


class ChannelError(ValueError):
    pass


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).flatten(order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Ordered Kraus operators, optionally with their product factorization.

    ``product_form[i] = (qubit_factor, fock_factor)`` with
    ``kraus[i] == kron(qubit_factor, fock_factor)``.
    """

    kraus: tuple
    product_form: tuple | None = None

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        for k in ops:
            if k.shape != shape:
                raise ChannelError(f"Kraus operators have mismatched shapes {k.shape} vs {shape}")
        fock_dim(ops[0])
        object.__setattr__(self, "kraus", ops)
        if self.product_form is not None:
            pf = tuple((np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
                       for a, b in self.product_form)
            if len(pf) != len(ops):
                raise ChannelError("product_form must align with the Kraus list")
            for k, (a, b) in zip(ops, pf):
                if np.max(np.abs(kron(a, b) - k)) > PRODUCT_FORM_TOL:
                    raise ChannelError("product_form factor does not reproduce its Kraus operator")
            object.__setattr__(self, "product_form", pf)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def n_cut(self) -> int:
        return self.dim // QUBIT_DIM

    @cached_property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus)

    @cached_property
    def completeness_residual(self) -> float:
        s = np.einsum("kji,kjl->il", self.stacked.conj(), self.stacked)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def __len__(self):
        return len(self.kraus)


def identity_channel(n_cut: int) -> KrausChannel:
    return KrausChannel((np.eye(QUBIT_DIM * n_cut),),
                        ((np.eye(QUBIT_DIM), np.eye(n_cut)),))


def unitary_channel(U: np.ndarray) -> KrausChannel:
    return KrausChannel((U,))


def validate(ch: KrausChannel) -> float:
    """Completeness residual ``max |sum K^dag K - I|``; accepted iff <= 1e-10."""
    return ch.completeness_residual


def _require_valid(ch: KrausChannel):
    r = ch.completeness_residual
    if r > COMPLETENESS_TOL:
        raise ChannelError(f"channel is not trace preserving (completeness residual {r:.3e})")


def apply(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """``sum_i K_i rho K_i^dag``."""
    _require_valid(ch)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.dim, ch.dim):
        raise ChannelError(f"state shape {rho.shape} does not match channel dim {ch.dim}")
    k = ch.stacked
    out = np.einsum("kij,jl,kml->im", k, rho, k.conj(), optimize=True)
    return out


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """Channel ``outer o inner`` with Kraus operators ``outer_a @ inner_b``.

    The product factorization survives only when both inputs carry one.
    """
    if outer.dim != inner.dim:
        raise ChannelError(f"dimension mismatch {outer.dim} vs {inner.dim}")
    _require_valid(outer)
    _require_valid(inner)
    kraus = tuple(a @ b for a in outer.kraus for b in inner.kraus)
    pf = None
    if outer.product_form is not None and inner.product_form is not None:
        pf = tuple((qa @ qb, fa @ fb)
                   for qa, fa in outer.product_form for qb, fb in inner.product_form)
    return KrausChannel(kraus, pf)


def choi(ch: KrausChannel) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) L(|i><j|)``, shape ``(D^2, D^2)``."""
    _require_valid(ch)
    d = ch.dim
    # row index (i, p) of the Choi matrix is K[p, i]
    v = ch.stacked.transpose(0, 2, 1).reshape(len(ch), d * d)
    return v.T @ v.conj()


def channels_equal(a: KrausChannel, b: KrausChannel, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(choi(a) - choi(b))) <= tol)


def is_unitary(U: np.ndarray, tol: float = 1e-10) -> bool:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.max(np.abs(dagger(U) @ U - np.eye(U.shape[0]))) <= tol)


def mix_kraus(ch: KrausChannel, U: np.ndarray) -> KrausChannel:
    """Equivalent channel with Kraus operators ``K'_i = sum_j U_ij K_j``.

    The product factorization is dropped: mixing generally destroys it.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (len(ch), len(ch)) or not is_unitary(U):
        raise ChannelError(f"mixing matrix must be a {len(ch)}x{len(ch)} unitary")
    mixed = np.einsum("ij,jkl->ikl", U, ch.stacked)
    return KrausChannel(tuple(mixed))


class ProductCheck(NamedTuple):
    is_product: bool
    schmidt_rank: int
    gap: float


def operator_schmidt_values(A: np.ndarray) -> np.ndarray:
    """Singular values of the realigned (qubit row, qubit col) x (fock row, fock col) matrix."""
    n = fock_dim(A)
    r = np.asarray(A, dtype=complex).reshape(QUBIT_DIM, n, QUBIT_DIM, n)
    r = r.transpose(0, 2, 1, 3).reshape(QUBIT_DIM ** 2, n * n)
    return np.linalg.svd(r, compute_uv=False)


def is_product_operator(A: np.ndarray, rel_tol: float = PRODUCT_RANK_TOL) -> ProductCheck:
    """Operator Schmidt rank test for ``A = B (x) C``.

    The zero operator counts as a product of rank 0.
    """
    s = operator_schmidt_values(A)
    if s[0] == 0:
        return ProductCheck(True, 0, 0.0)
    rank = int(np.sum(s > rel_tol * s[0]))
    gap = float(s[1] / s[0]) if len(s) > 1 else 0.0
    return ProductCheck(rank == 1, rank, gap)


def _unit_columns(ch: KrausChannel, cols: np.ndarray) -> np.ndarray:
    """``vec(L(E_ij))`` for the matrix units with column-stacked indices ``cols``."""
    d = ch.dim
    i, j = cols % d, cols // d
    k = ch.stacked
    out = np.einsum("apn,aqn->npq", k[:, :, i], k[:, :, j].conj(), optimize=True)
    return out.transpose(0, 2, 1).reshape(len(cols), d * d)


def _generator_columns(ch: KrausChannel, dt: float, cols: np.ndarray) -> np.ndarray:
    block = _unit_columns(ch, cols)
    block[np.arange(len(cols)), cols] -= 1.0
    return block / dt


def _check_family(family, dt) -> KrausChannel:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    ch = family(dt)
    _require_valid(ch)
    return ch


def extract_generator(family: Callable[[float], KrausChannel], dt: float,
                      chunk: int = 512) -> np.ndarray:
    """Finite-difference generator ``(L_dt - id) / dt`` as a ``D^2 x D^2`` matrix.

    Columns are built by sending each matrix unit ``|i><j|`` through the
    channel, so no particular Kraus basis is assumed.
    """
    ch = _check_family(family, dt)
    d2 = ch.dim ** 2
    G = np.empty((d2, d2), dtype=complex)
    for start in range(0, d2, chunk):
        cols = np.arange(start, min(start + chunk, d2))
        G[:, cols] = _generator_columns(ch, dt, cols).T
    return G


def generator_residual(family: Callable[[float], KrausChannel], dt: float, target,
                       chunk: int = 512) -> float:
    """``max |G(dt) - target|`` without storing ``G(dt)``.

    ``target`` is a superoperator matrix or any object with a
    ``superoperator_columns(cols)`` method returning rows ``vec(target(E_col))``.
    """
    ch = _check_family(family, dt)
    d2 = ch.dim ** 2
    worst = 0.0
    for start in range(0, d2, chunk):
        cols = np.arange(start, min(start + chunk, d2))
        got = _generator_columns(ch, dt, cols)
        if hasattr(target, "superoperator_columns"):
            ref = target.superoperator_columns(cols)
        else:
            ref = np.asarray(target)[:, cols].T
        worst = max(worst, float(np.max(np.abs(got - ref))))
    return worst


def fit_log_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def convergence_study(family, target, dts: Sequence[float]) -> tuple[np.ndarray, float]:
    """Residuals ``max |G(dt) - target|`` over ``dts`` and their log-log slope."""
    dts = np.asarray(dts, dtype=float)
    if len(dts) < 4:
        raise ValueError("need at least 4 step sizes")
    if np.any(np.diff(dts) >= 0):
        raise ValueError("step sizes must be strictly decreasing")
    res = np.array([generator_residual(family, dt, target) for dt in dts])
    if np.all(res < DEGENERATE_RESIDUAL):
        raise ValueError("degenerate fit: all residuals are below 1e-13")
    if np.any(res <= 0):
        raise ValueError("degenerate fit: zero residual at some step size")
    return res, fit_log_slope(dts, res)


def convergence_order(family, target, dts: Sequence[float]) -> float:
    return convergence_study(family, target, dts)[1]


def product_channel(factors: Sequence[tuple[np.ndarray, np.ndarray]]) -> KrausChannel:
    """Channel from explicit (qubit, fock) factor pairs."""
    factors = tuple(factors)
    return KrausChannel(tuple(kron(a, b) for a, b in factors), factors)
