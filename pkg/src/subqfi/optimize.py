"""Gradient ascent of the sub-QFI over state-preparation unitaries.

Unitaries are parameterized as ``U(p) = exp(-i A(p))`` with ``A`` Hermitian
and ``p`` its ``d^2`` real coordinates: ``d`` diagonal entries, then the real
parts of the strict upper triangle (row-major), then the imaginary parts.

The ascent is done in local coordinates: every iteration differentiates
``p -> f(U(p) V)`` at ``p = 0`` around the current unitary ``V`` and moves to
``U(alpha g) V``, so the chart never degenerates. The returned
``best_params`` are the global coordinates of the final unitary.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import check_dims, dagger, haar_unitary, make_rng, validate_density, validate_generator
from .optimal import max_subqfi_closed

FD_STEP = 1e-5


class Unconverged(UserWarning):
    pass


@dataclass(frozen=True)
class AnsatzParams:
    d: int
    params: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.params, dtype=float).ravel()
        if p.size != self.d**2:
            raise ValueError(f"need {self.d**2} parameters for d={self.d}, got {p.size}")
        object.__setattr__(self, "params", p)

    @classmethod
    def zeros(cls, d: int) -> "AnsatzParams":
        return cls(d, np.zeros(d * d))

    def hermitian(self) -> np.ndarray:
        d, p = self.d, self.params
        iu = np.triu_indices(d, 1)
        m = len(iu[0])
        a = np.zeros((d, d), dtype=complex)
        a[iu] = p[d : d + m] + 1j * p[d + m :]
        a = a + dagger(a)
        a[np.diag_indices(d)] = p[:d]
        return a

    @classmethod
    def from_hermitian(cls, a: np.ndarray) -> "AnsatzParams":
        d = a.shape[0]
        iu = np.triu_indices(d, 1)
        return cls(d, np.concatenate([np.diag(a).real, a[iu].real, a[iu].imag]))

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "AnsatzParams":
        """Principal-branch coordinates with ``ansatz_unitary(result) == u``."""
        t, z = scipy.linalg.schur(u, output="complex")
        phases = -np.angle(np.diag(t))
        return cls.from_hermitian((z * phases) @ dagger(z))


def ansatz_unitary(p: AnsatzParams) -> np.ndarray:
    a, q = np.linalg.eigh(p.hermitian())
    return (q * np.exp(-1j * a)) @ dagger(q)


def _subqfi_raw(state: np.ndarray, h: np.ndarray) -> float:
    c = state @ h - h @ state
    return float(-2.0 * np.sum(c * c.T).real)


def _value_at(rho: np.ndarray, h: np.ndarray, u: np.ndarray) -> float:
    return _subqfi_raw(u @ rho @ dagger(u), h)


def _exp_divided_differences(a: np.ndarray) -> np.ndarray:
    """``(e^{-i a_i} - e^{-i a_j}) / (a_i - a_j)``, with the derivative on ties."""
    mean = 0.5 * (a[:, None] + a[None, :])
    half = 0.5 * (a[:, None] - a[None, :])
    return -1j * np.exp(-1j * mean) * np.sinc(half / np.pi)


def _coordinate_gradient(z: np.ndarray) -> np.ndarray:
    """Map ``df = Re sum_ab Z_ab dA_ab`` onto the ``d^2`` real coordinates."""
    d = z.shape[0]
    iu = np.triu_indices(d, 1)
    zt = z.T
    return np.concatenate(
        [np.diag(z).real, (z[iu] + zt[iu]).real, (zt[iu] - z[iu]).imag]
    )


def analytic_gradient(rho: np.ndarray, h: np.ndarray, p: AnsatzParams) -> np.ndarray:
    a_eig, q = np.linalg.eigh(p.hermitian())
    u = (q * np.exp(-1j * a_eig)) @ dagger(q)
    state = u @ rho @ dagger(u)
    h2 = h @ h
    m = 4.0 * (state @ h2 + h2 @ state - 2.0 * h @ state @ h)
    # df = Re Tr[K dU] with K = 2 rho U^dag M, and dU = Q (Gamma o Q^dag dA Q) Q^dag
    k = 2.0 * rho @ dagger(u) @ m
    kt = dagger(q) @ k @ q
    y = kt.T * _exp_divided_differences(a_eig)
    z = q.conj() @ y @ q.T
    return _coordinate_gradient(z)


def fd_gradient(rho: np.ndarray, h: np.ndarray, p: AnsatzParams, step: float = FD_STEP) -> np.ndarray:
    grad = np.empty(p.params.size)
    for i in range(p.params.size):
        e = np.zeros_like(p.params)
        e[i] = step
        up = _value_at(rho, h, ansatz_unitary(AnsatzParams(p.d, p.params + e)))
        dn = _value_at(rho, h, ansatz_unitary(AnsatzParams(p.d, p.params - e)))
        grad[i] = (up - dn) / (2 * step)
    return grad


def objective(rho, h, p: AnsatzParams, gradient: str = "fd") -> tuple[float, np.ndarray]:
    """Sub-QFI of ``U(p) rho U(p)^dag`` and its gradient in ``p``.

    ``gradient="fd"`` is the reference (central differences, step 1e-5);
    ``"analytic"`` uses the divided-difference derivative of the exponential.
    """
    rho, h = validate_density(rho), validate_generator(h)
    check_dims(rho, h)
    r, hm = rho.matrix, h.matrix
    value = _value_at(r, hm, ansatz_unitary(p))
    if gradient == "fd":
        return value, fd_gradient(r, hm, p)
    if gradient == "analytic":
        return value, analytic_gradient(r, hm, p)
    raise ValueError(f"gradient must be 'fd' or 'analytic', got {gradient!r}")


@dataclass(frozen=True)
class MaximizeConfig:
    restarts: int = 8
    max_iters: int = 2000
    tol: float = 1e-6
    target_tol: float = 1e-8
    armijo: float = 1e-4
    shrink: float = 0.5
    initial_step: float = 1.0
    min_step: float = 1e-12
    max_step: float = 1e4
    step_rule: str = "bb"  # "fixed": every line search starts at initial_step
    gradient: str = "analytic"
    stop_at_closed_form: bool = True


@dataclass
class OptimizationTrace:
    iterations: list = field(default_factory=list)  # (restart, step, objective, grad_norm)
    best_params: AnsatzParams | None = None
    best_value: float = -np.inf
    restarts_used: int = 0
    converged: bool = False
    target: float | None = None
    best_restart: int = -1

    def best_unitary(self) -> np.ndarray:
        return ansatz_unitary(self.best_params)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "objective", "grad_norm", "restart"])
        for restart, step, value, gnorm in self.iterations:
            w.writerow([step, repr(value), repr(gnorm), restart])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "best_value": self.best_value,
            "target": self.target,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "best_restart": self.best_restart,
            "iterations": len(self.iterations),
            "best_params": self.best_params.params.tolist() if self.best_params is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


def _local_gradient(state: np.ndarray, h: np.ndarray, how: str) -> np.ndarray:
    zero = AnsatzParams.zeros(state.shape[0])
    if how == "analytic":
        return analytic_gradient(state, h, zero)
    return fd_gradient(state, h, zero)


def _trial_step(cfg: MaximizeConfig, s_prev, g_prev, g) -> float:
    """Initial trial step for the backtracking search.

    The Barzilai-Borwein step ``s.s / s.y`` (``y`` the drop in gradient along
    the last accepted move) is used when it is positive; otherwise, and for
    ``step_rule="fixed"``, the search starts at ``initial_step``.
    """
    if cfg.step_rule == "fixed" or s_prev is None:
        return cfg.initial_step
    sy = float(s_prev @ (g_prev - g))
    if sy <= 0:
        return cfg.initial_step
    return min(float(s_prev @ s_prev) / sy, cfg.max_step)


def _ascend(rho, h, u0, cfg: MaximizeConfig, target, restart, records):
    u = u0
    value = _value_at(rho, h, u)
    gnorm = np.inf
    s_prev = g_prev = None
    for step in range(cfg.max_iters):
        state = u @ rho @ dagger(u)
        g = _local_gradient(state, h, cfg.gradient)
        gnorm = float(np.linalg.norm(g))
        records.append((restart, step, value, gnorm))
        if gnorm <= cfg.tol or (target is not None and abs(target - value) <= cfg.target_tol):
            return u, value, gnorm, True
        alpha = _trial_step(cfg, s_prev, g_prev, g)
        while alpha >= cfg.min_step:
            cand = ansatz_unitary(AnsatzParams(rho.shape[0], alpha * g)) @ u
            new = _value_at(rho, h, cand)
            if new >= value + cfg.armijo * alpha * gnorm**2:
                break
            alpha *= cfg.shrink
        else:
            # no ascent direction left at machine precision
            return u, value, gnorm, gnorm <= cfg.tol
        u, value = cand, new
        s_prev, g_prev = alpha * g, g
    return u, value, gnorm, False


def maximize(rho, h, config: MaximizeConfig | None = None, rng: np.random.Generator | None = None) -> OptimizationTrace:
    """Maximize the sub-QFI over ``U rho U^dag``.

    Restart 0 starts at ``U = 1``; restarts ``1..R`` start at Haar-random
    unitaries drawn from independent streams split off ``rng``. With
    ``stop_at_closed_form`` the search ends as soon as a restart gets within
    ``target_tol`` of the closed-form maximum.
    """
    cfg = config or MaximizeConfig()
    if cfg.restarts < 1:
        raise ValueError("restarts must be >= 1")
    rho, h = validate_density(rho), validate_generator(h)
    d = check_dims(rho, h)
    rng = rng if rng is not None else make_rng(0)
    seeds = rng.integers(0, 2**63 - 1, size=cfg.restarts)
    target = max_subqfi_closed(rho.eigenvalues, h) if cfg.stop_at_closed_form else None

    trace = OptimizationTrace(target=target)
    best_u = np.eye(d, dtype=complex)
    for restart in range(cfg.restarts + 1):
        u0 = np.eye(d, dtype=complex) if restart == 0 else haar_unitary(d, make_rng(int(seeds[restart - 1])))
        u, value, gnorm, ok = _ascend(rho.matrix, h.matrix, u0, cfg, target, restart, trace.iterations)
        trace.restarts_used = restart + 1
        if value > trace.best_value:
            trace.best_value, trace.best_restart, best_u = value, restart, u
            trace.converged = ok
        if target is not None and abs(target - trace.best_value) <= cfg.target_tol:
            trace.converged = True
            break
    trace.best_params = AnsatzParams.from_unitary(best_u)
    if not trace.converged:
        warnings.warn(
            f"sub-QFI ascent did not converge (best {trace.best_value:.10g}, target {target})",
            Unconverged,
            stacklevel=2,
        )
    return trace
