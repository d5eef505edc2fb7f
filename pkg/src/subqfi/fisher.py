"""Fisher-information quantities for unitary phase encodings.

The sub-QFI is available through five routes that must agree:

* ``closed``   -- ``-2 Tr[[rho, H]^2]``
* ``spectral`` -- double sum over the eigenbasis of ``rho``
* ``nsld``     -- non-Hermitian logarithmic derivative (full-rank states)
* ``fd``       -- finite difference of the super-fidelity along the orbit
* ``hs``       -- curvature of the Hilbert-Schmidt distance along the orbit

The QFI itself comes from the SLD spectral formula (``qfi_spectral``) or the
Uhlmann-fidelity finite difference (``qfi_fd``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    DensityMatrix,
    SubQFIError,
    check_dims,
    commutator,
    dagger,
    encode,
    matrix_to_dict,
    psd_sqrt,
    validate_density,
    validate_generator,
)
from .fidelity import (
    hs_distance,
    real_trace,
    super_fidelity_defect,
    trace_product,
    uhlmann_fidelity,
)

CHAIN_TOL = 1e-9
LAMBDA_TOL = 1e-12
FULL_RANK_TOL = 1e-8
NEG_CLAMP_TOL = 1e-10
MAX_DELTA = 0.1
MAX_EPSILON = 1e-4
DEFAULT_DELTA = 1e-3
DEFAULT_NODES = 41
QUADRATURE_RTOL = 1e-10

SUBQFI_METHODS = ("closed", "spectral", "nsld", "fd", "hs")


class DeltaTooLarge(SubQFIError):
    pass


class NotFullRank(SubQFIError):
    pass


class ZeroInformation(SubQFIError):
    pass


class QuadratureUnconverged(SubQFIError):
    pass


def _inputs(rho, h):
    rho, h = validate_density(rho), validate_generator(h)
    check_dims(rho, h)
    return rho, h


def _check_delta(delta: float) -> None:
    if not 0 < delta <= MAX_DELTA:
        raise DeltaTooLarge(f"delta must lie in (0, {MAX_DELTA}], got {delta}")


def _nonneg(x: float) -> float:
    return 0.0 if -NEG_CLAMP_TOL <= x < 0 else x


def generator_in_state_basis(rho: DensityMatrix, h) -> np.ndarray:
    v = rho.eigenvectors
    return dagger(v) @ h.matrix @ v


# -- sub-QFI ------------------------------------------------------------------


def subqfi_closed(rho, h) -> float:
    rho, h = _inputs(rho, h)
    c = commutator(rho.matrix, h.matrix)
    return _nonneg(-2.0 * real_trace(trace_product(c, c), "Tr[[rho,H]^2]"))


def subqfi_spectral(rho, h) -> float:
    """``2 sum_ij (l_i - l_j)^2 |<l_i|H|l_j>|^2`` over the full eigenbasis.

    Kernel directions of a rank-deficient state pair with the support and do
    contribute, so the sum runs over all ``d`` eigenvectors, not just the rank.
    """
    rho, h = _inputs(rho, h)
    lam = rho.eigenvalues
    gap = lam[:, None] - lam[None, :]
    hm = generator_in_state_basis(rho, h)
    return float(2.0 * np.sum(gap**2 * np.abs(hm) ** 2))


@dataclass(frozen=True)
class NsldResult:
    lambda_matrix: np.ndarray
    value: float
    # Tr[Lambda rho], zero in exact arithmetic
    zero_mean_residual: complex = 0j


def orbit_derivative(rho: DensityMatrix, h) -> np.ndarray:
    """``d rho_theta / d theta`` at ``theta = 0``, i.e. ``i [rho, H]``."""
    return 1j * commutator(rho.matrix, h.matrix)


def subqfi_nsld(rho, h) -> NsldResult:
    rho, h = _inputs(rho, h)
    if rho.eigenvalues[-1] <= FULL_RANK_TOL:
        raise NotFullRank(
            f"nSLD route needs a full-rank state; smallest eigenvalue {rho.eigenvalues[-1]:.3e}"
        )
    v = rho.eigenvectors
    rho_inv = (v / rho.eigenvalues) @ dagger(v)
    lam = orbit_derivative(rho, h) @ rho_inv
    # Tr[L^dag L rho^2] = |L rho|_F^2 by cyclicity; real and non-negative by construction
    value = 2.0 * float(np.sum(np.abs(lam @ rho.matrix) ** 2))
    return NsldResult(lam, value, trace_product(lam, rho.matrix))


def _orbit_point(rho: DensityMatrix, h, theta: float) -> DensityMatrix:
    return rho if theta == 0 else validate_density(encode(rho, h, theta))


def _subqfi_fd_plain(rho: DensityMatrix, h, delta: float) -> float:
    defect = super_fidelity_defect(rho, _orbit_point(rho, h, delta))
    # 1 - sqrt(G) = (1 - G) / (1 + sqrt(G))
    return 8.0 * defect / (1.0 + np.sqrt(1.0 - defect)) / delta**2


def subqfi_fd(rho, h, delta: float = DEFAULT_DELTA, richardson: bool = True) -> float:
    """Finite-difference super-fidelity limit at ``theta = 0``.

    The plain estimate has an ``O(delta^2)`` truncation error; the integrand is
    even in ``delta`` so one Richardson step removes it to ``O(delta^4)``.
    """
    _check_delta(delta)
    rho, h = _inputs(rho, h)
    if not richardson:
        return _subqfi_fd_plain(rho, h, delta)
    coarse = _subqfi_fd_plain(rho, h, delta)
    fine = _subqfi_fd_plain(rho, h, delta / 2)
    return (4.0 * fine - coarse) / 3.0


def hs_curvature(rho, h, delta: float = DEFAULT_DELTA) -> float:
    """Central second difference of ``D_HS(rho, rho_theta)`` at ``theta = 0``."""
    _check_delta(delta)
    rho, h = _inputs(rho, h)
    plus = hs_distance(rho, _orbit_point(rho, h, delta))
    minus = hs_distance(rho, _orbit_point(rho, h, -delta))
    return (plus + minus) / delta**2


def subqfi(rho, h, method: str = "closed", delta: float = DEFAULT_DELTA) -> float:
    if method == "closed":
        return subqfi_closed(rho, h)
    if method == "spectral":
        return subqfi_spectral(rho, h)
    if method == "nsld":
        return subqfi_nsld(rho, h).value
    if method == "fd":
        return subqfi_fd(rho, h, delta, richardson=True)
    if method == "hs":
        return hs_curvature(rho, h, delta)
    raise ValueError(f"unknown method {method!r}; choose from {SUBQFI_METHODS}")


# -- QFI and skew information -------------------------------------------------


def qfi_spectral(rho, h) -> tuple[float, np.ndarray]:
    """QFI and SLD at ``theta = 0`` from the eigendecomposition of ``rho``.

    Pairs with ``l_i + l_j <= 1e-12`` (kernel x kernel) are skipped; their SLD
    entries are unconstrained and carry no information for unitary families.
    """
    rho, h = _inputs(rho, h)
    lam = rho.eigenvalues
    total = lam[:, None] + lam[None, :]
    keep = total > LAMBDA_TOL
    safe = np.where(keep, total, 1.0)
    hm = generator_in_state_basis(rho, h)
    gap = lam[:, None] - lam[None, :]
    value = float(2.0 * np.sum(np.where(keep, gap**2 / safe, 0.0) * np.abs(hm) ** 2))
    # d rho in the eigenbasis is i (l_i - l_j) H_ij
    sld_eig = np.where(keep, 2.0 * 1j * gap * hm / safe, 0.0)
    v = rho.eigenvectors
    return value, v @ sld_eig @ dagger(v)


def qfi(rho, h) -> float:
    return qfi_spectral(rho, h)[0]


def qfi_fd(rho, h, delta: float = DEFAULT_DELTA, epsilon: float = 0.0) -> float:
    """``8 (1 - F(rho, rho_delta)) / delta^2`` with optional depolarizing regularization.

    For rank-deficient states the fidelity expansion is only valid once
    ``delta^2`` is small against the smallest nonzero eigenvalue; ``epsilon``
    mixes in ``epsilon * 1/d`` which biases the result by roughly
    ``-2 epsilon I`` (the eigenvalue gaps shrink by a factor ``1 - epsilon``).
    """
    _check_delta(delta)
    if not 0 <= epsilon <= MAX_EPSILON:
        raise ValueError(f"epsilon must lie in [0, {MAX_EPSILON}], got {epsilon}")
    rho, h = _inputs(rho, h)
    if epsilon > 0:
        rho = validate_density((1 - epsilon) * rho.matrix + epsilon * np.eye(rho.dim) / rho.dim)
    f = uhlmann_fidelity(rho, _orbit_point(rho, h, delta))
    return 8.0 * (1.0 - f) / delta**2


def skew_information(rho, h) -> float:
    """Wigner-Yanase skew information ``-1/2 Tr[[sqrt(rho), H]^2]``."""
    rho, h = _inputs(rho, h)
    c = commutator(psd_sqrt(rho), h.matrix)
    return _nonneg(-0.5 * real_trace(trace_product(c, c), "Tr[[sqrt(rho),H]^2]"))


def variance(psi_or_rho, h) -> float:
    """``<H^2> - <H>^2`` in the given state."""
    rho, h = _inputs(psi_or_rho, h)
    m1 = real_trace(trace_product(rho.matrix, h.matrix))
    m2 = real_trace(trace_product(rho.matrix, h.matrix @ h.matrix))
    return m2 - m1**2


def cramer_rao(information: float, shots: int = 1) -> float:
    """Smallest achievable ``(Delta theta)^2`` from ``shots`` repetitions."""
    if information <= 0:
        raise ZeroInformation(f"information must be positive, got {information}")
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    return 1.0 / (shots * information)


# -- bound chain --------------------------------------------------------------


@dataclass
class FisherReport:
    qfi: float
    sub_qfi: float
    skew_info: float
    method_values: dict = field(default_factory=dict)
    sld_matrix: Optional[np.ndarray] = None
    bound_chain_ok: bool = False
    tolerances: dict = field(default_factory=dict)
    # I_WY >= sub-QFI / 4 fails in general; recorded for inspection only
    wy_quarter_bound_holds: Optional[bool] = None

    def to_dict(self, include_sld: bool = False) -> dict:
        out = {
            "qfi": self.qfi,
            "sub_qfi": self.sub_qfi,
            "skew_info": self.skew_info,
            "method_values": dict(self.method_values),
            "bound_chain_ok": self.bound_chain_ok,
            "tolerances": dict(self.tolerances),
            "diagnostics": {"wy_quarter_bound_holds": self.wy_quarter_bound_holds},
        }
        if include_sld and self.sld_matrix is not None:
            out["sld_matrix"] = matrix_to_dict(self.sld_matrix)
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(**kw), sort_keys=True)


def chain_holds(qfi_value: float, wy: float, sub: float, tol: float = CHAIN_TOL) -> bool:
    return (qfi_value + tol >= wy) and (wy + tol >= sub / 8) and (qfi_value + tol >= sub)


def bound_report(rho, h, all_methods: bool = False, delta: float = DEFAULT_DELTA) -> FisherReport:
    rho, h = _inputs(rho, h)
    q, sld = qfi_spectral(rho, h)
    sub = subqfi_closed(rho, h)
    wy = skew_information(rho, h)
    values = {"closed": sub}
    if all_methods:
        for m in SUBQFI_METHODS[1:]:
            try:
                values[m] = subqfi(rho, h, m, delta)
            except NotFullRank:
                values[m] = None
    return FisherReport(
        qfi=q,
        sub_qfi=sub,
        skew_info=wy,
        method_values=values,
        sld_matrix=sld,
        bound_chain_ok=chain_holds(q, wy, sub),
        tolerances={"chain": CHAIN_TOL, "delta": delta},
        wy_quarter_bound_holds=bool(wy + CHAIN_TOL >= sub / 4),
    )


# -- purity loss --------------------------------------------------------------


@dataclass(frozen=True)
class PurityLossResult:
    delta_gamma: float
    delta_x: float
    ratio: float
    rho_ave: DensityMatrix
    nodes: int


def _purity_loss_at(rho_h: np.ndarray, h_eigs: np.ndarray, delta_x: float, nodes: int):
    """Gauss-Hermite average of the orbit, in the eigenbasis of the generator.

    Returns ``(delta_gamma, rho_ave)``; the purity loss is accumulated as the
    weighted spread ``sum_k w_k |rho_k - rho_ave|_F^2``, which equals
    ``Tr rho^2 - Tr rho_ave^2`` because every orbit point has the same purity.
    """
    t, w = np.polynomial.hermite.hermgauss(nodes)
    w = w / np.sqrt(np.pi)
    x = np.sqrt(2.0) * delta_x * t
    omega = h_eigs[:, None] - h_eigs[None, :]
    phases = np.exp(-1j * x[:, None, None] * omega[None])
    orbit = rho_h[None] * phases
    ave = np.tensordot(w, orbit, axes=1)
    spread = np.sum(np.abs(orbit - ave[None]) ** 2, axis=(1, 2))
    return float(w @ spread), ave


def purity_loss(rho, h, delta_x: float, nodes: int = DEFAULT_NODES, theta: float = 0.0) -> PurityLossResult:
    """Purity lost when ``theta`` fluctuates as a Gaussian with std ``delta_x``.

    Convergence is checked by repeating the quadrature with twice the nodes.
    """
    if delta_x <= 0:
        raise ValueError(f"delta_x must be positive, got {delta_x}")
    if nodes < 15:
        raise ValueError(f"need at least 15 quadrature nodes, got {nodes}")
    rho, h = _inputs(rho, h)
    v = h.eigenvectors
    rho_theta = _orbit_point(rho, h, theta)
    rho_h = dagger(v) @ rho_theta.matrix @ v
    gamma, ave = _purity_loss_at(rho_h, h.eigenvalues, delta_x, nodes)
    gamma2, _ = _purity_loss_at(rho_h, h.eigenvalues, delta_x, 2 * nodes)
    # the absolute floor covers orbits that are fixed points (gamma ~ 0)
    if abs(gamma2 - gamma) > QUADRATURE_RTOL * abs(gamma2) + 1e-15:
        raise QuadratureUnconverged(
            f"purity loss changed from {gamma:.12e} to {gamma2:.12e} when doubling {nodes} nodes"
        )
    rho_ave = validate_density(v @ ave @ dagger(v))
    gamma = max(gamma, 0.0)
    return PurityLossResult(gamma, delta_x, 2.0 * gamma / delta_x**2, rho_ave, nodes)


def purity_loss_relation_check(rho, h, delta_x: float, nodes: int = DEFAULT_NODES):
    """``(sub-QFI, 2 dgamma / dx^2, relative error)`` in the sharp-distribution regime."""
    if delta_x > 0.05:
        raise ValueError(f"relation is only checked for delta_x <= 0.05, got {delta_x}")
    lhs = subqfi_closed(rho, h)
    rhs = purity_loss(rho, h, delta_x, nodes).ratio
    return lhs, rhs, abs(lhs - rhs) / max(lhs, 1e-12)
