"""Distinguishability measures between two states of equal dimension."""

from __future__ import annotations

import numpy as np

from .core import SubQFIError, check_dims, psd_sqrt, validate_density

IMAG_TOL = 1e-8
RADICAND_TOL = 1e-12
FIDELITY_CLAMP_TOL = 1e-9


class NonRealTrace(SubQFIError):
    pass


def real_trace(x: complex, what: str = "trace") -> float:
    """Real part of a trace that should be real; raise on a large imaginary residue."""
    if abs(x.imag) > IMAG_TOL:
        raise NonRealTrace(f"{what} has imaginary residue {x.imag:.3e}")
    return float(x.real)


def trace_product(a: np.ndarray, b: np.ndarray) -> complex:
    """``Tr[a b]`` without forming the product."""
    return complex(np.sum(a * b.T))


def _pair(rho, sigma):
    rho, sigma = validate_density(rho), validate_density(sigma)
    check_dims(rho, sigma)
    return rho, sigma


def purity(rho) -> float:
    rho = validate_density(rho)
    return float(np.sum(np.abs(rho.matrix) ** 2))


def overlap(rho, sigma) -> float:
    rho, sigma = _pair(rho, sigma)
    return real_trace(trace_product(rho.matrix, sigma.matrix), "Tr[rho sigma]")


def _radicand_term(p_rho: float, p_sigma: float) -> float:
    a, b = 1.0 - p_rho, 1.0 - p_sigma
    if -RADICAND_TOL <= a < 0:
        a = 0.0
    if -RADICAND_TOL <= b < 0:
        b = 0.0
    return float(np.sqrt(max(a * b, 0.0)))


def super_fidelity_from_traces(tr_rho_sigma: float, p_rho: float, p_sigma: float) -> float:
    return tr_rho_sigma + _radicand_term(p_rho, p_sigma)


def super_fidelity(rho, sigma) -> float:
    """``Tr[rho sigma] + sqrt((1 - Tr rho^2)(1 - Tr sigma^2))``."""
    rho, sigma = _pair(rho, sigma)
    return super_fidelity_from_traces(overlap(rho, sigma), purity(rho), purity(sigma))


def uhlmann_fidelity(rho, sigma) -> float:
    """Trace norm of ``sqrt(rho) sqrt(sigma)`` (root fidelity, not squared)."""
    rho, sigma = _pair(rho, sigma)
    s = np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)
    f = float(np.sum(s))
    if 1.0 < f <= 1.0 + FIDELITY_CLAMP_TOL:
        f = 1.0
    return f


def uhlmann_fidelity_nested(rho, sigma) -> float:
    """``Tr sqrt(sqrt(rho) sigma sqrt(rho))``; kept as an independent cross-check."""
    rho, sigma = _pair(rho, sigma)
    s = psd_sqrt(rho)
    inner = s @ sigma.matrix @ s
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def hs_distance(rho, sigma) -> float:
    """``Tr[(rho - sigma)^2]``, evaluated as a squared Frobenius norm."""
    rho, sigma = _pair(rho, sigma)
    return float(np.sum(np.abs(rho.matrix - sigma.matrix) ** 2))


def super_fidelity_defect(rho, sigma) -> float:
    """``1 - G(rho, sigma)`` without cancellation.

    Uses ``1 - G = |rho - sigma|_F^2 / 2 + (sqrt(1 - p) - sqrt(1 - q))^2 / 2``
    with ``p, q`` the two purities; both terms are non-negative, so the result
    keeps full relative accuracy when ``G`` is within rounding of 1.
    """
    rho, sigma = _pair(rho, sigma)
    a = np.sqrt(max(1.0 - purity(rho), 0.0))
    b = np.sqrt(max(1.0 - purity(sigma), 0.0))
    return 0.5 * hs_distance(rho, sigma) + 0.5 * (a - b) ** 2
