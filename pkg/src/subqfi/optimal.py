"""Closed-form optimal probe states and the checks around them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    DensityMatrix,
    SubQFIError,
    check_dims,
    dagger,
    haar_unitary,
    validate_density,
    validate_generator,
)
from .fisher import qfi, subqfi_closed

ORTHO_TOL = 1e-9
SPECTRUM_TOL = 1e-10
CEILING_TOL = 1e-9


class BadSpectrum(SubQFIError):
    pass


class BasisNotOrthonormal(SubQFIError):
    pass


@dataclass(frozen=True)
class OptimalBasis:
    vectors: np.ndarray  # columns are |phi_1>, ..., |phi_d>
    chi: float

    def gram(self) -> np.ndarray:
        return dagger(self.vectors) @ self.vectors


@dataclass(frozen=True)
class OptimalStateResult:
    rho_star: DensityMatrix
    max_subqfi: float
    # QFI evaluated at rho_star (no closed form is used for it)
    max_qfi_observed: Optional[float] = None


def optimal_basis(h, chi: float = 0.0) -> OptimalBasis:
    """Pair the extremal eigenvectors of ``H`` into equal superpositions.

    Index ``j`` (1-based, descending eigenvalues) is paired with ``d - j + 1``.
    The lower index of each pair gets ``(|h_j> + e^{i chi}|h_k>)/sqrt 2`` and the
    upper one ``(|h_k'> - e^{i chi}|h_j'>)/sqrt 2`` written with the same phase
    placement as its partner, which keeps the basis orthonormal for every
    ``chi``. For odd ``d`` the middle eigenvector is kept as is.
    """
    h = validate_generator(h)
    d = h.dim
    hv = h.eigenvectors
    phase = np.exp(1j * chi)
    out = np.empty((d, d), dtype=complex)
    for j in range(d):
        k = d - 1 - j
        if j == k:
            out[:, j] = hv[:, j]
        elif j < k:
            out[:, j] = (hv[:, j] + phase * hv[:, k]) / np.sqrt(2)
        else:
            out[:, j] = (hv[:, k] - phase * hv[:, j]) / np.sqrt(2)
    basis = OptimalBasis(out, float(chi))
    dev = np.max(np.abs(basis.gram() - np.eye(d)))
    if dev > ORTHO_TOL:
        raise BasisNotOrthonormal(f"optimal basis Gram deviation {dev:.3e}")
    return basis


def check_spectrum(spectrum) -> np.ndarray:
    lam = np.asarray(spectrum, dtype=float).ravel()
    if lam.size == 0 or np.any(lam < 0) or abs(lam.sum() - 1.0) > SPECTRUM_TOL:
        raise BadSpectrum(f"spectrum must be non-negative and sum to 1, got {lam.tolist()}")
    if np.any(np.diff(lam) > 0):
        raise BadSpectrum(f"spectrum must be sorted descending, got {lam.tolist()}")
    return lam


def _generator_eigenvalues(h) -> np.ndarray:
    arr = np.asarray(h) if not hasattr(h, "eigenvalues") else None
    if arr is not None and arr.ndim == 1:
        return np.sort(arr.astype(float))[::-1]
    return validate_generator(h).eigenvalues


def max_subqfi_closed(spectrum, h) -> float:
    """``1/2 sum_k (l_k - l_{d-k+1})^2 (h_k - h_{d-k+1})^2``.

    ``h`` may be a generator matrix or a 1-D array of its eigenvalues.
    """
    lam = check_spectrum(spectrum)
    hs = _generator_eigenvalues(h)
    if lam.size != hs.size:
        raise BadSpectrum(f"spectrum has {lam.size} entries, generator dimension is {hs.size}")
    return float(0.5 * np.sum((lam - lam[::-1]) ** 2 * (hs - hs[::-1]) ** 2))


def optimal_state(spectrum, h, chi: float = 0.0) -> OptimalStateResult:
    lam = check_spectrum(spectrum)
    h = validate_generator(h)
    if lam.size != h.dim:
        raise BadSpectrum(f"spectrum has {lam.size} entries, generator dimension is {h.dim}")
    phi = optimal_basis(h, chi).vectors
    rho_star = validate_density((phi * lam) @ dagger(phi))
    return OptimalStateResult(rho_star, max_subqfi_closed(lam, h), qfi(rho_star, h))


def bloomfield_watson_bound(h, k: int) -> float:
    """``1/4 sum_{i <= min(k, d-k)} (h_i - h_{d-i+1})^2``."""
    hs = _generator_eigenvalues(h)
    m = min(k, hs.size - k)
    return float(0.25 * np.sum((hs[:m] - hs[::-1][:m]) ** 2))


def offdiag_block_norm(h, basis, k: int) -> float:
    """Squared Frobenius norm of the upper-right ``k x (d-k)`` block of ``H`` in ``basis``."""
    h = validate_generator(h)
    b = basis.vectors if isinstance(basis, OptimalBasis) else np.asarray(basis, dtype=complex)
    d = h.dim
    if b.shape != (d, d):
        raise BasisNotOrthonormal(f"basis shape {b.shape} does not match dimension {d}")
    dev = np.max(np.abs(dagger(b) @ b - np.eye(d)))
    if dev > ORTHO_TOL:
        raise BasisNotOrthonormal(f"Gram deviation {dev:.3e}")
    if not 1 <= k <= d - 1:
        raise ValueError(f"k must lie in [1, {d - 1}], got {k}")
    hb = dagger(b) @ h.matrix @ b
    return float(np.sum(np.abs(hb[:k, k:]) ** 2))


# -- batched evaluation over many unitaries ------------------------------------


def subqfi_batch(rhos: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Closed-form sub-QFI for a stack of states, ``rhos`` of shape ``(n, d, d)``."""
    c = rhos @ h - h @ rhos
    return -2.0 * np.einsum("nij,nji->n", c, c).real


def qfi_batch(rhos: np.ndarray, h: np.ndarray) -> np.ndarray:
    lam, v = np.linalg.eigh(rhos)
    lam = np.clip(lam, 0.0, None)
    hm = dagger(v) @ h @ v
    total = lam[:, :, None] + lam[:, None, :]
    gap = lam[:, :, None] - lam[:, None, :]
    keep = total > 1e-12
    w = np.where(keep, gap**2 / np.where(keep, total, 1.0), 0.0)
    return 2.0 * np.sum(w * np.abs(hm) ** 2, axis=(1, 2))


@dataclass(frozen=True)
class OrbitSample:
    max_subqfi_sampled: float
    max_qfi_sampled: float
    argmax_agreement: float  # max-abs distance between the two sampled argmax states
    subqfi_ceiling: float
    qfi_ceiling: float
    qfi_at_subqfi_argmax: float
    subqfi_at_qfi_argmax: float
    trials: int

    @property
    def within_ceilings(self) -> bool:
        return (
            self.max_subqfi_sampled <= self.subqfi_ceiling + CEILING_TOL
            and self.max_qfi_sampled <= self.qfi_ceiling + CEILING_TOL
        )


def sample_unitary_orbit(
    rho,
    h,
    trials: int,
    rng: np.random.Generator,
    unitaries: Optional[np.ndarray] = None,
    chunk: int = 20000,
) -> OrbitSample:
    """Random search over ``U rho U^dag`` for both information measures.

    Ceilings are the closed-form sub-QFI maximum and the QFI of the
    closed-form optimal state with the same spectrum. Pass ``unitaries`` to
    evaluate a fixed set instead of Haar draws.
    """
    rho, h = validate_density(rho), validate_generator(h)
    check_dims(rho, h)
    if unitaries is not None:
        trials = len(unitaries)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    star = optimal_state(rho.eigenvalues, h)
    best_sub, best_q = (-np.inf, None), (-np.inf, None)
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        us = unitaries[done : done + n] if unitaries is not None else haar_unitary(rho.dim, rng, size=n)
        states = us @ rho.matrix @ dagger(us)
        sub = subqfi_batch(states, h.matrix)
        q = qfi_batch(states, h.matrix)
        i, j = int(np.argmax(sub)), int(np.argmax(q))
        if sub[i] > best_sub[0]:
            best_sub = (float(sub[i]), states[i], float(q[i]))
        if q[j] > best_q[0]:
            best_q = (float(q[j]), states[j], float(sub[j]))
        done += n
    return OrbitSample(
        max_subqfi_sampled=best_sub[0],
        max_qfi_sampled=best_q[0],
        argmax_agreement=float(np.max(np.abs(best_sub[1] - best_q[1]))),
        subqfi_ceiling=star.max_subqfi,
        qfi_ceiling=star.max_qfi_observed,
        qfi_at_subqfi_argmax=best_sub[2],
        subqfi_at_qfi_argmax=best_q[2],
        trials=trials,
    )
