"""Validated density matrices, generators, phase encodings and random instances.

Everything downstream works on plain ``numpy`` arrays internally; the
dataclasses here only guarantee that the arrays entering the numerics are
square, finite, Hermitian and (for states) positive with unit trace, and they
cache the eigendecomposition so it is computed once per object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
RANK_TOL = 1e-10
MAX_DIM = 2**10


class SubQFIError(ValueError):
    """Base class for every validation or precondition failure in the package."""


class NotSquare(SubQFIError):
    pass


class NotFinite(SubQFIError):
    pass


class NotHermitian(SubQFIError):
    pass


class NotUnitTrace(SubQFIError):
    pass


class NotPositive(SubQFIError):
    pass


class DimensionMismatch(SubQFIError):
    pass


class BadRank(SubQFIError):
    pass


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite square complex128 array, or raise."""
    if isinstance(m, (DensityMatrix, HermitianGenerator)):
        return m.matrix
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NotSquare(f"expected a non-empty square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise NotSquare(f"dimension {a.shape[0]} exceeds supported maximum {MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise NotFinite("matrix has NaN or infinite entries")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2).conj()


def _check_hermitian(a: np.ndarray, what: str) -> np.ndarray:
    dev = float(np.max(np.abs(a - dagger(a))))
    if dev > HERMITIAN_TOL:
        raise NotHermitian(f"{what} is not Hermitian: max |M - M^dag| = {dev:.3e}")
    return 0.5 * (a + dagger(a))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state with its descending, clamped spectrum.

    Build through :func:`validate_density`; the constructor does not check.
    ``eigenvectors[:, j]`` pairs with ``eigenvalues[j]``.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)

    def conjugate(self, u: np.ndarray) -> "DensityMatrix":
        """``U rho U^dag`` as a new validated state."""
        return validate_density(u @ self.matrix @ dagger(u))


@dataclass(frozen=True, eq=False)
class HermitianGenerator:
    """A validated Hermitian matrix with descending eigenvalues."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def unitary(self, theta: float) -> np.ndarray:
        """``exp(-i theta H)`` from the cached spectrum."""
        v = self.eigenvectors
        return (v * np.exp(-1j * theta * self.eigenvalues)) @ dagger(v)


def validate_density(m) -> DensityMatrix:
    if isinstance(m, DensityMatrix):
        return m
    a = _check_hermitian(as_matrix(m), "density matrix")
    tr = np.trace(a)
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotUnitTrace(f"trace is {tr.real:.12g}{tr.imag:+.3g}j, expected 1")
    w, v = np.linalg.eigh(a)
    w, v = w[::-1], v[:, ::-1]
    if w[-1] < -PSD_TOL:
        raise NotPositive(f"negative eigenvalue {w[-1]:.3e}")
    w = np.clip(w, 0.0, None)
    w = np.clip(w / w.sum(), 0.0, 1.0)
    rank = int(np.count_nonzero(w > RANK_TOL))
    return DensityMatrix(a, w, v, rank)


def validate_generator(m) -> HermitianGenerator:
    if isinstance(m, HermitianGenerator):
        return m
    a = _check_hermitian(as_matrix(m), "generator")
    w, v = np.linalg.eigh(a)
    return HermitianGenerator(a, w[::-1].copy(), v[:, ::-1].copy())


def check_dims(*mats) -> int:
    dims = {x.shape[0] if isinstance(x, np.ndarray) else x.dim for x in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True)
class PhaseEncoding:
    """``rho -> W rho W^dag`` with ``W = exp(-i theta H)``."""

    generator: HermitianGenerator
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "generator", validate_generator(self.generator))

    @property
    def unitary(self) -> np.ndarray:
        return self.generator.unitary(self.theta)

    def apply(self, rho) -> DensityMatrix:
        rho = validate_density(rho)
        check_dims(rho, self.generator)
        w = self.unitary
        return validate_density(w @ rho.matrix @ dagger(w))

    def shifted(self, delta: float) -> "PhaseEncoding":
        return PhaseEncoding(self.generator, self.theta + delta)


def encode(rho, generator, theta: float) -> np.ndarray:
    """Raw array version of :meth:`PhaseEncoding.apply` (no re-validation)."""
    u = generator.unitary(theta)
    return u @ rho.matrix @ dagger(u)


def psd_sqrt(rho) -> np.ndarray:
    """Principal square root from the clamped spectrum."""
    rho = validate_density(rho)
    v = rho.eigenvectors
    return (v * np.sqrt(rho.eigenvalues)) @ dagger(v)


def partial_trace(rho, dims: Sequence[int], keep: Union[str, int] = "A") -> DensityMatrix:
    rho = validate_density(rho)
    d_a, d_b = (int(x) for x in dims)
    if d_a * d_b != rho.dim:
        raise DimensionMismatch(f"{d_a} x {d_b} != {rho.dim}")
    t = rho.matrix.reshape(d_a, d_b, d_a, d_b)
    if keep in ("A", "a", 0):
        out = np.einsum("ijkj->ik", t)
    elif keep in ("B", "b", 1):
        out = np.einsum("ijil->jl", t)
    else:
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    return validate_density(out)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


# -- random instances --------------------------------------------------------


def make_rng(seed: int | None = None) -> np.random.Generator:
    """The repo-wide generator: PCG64 seeded with a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(seed))


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent streams for parallel tasks, split from one seed."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    r = d if rank is None else int(rank)
    if not 1 <= r <= d:
        raise BadRank(f"rank must be in [1, {d}], got {r}")
    a = ginibre(rng, (d, r))
    m = a @ dagger(a)
    return validate_density(m / np.trace(m).real)


def random_pure(d: int, rng: np.random.Generator) -> DensityMatrix:
    return random_density(d, rng, rank=1)


def random_hermitian(d: int, rng: np.random.Generator) -> HermitianGenerator:
    """Hermitian with spectrum rescaled so that ``max |h_j| == 1``."""
    b = ginibre(rng, (d, d))
    h = 0.5 * (b + dagger(b))
    return validate_generator(h / np.max(np.abs(np.linalg.eigvalsh(h))))


def haar_unitary(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed unitaries (QR of a Ginibre matrix with phase-fixed R).

    With ``size`` set, returns a stack of shape ``(size, d, d)``.
    """
    shape = (d, d) if size is None else (size, d, d)
    q, r = np.linalg.qr(ginibre(rng, shape))
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[..., None, :]


def sample(kind: str, d: int, rng: np.random.Generator, rank: int | None = None):
    """Dispatch over ``density``, ``pure``, ``hermitian`` and ``unitary``."""
    if kind == "density":
        return random_density(d, rng, rank)
    if kind == "pure":
        return random_pure(d, rng)
    if kind == "hermitian":
        return random_hermitian(d, rng)
    if kind == "unitary":
        return haar_unitary(d, rng)
    raise ValueError(f"unknown sample kind {kind!r}")


# -- JSON matrix format -------------------------------------------------------


def matrix_to_dict(m) -> dict:
    a = as_matrix(m)
    out = {"dim": a.shape[0], "re": a.real.tolist()}
    if np.any(a.imag != 0):
        out["im"] = a.imag.tolist()
    return out


def matrix_from_dict(obj: dict) -> np.ndarray:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SubQFIError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != im.shape:
        raise DimensionMismatch(f"re shape {re.shape} != im shape {im.shape}")
    a = as_matrix(re + 1j * im)
    if "dim" in obj and int(obj["dim"]) != a.shape[0]:
        raise DimensionMismatch(f"declared dim {obj['dim']} != actual {a.shape[0]}")
    return a


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_dict(json.load(fh))


def save_matrix(m, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_dict(m), fh)
