"""Small hand-checkable instances shared by tests, scripts and the CLI."""

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)

KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def plus_state() -> np.ndarray:
    return np.outer(KET_PLUS, KET_PLUS.conj())


def x_basis_mixed(p: float = 0.75) -> np.ndarray:
    """``p |+><+| + (1-p) |-><-|``."""
    return p * np.outer(KET_PLUS, KET_PLUS.conj()) + (1 - p) * np.outer(KET_MINUS, KET_MINUS.conj())


def qutrit() -> tuple[np.ndarray, np.ndarray]:
    """``diag(0.5, 0.3, 0.2)`` with a nearest-neighbour hopping generator."""
    rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = h[1, 0] = h[1, 2] = h[2, 1] = 1.0
    return rho, h


def commuting() -> tuple[np.ndarray, np.ndarray]:
    return np.diag([0.5, 0.3, 0.2]).astype(complex), np.diag([1.0, 0.0, -1.0]).astype(complex)
