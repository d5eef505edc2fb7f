"""Finite-shot estimation of overlaps and of the finite-difference sub-QFI.

The overlap circuit is modelled by its measurement statistics only: each shot
returns +1 or -1 with mean ``Tr[rho sigma]``, so a run of ``n`` shots is one
binomial draw. That is exact for the estimator and costs nothing per shot.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .core import check_dims, encode, make_rng, validate_density, validate_generator
from .fidelity import overlap, purity
from .fisher import _check_delta, subqfi_closed, subqfi_fd

MIN_SHOTS_PER_TERM = 100


@dataclass(frozen=True)
class ShotModel:
    shots: int
    rng: np.random.Generator

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")

    def measure(self, mean: float) -> "EstimateWithError":
        """Sample mean and standard error of ``shots`` outcomes in {-1, +1}."""
        p_plus = min(max((1.0 + mean) / 2.0, 0.0), 1.0)
        k = int(self.rng.binomial(self.shots, p_plus))
        est = (2.0 * k - self.shots) / self.shots
        # population std of +-1 outcomes with sample mean est
        std = np.sqrt(max(1.0 - est * est, 0.0))
        return EstimateWithError(est, float(std / np.sqrt(self.shots)), self.shots)


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_error: float
    shots: int
    bias_note: Optional[float] = None
    flags: tuple = field(default_factory=tuple)

    def covers(self, exact: float, k: float = 3.0) -> bool:
        """Is ``exact`` within ``bias_note + k * std_error`` of the estimate?"""
        return abs(self.value - exact) <= (self.bias_note or 0.0) + k * self.std_error

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "shots": self.shots,
            "bias_note": self.bias_note,
            "flags": list(self.flags),
        }


def simulate_overlap(rho, sigma, shots: int, rng: np.random.Generator) -> EstimateWithError:
    return ShotModel(shots, rng).measure(overlap(rho, sigma))


def subqfi_from_traces(tr_cross: float, p_a: float, p_b: float, delta: float) -> tuple[float, bool]:
    """Plug three traces into the super-fidelity finite difference.

    Returns ``(value, clamped)``; ``clamped`` is set when the purity radicand
    was negative (shot noise pushed a purity above 1) and was set to zero.
    ``1 - sqrt(G)`` is allowed to go negative.
    """
    radicand = (1.0 - p_a) * (1.0 - p_b)
    clamped = radicand < 0
    g = tr_cross + np.sqrt(max(radicand, 0.0))
    return 8.0 * (1.0 - np.sqrt(max(g, 0.0))) / delta**2, clamped


def _propagated_error(o: EstimateWithError, pa: EstimateWithError, pb: EstimateWithError, delta: float) -> float:
    """First-order (delta-method) standard error of ``8 (1 - sqrt G) / delta^2``."""
    a, b = 1.0 - pa.value, 1.0 - pb.value
    if a > 0 and b > 0:
        da, db = -0.5 * np.sqrt(b / a), -0.5 * np.sqrt(a / b)
    else:
        # along a unitary orbit both purities agree, where each partial is -1/2
        da = db = -0.5
    g = o.value + np.sqrt(max(a * b, 0.0))
    dval_dg = -4.0 / (delta**2 * np.sqrt(max(g, 1e-300)))
    var_g = o.std_error**2 + (da * pa.std_error) ** 2 + (db * pb.std_error) ** 2
    return float(abs(dval_dg) * np.sqrt(var_g))


def estimate_subqfi(
    rho,
    h,
    theta: float,
    delta: float,
    shots: int,
    rng: np.random.Generator,
) -> EstimateWithError:
    """Shot-noise estimate of the sub-QFI from three independently measured traces.

    ``shots`` is per trace. ``bias_note`` is the exact truncation error of the
    finite difference at this ``delta`` (noiseless value minus the closed form).
    """
    _check_delta(delta)
    if shots < MIN_SHOTS_PER_TERM:
        raise ValueError(f"need at least {MIN_SHOTS_PER_TERM} shots per term, got {shots}")
    rho, h = validate_density(rho), validate_generator(h)
    check_dims(rho, h)
    a = validate_density(encode(rho, h, theta))
    b = validate_density(encode(rho, h, theta + delta))
    model = ShotModel(shots, rng)
    o = model.measure(overlap(a, b))
    pa = model.measure(purity(a))
    pb = model.measure(purity(b))
    value, clamped = subqfi_from_traces(o.value, pa.value, pb.value, delta)
    bias = abs(subqfi_fd(rho, h, delta, richardson=False) - subqfi_closed(rho, h))
    return EstimateWithError(
        value=float(value),
        std_error=_propagated_error(o, pa, pb, delta),
        shots=shots,
        bias_note=float(bias),
        flags=("negative_radicand",) if clamped else (),
    )


def noiseless_subqfi(rho, h, theta: float, delta: float) -> float:
    """The infinite-shot limit: exact traces through the same plug-in formula."""
    rho, h = validate_density(rho), validate_generator(h)
    a = validate_density(encode(rho, h, theta))
    b = validate_density(encode(rho, h, theta + delta))
    return subqfi_from_traces(overlap(a, b), purity(a), purity(b), delta)[0]


SWEEP_COLUMNS = ("delta", "shots", "estimate", "std_error", "bias_note", "exact_value", "seed")


def shot_sweep(
    rho,
    h,
    deltas: Iterable[float],
    shots_list: Iterable[int],
    seeds: Iterable[int],
    theta: float = 0.0,
) -> list[dict]:
    """One row per ``(delta, shots, seed)``; every row uses its own seeded stream."""
    exact = subqfi_closed(rho, h)
    rows = []
    for delta in deltas:
        for shots in shots_list:
            for seed in seeds:
                est = estimate_subqfi(rho, h, theta, delta, int(shots), make_rng(int(seed)))
                rows.append(
                    {
                        "delta": delta,
                        "shots": int(shots),
                        "estimate": est.value,
                        "std_error": est.std_error,
                        "bias_note": est.bias_note,
                        "exact_value": exact,
                        "seed": int(seed),
                    }
                )
    return rows


def rows_to_csv(rows: list[dict], columns=SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()
