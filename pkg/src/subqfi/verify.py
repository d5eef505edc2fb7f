"""Seeded property sweeps over random instances.

Each check draws its own instances from a stream split off the suite seed,
so checks can be run individually and still reproduce the suite's numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import core, fidelity, fisher, optimal, optimize

ROUTE_REL_TOL_EXACT = 1e-7
ROUTE_REL_TOL_FD = 1e-5
REL_FLOOR = 1e-6


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    worst: float
    trials: int
    gating: bool = True
    skipped: bool = False
    note: str = ""

    def line(self) -> str:
        if self.skipped:
            status = "SKIP"
        elif not self.gating:
            status = "INFO"
        else:
            status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name:<28s} trials={self.trials:<7d} worst={self.worst:.3e}"
        return f"{text}  {self.note}" if self.note else text


def rel_diff(a: float, b: float, floor: float = REL_FLOOR) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)


def _instances(d: int, trials: int, rng, rank=None):
    for _ in range(trials):
        yield core.random_density(d, rng, rank), core.random_hermitian(d, rng)


def _factor(d: int):
    for p in range(2, int(np.sqrt(d)) + 1):
        if d % p == 0:
            return p, d // p
    return None


# -- individual checks ---------------------------------------------------------


def check_core(d, trials, rng):
    worst = 0.0
    for _ in range(trials):
        rho = core.random_density(d, rng, int(rng.integers(1, d + 1)))
        s = core.psd_sqrt(rho)
        worst = max(
            worst,
            np.max(np.abs(rho.matrix - rho.reconstruct())),
            np.max(np.abs(s @ s - rho.matrix)),
        )
    return PropertyResult("core_reconstruction", worst <= 1e-9, worst, trials)


def check_fidelity_bound(d, trials, rng):
    worst, worst_sat = -np.inf, 0.0
    for _ in range(trials):
        r, s = core.random_density(d, rng), core.random_density(d, rng)
        f, g = fidelity.uhlmann_fidelity(r, s), fidelity.super_fidelity(r, s)
        worst = max(worst, f - np.sqrt(g))
        if d == 2:
            worst_sat = max(worst_sat, abs(f * f - g))
    ok = worst <= 1e-9 and worst_sat <= 1e-9
    note = f"qubit |F^2-G| worst={worst_sat:.3e}" if d == 2 else ""
    return PropertyResult("fidelity_le_sqrt_superfidelity", ok, worst, trials, note=note)


def check_fidelity_symmetry(d, trials, rng):
    worst_sym, worst_inv = 0.0, 0.0
    for _ in range(trials):
        r, s = core.random_density(d, rng), core.random_density(d, rng)
        u = core.haar_unitary(d, rng)
        ru, su = r.conjugate(u), s.conjugate(u)
        for fn in (fidelity.uhlmann_fidelity, fidelity.super_fidelity, fidelity.hs_distance):
            base = fn(r, s)
            if fn is not fidelity.hs_distance:
                worst_sym = max(worst_sym, abs(base - fn(s, r)))
            worst_inv = max(worst_inv, abs(base - fn(ru, su)))
    ok = worst_sym <= 1e-12 and worst_inv <= 1e-9
    return PropertyResult("fidelity_symmetry_invariance", ok, max(worst_sym, worst_inv), trials)


def check_routes(d, trials, rng):
    worst_exact, worst_fd = 0.0, 0.0
    for rho, h in _instances(d, trials, rng):
        ref = fisher.subqfi_closed(rho, h)
        exact = [fisher.subqfi_spectral(rho, h), fisher.subqfi_nsld(rho, h).value]
        fd = [fisher.subqfi_fd(rho, h), fisher.hs_curvature(rho, h)]
        worst_exact = max([worst_exact] + [rel_diff(ref, v) for v in exact] + [rel_diff(*exact)])
        worst_fd = max([worst_fd] + [rel_diff(ref, v) for v in fd])
    ok = worst_exact <= ROUTE_REL_TOL_EXACT and worst_fd <= ROUTE_REL_TOL_FD
    return PropertyResult(
        "subqfi_route_equivalence", ok, worst_fd, trials, note=f"exact-routes worst={worst_exact:.3e}"
    )


def check_theta_independence(d, trials, rng):
    worst = 0.0
    for rho, h in _instances(d, trials, rng):
        theta = rng.uniform(0, 2 * np.pi)
        moved = core.PhaseEncoding(h, theta).apply(rho)
        worst = max(worst, abs(fisher.subqfi_closed(moved, h) - fisher.subqfi_closed(rho, h)))
    return PropertyResult("theta_independence", worst <= 1e-9, worst, trials)


def check_faithfulness(d, trials, rng):
    worst_zero, min_pos = 0.0, np.inf
    for _ in range(trials):
        h = core.random_hermitian(d, rng)
        lam = np.sort(rng.dirichlet(np.ones(d)))[::-1]
        v = h.eigenvectors
        commuting = core.validate_density((v * lam) @ core.dagger(v))
        worst_zero = max(worst_zero, fisher.qfi(commuting, h), fisher.subqfi_closed(commuting, h))
        rho = core.random_density(d, rng)
        if np.max(np.abs(core.commutator(rho.matrix, h.matrix))) > 1e-6:
            min_pos = min(min_pos, fisher.qfi(rho, h), fisher.subqfi_closed(rho, h))
    ok = worst_zero <= 1e-10 and min_pos > 0
    return PropertyResult("faithfulness_zero_set", ok, worst_zero, trials, note=f"min nonzero={min_pos:.3e}")


def check_convexity(d, trials, rng):
    worst = -np.inf
    for _ in range(trials):
        h = core.random_hermitian(d, rng)
        states = [core.random_density(d, rng, int(rng.integers(1, d + 1))) for _ in range(3)]
        w = rng.dirichlet(np.ones(3))
        mix = sum(wk * s.matrix for wk, s in zip(w, states))
        lhs = fisher.subqfi_closed(mix, h)
        rhs = sum(wk * fisher.subqfi_closed(s, h) for wk, s in zip(w, states))
        worst = max(worst, lhs - rhs, -lhs)
    return PropertyResult("nonnegativity_convexity", worst <= 1e-9, worst, trials)


def check_bound_chain(d, trials, rng):
    worst = -np.inf
    for rho, h in _instances(d, trials, rng):
        rep = fisher.bound_report(rho, h)
        worst = max(worst, rep.sub_qfi - rep.qfi, rep.skew_info - rep.qfi, rep.sub_qfi / 8 - rep.skew_info)
    return PropertyResult("bound_chain", worst <= fisher.CHAIN_TOL, worst, trials)


def check_wy_quarter(d, trials, rng):
    """I_WY >= sub-QFI / 4: logged, never gating (it is false in general)."""
    fails, worst = 0, -np.inf
    for rho, h in _instances(d, trials, rng):
        wy, sub = fisher.skew_information(rho, h), fisher.subqfi_closed(rho, h)
        fails += wy + fisher.CHAIN_TOL < sub / 4
        worst = max(worst, sub / 4 - wy)
    return PropertyResult(
        "wy_quarter_diagnostic", fails == 0, worst, trials, gating=False, note=f"violations={fails}"
    )


def check_pure_saturation(d, trials, rng):
    worst = 0.0
    for _ in range(trials):
        rho, h = core.random_pure(d, rng), core.random_hermitian(d, rng)
        q, sub = fisher.qfi(rho, h), fisher.subqfi_closed(rho, h)
        var4 = 4 * fisher.variance(rho, h)
        worst = max(worst, abs(q - sub), abs(q - var4), abs(sub - var4))
    return PropertyResult("pure_state_saturation", worst <= 1e-8, worst, trials)


def check_qubit_coincidence(d, trials, rng):
    if d != 2:
        return PropertyResult("qubit_coincidence", True, 0.0, 0, skipped=True, note="d != 2")
    worst = 0.0
    for rho, h in _instances(2, trials, rng):
        worst = max(worst, abs(fisher.qfi(rho, h) - fisher.subqfi_closed(rho, h)))
    return PropertyResult("qubit_coincidence", worst <= 1e-8, worst, trials)


def check_nsld_zero_mean(d, trials, rng):
    worst = 0.0
    for rho, h in _instances(d, trials, rng):
        worst = max(worst, abs(fisher.subqfi_nsld(rho, h).zero_mean_residual))
    return PropertyResult("nsld_zero_mean", worst <= 1e-8, worst, trials)


def check_bipartite(d, trials, rng):
    dims = _factor(d)
    if dims is None:
        return PropertyResult("bipartite_identities", True, 0.0, 0, skipped=True, note=f"d={d} is prime")
    d_a, d_b = dims
    worst_add, worst_pt = 0.0, -np.inf
    for _ in range(trials):
        ra, rb = core.random_density(d_a, rng), core.random_density(d_b, rng)
        ha, hb = core.random_hermitian(d_a, rng), core.random_hermitian(d_b, rng)
        h = np.kron(ha.matrix, np.eye(d_b)) + np.kron(np.eye(d_a), hb.matrix)
        lhs = fisher.subqfi_closed(np.kron(ra.matrix, rb.matrix), h)
        rhs = fidelity.purity(ra) * fisher.subqfi_closed(rb, hb) + fidelity.purity(rb) * fisher.subqfi_closed(ra, ha)
        worst_add = max(worst_add, abs(lhs - rhs))

        rho = core.random_density(d, rng)
        h_local = np.kron(ha.matrix, np.eye(d_b))
        reduced = core.partial_trace(rho, (d_a, d_b), "A")
        worst_pt = max(worst_pt, fisher.subqfi_closed(reduced, ha) / d_b - fisher.subqfi_closed(rho, h_local))
    ok = worst_add <= 1e-8 and worst_pt <= 1e-9
    return PropertyResult(
        "bipartite_identities", ok, worst_add, trials, note=f"{d_a}x{d_b}, partial-trace worst={worst_pt:.3e}"
    )


def check_attainment(d, trials, rng):
    worst = 0.0
    for _ in range(trials):
        h = core.random_hermitian(d, rng)
        lam = np.sort(rng.dirichlet(np.ones(d)))[::-1]
        lam = lam / lam.sum()
        target = optimal.max_subqfi_closed(lam, h)
        for chi in (0.0, np.pi / 3, np.pi):
            star = optimal.optimal_state(lam, h, chi).rho_star
            worst = max(worst, abs(fisher.subqfi_closed(star, h) - target))
    return PropertyResult("optimal_state_attainment", worst <= 1e-9, worst, trials)


def check_haar_ceiling(d, trials, rng, samples_per_trial: int = 100, max_samples: int = 100_000):
    n = min(trials * samples_per_trial, max_samples)
    rho, h = core.random_density(d, rng), core.random_hermitian(d, rng)
    res = optimal.sample_unitary_orbit(rho, h, n, rng)
    excess = max(res.max_subqfi_sampled - res.subqfi_ceiling, res.max_qfi_sampled - res.qfi_ceiling)
    return PropertyResult("haar_ceiling", excess <= optimal.CEILING_TOL, excess, n)


def check_bloomfield_watson(d, trials, rng):
    if d < 2:
        return PropertyResult("bloomfield_watson", True, 0.0, 0, skipped=True)
    worst, worst_sat = -np.inf, 0.0
    for _ in range(trials):
        h = core.random_hermitian(d, rng)
        basis = core.haar_unitary(d, rng)
        star = optimal.optimal_basis(h)
        for k in range(1, d):
            bound = optimal.bloomfield_watson_bound(h, k)
            worst = max(worst, optimal.offdiag_block_norm(h, basis, k) - bound)
            worst_sat = max(worst_sat, abs(optimal.offdiag_block_norm(h, star, k) - bound))
    ok = worst <= 1e-9 and worst_sat <= 1e-9
    return PropertyResult("bloomfield_watson", ok, worst, trials, note=f"saturation worst={worst_sat:.3e}")


def check_optimizer(d, trials, rng, instances: int = 2):
    worst = 0.0
    for _ in range(instances):
        rho, h = core.random_density(d, rng), core.random_hermitian(d, rng)
        trace = optimize.maximize(rho, h, rng=rng)
        worst = max(worst, abs(trace.best_value - trace.target))
        if trace.best_value > trace.target + 1e-8:
            worst = np.inf
    return PropertyResult("optimizer_attainment", worst <= 1e-6, worst, instances)


CHECKS: list[Callable] = [
    check_core,
    check_fidelity_bound,
    check_fidelity_symmetry,
    check_routes,
    check_theta_independence,
    check_faithfulness,
    check_convexity,
    check_bound_chain,
    check_pure_saturation,
    check_qubit_coincidence,
    check_nsld_zero_mean,
    check_bipartite,
    check_attainment,
    check_haar_ceiling,
    check_bloomfield_watson,
    check_optimizer,
    check_wy_quarter,
]


def run_suite(dim: int, trials: int, seed: int) -> list[PropertyResult]:
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    rngs = core.spawn_rngs(seed, len(CHECKS))
    return [check(dim, trials, rng) for check, rng in zip(CHECKS, rngs)]


def suite_passed(results: list[PropertyResult]) -> bool:
    return all(r.passed for r in results if r.gating and not r.skipped)
