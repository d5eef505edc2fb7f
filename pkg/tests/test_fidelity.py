import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subqfi import core, fidelity
from subqfi.fixtures import KET_PLUS, commuting

ZERO, ONE = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
PLUS = np.outer(KET_PLUS, KET_PLUS.conj())
MIXED = np.eye(2) / 2


@pytest.mark.parametrize("rho, value", [(MIXED, 0.5), (PLUS, 1.0), (np.diag([0.75, 0.25]), 0.625)])
def test_purity(rho, value):
    assert fidelity.purity(rho) == pytest.approx(value, abs=1e-15)


def test_overlap_examples(rng):
    rho = core.random_density(3, rng)
    assert fidelity.overlap(rho, rho) == pytest.approx(fidelity.purity(rho), abs=1e-15)
    assert fidelity.overlap(ZERO, ONE) == 0
    assert fidelity.overlap(ZERO, PLUS) == pytest.approx(0.5, abs=1e-15)


def test_super_fidelity_examples(rng):
    rho = core.random_density(4, rng)
    assert fidelity.super_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-14)
    assert fidelity.super_fidelity(ZERO, ONE) == 0
    assert fidelity.super_fidelity(MIXED, ZERO) == pytest.approx(0.5, abs=1e-15)


def test_uhlmann_examples(rng):
    rho = core.random_density(3, rng)
    assert fidelity.uhlmann_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-9)
    psi, phi = core.random_pure(3, rng), core.random_pure(3, rng)
    amp = abs(np.vdot(psi.eigenvectors[:, 0], phi.eigenvectors[:, 0]))
    assert fidelity.uhlmann_fidelity(psi, phi) == pytest.approx(amp, abs=1e-9)


def test_uhlmann_two_formulas_agree():
    sigma = np.diag([0.75, 0.25])
    a = fidelity.uhlmann_fidelity(MIXED, sigma)
    b = fidelity.uhlmann_fidelity_nested(MIXED, sigma)
    assert abs(a - b) <= 1e-9
    # (sqrt(0.75) + sqrt(0.25)) / sqrt(2) = cos(15 deg)
    assert a == pytest.approx(np.cos(np.pi / 12), abs=1e-12)


@pytest.mark.parametrize("pair, value", [((ZERO, ZERO), 0.0), ((ZERO, ONE), 2.0), ((MIXED, ZERO), 0.5)])
def test_hs_distance(pair, value):
    assert fidelity.hs_distance(*pair) == pytest.approx(value, abs=1e-15)


def test_defect_has_no_cancellation():
    rho, h = commuting()
    r = core.validate_density(rho)
    sigma = core.encode(r, core.validate_generator(h), 1e-3)
    assert fidelity.super_fidelity_defect(r, sigma) <= 1e-15


def test_non_real_trace_rejected():
    with pytest.raises(fidelity.NonRealTrace):
        fidelity.real_trace(1 + 1e-3j)


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=100, deadline=None)
@given(seed=seeds, d=st.integers(2, 6))
def test_fidelity_below_root_super_fidelity(seed, d):
    rng = core.make_rng(seed)
    r, s = core.random_density(d, rng), core.random_density(d, rng)
    f, g = fidelity.uhlmann_fidelity(r, s), fidelity.super_fidelity(r, s)
    assert 0 <= f <= 1 + 1e-9 and 0 <= g <= 1 + 1e-12
    assert f <= np.sqrt(g) + 1e-9
    assert abs(f - fidelity.uhlmann_fidelity_nested(r, s)) <= 1e-7


@settings(max_examples=100, deadline=None)
@given(seed=seeds)
def test_qubit_fidelity_squared_equals_super_fidelity(seed):
    rng = core.make_rng(seed)
    r, s = core.random_density(2, rng), core.random_density(2, rng)
    assert abs(fidelity.uhlmann_fidelity(r, s) ** 2 - fidelity.super_fidelity(r, s)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=st.integers(2, 6))
def test_defect_matches_naive_form(seed, d):
    rng = core.make_rng(seed)
    r, s = core.random_density(d, rng), core.random_density(d, rng)
    naive = 1 - fidelity.super_fidelity(r, s)
    assert abs(fidelity.super_fidelity_defect(r, s) - naive) <= 1e-12
