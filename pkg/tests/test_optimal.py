import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subqfi import core, fisher, optimal
from subqfi.fixtures import KET_MINUS, KET_PLUS, SIGMA_Z

H3 = np.diag([1.0, 0.0, -1.0])


def test_qubit_basis():
    b = optimal.optimal_basis(SIGMA_Z, 0.0).vectors
    np.testing.assert_allclose(b[:, 0], KET_PLUS, atol=1e-15)
    np.testing.assert_allclose(b[:, 1], KET_MINUS, atol=1e-15)


def test_qutrit_basis_keeps_middle_vector():
    b = optimal.optimal_basis(H3, 0.0).vectors
    e = np.eye(3)
    np.testing.assert_allclose(b[:, 1], e[:, 1], atol=1e-15)
    np.testing.assert_allclose(b[:, 0], (e[:, 0] + e[:, 2]) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(b[:, 2], (e[:, 0] - e[:, 2]) / np.sqrt(2), atol=1e-15)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 9), chi=st.floats(-7, 7))
def test_basis_orthonormal_and_attains_maximum(seed, d, chi):
    rng = core.make_rng(seed)
    h = core.random_hermitian(d, rng)
    basis = optimal.optimal_basis(h, chi)
    assert np.max(np.abs(basis.gram() - np.eye(d))) <= 1e-9
    lam = np.sort(rng.dirichlet(np.ones(d)))[::-1]
    lam /= lam.sum()
    star = optimal.optimal_state(lam, h, chi)
    assert abs(fisher.subqfi_closed(star.rho_star, h) - star.max_subqfi) <= 1e-9


def test_optimal_state_examples():
    res = optimal.optimal_state([0.75, 0.25], SIGMA_Z)
    plus, minus = np.outer(KET_PLUS, KET_PLUS), np.outer(KET_MINUS, KET_MINUS)
    np.testing.assert_allclose(res.rho_star.matrix, 0.75 * plus + 0.25 * minus, atol=1e-15)
    assert res.max_subqfi == pytest.approx(1.0)
    assert res.max_qfi_observed == pytest.approx(1.0)
    pure = optimal.optimal_state([1.0, 0.0], SIGMA_Z, chi=0.4)
    assert pure.max_subqfi == pytest.approx(4.0)
    assert fidelity_with_plus(pure.rho_star.matrix, 0.4) == pytest.approx(1.0)
    assert optimal.optimal_state(np.full(4, 0.25), core.random_hermitian(4, core.make_rng(0))).max_subqfi == 0


def fidelity_with_plus(rho, chi):
    ket = np.array([1, np.exp(1j * chi)]) / np.sqrt(2)
    return float(np.real(ket.conj() @ rho @ ket))


@pytest.mark.parametrize(
    "lam, h, value",
    [([0.75, 0.25], [1, -1], 1.0), ([0.5, 0.3, 0.2], [1, 0, -1], 0.36), ([1 / 3] * 3, [1, 0, -1], 0.0)],
)
def test_closed_form_maximum(lam, h, value):
    assert optimal.max_subqfi_closed(lam, np.array(h, dtype=float)) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("lam", [[0.25, 0.75], [0.6, 0.6], [1.2, -0.2]])
def test_bad_spectrum(lam):
    with pytest.raises(optimal.BadSpectrum):
        optimal.optimal_state(lam, SIGMA_Z)


def test_block_norm_examples(rng):
    h = core.random_hermitian(4, rng)
    for k in (1, 2, 3):
        assert optimal.offdiag_block_norm(h, h.eigenvectors, k) == pytest.approx(0.0, abs=1e-15)
    star = optimal.optimal_basis(SIGMA_Z)
    assert optimal.offdiag_block_norm(SIGMA_Z, star, 1) == pytest.approx(1.0)
    assert optimal.bloomfield_watson_bound(SIGMA_Z, 1) == pytest.approx(1.0)
    with pytest.raises(optimal.BasisNotOrthonormal):
        optimal.offdiag_block_norm(h, np.ones((4, 4)), 1)


def test_orbit_sampling_identity_gives_closed_form():
    star = optimal.optimal_state([0.5, 0.3, 0.2], H3)
    res = optimal.sample_unitary_orbit(star.rho_star, H3, 1, core.make_rng(0), unitaries=np.eye(3)[None])
    assert res.trials == 1
    assert res.max_subqfi_sampled == pytest.approx(0.36, abs=1e-12)
    assert res.max_qfi_sampled == pytest.approx(star.max_qfi_observed, abs=1e-12)


def test_orbit_sampling_qubit_ceiling():
    res = optimal.sample_unitary_orbit(np.diag([0.75, 0.25]), SIGMA_Z, 10_000, core.make_rng(1))
    assert res.max_subqfi_sampled <= 1 + 1e-9 and res.max_qfi_sampled <= 1 + 1e-9
    assert res.within_ceilings


def test_orbit_sampling_qutrit_joint_argmax():
    res = optimal.sample_unitary_orbit(np.diag([0.5, 0.3, 0.2]), H3, 100_000, core.make_rng(2))
    assert res.max_subqfi_sampled <= 0.36 + 1e-9
    # the sub-QFI maximizer is also (nearly) the QFI maximizer and vice versa
    assert res.qfi_at_subqfi_argmax >= 0.99 * res.max_qfi_sampled
    assert res.subqfi_at_qfi_argmax >= 0.99 * res.max_subqfi_sampled


def test_batched_evaluation_matches_scalar(rng):
    rho, h = core.random_density(4, rng), core.random_hermitian(4, rng)
    us = core.haar_unitary(4, rng, size=16)
    states = us @ rho.matrix @ np.conj(np.swapaxes(us, 1, 2))
    np.testing.assert_allclose(optimal.subqfi_batch(states, h.matrix), [fisher.subqfi_closed(s, h) for s in states], atol=1e-12)
    np.testing.assert_allclose(optimal.qfi_batch(states, h.matrix), [fisher.qfi(s, h) for s in states], atol=1e-9)
