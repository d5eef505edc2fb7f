import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subqfi import core
from subqfi.fixtures import KET_MINUS, KET_PLUS, SIGMA_Z

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 8)


def test_maximally_mixed_is_valid():
    rho = core.validate_density(np.eye(2) / 2)
    np.testing.assert_allclose(rho.eigenvalues, [0.5, 0.5], atol=1e-15)
    assert rho.rank == 2


def test_pure_projector_rank_one():
    rho = core.validate_density(np.diag([1.0, 0.0]))
    np.testing.assert_allclose(rho.eigenvalues, [1.0, 0.0])
    assert rho.rank == 1


@pytest.mark.parametrize(
    "m, err",
    [
        (np.diag([0.6, 0.6]), core.NotUnitTrace),
        (np.array([[0.5, 0.1], [0.3, 0.5]]), core.NotHermitian),
        (np.diag([1.2, -0.2]), core.NotPositive),
        (np.ones((2, 3)) / 2, core.NotSquare),
        (np.array([[np.nan, 0], [0, 1]]), core.NotFinite),
    ],
)
def test_invalid_density_raises(m, err):
    with pytest.raises(err):
        core.validate_density(m)


def test_errors_are_value_errors():
    assert issubclass(core.NotUnitTrace, ValueError)


def test_dimension_mismatch():
    with pytest.raises(core.DimensionMismatch):
        core.check_dims(core.validate_density(np.eye(2) / 2), core.validate_generator(np.eye(3)))


@pytest.mark.parametrize(
    "rho, root",
    [
        (np.eye(2) / 2, np.eye(2) / np.sqrt(2)),
        (np.diag([1.0, 0.0]), np.diag([1.0, 0.0])),
        (np.diag([0.64, 0.36]), np.diag([0.8, 0.6])),
    ],
)
def test_psd_sqrt_examples(rho, root):
    np.testing.assert_allclose(core.psd_sqrt(rho), root, atol=1e-14)


def test_partial_trace_examples(rng):
    ra, rb = core.random_density(2, rng), core.random_density(3, rng)
    prod = np.kron(ra.matrix, rb.matrix)
    np.testing.assert_allclose(core.partial_trace(prod, (2, 3), "A").matrix, ra.matrix, atol=1e-14)
    np.testing.assert_allclose(core.partial_trace(prod, (2, 3), "B").matrix, rb.matrix, atol=1e-14)
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    np.testing.assert_allclose(core.partial_trace(np.outer(bell, bell), (2, 2), "A").matrix, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(core.partial_trace(np.eye(4) / 4, (2, 2), "B").matrix, np.eye(2) / 2, atol=1e-15)


def test_sampling_is_deterministic():
    a = core.sample("density", 4, core.make_rng(7), rank=4)
    b = core.sample("density", 4, core.make_rng(7), rank=4)
    assert np.array_equal(a.matrix, b.matrix)


def test_rank_construction():
    rho = core.sample("density", 4, core.make_rng(1), rank=2)
    assert np.sum(rho.eigenvalues < 1e-10) == 2
    assert rho.rank == 2


def test_haar_unitarity():
    u = core.sample("unitary", 8, core.make_rng(3))
    assert np.max(np.abs(u.conj().T @ u - np.eye(8))) <= 1e-12


def test_haar_first_moment():
    # E|U_11|^2 = 1/d; the sample mean must sit within 3 standard errors
    d, n = 4, 20000
    us = core.haar_unitary(d, core.make_rng(11), size=n)
    x = np.abs(us[:, 0, 0]) ** 2
    assert abs(x.mean() - 1 / d) <= 3 * x.std() / np.sqrt(n)


def test_spawned_streams_differ():
    a, b = core.spawn_rngs(5, 2)
    assert a.random() != b.random()


def test_phase_encoding_unitary():
    gen = core.validate_generator(SIGMA_Z)
    u = core.PhaseEncoding(gen, 0.3).unitary
    np.testing.assert_allclose(u, np.diag(np.exp([-0.3j, 0.3j])), atol=1e-15)


def test_encode_plus_to_minus():
    rho = core.validate_density(np.outer(KET_PLUS, KET_PLUS.conj()))
    out = core.encode(rho, core.validate_generator(SIGMA_Z), np.pi / 2)
    np.testing.assert_allclose(out, np.outer(KET_MINUS, KET_MINUS.conj()), atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=dims)
def test_json_round_trip(seed, d, tmp_path_factory):
    rho = core.random_density(d, core.make_rng(seed))
    path = tmp_path_factory.mktemp("j") / "rho.json"
    core.save_matrix(rho, path)
    back = core.load_matrix(path)
    assert np.max(np.abs(back - rho.matrix)) <= 1e-15


def test_matrix_json_omits_zero_imaginary_part():
    assert "im" not in core.matrix_to_dict(np.eye(2))
    with pytest.raises(core.SubQFIError):
        core.matrix_from_dict(json.loads('{"dim": 2}'))


@settings(max_examples=80, deadline=None)
@given(seed=seeds, d=dims)
def test_reconstruction_and_sqrt(seed, d):
    rng = core.make_rng(seed)
    rho = core.random_density(d, rng, int(rng.integers(1, d + 1)))
    assert np.max(np.abs(rho.reconstruct() - rho.matrix)) <= 1e-12
    s = core.psd_sqrt(rho)
    assert np.max(np.abs(s @ s - rho.matrix)) <= 1e-10
    assert np.all(np.diff(rho.eigenvalues) <= 0)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=dims)
def test_random_generator_normalized(seed, d):
    h = core.random_hermitian(d, core.make_rng(seed))
    assert np.isclose(np.max(np.abs(h.eigenvalues)), 1.0)
    np.testing.assert_allclose(h.matrix, h.matrix.conj().T)
