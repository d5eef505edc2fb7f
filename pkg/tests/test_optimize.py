import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subqfi import core, fisher, optimal, optimize
from subqfi.fixtures import SIGMA_Z

H3 = np.diag([1.0, 0.0, -1.0])


def test_ansatz_examples():
    assert np.allclose(optimize.ansatz_unitary(optimize.AnsatzParams.zeros(3)), np.eye(3))
    a = np.array([0.3, -1.1, 2.0])
    p = optimize.AnsatzParams(3, np.concatenate([a, np.zeros(6)]))
    np.testing.assert_allclose(optimize.ansatz_unitary(p), np.diag(np.exp(-1j * a)), atol=1e-15)
    with pytest.raises(ValueError):
        optimize.AnsatzParams(3, np.zeros(5))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 6))
def test_ansatz_unitary_and_round_trip(seed, d):
    rng = core.make_rng(seed)
    p = optimize.AnsatzParams(d, rng.normal(size=d * d))
    u = optimize.ansatz_unitary(p)
    assert np.max(np.abs(u.conj().T @ u - np.eye(d))) <= 1e-12
    back = optimize.ansatz_unitary(optimize.AnsatzParams.from_unitary(u))
    assert np.max(np.abs(back - u)) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 5))
def test_analytic_gradient_matches_finite_differences(seed, d):
    rng = core.make_rng(seed)
    rho, h = core.random_density(d, rng), core.random_hermitian(d, rng)
    p = optimize.AnsatzParams(d, rng.normal(size=d * d))
    v1, g_fd = optimize.objective(rho, h, p, "fd")
    v2, g_an = optimize.objective(rho, h, p, "analytic")
    assert v1 == v2
    assert np.max(np.abs(g_fd - g_an)) <= 1e-6 * max(1.0, np.max(np.abs(g_fd)))


def test_stationary_at_optimum():
    star = optimal.optimal_state([0.5, 0.3, 0.2], H3).rho_star
    value, grad = optimize.objective(star, H3, optimize.AnsatzParams.zeros(3))
    assert value == pytest.approx(0.36, abs=1e-12)
    assert np.linalg.norm(grad) <= 1e-4


def test_flat_at_maximally_mixed():
    value, grad = optimize.objective(np.eye(3) / 3, H3, optimize.AnsatzParams.zeros(3))
    assert value == pytest.approx(0, abs=1e-15) and np.linalg.norm(grad) <= 1e-12


def test_random_parameters_stay_below_ceiling(rng):
    for _ in range(200):
        p = optimize.AnsatzParams(2, rng.normal(scale=3, size=4))
        value, _ = optimize.objective(np.diag([0.75, 0.25]), SIGMA_Z, p)
        assert value <= 1 + 1e-9


@pytest.mark.parametrize(
    "rho, h, restarts, target",
    [(np.diag([0.75, 0.25]), SIGMA_Z, 4, 1.0), (np.diag([0.5, 0.3, 0.2]), H3, 8, 0.36)],
)
def test_maximize_reaches_closed_form(rho, h, restarts, target):
    trace = optimize.maximize(rho, h, optimize.MaximizeConfig(restarts=restarts), core.make_rng(42))
    assert trace.best_value == pytest.approx(target, abs=1e-6)
    assert trace.converged


def test_maximize_flat_orbit():
    trace = optimize.maximize(np.eye(3) / 3, H3, rng=core.make_rng(0))
    assert trace.best_value == pytest.approx(0, abs=1e-15)
    assert trace.converged and trace.restarts_used == 1 and len(trace.iterations) == 1


def test_fixed_step_rule_and_fd_gradient_also_converge():
    cfg = optimize.MaximizeConfig(restarts=2, step_rule="fixed", gradient="fd")
    trace = optimize.maximize(np.diag([0.75, 0.25]), SIGMA_Z, cfg, core.make_rng(1))
    assert trace.best_value == pytest.approx(1.0, abs=1e-6)


def test_unconverged_warning():
    cfg = optimize.MaximizeConfig(restarts=1, max_iters=1, stop_at_closed_form=False)
    rho = core.random_density(4, core.make_rng(3))
    with pytest.warns(optimize.Unconverged):
        optimize.maximize(rho, core.random_hermitian(4, core.make_rng(4)), cfg, core.make_rng(5))


def test_trace_outputs_are_deterministic():
    rho = core.random_density(3, core.make_rng(9))
    h = core.random_hermitian(3, core.make_rng(10))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        a = optimize.maximize(rho, h, rng=core.make_rng(7))
        b = optimize.maximize(rho, h, rng=core.make_rng(7))
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    header = a.to_csv().splitlines()[0]
    assert header == "step,objective,grad_norm,restart"
    u = a.best_unitary()
    assert fisher.subqfi_closed(rho.conjugate(u), h) == pytest.approx(a.best_value, abs=1e-9)
