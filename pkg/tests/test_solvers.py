import math

import numpy as np
import pytest
import scipy.linalg

from liemech import Chirality, DivergenceError, Inertia, NonconvergenceError, rn, so3, spline2
from liemech.euler_poincare import discrete_action_gradient, admissible_variations
from liemech.solvers import (
    IntegratorConfig,
    ShootingProblem,
    cubic_seed,
    fd_jacobian,
    integrate,
    shoot_spline,
)

RNG = np.random.default_rng(42)
SO3 = so3()
R3 = rn(3)


def test_integrate_constant_field():
    ts, ys = integrate(lambda y: np.zeros_like(y), [1.0, -2.0], 1.0, IntegratorConfig(dt=1e-2))
    np.testing.assert_allclose(ys, np.tile([1.0, -2.0], (101, 1)))


def test_integrate_linear_field_fourth_order():
    A = 0.5 * RNG.standard_normal((4, 4))
    y0 = RNG.standard_normal(4)
    exact = scipy.linalg.expm(A) @ y0
    errs = []
    for dt in (1e-2, 5e-3, 2.5e-3):
        ts, ys = integrate(lambda y: A @ y, y0, 1.0, IntegratorConfig(dt=dt))
        errs.append(np.abs(ys[-1] - exact).max())
    for i in range(2):
        order = math.log2(errs[i] / errs[i + 1])
        assert 3.7 < order < 4.3


def test_integrate_divergence_reports_time():
    with np.errstate(over="ignore"), pytest.raises(DivergenceError) as exc:
        integrate(lambda y: y**3, [5.0], 10.0, IntegratorConfig(dt=1e-2))
    assert exc.value.t > 0


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(dt=-1e-3)
    with pytest.raises(ValueError):
        IntegratorConfig(scheme="euler")
    with pytest.raises(ValueError):
        integrate(lambda y: y, [1.0], 1.0, IntegratorConfig(scheme="cf4"))


def test_fd_jacobian_linear_map():
    A = RNG.standard_normal((4, 6))
    J = fd_jacobian(lambda x: A @ x, RNG.standard_normal(6))
    np.testing.assert_allclose(J, A, atol=1e-9)


def test_fd_jacobian_quadratic_at_origin():
    J = fd_jacobian(lambda x: np.array([x @ x]), np.zeros(5))
    np.testing.assert_allclose(J, 0.0, atol=1e-9)


def test_fd_jacobian_nonfinite_raises():
    with pytest.raises(ValueError):
        fd_jacobian(lambda x: np.array([np.inf]), np.zeros(1))


def test_shooting_euclidean_cubic():
    mdl = spline2(R3, Inertia(np.eye(3)), Chirality.LEFT)
    prob = ShootingProblem(mdl, R3.identity(), R3.exp([1.0, 0.0, 0.0]),
                           [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], 1.0)
    jet0, traj, info = shoot_spline(prob)
    np.testing.assert_allclose(jet0[1], [6.0, 0.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(jet0[2], [-12.0, 0.0, 0.0], atol=1e-9)
    assert info["residual"] < prob.tol


def test_shooting_identical_endpoints():
    mdl = spline2(R3, Inertia(np.eye(3)), Chirality.LEFT)
    g = R3.exp([0.3, -0.1, 0.2])
    prob = ShootingProblem(mdl, g, g, np.zeros(3), np.zeros(3), 1.0)
    jet0, traj, info = shoot_spline(prob)
    np.testing.assert_allclose(jet0, 0.0, atol=1e-12)


def test_shooting_geodesic_seed_converges_immediately():
    mdl = spline2(SO3, Inertia(np.eye(3)), Chirality.LEFT, bi_invariant=True)
    th = 0.8
    prob = ShootingProblem(
        mdl, SO3.identity(), SO3.exp([0.0, 0.0, th]), [0.0, 0.0, th], [0.0, 0.0, th], 1.0,
        tol=1e-10,
    )
    jet0, traj, info = shoot_spline(prob)
    assert info["iterations"] <= 3
    assert info["residual"] < 1e-10
    assert np.abs(traj.jets[:, 0, :] - np.array([0.0, 0.0, th])).max() < 1e-9


def test_shooting_generic_pose_right_chirality():
    mdl = spline2(SO3, Inertia(np.eye(3)), Chirality.RIGHT, bi_invariant=True)
    w = np.array([0.5, -0.8, 0.3])
    w = w / np.linalg.norm(w) * 1.2
    prob = ShootingProblem(
        mdl, SO3.identity(), SO3.exp(w), [0.1, 0.0, 0.0], [0.0, 0.2, 0.0], 1.0,
        config=IntegratorConfig(dt=2e-3),
    )
    jet0, traj, info = shoot_spline(prob)
    assert info["residual"] < 1e-8
    assert info["iterations"] <= 50
    # residual history decreased monotonically under the damping
    hist = info["residual_history"]
    assert all(hist[i + 1] < hist[i] for i in range(len(hist) - 1))


def test_shooting_solution_passes_action_oracle():
    # stationarity residual of the solved trajectory decays at second order
    mdl = spline2(SO3, Inertia(np.eye(3)), Chirality.LEFT, bi_invariant=True)
    w = np.array([0.0, 0.0, 1.0])
    vals = []
    for dt in (4e-3, 2e-3, 1e-3):
        prob = ShootingProblem(
            mdl, SO3.identity(), SO3.exp(w), [0.2, 0.0, 0.2], [0.0, 0.1, 0.4], 1.0,
            config=IntegratorConfig(dt=dt),
        )
        jet0, traj, info = shoot_spline(prob)
        var = admissible_variations(len(traj.ts), 1.0, 2, 3, 12, seed=3)
        vals.append(np.abs(discrete_action_gradient(mdl, traj.gs, 2, dt, var)).max())
    assert math.log2(vals[0] / vals[1]) > 1.8
    assert math.log2(vals[1] / vals[2]) > 1.8


def test_shooting_gradient_matches_secant():
    # FD gradient of the shooting residual map agrees with coarse secants
    mdl = spline2(R3, Inertia(np.eye(3)), Chirality.LEFT)
    prob = ShootingProblem(mdl, R3.identity(), R3.exp([0.4, -0.2, 0.1]),
                           [0.1, 0.0, 0.0], [0.0, 0.1, 0.0], 1.0,
                           config=IntegratorConfig(dt=1e-2))
    from liemech import euler_poincare as ep

    def action_of_unknowns(u):
        jet_full = np.stack([prob.v0, u[:3], u[3:]])
        st = ep.ep_state_from_jet(mdl, jet_full)
        traj = ep.integrate_ep(mdl, st, prob.T, prob.config)
        vals = mdl.eval(traj.jets)
        return np.array([np.trapezoid(vals, dx=prob.config.dt)])

    u0 = RNG.standard_normal(6)
    J = fd_jacobian(action_of_unknowns, u0)
    h = 1e-3
    for i in range(6):
        up, um = u0.copy(), u0.copy()
        up[i] += h
        um[i] -= h
        secant = (action_of_unknowns(up) - action_of_unknowns(um))[0] / (2 * h)
        assert abs(J[0, i] - secant) < 1e-5


def test_shooting_nonconvergence_error():
    mdl = spline2(SO3, Inertia(np.eye(3)), Chirality.LEFT, bi_invariant=True)
    prob = ShootingProblem(
        mdl, SO3.identity(), SO3.exp([0.0, 0.0, 1.0]), [0.0, 0.0, 1.0], [0.0, 0.0, 1.0], 1.0,
        tol=1e-16, max_iter=1, config=IntegratorConfig(dt=1e-2),
    )
    with pytest.raises(NonconvergenceError):
        shoot_spline(prob)


def test_cubic_seed_formula():
    xid0, xidd0 = cubic_seed(np.array([1.0, 0.0, 0.0]), np.zeros(3), np.zeros(3), 1.0)
    np.testing.assert_allclose(xid0, [6.0, 0.0, 0.0])
    np.testing.assert_allclose(xidd0, [-12.0, 0.0, 0.0])
