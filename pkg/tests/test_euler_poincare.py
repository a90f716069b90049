import math

import numpy as np
import pytest
import scipy.linalg

from liemech import Chirality, Inertia, rigid_body, rn, so3, spline2
from liemech.euler_poincare import (
    EPState,
    admissible_variations,
    bi_invariant_spline_field,
    discrete_action_gradient,
    ep_state_from_jet,
    ep_vector_field,
    integrate_bi_invariant,
    integrate_ep,
    noether_momentum,
    path_to_jets,
    reconstruct,
    reduce_group_jet,
)
from liemech.solvers import IntegratorConfig

RNG = np.random.default_rng(42)
SO3 = so3()
R3 = rn(3)


# -- reduce_group_jet ---------------------------------------------------------


def test_reduce_one_parameter_subgroup():
    x = np.array([0.3, -0.2, 0.5])
    X = SO3.matrix(x)
    # derivatives of exp(t x) at t = 0 are x^n
    derivs = [np.eye(3), X, X @ X, X @ X @ X]
    for chir in (Chirality.LEFT, Chirality.RIGHT):
        jet = reduce_group_jet(SO3, derivs, chir, 3)
        np.testing.assert_allclose(jet[0], x, atol=1e-12)
        np.testing.assert_allclose(jet[1], 0.0, atol=1e-12)
        np.testing.assert_allclose(jet[2], 0.0, atol=1e-12)


def test_reduce_constant_curve():
    derivs = [np.eye(3), np.zeros((3, 3)), np.zeros((3, 3))]
    jet = reduce_group_jet(SO3, derivs, Chirality.LEFT, 2)
    np.testing.assert_allclose(jet.stack, 0.0)


def test_reduce_matches_finite_differences():
    a = np.array([0.4, -0.1, 0.2])
    b = np.array([-0.2, 0.3, 0.1])
    A, B = SO3.matrix(a), SO3.matrix(b)

    def g(t):
        return scipy.linalg.expm(t * A) @ scipy.linalg.expm(t**2 * B)

    # closed-form derivatives of g at t = 0
    derivs = [np.eye(3), A, A @ A + 2 * B, A @ A @ A + 6 * A @ B]
    for chir in (Chirality.LEFT, Chirality.RIGHT):
        jet = reduce_group_jet(SO3, derivs, chir, 3)
        # dense finite differencing of xi(t) = g_dot g^-1 (or g^-1 g_dot)
        h = 1e-4
        ts = np.array([-2 * h, -h, 0.0, h, 2 * h])
        xis = []
        for t in ts:
            gd = (g(t + h) - g(t - h)) / (2 * h)
            M = gd @ np.linalg.inv(g(t)) if chir is Chirality.RIGHT else np.linalg.inv(g(t)) @ gd
            xis.append(SO3.coords(M, tol=1e-4))
        xis = np.array(xis)
        np.testing.assert_allclose(jet[0], xis[2], atol=1e-6)
        np.testing.assert_allclose(jet[1], (xis[3] - xis[1]) / (2 * h), atol=1e-6)
        np.testing.assert_allclose(
            jet[2], (xis[3] - 2 * xis[2] + xis[1]) / h**2, atol=1e-4
        )


def test_reduce_rejects_large_order():
    with pytest.raises(ValueError):
        reduce_group_jet(SO3, [np.eye(3)] * 5, Chirality.LEFT, 4)


# -- vector fields ---------------------------------------------------------------


def test_rigid_body_equilibrium():
    mdl = rigid_body(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    st = ep_state_from_jet(mdl, np.array([[1.0, 0.0, 0.0]]))
    rates = ep_vector_field(mdl, st)
    np.testing.assert_allclose(rates.m_dot, 0.0, atol=1e-15)


def test_abelian_spline_reduces_to_constant_third_derivative():
    mdl = spline2(R3, Inertia(np.eye(3)), Chirality.LEFT)
    full = RNG.standard_normal((3, 3))
    st = ep_state_from_jet(mdl, full)
    rates = ep_vector_field(mdl, st)
    # m = -xi_ddot is constant, so the recovered top slot matches the jet data
    np.testing.assert_allclose(rates.m_dot, 0.0, atol=1e-15)
    np.testing.assert_allclose(rates.jet_dot[1], full[2], atol=1e-14)
    np.testing.assert_allclose(st.m, -full[2], atol=1e-14)


def test_bi_invariant_field_keeps_geodesics():
    jet = np.array([[0.3, 0.1, -0.2], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    rates = bi_invariant_spline_field(SO3, Chirality.LEFT, jet)
    np.testing.assert_allclose(rates, 0.0, atol=1e-15)


def test_bi_invariant_field_parallel_curvature():
    xi = np.array([0.4, -0.2, 0.1])
    jet = np.stack([xi, RNG.standard_normal(3), 2.5 * xi])
    rates = bi_invariant_spline_field(SO3, Chirality.RIGHT, jet)
    np.testing.assert_allclose(rates[2], 0.0, atol=1e-14)


def test_bi_invariant_matches_ep_field_trajectories():
    jet_full = np.array([[0.3, 0.1, -0.2], [0.05, -0.3, 0.2], [0.1, 0.2, -0.1]])
    cfg = IntegratorConfig(dt=1e-3)
    for chir in (Chirality.LEFT, Chirality.RIGHT):
        mdl = spline2(SO3, Inertia(np.eye(3)), chir, bi_invariant=True)
        traj = integrate_ep(mdl, ep_state_from_jet(mdl, jet_full), 0.5, cfg)
        ts, jets = integrate_bi_invariant(SO3, chir, jet_full, 0.5, cfg)
        assert np.abs(traj.jets[:, :2] - jets[:, :2]).max() < 1e-10


def test_k3_quadratic_field_closes():
    from liemech import quadratic_k3

    mdl = quadratic_k3(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    full = 0.3 * RNG.standard_normal((5, 3))
    st = ep_state_from_jet(mdl, full)
    rates = ep_vector_field(mdl, st)
    np.testing.assert_allclose(rates.jet_dot[2], full[3], atol=1e-12)
    np.testing.assert_allclose(rates.extra_dot[0], -st.m, atol=1e-14)


# -- reconstruction --------------------------------------------------------------


def test_reconstruct_constant_velocity_exact():
    x = np.array([0.4, -0.3, 0.7])
    n, dt = 1000, 1e-3
    xi_path = np.tile(x, (n + 1, 1))
    g0 = SO3.identity()
    gs_r = reconstruct(SO3, xi_path, g0, Chirality.RIGHT, dt)
    gs_l = reconstruct(SO3, xi_path, g0, Chirality.LEFT, dt)
    expected = SO3.exp(n * dt * x).matrix
    np.testing.assert_allclose(gs_r[-1], expected, atol=1e-10)
    np.testing.assert_allclose(gs_l[-1], expected, atol=1e-10)


def test_reconstruct_zero_velocity_constant():
    xi_path = np.zeros((100, 3))
    g0 = SO3.exp([0.2, 0.1, -0.4])
    gs = reconstruct(SO3, xi_path, g0, Chirality.LEFT, 1e-2)
    np.testing.assert_allclose(gs[-1], g0.matrix, atol=1e-15)


def test_reconstruct_fourth_order_convergence():
    # time-varying velocity with an exact reference from fine integration
    def xi_of_t(t):
        return np.stack([np.sin(t), np.cos(2 * t), 0.3 * np.ones_like(t)], axis=-1)

    T = 1.0
    ref_dt = T / 8192
    ts = np.arange(8193) * ref_dt
    ref = reconstruct(SO3, xi_of_t(ts), SO3.identity(), Chirality.LEFT, ref_dt,
                      reprojection_interval=0)[-1]
    errs = []
    for n in (50, 100, 200):
        dt = T / n
        ts = np.arange(n + 1) * dt
        gs = reconstruct(SO3, xi_of_t(ts), SO3.identity(), Chirality.LEFT, dt,
                         reprojection_interval=0)
        errs.append(np.abs(gs[-1] - ref).max())
    r1 = errs[0] / errs[1]
    r2 = errs[1] / errs[2]
    assert 11.0 < r1 < 21.0
    assert 11.0 < r2 < 21.0


# -- Noether momentum -------------------------------------------------------------


def test_noether_abelian_is_m_itself():
    mdl = spline2(R3, Inertia(np.eye(3)), Chirality.LEFT)
    full = RNG.standard_normal((3, 3))
    st = ep_state_from_jet(mdl, full, g0=R3.exp([1.0, -2.0, 0.5]))
    np.testing.assert_allclose(noether_momentum(mdl, st), st.m, atol=1e-14)


def test_noether_drift_rigid_body_both_chiralities():
    cfg = IntegratorConfig(dt=1e-3)
    for chir in (Chirality.LEFT, Chirality.RIGHT):
        mdl = rigid_body(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), chir)
        traj = integrate_ep(mdl, ep_state_from_jet(mdl, np.array([[1.0, 0.4, -0.3]])), 10.0, cfg)
        assert traj.noether_drift() < 1e-8


def test_noether_drift_spline2():
    cfg = IntegratorConfig(dt=1e-3)
    jet0 = np.array([[0.2, 0.1, -0.1], [0.05, -0.1, 0.1], [0.05, 0.1, -0.05]])
    mdl = spline2(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    traj = integrate_ep(mdl, ep_state_from_jet(mdl, jet0), 10.0, cfg)
    assert traj.noether_drift() < 1e-8


def test_xi_ddot_norm_conserved_along_commutator_flow():
    jet0 = np.array([[0.3, 0.1, -0.2], [0.05, -0.3, 0.2], [0.1, 0.2, -0.1]])
    ts, jets = integrate_bi_invariant(SO3, Chirality.LEFT, jet0, 10.0, IntegratorConfig(dt=1e-3))
    norms = np.linalg.norm(jets[:, 2, :], axis=1)
    assert np.abs(norms - norms[0]).max() < 1e-8


# -- discrete variational oracle ---------------------------------------------------


def test_path_too_short_raises():
    mdl = spline2(SO3, Inertia(np.eye(3)), Chirality.LEFT, bi_invariant=True)
    path = np.tile(np.eye(3), (4, 1, 1))
    with pytest.raises(ValueError):
        path_to_jets(SO3, Chirality.LEFT, path, 2, 1e-2)


def test_geodesic_is_discretely_stationary():
    mdl = spline2(SO3, Inertia(np.eye(3)), Chirality.LEFT, bi_invariant=True)
    jet0 = np.array([[0.3, 0.1, -0.2], [0, 0, 0], [0, 0, 0]], dtype=float)
    dt = 1e-3
    traj = integrate_ep(mdl, ep_state_from_jet(mdl, jet0), 1.0, IntegratorConfig(dt=dt))
    var = admissible_variations(len(traj.ts), 1.0, 2, 3, 8, seed=5)
    g = discrete_action_gradient(mdl, traj.gs, 2, dt, var)
    assert np.abs(g).max() < 1e-8


def test_perturbed_path_is_not_stationary():
    mdl = rigid_body(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    dt = 1e-3
    traj = integrate_ep(mdl, ep_state_from_jet(mdl, np.array([[0.0, 1.0, 1.0]])), 1.0,
                        IntegratorConfig(dt=dt))
    var = admissible_variations(len(traj.ts), 1.0, 1, 3, 16, seed=7)
    bound = np.abs(discrete_action_gradient(mdl, traj.gs, 1, dt, var)).max()
    pert = 0.05 * admissible_variations(len(traj.ts), 1.0, 1, 3, 1, seed=99)[0]
    from liemech.euler_poincare import _batch_exp

    bad = traj.gs @ _batch_exp(SO3, pert)
    bad_val = np.abs(discrete_action_gradient(mdl, bad, 1, dt, var)).max()
    assert bad_val > 10.0 * bound


def test_oracle_second_order_decay_rigid_body():
    mdl = rigid_body(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    vals = []
    for dt in (4e-3, 2e-3, 1e-3):
        traj = integrate_ep(mdl, ep_state_from_jet(mdl, np.array([[0.0, 1.0, 1.0]])), 1.0,
                            IntegratorConfig(dt=dt))
        var = admissible_variations(len(traj.ts), 1.0, 1, 3, 24, seed=11)
        vals.append(np.abs(discrete_action_gradient(mdl, traj.gs, 1, dt, var)).max())
    assert math.log2(vals[0] / vals[1]) > 1.8
    assert math.log2(vals[1] / vals[2]) > 1.8


def test_jet_shift_consistency():
    mdl = spline2(SO3, Inertia(np.eye(3)), Chirality.LEFT, bi_invariant=True)
    jet0 = np.array([[0.3, 0.1, -0.2], [0.05, -0.3, 0.2], [0.1, 0.2, -0.1]])
    dt = 1e-3
    traj = integrate_ep(mdl, ep_state_from_jet(mdl, jet0), 2.0, IntegratorConfig(dt=dt))
    xi, xid = traj.jets[:, 0, :], traj.jets[:, 1, :]
    num = (-xi[4:] + 8 * xi[3:-1] - 8 * xi[1:-3] + xi[:-4]) / (12 * dt)
    assert np.abs(num - xid[2:-2]).max() < 1e-8


def test_ep_state_momentum_consistency():
    mdl = spline2(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    full = RNG.standard_normal((3, 3))
    st = ep_state_from_jet(mdl, full)
    pis = mdl.momenta(full)
    np.testing.assert_allclose(st.m, pis[0], atol=1e-9)
