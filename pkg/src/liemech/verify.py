"""Named property suites: each check re-measures one of the library's
invariants and reports the value against its tolerance. Used by the CLI
`verify` command and exercised by the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bundle as bd
from . import euler_poincare as ep
from . import ostrogradsky as og
from .algebra import Chirality, Inertia, pair, rn, se3, so3
from .models import (
    hamiltonian_counterpart,
    quadratic_k3,
    rigid_body,
    spline2,
    spline2_hamiltonian,
)
from .solvers import IntegratorConfig, ShootingProblem, integrate, shoot_spline


@dataclass
class CheckResult:
    suite: str
    name: str
    value: float
    tol: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.suite}/{self.name}: value={self.value:.3e} tol={self.tol:.1e}"


def _check(suite, name, value, tol, lower=None):
    ok = value <= tol if lower is None else (lower <= value <= tol)
    return CheckResult(suite, name, float(value), float(tol), bool(ok))


# -- algebra ---------------------------------------------------------------------


def suite_algebra(seed=42):
    rng = np.random.default_rng(seed)
    out = []
    for alg in (so3(), se3()):
        c = alg.structure_constants
        t = np.einsum("mij,lmk->lijk", c, c)
        jac = t + np.einsum("lijk->ljki", t) + np.einsum("lijk->lkij", t)
        out.append(_check("algebra", f"jacobi_{alg.name}", np.abs(jac).max(), 1e-12))
        err = 0.0
        for _ in range(100):
            x, y = rng.standard_normal((2, alg.dim))
            mu = rng.standard_normal(alg.dim)
            err = max(err, abs(pair(alg.ad_star(x, mu), y) - pair(mu, alg.bracket(x, y))))
        out.append(_check("algebra", f"ad_star_pairing_{alg.name}", err, 1e-12))
        err = 0.0
        for _ in range(20):
            g = alg.exp(rng.standard_normal(alg.dim) * 0.6)
            x, y = rng.standard_normal((2, alg.dim))
            lhs = alg.adjoint(g, alg.bracket(x, y))
            rhs = alg.bracket(alg.adjoint(g, x), alg.adjoint(g, y))
            err = max(err, np.abs(lhs - rhs).max())
        out.append(_check("algebra", f"Ad_homomorphism_{alg.name}", err, 1e-10))
        err = 0.0
        for _ in range(50):
            x = rng.standard_normal(alg.dim)
            n = np.linalg.norm(x)
            if n > 1.0:
                x = x / n
            err = max(err, np.abs(alg.log(alg.exp(x)) - x).max())
        out.append(_check("algebra", f"exp_log_roundtrip_{alg.name}", err, 1e-10))
    # group constraint drift over 1e4 reconstruction steps
    alg = so3()
    ts = np.arange(10001) * 1e-3
    xi_path = np.stack([np.sin(ts), np.cos(2 * ts), 0.3 * np.ones_like(ts)], axis=1)
    gs = ep.reconstruct(alg, xi_path, alg.identity(), Chirality.LEFT, 1e-3)
    defect = max(alg.group_defect(g) for g in gs[:: 100])
    out.append(_check("algebra", "reconstruction_drift_1e4_steps", defect, 1e-8))
    return out


# -- euler_poincare ----------------------------------------------------------------


def suite_ep(seed=42):
    rng = np.random.default_rng(seed)
    out = []
    alg = so3()
    cfg = IntegratorConfig(dt=1e-3)
    # Noether drift, rigid body, T=10
    mdl = rigid_body(alg, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    st0 = ep.ep_state_from_jet(mdl, np.array([[1.0, 0.4, -0.3]]))
    traj = ep.integrate_ep(mdl, st0, 10.0, cfg)
    out.append(_check("ep", "noether_drift_rigid_body", traj.noether_drift(), 1e-8))
    out.append(
        _check(
            "ep",
            "energy_drift_rigid_body",
            np.abs(traj.energy_series() - traj.energy_series()[0]).max(),
            1e-8,
        )
    )
    # spline2 Noether drift (fixed modest data: the conservation bound is a
    # property of the scheme, not of the sampled initial condition)
    sp = spline2(alg, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    jet0 = np.array([[0.2, 0.1, -0.1], [0.05, -0.1, 0.1], [0.05, 0.1, -0.05]])
    trj = ep.integrate_ep(sp, ep.ep_state_from_jet(sp, jet0), 10.0, cfg)
    out.append(_check("ep", "noether_drift_spline2", trj.noether_drift(), 1e-8))
    # bi-invariant ||xi_ddot|| conservation
    spb = spline2(alg, Inertia(np.eye(3)), Chirality.LEFT, bi_invariant=True)
    ts, jets = ep.integrate_bi_invariant(alg, Chirality.LEFT, jet0, 10.0, cfg)
    norms = np.linalg.norm(jets[:, 2, :], axis=1)
    out.append(_check("ep", "xi_ddot_norm_drift", np.abs(norms - norms[0]).max(), 1e-8))
    # jet-shift consistency: integrated xi_dot vs numeric derivative of xi
    trjb = ep.integrate_ep(spb, ep.ep_state_from_jet(spb, jet0), 2.0, cfg)
    xi, xid = trjb.jets[:, 0, :], trjb.jets[:, 1, :]
    num = (
        -xi[4:] + 8.0 * xi[3:-1] - 8.0 * xi[1:-3] + xi[:-4]
    ) / (12.0 * cfg.dt)
    out.append(
        _check("ep", "jet_shift_consistency", np.abs(num - xid[2:-2]).max(), 1e-8)
    )
    # discrete-action stationarity at O(dt^2) for the EP-integrated rigid body
    vals = []
    for dt in (4e-3, 2e-3, 1e-3):
        st = ep.ep_state_from_jet(mdl, np.array([[0.0, 1.0, 1.0]]))
        tr = ep.integrate_ep(mdl, st, 1.0, IntegratorConfig(dt=dt))
        var = ep.admissible_variations(len(tr.ts), 1.0, 1, 3, 24, seed=seed)
        vals.append(np.abs(ep.discrete_action_gradient(mdl, tr.gs, 1, dt, var)).max())
    order = min(math.log2(vals[0] / vals[1]), math.log2(vals[1] / vals[2]))
    out.append(_check("ep", "oracle_order_rigid_body", order, 4.0, lower=1.8))
    return out


# -- ostrogradsky -------------------------------------------------------------------


def suite_olp(seed=42):
    rng = np.random.default_rng(seed)
    out = []
    alg = so3()
    cfg = IntegratorConfig(dt=1e-3)
    sp = spline2(alg, Inertia(np.eye(3)), Chirality.LEFT, bi_invariant=True)
    h = spline2_hamiltonian(sp)
    jet0 = 0.4 * rng.standard_normal((3, 3))
    traj = og.integrate_olp(h, og.legendre(sp, jet0), 10.0, cfg)
    hs = traj.h_series()
    cas = traj.casimir_series()
    out.append(_check("olp", "hamiltonian_drift", np.abs(hs - hs[0]).max(), 1e-8))
    out.append(_check("olp", "casimir_drift", np.abs(cas - cas[0]).max(), 1e-8))
    # Legendre duality dh/dpi_(i) = xi^(i)
    err = 0.0
    for _ in range(50):
        jf = rng.standard_normal((3, 3))
        st = og.legendre(sp, jf)
        err = max(err, np.abs(h.d_pi(st.xi_jet, st.pis, st.pi0) - jf[1]).max())
        err = max(err, np.abs(h.d_pi0(st.xi_jet, st.pis, st.pi0) - jf[0]).max())
    out.append(_check("olp", "legendre_duality", err, 1e-9))
    # bracket axioms with exact-partial observables
    k, d = 2, 3
    anti = leib = jac = 0.0
    for _ in range(20):
        st = og.OLPState.from_flat(rng.standard_normal(3 * d), k, d)
        f = og.QuadraticObservable.random(k, d, rng)
        g = og.QuadraticObservable.random(k, d, rng)
        hq = og.QuadraticObservable.random(k, d, rng)
        anti = max(anti, abs(og.reduced_bracket(f, f, st, alg, Chirality.LEFT)))
        fl = og.QuadraticObservable.random(k, d, rng, linear_only=True)
        gl = og.QuadraticObservable.random(k, d, rng, linear_only=True)
        prod = og.QuadraticObservable(
            k, d, a=fl.a * gl.a, b=fl.a * gl.b + gl.a * fl.b,
            C=np.outer(fl.b, gl.b) + np.outer(gl.b, fl.b),
        )
        lhs = og.reduced_bracket(prod, hq, st, alg, Chirality.LEFT)
        rhs = fl.value(st) * og.reduced_bracket(gl, hq, st, alg, Chirality.LEFT) + gl.value(
            st
        ) * og.reduced_bracket(fl, hq, st, alg, Chirality.LEFT)
        leib = max(leib, abs(lhs - rhs))
        fg = og.BracketObservable(f, g, alg, Chirality.LEFT)
        gh = og.BracketObservable(g, hq, alg, Chirality.LEFT)
        hf = og.BracketObservable(hq, f, alg, Chirality.LEFT)
        res = (
            og.reduced_bracket(fg, hq, st, alg, Chirality.LEFT)
            + og.reduced_bracket(gh, f, st, alg, Chirality.LEFT)
            + og.reduced_bracket(hf, g, st, alg, Chirality.LEFT)
        )
        jac = max(jac, abs(res))
    out.append(_check("olp", "bracket_antisymmetry", anti, 0.0))
    out.append(_check("olp", "bracket_leibniz", leib, 1e-12))
    out.append(_check("olp", "bracket_jacobi", jac, 1e-10))
    # flow derivation from the bracket
    class HObs:
        def d_xi(self, st):
            return h.d_xi(st.xi_jet, st.pis, st.pi0)

        def d_pi(self, st):
            return h.d_pi(st.xi_jet, st.pis, st.pi0)

        def d_pi0(self, st):
            return h.d_pi0(st.xi_jet, st.pis, st.pi0)

    hobs = HObs()
    err = 0.0
    for _ in range(20):
        st = og.OLPState.from_flat(rng.standard_normal(3 * d), k, d)
        rates = og.olp_vector_field(h, st)
        for f in og.coordinate_observables(k, d):
            fdot = (
                np.sum(f.d_xi(st) * rates.xi_dot)
                + np.sum(f.d_pi(st) * rates.pis_dot)
                + float(f.d_pi0(st) @ rates.pi0_dot)
            )
            err = max(err, abs(fdot - og.reduced_bracket(f, hobs, st, alg, Chirality.LEFT)))
    out.append(_check("olp", "flow_from_bracket", err, 1e-9))
    # EP <-> OLP equivalence
    dev = og.olp_equivalence_check(sp, jet0, 5.0, 1e-3)
    out.append(_check("olp", "ep_olp_deviation_spline2", dev, 1e-6))
    mdl = rigid_body(alg, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    dev1 = og.olp_equivalence_check(mdl, np.array([[1.0, 0.4, -0.3]]), 5.0, 1e-3)
    out.append(_check("olp", "ep_olp_deviation_rigid_body", dev1, 1e-8))
    k3 = quadratic_k3(alg, Inertia(np.eye(3)), Chirality.LEFT)
    dev3 = og.olp_equivalence_check(k3, 0.3 * rng.standard_normal((5, 3)), 2.0, 1e-3)
    out.append(_check("olp", "ep_olp_deviation_k3", dev3, 1e-6))
    return out


# -- bundle -------------------------------------------------------------------------


def suite_bundle(seed=42):
    rng = np.random.default_rng(seed)
    out = []
    alg = so3()
    # analytic vs FD exterior derivative
    A0 = rng.standard_normal((3, 2))
    A1 = rng.standard_normal((3, 2, 2))

    def A(x):
        return A0 + np.einsum("kij,j->ki", A1, x)

    def dA(x):
        # d_i A_j has components A1[:, j, i]
        return np.swapaxes(A1, 1, 2) - A1

    conn_a = bd.Connection(alg, 2, A=A, dA=dA, chirality=Chirality.LEFT)
    conn_f = bd.Connection(alg, 2, A=A, chirality=Chirality.LEFT)
    err = 0.0
    for _ in range(10):
        x = rng.standard_normal(2)
        err = max(err, np.abs(conn_a.d_value(x) - conn_f.d_value(x)).max())
    out.append(_check("bundle", "dA_fd_vs_analytic", err, 1e-6))
    # curvature antisymmetry (exact)
    B = bd.CurvatureForm(conn_f)
    x, u, v = rng.standard_normal(2), rng.standard_normal(2), rng.standard_normal(2)
    out.append(
        _check("bundle", "curvature_antisymmetry", np.abs(B(x, u, v) + B(x, v, u)).max(), 0.0)
    )
    # covariant-derivative product rule
    err = 0.0
    for _ in range(20):
        x, xd = rng.standard_normal((2, 2))
        sig, sigd = rng.standard_normal((2, 3))
        mu, mud = rng.standard_normal((2, 3))
        lhs = pair(mud, sig) + pair(mu, sigd)
        rhs = pair(bd.coad_covariant_derivative(conn_f, x, xd, mu, mud), sig) + pair(
            mu, bd.ad_covariant_derivative(conn_f, x, xd, sig, sigd)
        )
        err = max(err, abs(lhs - rhs))
    out.append(_check("bundle", "covariant_product_rule", err, 1e-12))
    # Wong conservation (abelian circle + so3 gauge charge norm)
    cfg = IntegratorConfig(dt=1e-3)
    ab = rn(1)
    gamma2 = bd.BaseMetric(np.eye(2))
    conn_b = bd.abelian_symmetric_gauge(ab, 1.3, Chirality.RIGHT)
    st0 = bd.WongState([0.0, 0.0], [1.0, 0.0], [0.7])
    ts, states = bd.integrate_wong(gamma2, Inertia(np.eye(1)), conn_b, st0, 10.0, cfg)
    q, b = 0.7, 1.3
    center = np.array([0.0, 0.0]) - np.array([[0.0, -1.0], [1.0, 0.0]]) @ np.array([1.0, 0.0]) / (
        q * b
    )
    radii = np.array([np.linalg.norm(s.rho - center) for s in states])
    out.append(_check("bundle", "wong_circle_radius", np.abs(radii - 1.0 / (q * b)).max(), 1e-6))
    out.append(
        _check("bundle", "wong_charge_exact", max(abs(s.mubar[0] - q) for s in states), 0.0)
    )
    energies = [bd.wong_energy(gamma2, Inertia(np.eye(1)), s) for s in states]
    out.append(
        _check("bundle", "wong_energy_drift", max(abs(e - energies[0]) for e in energies), 1e-8)
    )
    conn_g = bd.constant_connection(alg, 0.4 * rng.standard_normal((3, 2)), Chirality.LEFT)
    kap = Inertia(np.eye(3))
    stso = bd.WongState([0.2, -0.1], [0.5, 0.3], rng.standard_normal(3))
    ts, sts = bd.integrate_wong(gamma2, kap, conn_g, stso, 10.0, cfg)
    qn = [math.sqrt(float(s.mubar @ kap.inverse @ s.mubar)) for s in sts]
    out.append(_check("bundle", "wong_so3_charge_norm_drift", max(abs(v - qn[0]) for v in qn), 1e-8))
    # lambda -> 0 limit equals Wong exactly on shared slots
    st2 = bd.Wong2State(
        stso.rho, stso.rhodot, np.zeros(2), np.zeros(2), kap.inverse @ stso.mubar,
        np.zeros(3), stso.mubar,
    )
    fw = bd.wong_vector_field(gamma2, kap, conn_g, stso)
    f2 = bd.wong2_vector_field(gamma2, kap, conn_g, 0.0, 0.0, st2)
    lim = max(np.abs(f2.rhodot - fw.rhodot).max(), np.abs(f2.pi0 - fw.mubar).max())
    out.append(_check("bundle", "wong2_lambda_zero_limit", lim, 0.0))
    # zero-curvature decoupling (k=2) against independent base/fiber runs
    conn0 = bd.zero_connection(alg, 2, Chirality.LEFT)
    tau = 0.6
    model = bd.Lp2Model(alg, gamma2.matrix, gamma2.matrix, tau**2 * np.eye(3), np.eye(3))
    w0 = bd.Wong2State(
        [0.1, 0.0], [0.2, -0.1], [0.0, 0.05], [0.02, 0.0],
        [0.3, -0.2, 0.1], [0.02, 0.0, 0.1], [0.25, 0.1, -0.2],
    )
    ts, lstates = bd.integrate_lp2(model, conn0, w0, 2.0, cfg)

    def base_field(y):
        r, rd, rdd, rddd = y.reshape(4, 2)
        return np.concatenate([rd, rdd, rddd, np.linalg.solve(model.P2, model.P1 @ rdd)])

    tsb, ys = integrate(
        base_field, np.concatenate([w0.rho, w0.rhodot, w0.rhoddot, w0.rhodddot]), 2.0, cfg
    )
    spb = spline2(alg, Inertia(np.eye(3)), Chirality.LEFT, tau=tau, bi_invariant=True)
    trf = ep.integrate_ep(
        spb, ep.EPState(g=alg.identity().matrix, jet=np.stack([w0.sigma, w0.pi1]), m=w0.pi0),
        2.0, cfg,
    )
    dev = 0.0
    for i, s in enumerate(lstates):
        dev = max(
            dev,
            np.abs(np.concatenate([s.rho, s.rhodot, s.rhoddot, s.rhodddot]) - ys[i]).max(),
            np.abs(s.sigma - trf.jets[i, 0]).max(),
            np.abs(s.pi0 - trf.ms[i]).max(),
        )
    out.append(_check("bundle", "zero_curvature_decoupling_k2", dev, 1e-8))
    # wong2 vs OHP through the Legendre map
    connW = bd.abelian_symmetric_gauge(ab, 1.0, Chirality.RIGHT)
    modelW = bd.Lp2Model.kaluza_klein(ab, gamma2, Inertia(np.eye(1)), 1.0, 1.0)
    hW = bd.lp2_hamiltonian(modelW)
    sW = bd.Wong2State(
        [0.0, 0.0], [0.2, 0.0], [0.0, 0.05], [0.02, 0.0], [0.3], [0.02], [0.25]
    )
    ts, ls = bd.integrate_lp2(modelW, connW, sW, 5.0, cfg)
    ts2, hs2 = bd.integrate_ohp(hW, connW, bd.ohp_state_from_wong2(modelW, sW), 5.0, cfg)
    dev = max(
        np.abs(bd.ohp_state_from_wong2(modelW, a_).flatten() - b_.flatten()).max()
        for a_, b_ in zip(ls, hs2)
    )
    out.append(_check("bundle", "wong2_ohp_deviation", dev, 1e-6))
    es = [bd.lp2_energy(modelW, s) for s in ls]
    out.append(_check("bundle", "wong2_energy_drift", max(abs(e - es[0]) for e in es), 1e-8))
    # gauged bracket: antisymmetry, Leibniz, flow consistency
    k, m, d = 2, 2, 3
    connG = bd.constant_connection(alg, 0.4 * rng.standard_normal((3, 2)), Chirality.LEFT)
    modelG = bd.Lp2Model.kaluza_klein(alg, gamma2, kap, 1.0, 1.0)
    hG = bd.lp2_hamiltonian(modelG)

    class HObs:
        def d_rho(self, st):
            return hG.d_rho(st)

        def d_gamma(self, st):
            return hG.d_gamma(st)

        def d_sigma(self, st):
            return hG.d_sigma(st)

        def d_pi(self, st):
            return hG.d_pi(st)

        def d_pi0(self, st):
            return hG.d_pi0(st)

    hobs = HObs()
    anti = leib = flow = 0.0
    coords = bd.bundle_coordinate_observables(k, m, d)
    for _ in range(10):
        st = bd.OHPState.from_flat(rng.standard_normal(2 * k * m + 3 * d), k, m, d)
        f = bd.BundleQuadraticObservable.random(k, m, d, rng)
        anti = max(anti, abs(bd.gauged_bracket(f, f, connG, st)))
        fl = bd.BundleQuadraticObservable.random(k, m, d, rng, linear_only=True)
        gl = bd.BundleQuadraticObservable.random(k, m, d, rng, linear_only=True)
        prod = bd.BundleQuadraticObservable(
            k, m, d, a=fl.a * gl.a, b=fl.a * gl.b + gl.a * fl.b,
            C=np.outer(fl.b, gl.b) + np.outer(gl.b, fl.b),
        )
        hq = bd.BundleQuadraticObservable.random(k, m, d, rng)
        lhs = bd.gauged_bracket(prod, hq, connG, st)
        rhs = fl.value(st) * bd.gauged_bracket(gl, hq, connG, st) + gl.value(
            st
        ) * bd.gauged_bracket(fl, hq, connG, st)
        leib = max(leib, abs(lhs - rhs))
        rates = bd.ohp_vector_field(hG, connG, st)
        for f in coords:
            fdot = (
                np.sum(f.d_rho(st) * rates.rhos_dot)
                + np.sum(f.d_gamma(st) * rates.gammas_dot)
                + np.sum(f.d_sigma(st) * rates.sigmas_cov)
                + np.sum(f.d_pi(st) * rates.pis_cov)
                + float(f.d_pi0(st) @ rates.pi0_cov)
            )
            flow = max(flow, abs(fdot - bd.gauged_bracket(f, hobs, connG, st)))
    out.append(_check("bundle", "gauged_bracket_antisymmetry", anti, 0.0))
    out.append(_check("bundle", "gauged_bracket_leibniz", leib, 1e-12))
    out.append(_check("bundle", "gauged_flow_from_bracket", flow, 1e-9))
    return out


# -- solvers ------------------------------------------------------------------------


def suite_solvers(seed=42):
    rng = np.random.default_rng(seed)
    out = []
    # integrator order on a linear field against the exact exponential
    Amat = rng.standard_normal((4, 4)) * 0.5
    import scipy.linalg

    y0 = rng.standard_normal(4)
    exact = scipy.linalg.expm(Amat) @ y0
    errs = []
    for dt in (1e-2, 5e-3, 2.5e-3):
        ts, ys = integrate(lambda y: Amat @ y, y0, 1.0, IntegratorConfig(dt=dt))
        errs.append(np.abs(ys[-1] - exact).max())
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    out.append(_check("solvers", "rk4_order_linear_field", min(orders), 4.3, lower=3.7))
    # rigid-body halving ratio (coarse steps keep the study above the
    # reference-solution roundoff floor)
    alg = so3()
    mdl = rigid_body(alg, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.LEFT)
    ref = ep.integrate_ep(
        mdl, ep.ep_state_from_jet(mdl, np.array([[1.0, 0.4, -0.3]])), 1.0,
        IntegratorConfig(dt=2.5e-4),
    ).jets[-1, 0]
    errs = []
    for dt in (2e-2, 1e-2, 5e-3):
        tr = ep.integrate_ep(
            mdl, ep.ep_state_from_jet(mdl, np.array([[1.0, 0.4, -0.3]])), 1.0,
            IntegratorConfig(dt=dt),
        )
        errs.append(np.abs(tr.jets[-1, 0] - ref).max())
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    out.append(_check("solvers", "rk4_order_rigid_body", min(orders), 4.3, lower=3.7))
    # shooting: abelian cubic and SO(3) geodesic + generic pose
    r3 = rn(3)
    sp = spline2(r3, Inertia(np.eye(3)), Chirality.LEFT)
    jet0, _, info = shoot_spline(
        ShootingProblem(sp, r3.identity(), r3.exp([1.0, 0.0, 0.0]), [0.0] * 3, [0.0] * 3, 1.0)
    )
    err = max(
        np.abs(jet0[1] - np.array([6.0, 0.0, 0.0])).max(),
        np.abs(jet0[2] - np.array([-12.0, 0.0, 0.0])).max(),
    )
    out.append(_check("solvers", "shooting_euclidean_cubic", err, 1e-9))
    spso = spline2(alg, Inertia(np.eye(3)), Chirality.LEFT, bi_invariant=True)
    th = 0.8
    jetg, _, infog = shoot_spline(
        ShootingProblem(
            spso, alg.identity(), alg.exp([0.0, 0.0, th]), [0.0, 0.0, th], [0.0, 0.0, th], 1.0,
            tol=1e-10,
        )
    )
    out.append(_check("solvers", "shooting_geodesic_residual", infog["residual"], 1e-10))
    out.append(_check("solvers", "shooting_geodesic_iterations", infog["iterations"], 3))
    w = rng.standard_normal(3)
    w = w / np.linalg.norm(w) * (np.pi / 2 * 0.9)
    jetp, _, infop = shoot_spline(
        ShootingProblem(
            spso, alg.identity(), alg.exp(w), [0.1, 0.0, 0.0], [0.0, 0.2, 0.0], 1.0,
            config=IntegratorConfig(dt=2e-3),
        )
    )
    out.append(_check("solvers", "shooting_generic_pose_residual", infop["residual"], 1e-8))
    return out


SUITES = {
    "algebra": suite_algebra,
    "ep": suite_ep,
    "olp": suite_olp,
    "bundle": suite_bundle,
    "solvers": suite_solvers,
}


def run_suite(name: str, seed: int = 42):
    """Run one named suite (or 'all'); returns the list of CheckResults."""
    if name == "all":
        out = []
        for key in ("algebra", "ep", "olp", "bundle", "solvers"):
            out.extend(SUITES[key](seed))
        return out
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name](seed)
