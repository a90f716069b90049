import numpy as np
import pytest

from liemech import (
    Chirality,
    Inertia,
    quadratic_k3,
    rigid_body,
    rigid_body_hamiltonian,
    rn,
    so3,
    spline2,
    spline2_hamiltonian,
)
from liemech.ostrogradsky import (
    BracketObservable,
    OLPState,
    QuadraticObservable,
    coordinate_observables,
    integrate_olp,
    legendre,
    olp_equivalence_check,
    olp_vector_field,
    reduced_bracket,
    reduced_energy,
)
from liemech.solvers import IntegratorConfig

RNG = np.random.default_rng(42)
SO3 = so3()
R3 = rn(3)
LEFT = Chirality.LEFT


# -- Legendre transform ------------------------------------------------------------


def test_legendre_bi_invariant_spline():
    mdl = spline2(SO3, Inertia(np.eye(3)), LEFT, bi_invariant=True)
    full = RNG.standard_normal((3, 3))
    st = legendre(mdl, full)
    np.testing.assert_allclose(st.pis[0], full[1], atol=1e-12)   # pi_(1) = xi_dot^flat
    np.testing.assert_allclose(st.pi0, -full[2], atol=1e-12)     # pi_(0) = -xi_ddot^flat


def test_legendre_rigid_body():
    I = Inertia.diagonal([1.0, 2.0, 3.0])
    mdl = rigid_body(SO3, I, LEFT)
    xi = RNG.standard_normal(3)
    st = legendre(mdl, xi[None, :])
    np.testing.assert_allclose(st.pi0, I.matrix @ xi)
    assert st.xi_jet.shape == (0, 3)


def test_legendre_general_spline_pi1_is_eta_flat():
    # pi_(1) = dl/dxi_dot = xi_dot^flat +/- ad*_xi xi^flat
    I = Inertia.diagonal([1.0, 2.0, 3.0])
    for chir in (Chirality.LEFT, Chirality.RIGHT):
        mdl = spline2(SO3, I, chir)
        full = RNG.standard_normal((3, 3))
        st = legendre(mdl, full)
        eta_flat = I.matrix @ full[1] + chir.sign * SO3.ad_star(full[0], I.matrix @ full[0])
        np.testing.assert_allclose(st.pis[0], eta_flat, atol=1e-12)


def test_reduced_energy_rigid_body():
    I = Inertia.diagonal([1.0, 2.0, 3.0])
    mdl = rigid_body(SO3, I, LEFT)
    xi = RNG.standard_normal(3)
    assert reduced_energy(mdl, xi[None, :]) == pytest.approx(0.5 * xi @ I.matrix @ xi)


def test_reduced_energy_bi_invariant_spline():
    mdl = spline2(SO3, Inertia(np.eye(3)), LEFT, bi_invariant=True)
    full = RNG.standard_normal((3, 3))
    xi, xid, xidd = full
    expected = 0.5 * xid @ xid - xidd @ xi
    assert reduced_energy(mdl, full) == pytest.approx(expected, abs=1e-12)


def test_reduced_energy_constant_along_abelian_flow():
    mdl = spline2(R3, Inertia(np.eye(3)), LEFT)
    full = RNG.standard_normal((3, 3))
    # along xi_dddot = 0 the full jet evolves by shifting with constant xi_ddot
    for t in (0.0, 0.3, 1.7):
        shifted = np.stack(
            [full[0] + t * full[1] + 0.5 * t**2 * full[2], full[1] + t * full[2], full[2]]
        )
        assert reduced_energy(mdl, shifted) == pytest.approx(reduced_energy(mdl, full), abs=1e-10)


# -- OLP flow ------------------------------------------------------------------------


def test_abelian_olp_reproduces_cubic():
    mdl = spline2(R3, Inertia(np.eye(3)), LEFT)
    h = spline2_hamiltonian(mdl)
    full = RNG.standard_normal((3, 3))
    st = legendre(mdl, full)
    rates = olp_vector_field(h, st)
    np.testing.assert_allclose(rates.xi_dot[0], full[1], atol=1e-14)  # xi_dot = pi1^sharp
    np.testing.assert_allclose(rates.pis_dot[0], -st.pi0, atol=1e-14)
    np.testing.assert_allclose(rates.pi0_dot, 0.0, atol=1e-15)


def test_casimir_and_h_conserved_so3():
    mdl = spline2(SO3, Inertia(np.eye(3)), LEFT, bi_invariant=True)
    h = spline2_hamiltonian(mdl)
    jet0 = np.array([[0.3, 0.1, -0.2], [0.05, -0.3, 0.2], [0.1, 0.2, -0.1]])
    traj = integrate_olp(h, legendre(mdl, jet0), 10.0, IntegratorConfig(dt=1e-3))
    hs = traj.h_series()
    cas = traj.casimir_series()
    assert np.abs(hs - hs[0]).max() < 1e-8
    assert np.abs(cas - cas[0]).max() < 1e-8


def test_h_conserved_rigid_body_and_k3():
    mdl1 = rigid_body(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), LEFT)
    h1 = rigid_body_hamiltonian(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), LEFT)
    traj = integrate_olp(h1, legendre(mdl1, np.array([[1.0, 0.4, -0.3]])), 10.0,
                         IntegratorConfig(dt=1e-3))
    hs = traj.h_series()
    assert np.abs(hs - hs[0]).max() < 1e-8
    from liemech import quadratic_k3_hamiltonian

    mdl3 = quadratic_k3(SO3, Inertia(np.eye(3)), LEFT)
    h3 = quadratic_k3_hamiltonian(SO3, Inertia(np.eye(3)), LEFT)
    traj3 = integrate_olp(h3, legendre(mdl3, 0.2 * RNG.standard_normal((5, 3))), 5.0,
                          IntegratorConfig(dt=1e-3))
    hs3 = traj3.h_series()
    assert np.abs(hs3 - hs3[0]).max() < 1e-8


def test_legendre_duality_partials():
    for mdl in (
        spline2(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), LEFT),
        spline2(SO3, Inertia(np.eye(3)), Chirality.RIGHT, bi_invariant=True),
    ):
        h = spline2_hamiltonian(mdl)
        for _ in range(30):
            full = RNG.standard_normal((3, 3))
            st = legendre(mdl, full)
            np.testing.assert_allclose(
                h.d_pi(st.xi_jet, st.pis, st.pi0)[0], full[1], atol=1e-9
            )
            np.testing.assert_allclose(
                h.d_pi0(st.xi_jet, st.pis, st.pi0), full[0], atol=1e-9
            )


# -- reduced bracket ------------------------------------------------------------------


def test_bracket_antisymmetry_exact():
    k, d = 2, 3
    for _ in range(20):
        st = OLPState.from_flat(RNG.standard_normal(3 * d), k, d)
        f = QuadraticObservable.random(k, d, RNG)
        assert reduced_bracket(f, f, st, SO3, LEFT) == 0.0


def test_bracket_linear_observables_lie_poisson():
    # f = <a, pi0>, g = <b, pi0>: {f, g} = +/- <pi0, [a, b]>
    k, d = 2, 3
    a, b = RNG.standard_normal((2, d))
    n = 3 * d
    ba = np.zeros(n)
    ba[2 * d :] = a
    bb = np.zeros(n)
    bb[2 * d :] = b
    f = QuadraticObservable(k, d, b=ba)
    g = QuadraticObservable(k, d, b=bb)
    for chir in (Chirality.LEFT, Chirality.RIGHT):
        st = OLPState.from_flat(RNG.standard_normal(n), k, d)
        expected = chir.sign * float(st.pi0 @ SO3.bracket(a, b))
        assert reduced_bracket(f, g, st, SO3, chir) == pytest.approx(expected, abs=1e-14)


def test_bracket_leibniz_and_jacobi():
    k, d = 2, 3
    leib = jac = 0.0
    for _ in range(30):
        st = OLPState.from_flat(RNG.standard_normal(3 * d), k, d)
        fl = QuadraticObservable.random(k, d, RNG, linear_only=True)
        gl = QuadraticObservable.random(k, d, RNG, linear_only=True)
        hq = QuadraticObservable.random(k, d, RNG)
        prod = QuadraticObservable(
            k, d, a=fl.a * gl.a, b=fl.a * gl.b + gl.a * fl.b,
            C=np.outer(fl.b, gl.b) + np.outer(gl.b, fl.b),
        )
        lhs = reduced_bracket(prod, hq, st, SO3, LEFT)
        rhs = fl.value(st) * reduced_bracket(gl, hq, st, SO3, LEFT) + gl.value(
            st
        ) * reduced_bracket(fl, hq, st, SO3, LEFT)
        leib = max(leib, abs(lhs - rhs))
        f = QuadraticObservable.random(k, d, RNG)
        g = QuadraticObservable.random(k, d, RNG)
        res = (
            reduced_bracket(BracketObservable(f, g, SO3, LEFT), hq, st, SO3, LEFT)
            + reduced_bracket(BracketObservable(g, hq, SO3, LEFT), f, st, SO3, LEFT)
            + reduced_bracket(BracketObservable(hq, f, SO3, LEFT), g, st, SO3, LEFT)
        )
        jac = max(jac, abs(res))
    assert leib < 1e-12
    assert jac < 1e-10


def test_bracket_observable_gradient_matches_fd():
    k, d = 2, 3
    f = QuadraticObservable.random(k, d, RNG)
    g = QuadraticObservable.random(k, d, RNG)
    fg = BracketObservable(f, g, SO3, LEFT)
    z = RNG.standard_normal(3 * d)
    eps = 1e-6
    grad = fg.gradient(OLPState.from_flat(z, k, d))
    for i in range(z.size):
        zp, zm = z.copy(), z.copy()
        zp[i] += eps
        zm[i] -= eps
        fd = (
            fg.value(OLPState.from_flat(zp, k, d)) - fg.value(OLPState.from_flat(zm, k, d))
        ) / (2 * eps)
        assert abs(grad[i] - fd) < 1e-6


def test_flow_equals_bracket_with_hamiltonian():
    mdl = spline2(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), LEFT)
    h = spline2_hamiltonian(mdl)
    k, d = 2, 3

    class HObs:
        def d_xi(self, st):
            return h.d_xi(st.xi_jet, st.pis, st.pi0)

        def d_pi(self, st):
            return h.d_pi(st.xi_jet, st.pis, st.pi0)

        def d_pi0(self, st):
            return h.d_pi0(st.xi_jet, st.pis, st.pi0)

    hobs = HObs()
    for _ in range(100):
        st = OLPState.from_flat(RNG.standard_normal(3 * d), k, d)
        rates = olp_vector_field(h, st)
        for f in coordinate_observables(k, d):
            fdot = (
                np.sum(f.d_xi(st) * rates.xi_dot)
                + np.sum(f.d_pi(st) * rates.pis_dot)
                + float(f.d_pi0(st) @ rates.pi0_dot)
            )
            assert abs(fdot - reduced_bracket(f, hobs, st, SO3, LEFT)) < 1e-9


# -- EP <-> OLP equivalence -------------------------------------------------------------


def test_equivalence_abelian_exact():
    mdl = spline2(R3, Inertia(np.eye(3)), LEFT)
    dev = olp_equivalence_check(mdl, RNG.standard_normal((3, 3)), 2.0, 1e-3)
    assert dev < 1e-10


def test_equivalence_so3_spline():
    mdl = spline2(SO3, Inertia(np.eye(3)), LEFT, bi_invariant=True)
    jet0 = np.array([[0.3, 0.1, -0.2], [0.05, -0.3, 0.2], [0.1, 0.2, -0.1]])
    assert olp_equivalence_check(mdl, jet0, 5.0, 1e-3) < 1e-6


def test_equivalence_rigid_body():
    mdl = rigid_body(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), LEFT)
    assert olp_equivalence_check(mdl, np.array([[1.0, 0.4, -0.3]]), 5.0, 1e-3) < 1e-8


def test_equivalence_k3():
    mdl = quadratic_k3(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.RIGHT)
    dev = olp_equivalence_check(mdl, 0.2 * RNG.standard_normal((5, 3)), 2.0, 1e-3)
    assert dev < 1e-6


def test_general_inertia_spline_equivalence():
    mdl = spline2(SO3, Inertia.diagonal([1.0, 2.0, 3.0]), Chirality.RIGHT, tau=0.3)
    jet0 = 0.3 * RNG.standard_normal((3, 3))
    assert olp_equivalence_check(mdl, jet0, 3.0, 1e-3) < 1e-6
