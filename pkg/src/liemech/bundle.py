"""Reduced dynamics on trivial principal bundles R^m x G with a flat base:
principal connections and curvature, Wong's equations and their second-order
generalization, k <= 2 Lagrange-Poincare fields, the Hamiltonian counterparts,
and the gauged Poisson bracket.

Conventions (trivialization by the identity section):
  - a connection is a local form A(x): R^m -> g, stored as a (d, m) matrix;
  - covariant derivatives: D sigma/Dt = sigma_dot +/- [A(x) x_dot, sigma] on
    algebra-valued sections and D mu/Dt = mu_dot -/+ ad*_{A(x) x_dot} mu on
    their duals (the unique pair satisfying the pairing product rule);
  - curvature B = dA +/- [A, A] with [A, A](u, v) = [A(u), A(v)].
Upper signs for Right chirality throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import Chirality, Inertia, LieAlgebraDef, pair
from .errors import DegeneracyError, DimensionError
from .solvers import IntegratorConfig, integrate


class BaseMetric(Inertia):
    """Constant SPD metric on the flat base R^m (Christoffel symbols zero)."""


@dataclass
class Connection:
    """Principal connection in the trivialization: x -> A(x), a (d, m) matrix
    of algebra coordinates per base direction. `dA` optionally supplies the
    exterior derivative as x -> (d, m, m), antisymmetric in the last two
    axes; otherwise a 4th-order central stencil is used."""

    algebra: LieAlgebraDef
    base_dim: int
    A: Callable
    dA: Callable | None = None
    chirality: Chirality = Chirality.RIGHT
    fd_step: float = 1e-4

    def __post_init__(self):
        if self.dA is None or self.base_dim == 0 or self.algebra.dim == 0:
            return
        # supplied exterior derivatives must agree with finite differences
        rng = np.random.default_rng(0)
        probe = Connection(self.algebra, self.base_dim, self.A, None, self.chirality,
                           self.fd_step)
        for _ in range(3):
            x = rng.standard_normal(self.base_dim)
            T = self.d_value(x)
            F = probe.d_value(x)
            if np.abs(T - F).max() > 1e-6 * max(1.0, np.abs(F).max()):
                raise ValueError("supplied dA disagrees with finite differences of A")

    def value(self, x) -> np.ndarray:
        out = np.asarray(self.A(np.asarray(x, dtype=float)), dtype=float)
        if out.shape != (self.algebra.dim, self.base_dim):
            raise DimensionError(
                f"connection value has shape {out.shape}, expected "
                f"({self.algebra.dim},{self.base_dim})"
            )
        return out

    def d_value(self, x) -> np.ndarray:
        """Exterior derivative tensor T[:, i, j] = (d_i A_j - d_j A_i);
        antisymmetric in the last two axes by construction."""
        x = np.asarray(x, dtype=float)
        if self.dA is not None:
            T = np.asarray(self.dA(x), dtype=float)
            return 0.5 * (T - np.swapaxes(T, 1, 2))
        m, h = self.base_dim, self.fd_step
        grad = np.empty((m, self.algebra.dim, m))  # grad[i] = d_i A
        for i in range(m):
            e = np.zeros(m)
            e[i] = h
            grad[i] = (
                -self.value(x + 2 * e)
                + 8.0 * self.value(x + e)
                - 8.0 * self.value(x - e)
                + self.value(x - 2 * e)
            ) / (12.0 * h)
        return np.transpose(grad, (1, 0, 2)) - np.transpose(grad, (1, 2, 0))


class CurvatureForm:
    """B(x)(u, v) = dA(u, v) +/- [A(u), A(v)]; antisymmetric by construction."""

    def __init__(self, connection: Connection):
        self.connection = connection

    def tensor(self, x) -> np.ndarray:
        """Full curvature tensor (d, m, m) at x, antisymmetric in (m, m)."""
        conn = self.connection
        T = conn.d_value(x)
        if not conn.algebra.is_abelian:
            A = conn.value(x)
            c = conn.algebra.structure_constants
            comm = np.einsum("kab,ai,bj->kij", c, A, A)
            T = T + conn.chirality.sign * comm
        return T

    def __call__(self, x, u, v) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        # contract against the antisymmetrized pair so B(u,v) = -B(v,u) holds
        # to the bit: swapping u and v negates every summand exactly
        W = np.outer(u, v) - np.outer(v, u)
        return 0.5 * np.einsum("kij,ij->k", self.tensor(x), W)


def curvature(conn: Connection, x, u, v) -> np.ndarray:
    return CurvatureForm(conn)(x, u, v)


def zero_connection(algebra, base_dim, chirality=Chirality.RIGHT) -> Connection:
    Z = np.zeros((algebra.dim, base_dim))
    return Connection(algebra, base_dim, A=lambda x: Z, dA=lambda x: np.zeros(
        (algebra.dim, base_dim, base_dim)), chirality=chirality)


def constant_connection(algebra, matrix, chirality=Chirality.RIGHT) -> Connection:
    M = np.asarray(matrix, dtype=float)
    base_dim = M.shape[1]
    return Connection(algebra, base_dim, A=lambda x: M, dA=lambda x: np.zeros(
        (algebra.dim, base_dim, base_dim)), chirality=chirality)


def abelian_symmetric_gauge(algebra, strength=1.0, chirality=Chirality.RIGHT) -> Connection:
    """A = (b/2)(-x2 dx1 + x1 dx2) on R^2, constant field of magnitude b."""
    if algebra.dim != 1:
        raise DimensionError("symmetric gauge needs a one-dimensional algebra")
    b = float(strength)

    def A(x):
        return np.array([[-0.5 * b * x[1], 0.5 * b * x[0]]])

    def dA(x):
        return np.array([[[0.0, b], [-b, 0.0]]])

    return Connection(algebra, 2, A=A, dA=dA, chirality=chirality)


def ad_covariant_derivative(conn: Connection, x, xdot, sigma, sigmadot) -> np.ndarray:
    """D sigma/Dt = sigma_dot +/- [A(x) x_dot, sigma] on adjoint sections."""
    a = conn.value(x) @ np.asarray(xdot, dtype=float)
    return np.asarray(sigmadot, dtype=float) + conn.chirality.sign * conn.algebra.bracket(
        a, np.asarray(sigma, dtype=float)
    )


def coad_covariant_derivative(conn: Connection, x, xdot, mu, mudot) -> np.ndarray:
    """D mu/Dt = mu_dot -/+ ad*_{A(x) x_dot} mu on coadjoint sections; the
    unique dual formula satisfying d/dt <mu, sigma> = <D mu/Dt, sigma> +
    <mu, D sigma/Dt>."""
    a = conn.value(x) @ np.asarray(xdot, dtype=float)
    return np.asarray(mudot, dtype=float) - conn.chirality.sign * conn.algebra.ad_star(
        a, np.asarray(mu, dtype=float)
    )


# -- Wong's equations (k = 1) -------------------------------------------------


@dataclass
class WongState:
    rho: np.ndarray
    rhodot: np.ndarray
    mubar: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.rhodot = np.asarray(self.rhodot, dtype=float)
        self.mubar = np.asarray(self.mubar, dtype=float)

    def flatten(self):
        return np.concatenate([self.rho, self.rhodot, self.mubar])

    @classmethod
    def from_flat(cls, y, m, d):
        return cls(y[:m], y[m : 2 * m], y[2 * m :])


def wong_vector_field(gamma: BaseMetric, kappa: Inertia, conn: Connection, state: WongState):
    """rho_ddot = -gamma^-1 <mubar, B(rho)(rhodot, .)>, together with the
    parallel charge D mubar/Dt = -/+ ad*_sigma mubar (zero for ad-invariant
    kappa and abelian G, as in the classical display)."""
    s = conn.chirality.sign
    alg = conn.algebra
    Bt = CurvatureForm(conn).tensor(state.rho)
    force = np.einsum("k,kpi,p->i", state.mubar, Bt, state.rhodot)
    rhoddot = -gamma.inverse @ force
    sigma = kappa.inverse @ state.mubar
    a = conn.value(state.rho) @ state.rhodot
    mubar_dot = s * alg.ad_star(a, state.mubar) - s * alg.ad_star(sigma, state.mubar)
    return WongState(state.rhodot, rhoddot, mubar_dot)


def wong_energy(gamma, kappa, state: WongState) -> float:
    return 0.5 * float(state.rhodot @ gamma.matrix @ state.rhodot) + 0.5 * float(
        state.mubar @ kappa.inverse @ state.mubar
    )


def integrate_wong(gamma, kappa, conn, state0: WongState, T, config=IntegratorConfig()):
    m, d = gamma.dim, conn.algebra.dim

    def fieldfn(y):
        return wong_vector_field(gamma, kappa, conn, WongState.from_flat(y, m, d)).flatten()

    ts, ys = integrate(fieldfn, state0.flatten(), T, config)
    states = [WongState.from_flat(y, m, d) for y in ys]
    return ts, states


# -- quadratic k = 2 Lagrange-Poincare family -----------------------------------


@dataclass(frozen=True)
class Lp2Model:
    """Quadratic reduced Lagrangian
    l = <P1 rho_dot, rho_dot>/2 + <P2 rho_ddot, rho_ddot>/2
      + <K0 sigma, sigma>/2 + <K1 sigma_cov, sigma_cov>/2
    on second-order base jets plus two adjoint slots (flat base)."""

    algebra: LieAlgebraDef
    P1: np.ndarray
    P2: np.ndarray
    K0: np.ndarray
    K1: np.ndarray

    def __post_init__(self):
        for name in ("P1", "P2", "K0", "K1"):
            M = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, 0.5 * (M + M.T))
        for name in ("P2", "K1"):
            M = getattr(self, name)
            if M.size and np.linalg.eigvalsh(M).min() <= 0:
                raise DegeneracyError(f"{name} must be positive definite for k = 2")

    @property
    def base_dim(self):
        return self.P1.shape[0]

    @classmethod
    def kaluza_klein(cls, algebra, gamma: BaseMetric, kappa: Inertia, lam1, lam2):
        return cls(
            algebra,
            P1=gamma.matrix,
            P2=lam1**2 * gamma.matrix,
            K0=kappa.matrix,
            K1=lam2**2 * kappa.matrix,
        )


@dataclass
class Wong2State:
    """Second-order bundle phase point, mirroring the Hamiltonian layout:
    base jet (rho, rhodot, rhoddot, rhodddot), adjoint variable sigma, fiber
    momenta pi1 = dl/dsigma_cov and pi0 (the full fiber Euler-Lagrange
    covector)."""

    rho: np.ndarray
    rhodot: np.ndarray
    rhoddot: np.ndarray
    rhodddot: np.ndarray
    sigma: np.ndarray
    pi1: np.ndarray
    pi0: np.ndarray

    def __post_init__(self):
        for name in ("rho", "rhodot", "rhoddot", "rhodddot", "sigma", "pi1", "pi0"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))

    def flatten(self):
        return np.concatenate(
            [self.rho, self.rhodot, self.rhoddot, self.rhodddot, self.sigma, self.pi1, self.pi0]
        )

    @classmethod
    def from_flat(cls, y, m, d):
        parts = np.split(y, [m, 2 * m, 3 * m, 4 * m, 4 * m + d, 4 * m + 2 * d])
        return cls(*parts)


def lp2_vector_field(model: Lp2Model, conn: Connection, state: Wong2State) -> Wong2State:
    """Both lines of the k = 2 Lagrange-Poincare system as a first-order
    field: P2 rho'''' = P1 rho_ddot + <pi0 -/+ ad*_sigma pi1, i_rhodot B>,
    and the fiber block D sigma/Dt = K1^-1 pi1, D pi1/Dt = K0 sigma - pi0,
    D pi0/Dt = -/+ ad*_sigma pi0 (trivialized to plain derivatives)."""
    s = conn.chirality.sign
    alg = conn.algebra
    Bt = CurvatureForm(conn).tensor(state.rho)
    nu_eff = state.pi0 - s * alg.ad_star(state.sigma, state.pi1)
    force = np.einsum("k,kpi,p->i", nu_eff, Bt, state.rhodot)
    rho4 = np.linalg.solve(model.P2, model.P1 @ state.rhoddot + force)
    a = conn.value(state.rho) @ state.rhodot
    s1 = np.linalg.solve(model.K1, state.pi1)
    sigma_dot = s1 - s * alg.bracket(a, state.sigma)
    pi1_dot = model.K0 @ state.sigma - state.pi0 + s * alg.ad_star(a, state.pi1)
    pi0_dot = -s * alg.ad_star(state.sigma, state.pi0) + s * alg.ad_star(a, state.pi0)
    return Wong2State(
        state.rhodot, state.rhoddot, state.rhodddot, rho4, sigma_dot, pi1_dot, pi0_dot
    )


def lp2_energy(model: Lp2Model, state: Wong2State) -> float:
    """Reduced energy sum <gamma_(i), rho^(i+1)> + sum <pi_(i), sigma^(i)> - l,
    written in the state coordinates (conserved along the flow)."""
    g0 = model.P1 @ state.rhodot - model.P2 @ state.rhodddot
    g1 = model.P2 @ state.rhoddot
    s1 = np.linalg.solve(model.K1, state.pi1)
    val = float(g0 @ state.rhodot) + float(g1 @ state.rhoddot)
    val += float(state.pi0 @ state.sigma) + float(state.pi1 @ s1)
    val -= 0.5 * float(state.rhodot @ model.P1 @ state.rhodot)
    val -= 0.5 * float(state.rhoddot @ model.P2 @ state.rhoddot)
    val -= 0.5 * float(state.sigma @ model.K0 @ state.sigma)
    val -= 0.5 * float(s1 @ model.K1 @ s1)
    return val


def wong2_vector_field(
    gamma: BaseMetric,
    kappa: Inertia,
    conn: Connection,
    lam1: float,
    lam2: float,
    state: Wong2State,
) -> Wong2State:
    """Second-order Wong field (Kaluza-Klein parameters lam1, lam2). In the
    lam -> 0 limits the corresponding slots freeze and the shared slots
    reproduce the first-order Wong field exactly."""
    if lam1 < 0 or lam2 < 0:
        raise ValueError("lambda parameters must be nonnegative")
    s = conn.chirality.sign
    alg = conn.algebra
    if lam1 > 0 and lam2 > 0:
        return lp2_vector_field(
            Lp2Model.kaluza_klein(alg, gamma, kappa, lam1, lam2), conn, state
        )

    Bt = CurvatureForm(conn).tensor(state.rho)
    a = conn.value(state.rho) @ state.rhodot
    # fiber block
    if lam2 > 0:
        s1 = np.linalg.solve(lam2**2 * kappa.matrix, state.pi1)
        sigma_dot = s1 - s * alg.bracket(a, state.sigma)
        pi1_dot = kappa.matrix @ state.sigma - state.pi0 + s * alg.ad_star(a, state.pi1)
        pi0_dot = -s * alg.ad_star(state.sigma, state.pi0) + s * alg.ad_star(a, state.pi0)
        nu_eff = state.pi0 - s * alg.ad_star(state.sigma, state.pi1)
    else:
        if np.any(state.pi1):
            raise DegeneracyError("lambda2 = 0 requires the pi1 slot to vanish")
        mubar = kappa.matrix @ state.sigma
        mubar_dot = s * alg.ad_star(a, mubar) - s * alg.ad_star(state.sigma, mubar)
        sigma_dot = kappa.inverse @ mubar_dot
        pi1_dot = np.zeros_like(state.pi1)
        pi0_dot = mubar_dot
        nu_eff = mubar
    # base block
    force = np.einsum("k,kpi,p->i", nu_eff, Bt, state.rhodot)
    if lam1 > 0:
        rho4 = np.linalg.solve(lam1**2 * gamma.matrix, gamma.matrix @ state.rhoddot + force)
        rhodot_dot = state.rhoddot
        rhoddot_dot = state.rhodddot
    else:
        if np.any(state.rhodddot):
            raise DegeneracyError("lambda1 = 0 with a jerk slot present; use wong_vector_field")
        rhodot_dot = -gamma.inverse @ force
        rhoddot_dot = np.zeros_like(state.rhoddot)
        rho4 = np.zeros_like(state.rhodddot)
    return Wong2State(state.rhodot, rhodot_dot, rhoddot_dot, rho4, sigma_dot, pi1_dot, pi0_dot)


def integrate_lp2(model: Lp2Model, conn, state0: Wong2State, T, config=IntegratorConfig()):
    m, d = model.base_dim, model.algebra.dim

    def fieldfn(y):
        return lp2_vector_field(model, conn, Wong2State.from_flat(y, m, d)).flatten()

    ts, ys = integrate(fieldfn, state0.flatten(), T, config)
    return ts, [Wong2State.from_flat(y, m, d) for y in ys]


# -- Ostrogradsky-Hamilton-Poincare (k <= 2) -------------------------------------


@dataclass
class OHPState:
    """Hamiltonian bundle phase point: base positions rho^(i) (k rows), base
    momenta gamma_(i) (k rows), adjoint variables sigma^(i) (k-1 rows), fiber
    momenta pi_(i) (k-1 rows, pi_(1) first) and pi_(0)."""

    rhos: np.ndarray
    gammas: np.ndarray
    sigmas: np.ndarray
    pis: np.ndarray
    pi0: np.ndarray

    def __post_init__(self):
        self.rhos = np.atleast_2d(np.asarray(self.rhos, dtype=float))
        self.gammas = np.atleast_2d(np.asarray(self.gammas, dtype=float))
        self.sigmas = np.asarray(self.sigmas, dtype=float)
        self.pis = np.asarray(self.pis, dtype=float)
        self.pi0 = np.asarray(self.pi0, dtype=float)

    @property
    def order(self):
        return self.rhos.shape[0]

    def flatten(self):
        return np.concatenate(
            [self.rhos.ravel(), self.gammas.ravel(), self.sigmas.ravel(),
             self.pis.ravel(), self.pi0]
        )

    @classmethod
    def from_flat(cls, y, k, m, d):
        i1 = k * m
        i2 = 2 * k * m
        i3 = i2 + (k - 1) * d
        i4 = i3 + (k - 1) * d
        return cls(
            y[:i1].reshape(k, m),
            y[i1:i2].reshape(k, m),
            y[i2:i3].reshape(k - 1, d),
            y[i3:i4].reshape(k - 1, d),
            y[i4:],
        )


@dataclass(frozen=True)
class BundleHamiltonian:
    """h on the reduced bundle phase space, with exact partials.

    Callbacks receive the OHPState and return stacks matching the slot
    layout: d_rho/d_gamma (k, m), d_sigma/d_pi (k-1, d), d_pi0 (d,).
    """

    order: int
    algebra: LieAlgebraDef
    base_dim: int
    eval_h: Callable
    d_rho: Callable
    d_gamma: Callable
    d_sigma: Callable
    d_pi: Callable
    d_pi0: Callable
    kind: str = ""


@dataclass
class OHPRates:
    rhos_dot: np.ndarray
    gammas_dot: np.ndarray
    sigmas_dot: np.ndarray
    pis_dot: np.ndarray
    pi0_dot: np.ndarray
    # covariant fiber rates (before adding the connection transport terms)
    sigmas_cov: np.ndarray
    pis_cov: np.ndarray
    pi0_cov: np.ndarray

    def flatten(self):
        return np.concatenate(
            [self.rhos_dot.ravel(), self.gammas_dot.ravel(), self.sigmas_dot.ravel(),
             self.pis_dot.ravel(), self.pi0_dot]
        )


def ohp_vector_field(h: BundleHamiltonian, conn: Connection, state: OHPState) -> OHPRates:
    """The boxed first-order system: canonical base equations with the
    curvature force on gamma_(0), and covariant canonical/coadjoint fiber
    equations, trivialized to plain time derivatives."""
    k = h.order
    s = conn.chirality.sign
    alg = conn.algebra
    dgam = h.d_gamma(state)
    drho = h.d_rho(state)
    rho_vel = dgam[0]
    Bt = CurvatureForm(conn).tensor(state.rhos[0])
    nu_eff = state.pi0.copy()
    for j in range(1, k):
        nu_eff -= s * alg.ad_star(state.sigmas[j - 1], state.pis[j - 1])
    force = np.einsum("k,kpi,p->i", nu_eff, Bt, rho_vel)
    gammas_dot = -drho
    gammas_dot[0] -= force
    sig_cov = h.d_pi(state)
    pis_cov = -h.d_sigma(state)
    pi0_cov = -s * alg.ad_star(h.d_pi0(state), state.pi0)
    a = conn.value(state.rhos[0]) @ rho_vel
    sigmas_dot = np.empty_like(sig_cov)
    pis_dot = np.empty_like(pis_cov)
    for j in range(k - 1):
        sigmas_dot[j] = sig_cov[j] - s * alg.bracket(a, state.sigmas[j])
        pis_dot[j] = pis_cov[j] + s * alg.ad_star(a, state.pis[j])
    pi0_dot = pi0_cov + s * alg.ad_star(a, state.pi0)
    return OHPRates(
        rhos_dot=dgam, gammas_dot=gammas_dot, sigmas_dot=sigmas_dot, pis_dot=pis_dot,
        pi0_dot=pi0_dot, sigmas_cov=sig_cov, pis_cov=pis_cov, pi0_cov=pi0_cov,
    )


def integrate_ohp(h: BundleHamiltonian, conn, state0: OHPState, T, config=IntegratorConfig()):
    k, m, d = h.order, h.base_dim, h.algebra.dim

    def fieldfn(y):
        return ohp_vector_field(h, conn, OHPState.from_flat(y, k, m, d)).flatten()

    ts, ys = integrate(fieldfn, state0.flatten(), T, config)
    return ts, [OHPState.from_flat(y, k, m, d) for y in ys]


def kk1_hamiltonian(algebra, gamma: BaseMetric, kappa: Inertia) -> BundleHamiltonian:
    """Kaluza-Klein k = 1 Hamiltonian, h = |gamma_(0)|^2/2 + |pi_(0)|^2/2 in
    the dual metrics; its OHP system is Wong's equations."""
    m, d = gamma.dim, algebra.dim

    def ev(st):
        return 0.5 * float(st.gammas[0] @ gamma.inverse @ st.gammas[0]) + 0.5 * float(
            st.pi0 @ kappa.inverse @ st.pi0
        )

    return BundleHamiltonian(
        order=1, algebra=algebra, base_dim=m, eval_h=ev,
        d_rho=lambda st: np.zeros((1, m)),
        d_gamma=lambda st: (gamma.inverse @ st.gammas[0])[None, :],
        d_sigma=lambda st: np.zeros((0, d)),
        d_pi=lambda st: np.zeros((0, d)),
        d_pi0=lambda st: kappa.inverse @ st.pi0,
        kind="kk1",
    )


def lp2_hamiltonian(model: Lp2Model) -> BundleHamiltonian:
    """Legendre transform of the quadratic k = 2 family:
    h = <gamma_(0), rhodot> + |gamma_(1)|^2_{P2^-1}/2 - <P1 rhodot, rhodot>/2
      + <pi_(0), sigma> + |pi_(1)|^2_{K1^-1}/2 - <K0 sigma, sigma>/2."""
    m, d = model.base_dim, model.algebra.dim
    P1, P2, K0, K1 = model.P1, model.P2, model.K0, model.K1
    P2inv = np.linalg.inv(P2)
    K1inv = np.linalg.inv(K1)

    def ev(st):
        rhodot = st.rhos[1]
        val = float(st.gammas[0] @ rhodot) + 0.5 * float(st.gammas[1] @ P2inv @ st.gammas[1])
        val -= 0.5 * float(rhodot @ P1 @ rhodot)
        val += float(st.pi0 @ st.sigmas[0]) + 0.5 * float(st.pis[0] @ K1inv @ st.pis[0])
        val -= 0.5 * float(st.sigmas[0] @ K0 @ st.sigmas[0])
        return val

    return BundleHamiltonian(
        order=2, algebra=model.algebra, base_dim=m, eval_h=ev,
        d_rho=lambda st: np.stack([np.zeros(m), st.gammas[0] - P1 @ st.rhos[1]]),
        d_gamma=lambda st: np.stack([st.rhos[1], P2inv @ st.gammas[1]]),
        d_sigma=lambda st: (st.pi0 - K0 @ st.sigmas[0])[None, :],
        d_pi=lambda st: (K1inv @ st.pis[0])[None, :],
        d_pi0=lambda st: st.sigmas[0].copy(),
        kind="lp2",
    )


def kk2_hamiltonian(algebra, gamma, kappa, lam1, lam2) -> BundleHamiltonian:
    return lp2_hamiltonian(Lp2Model.kaluza_klein(algebra, gamma, kappa, lam1, lam2))


def ohp_state_from_wong2(model: Lp2Model, state: Wong2State) -> OHPState:
    """Legendre map of the Lagrangian-side state: gamma_(0) = P1 rhodot -
    P2 rhodddot, gamma_(1) = P2 rhoddot; fiber slots are shared."""
    return OHPState(
        rhos=np.stack([state.rho, state.rhodot]),
        gammas=np.stack(
            [model.P1 @ state.rhodot - model.P2 @ state.rhodddot, model.P2 @ state.rhoddot]
        ),
        sigmas=state.sigma[None, :],
        pis=state.pi1[None, :],
        pi0=state.pi0.copy(),
    )


def wong2_state_from_ohp(model: Lp2Model, state: OHPState) -> Wong2State:
    rhoddot = np.linalg.solve(model.P2, state.gammas[1])
    rhodddot = np.linalg.solve(model.P2, model.P1 @ state.rhos[1] - state.gammas[0])
    return Wong2State(
        state.rhos[0], state.rhos[1], rhoddot, rhodddot,
        state.sigmas[0], state.pis[0], state.pi0.copy(),
    )


# -- gauged Poisson bracket --------------------------------------------------------


def gauged_bracket(f, g, conn: Connection, state: OHPState) -> float:
    """Sum of the two canonical brackets, the Lie-Poisson term, and the
    curvature term <pi_(0) -/+ sum_j ad*_{sigma^(j-1)} pi_(j),
    B(df/dgamma_(0), dg/dgamma_(0))>.

    Observables expose exact partials d_rho/d_gamma/d_sigma/d_pi/d_pi0.
    """
    s = conn.chirality.sign
    alg = conn.algebra
    k = state.order
    fr, fg = f.d_rho(state), f.d_gamma(state)
    gr, gg = g.d_rho(state), g.d_gamma(state)
    val = float(np.sum(fr * gg) - np.sum(gr * fg))
    fs, fp = f.d_sigma(state), f.d_pi(state)
    gs, gp = g.d_sigma(state), g.d_pi(state)
    val += float(np.sum(fs * gp) - np.sum(gs * fp))
    f0, g0 = f.d_pi0(state), g.d_pi0(state)
    val += 0.5 * s * (
        pair(state.pi0, alg.bracket(f0, g0)) - pair(state.pi0, alg.bracket(g0, f0))
    )
    nu_eff = state.pi0.copy()
    for j in range(1, k):
        nu_eff -= s * alg.ad_star(state.sigmas[j - 1], state.pis[j - 1])
    Bt = CurvatureForm(conn).tensor(state.rhos[0])
    W = np.outer(fg[0], gg[0]) - np.outer(gg[0], fg[0])
    val += 0.5 * float(np.einsum("k,kij,ij->", nu_eff, Bt, W))
    return val


class BundleQuadraticObservable:
    """f(z) = a + b.z + z^T C z / 2 on the flattened OHP state, with exact
    sliced partials (for bracket axioms and flow-consistency tests)."""

    def __init__(self, k, m, d, a=0.0, b=None, C=None):
        self.k, self.m, self.d = k, m, d
        self.n = 2 * k * m + (2 * (k - 1) + 1) * d
        self.a = float(a)
        self.b = np.zeros(self.n) if b is None else np.asarray(b, dtype=float)
        C = np.zeros((self.n, self.n)) if C is None else np.asarray(C, dtype=float)
        self.C = 0.5 * (C + C.T)

    @classmethod
    def random(cls, k, m, d, rng, linear_only=False):
        n = 2 * k * m + (2 * (k - 1) + 1) * d
        return cls(
            k, m, d, a=float(rng.standard_normal()), b=rng.standard_normal(n),
            C=None if linear_only else rng.standard_normal((n, n)),
        )

    def value(self, state: OHPState) -> float:
        z = state.flatten()
        return self.a + float(self.b @ z) + 0.5 * float(z @ self.C @ z)

    def gradient(self, state: OHPState) -> np.ndarray:
        return self.b + self.C @ state.flatten()

    def _slices(self, grad):
        k, m, d = self.k, self.m, self.d
        i1, i2 = k * m, 2 * k * m
        i3 = i2 + (k - 1) * d
        i4 = i3 + (k - 1) * d
        return (
            grad[:i1].reshape(k, m),
            grad[i1:i2].reshape(k, m),
            grad[i2:i3].reshape(k - 1, d),
            grad[i3:i4].reshape(k - 1, d),
            grad[i4:],
        )

    def d_rho(self, state):
        return self._slices(self.gradient(state))[0]

    def d_gamma(self, state):
        return self._slices(self.gradient(state))[1]

    def d_sigma(self, state):
        return self._slices(self.gradient(state))[2]

    def d_pi(self, state):
        return self._slices(self.gradient(state))[3]

    def d_pi0(self, state):
        return self._slices(self.gradient(state))[4]


def bundle_coordinate_observables(k, m, d):
    out = []
    n = 2 * k * m + (2 * (k - 1) + 1) * d
    for i in range(n):
        b = np.zeros(n)
        b[i] = 1.0
        out.append(BundleQuadraticObservable(k, m, d, b=b))
    return out
