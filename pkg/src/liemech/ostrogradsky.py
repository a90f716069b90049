"""Reduced Legendre transform, higher-order momenta and energy, the
Ostrogradsky-Lie-Poisson flow, and the reduced Poisson bracket (canonical
pairs plus a Lie-Poisson block)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import LieAlgebraDef, pair
from .errors import DimensionError
from .models import ReducedHamiltonianModel, ReducedLagrangianModel, hamiltonian_counterpart
from .solvers import IntegratorConfig, integrate
from . import euler_poincare as ep_mod


@dataclass
class OLPState:
    """Phase point (xi, ..., xi^(k-2), pi_(1), ..., pi_(k-1), pi_(0)).

    xi_jet has k-1 rows, pis has k-1 rows (pi_(1) first), pi0 is a single
    dual vector.
    """

    xi_jet: np.ndarray
    pis: np.ndarray
    pi0: np.ndarray

    def __post_init__(self):
        self.xi_jet = np.asarray(self.xi_jet, dtype=float)
        self.pis = np.asarray(self.pis, dtype=float)
        self.pi0 = np.asarray(self.pi0, dtype=float)
        if self.xi_jet.ndim != 2 or self.pis.ndim != 2:
            raise DimensionError("xi_jet and pis must be 2-d stacks")
        if self.xi_jet.shape != self.pis.shape:
            raise DimensionError("xi_jet and pis must have matching shapes")
        if self.pi0.shape != (self.xi_jet.shape[1],) and self.xi_jet.shape[0] > 0:
            raise DimensionError("pi0 dimension does not match the jet entries")

    @property
    def order(self) -> int:
        return self.xi_jet.shape[0] + 1

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.xi_jet.ravel(), self.pis.ravel(), self.pi0])

    @classmethod
    def from_flat(cls, y, k, d):
        nx = (k - 1) * d
        return cls(y[:nx].reshape(k - 1, d), y[nx : 2 * nx].reshape(k - 1, d), y[2 * nx :])


def legendre(model: ReducedLagrangianModel, full_jet) -> OLPState:
    """Reduced Legendre transform of a full jet (2k-1 rows):
    pi_(i) = sum_{j=0}^{k-i-1} (-1)^j d^j/dt^j dl/dxi^(i+j), expanded in
    closed form by the model."""
    k = model.order
    full_jet = model.check_jet(full_jet, rows=2 * k - 1)
    pis = model.momenta(full_jet)
    return OLPState(xi_jet=full_jet[: k - 1].copy(), pis=pis[1:], pi0=pis[0])


def reduced_energy(model: ReducedLagrangianModel, full_jet) -> float:
    """e_l = sum_i <pi_(i), xi^(i)> - l(xi, ..., xi^(k-1))."""
    k = model.order
    full_jet = model.check_jet(full_jet, rows=2 * k - 1)
    pis = model.momenta(full_jet)
    return float(np.sum(pis * full_jet[:k])) - float(model.eval(full_jet[:k]))


@dataclass
class OLPRates:
    xi_dot: np.ndarray
    pis_dot: np.ndarray
    pi0_dot: np.ndarray


def olp_vector_field(h: ReducedHamiltonianModel, state: OLPState) -> OLPRates:
    """pi0_dot = -/+ ad*_{dh/dpi_(0)} pi_(0); the remaining slots evolve
    canonically: xi^(j-1)_dot = dh/dpi_(j), pi_(j)_dot = -dh/dxi^(j-1)."""
    s = h.chirality.sign
    xi_dot = h.d_pi(state.xi_jet, state.pis, state.pi0)
    pis_dot = -h.d_xi(state.xi_jet, state.pis, state.pi0)
    w = h.d_pi0(state.xi_jet, state.pis, state.pi0)
    pi0_dot = -s * h.algebra.ad_star(w, state.pi0)
    return OLPRates(xi_dot=xi_dot, pis_dot=pis_dot, pi0_dot=pi0_dot)


@dataclass
class OLPTrajectory:
    h: ReducedHamiltonianModel
    ts: np.ndarray
    states: list

    def h_series(self) -> np.ndarray:
        return np.array([self.h.eval_h(st.xi_jet, st.pis, st.pi0) for st in self.states])

    def casimir_series(self) -> np.ndarray:
        return np.array([np.linalg.norm(st.pi0) for st in self.states])

    def stack(self) -> np.ndarray:
        return np.stack([st.flatten() for st in self.states])


def integrate_olp(
    h: ReducedHamiltonianModel,
    state0: OLPState,
    T: float,
    config: IntegratorConfig = IntegratorConfig(),
) -> OLPTrajectory:
    k, d = h.order, h.algebra.dim

    def field(y):
        st = OLPState.from_flat(y, k, d)
        rates = olp_vector_field(h, st)
        return np.concatenate([rates.xi_dot.ravel(), rates.pis_dot.ravel(), rates.pi0_dot])

    ts, ys = integrate(field, state0.flatten(), T, config)
    states = [OLPState.from_flat(y, k, d) for y in ys]
    return OLPTrajectory(h=h, ts=ts, states=states)


# -- reduced Poisson bracket -----------------------------------------------------


def reduced_bracket(f, g, state: OLPState, algebra: LieAlgebraDef, chirality) -> float:
    """{f, g} = sum_j (df/dxi^(j-1) . dg/dpi_(j) - dg/dxi^(j-1) . df/dpi_(j))
    +/- <pi_(0), [df/dpi_(0), dg/dpi_(0)]>.

    Observables expose exact partials via d_xi/d_pi/d_pi0(state).
    """
    fx, fp, f0 = f.d_xi(state), f.d_pi(state), f.d_pi0(state)
    gx, gp, g0 = g.d_xi(state), g.d_pi(state), g.d_pi0(state)
    canonical = float(np.sum(fx * gp) - np.sum(gx * fp))
    # antisymmetrized evaluation keeps {f, f} = 0 exact for any algebra
    lie_poisson = 0.5 * chirality.sign * (
        pair(state.pi0, algebra.bracket(f0, g0)) - pair(state.pi0, algebra.bracket(g0, f0))
    )
    return canonical + lie_poisson


class QuadraticObservable:
    """f(z) = a + b.z + z^T C z / 2 on the flattened state
    z = (xi_jet, pis, pi0); exact partials for bracket-axiom tests."""

    def __init__(self, k, d, a=0.0, b=None, C=None):
        self.k, self.d = k, d
        self.n = (2 * (k - 1) + 1) * d
        self.a = float(a)
        self.b = np.zeros(self.n) if b is None else np.asarray(b, dtype=float)
        self.C = np.zeros((self.n, self.n)) if C is None else np.asarray(C, dtype=float)
        self.C = 0.5 * (self.C + self.C.T)

    @classmethod
    def random(cls, k, d, rng, linear_only=False):
        n = (2 * (k - 1) + 1) * d
        b = rng.standard_normal(n)
        C = None if linear_only else rng.standard_normal((n, n))
        return cls(k, d, a=float(rng.standard_normal()), b=b, C=C)

    def value(self, state: OLPState) -> float:
        z = state.flatten()
        return self.a + float(self.b @ z) + 0.5 * float(z @ self.C @ z)

    def gradient(self, state: OLPState) -> np.ndarray:
        return self.b + self.C @ state.flatten()

    def _slices(self, grad):
        nx = (self.k - 1) * self.d
        return (
            grad[:nx].reshape(self.k - 1, self.d),
            grad[nx : 2 * nx].reshape(self.k - 1, self.d),
            grad[2 * nx :],
        )

    def d_xi(self, state):
        return self._slices(self.gradient(state))[0]

    def d_pi(self, state):
        return self._slices(self.gradient(state))[1]

    def d_pi0(self, state):
        return self._slices(self.gradient(state))[2]


class BracketObservable:
    """The observable {f, g} of two quadratic observables, with exact
    gradient (needed to evaluate nested Jacobi residuals without finite
    differences)."""

    def __init__(self, f: QuadraticObservable, g: QuadraticObservable, algebra, chirality):
        self.f, self.g = f, g
        self.algebra = algebra
        self.chirality = chirality
        k, d = f.k, f.d
        self.k, self.d = k, d
        n = f.n
        # constant canonical Poisson matrix on (xi_jet, pis) + zero pi0 block
        J = np.zeros((n, n))
        nx = (k - 1) * d
        J[:nx, nx : 2 * nx] = np.eye(nx)
        J[nx : 2 * nx, :nx] = -np.eye(nx)
        self._Jcan = J

    def _pi0_slice(self, z):
        return z[2 * (self.k - 1) * self.d :]

    def value(self, state: OLPState) -> float:
        z = state.flatten()
        df = self.f.b + self.f.C @ z
        dg = self.g.b + self.g.C @ z
        val = float(df @ self._Jcan @ dg)
        f0 = self.f._slices(df)[2]
        g0 = self.g._slices(dg)[2]
        val += self.chirality.sign * float(self._pi0_slice(z) @ self.algebra.bracket(f0, g0))
        return val

    def gradient(self, state: OLPState) -> np.ndarray:
        z = state.flatten()
        df = self.f.b + self.f.C @ z
        dg = self.g.b + self.g.C @ z
        grad = self.f.C @ (self._Jcan @ dg) - self.g.C @ (self._Jcan @ df)
        f0 = self.f._slices(df)[2]
        g0 = self.g._slices(dg)[2]
        pi0 = self._pi0_slice(z)
        s = self.chirality.sign
        nx = 2 * (self.k - 1) * self.d
        # d/dpi0 of <pi0, [f0, g0]> plus chain terms through df, dg
        extra = np.zeros_like(grad)
        extra[nx:] = s * self.algebra.bracket(f0, g0)
        alpha = np.zeros(self.f.n)
        alpha[nx:] = -s * self.algebra.ad_star(g0, pi0)
        beta = np.zeros(self.f.n)
        beta[nx:] = s * self.algebra.ad_star(f0, pi0)
        grad = grad + extra + self.f.C @ alpha + self.g.C @ beta
        return grad

    def _slices(self, grad):
        nx = (self.k - 1) * self.d
        return (
            grad[:nx].reshape(self.k - 1, self.d),
            grad[nx : 2 * nx].reshape(self.k - 1, self.d),
            grad[2 * nx :],
        )

    def d_xi(self, state):
        return self._slices(self.gradient(state))[0]

    def d_pi(self, state):
        return self._slices(self.gradient(state))[1]

    def d_pi0(self, state):
        return self._slices(self.gradient(state))[2]


def coordinate_observables(k, d):
    """One linear observable per phase-space coordinate."""
    out = []
    n = (2 * (k - 1) + 1) * d
    for i in range(n):
        b = np.zeros(n)
        b[i] = 1.0
        out.append(QuadraticObservable(k, d, b=b))
    return out


# -- Lagrangian/Hamiltonian equivalence --------------------------------------------


def olp_equivalence_check(
    model: ReducedLagrangianModel,
    full_jet0,
    T: float,
    dt: float,
    h: ReducedHamiltonianModel | None = None,
) -> float:
    """Integrate the Euler-Poincare and Ostrogradsky-Lie-Poisson systems from
    Legendre-matched initial data; return the sup-norm trajectory deviation of
    (xi-jet, momenta) with the EP states mapped through the momentum stack."""
    if h is None:
        h = hamiltonian_counterpart(model)
    k, d = model.order, model.dim
    config = IntegratorConfig(dt=dt)
    state_ep = ep_mod.ep_state_from_jet(model, full_jet0)
    traj_ep = ep_mod.integrate_ep(model, state_ep, T, config)
    traj_olp = integrate_olp(h, legendre(model, full_jet0), T, config)

    dev = 0.0
    for i in range(len(traj_ep.ts)):
        pis = ep_mod.ostro_stack(model, traj_ep.jets[i], traj_ep.ms[i], traj_ep.extras[i])
        mapped = OLPState(xi_jet=traj_ep.jets[i, : k - 1], pis=pis[1:], pi0=pis[0])
        dev = max(dev, float(np.abs(mapped.flatten() - traj_olp.states[i].flatten()).max()))
    return dev
