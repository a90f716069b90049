"""Built-in reduced Lagrangians on stacked algebra jets and their Hamiltonian
counterparts.

A jet stack is a float array of shape (k, d): row j holds the j-th time
derivative of the algebra curve, treated as an independent variable. Momenta
stacks are (k, d) arrays ordered (pi_(0), ..., pi_(k-1)). Evaluation callbacks
accept leading batch axes, i.e. shape (..., k, d).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import Chirality, Inertia, LieAlgebraDef
from .errors import DimensionError, HyperregularityError

_HESSIAN_COND_MAX = 1e10


@dataclass(frozen=True)
class ReducedLagrangianModel:
    """A reduced Lagrangian l on k stacked copies of the algebra.

    eval:    jets (..., k, d) -> (...,)
    grads:   jet (k, d) -> (k, d) stack of dl/dxi^(j)
    accel:   (jet (k, d), m (d,), extra (k-2, d)) -> top derivative xi^(k);
             inverts the top-slot Legendre relation (for k = 1 it solves the
             momentum evolution equation for xi_dot directly).
    momenta: full jet (2k-1, d) -> (k, d) stack (pi_(0), ..., pi_(k-1)), the
             time derivatives of the gradients expanded in closed form.
    """

    order: int
    algebra: LieAlgebraDef
    chirality: Chirality
    inertia: Inertia
    eval: Callable
    grads: Callable
    accel: Callable
    momenta: Callable
    hessian_ok: bool = False
    tau: float = 0.0
    bi_invariant: bool = False
    kind: str = ""

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def check_jet(self, jet, rows=None):
        jet = np.asarray(jet, dtype=float)
        rows = self.order if rows is None else rows
        if jet.shape != (rows, self.dim):
            raise DimensionError(f"jet has shape {jet.shape}, expected ({rows},{self.dim})")
        return jet


@dataclass(frozen=True)
class ReducedHamiltonianModel:
    """Hamiltonian h(xi, ..., xi^(k-2), pi_(1), ..., pi_(k-1), pi_(0)).

    Slot layout of the callbacks: xi_jet (k-1, d), pis (k-1, d) holding
    (pi_(1), ..., pi_(k-1)), pi0 (d,). Partials:
    d_xi -> (k-1, d) duals, d_pi -> (k-1, d) algebra vectors, d_pi0 -> (d,).
    """

    order: int
    algebra: LieAlgebraDef
    chirality: Chirality
    eval_h: Callable
    d_xi: Callable
    d_pi: Callable
    d_pi0: Callable
    kind: str = ""


def _check_hessian(order, dim, grads, samples=3):
    """Condition number of the top-slot Hessian at a few random jets."""
    if dim == 0:
        return True
    rng = np.random.default_rng(0)
    eps = 1e-6
    for _ in range(samples):
        jet = rng.standard_normal((order, dim))
        H = np.empty((dim, dim))
        for a in range(dim):
            jp, jm = jet.copy(), jet.copy()
            jp[order - 1, a] += eps
            jm[order - 1, a] -= eps
            H[a] = (grads(jp)[order - 1] - grads(jm)[order - 1]) / (2 * eps)
        sv = np.linalg.svd(H, compute_uv=False)
        if sv[-1] == 0 or sv[0] / sv[-1] > _HESSIAN_COND_MAX:
            raise HyperregularityError(
                f"top-slot Hessian is numerically singular (cond >= {_HESSIAN_COND_MAX:.0e})"
            )
    return True


# -- rigid body (k = 1) -------------------------------------------------------


def rigid_body(algebra: LieAlgebraDef, I: Inertia, chirality: Chirality) -> ReducedLagrangianModel:
    """l(xi) = <I xi, xi>/2, the k = 1 quadratic kinetic energy."""
    _check_inertia_dim(algebra, I)
    s = chirality.sign

    def ev(jets):
        xi = np.asarray(jets, dtype=float)[..., 0, :]
        return 0.5 * np.einsum("...i,ij,...j->...", xi, I.matrix, xi)

    def gr(jet):
        return (I.matrix @ np.asarray(jet, dtype=float)[0])[None, :]

    def momenta(full_jet):
        return (I.matrix @ np.asarray(full_jet, dtype=float)[0])[None, :]

    def accel(jet, m, extra=None):
        xi = np.asarray(jet, dtype=float)[0]
        return I.inverse @ (-s * algebra.ad_star(xi, m))

    model = ReducedLagrangianModel(
        order=1, algebra=algebra, chirality=chirality, inertia=I,
        eval=ev, grads=gr, accel=accel, momenta=momenta, kind="rigid_body",
    )
    object.__setattr__(model, "hessian_ok", _check_hessian(1, algebra.dim, gr))
    return model


def rigid_body_hamiltonian(algebra, I: Inertia, chirality) -> ReducedHamiltonianModel:
    """h(pi_(0)) = ||pi_(0)||^2 / 2 in the dual norm of I."""
    _check_inertia_dim(algebra, I)

    def ev(xi_jet, pis, pi0):
        return 0.5 * float(pi0 @ I.inverse @ pi0)

    def d_xi(xi_jet, pis, pi0):
        return np.zeros((0, algebra.dim))

    def d_pi(xi_jet, pis, pi0):
        return np.zeros((0, algebra.dim))

    def d_pi0(xi_jet, pis, pi0):
        return I.inverse @ pi0

    return ReducedHamiltonianModel(
        order=1, algebra=algebra, chirality=chirality,
        eval_h=ev, d_xi=d_xi, d_pi=d_pi, d_pi0=d_pi0, kind="rigid_body",
    )


# -- elastic 2-splines (k = 2) -------------------------------------------------


def spline2(
    algebra: LieAlgebraDef,
    I: Inertia,
    chirality: Chirality,
    tau: float = 0.0,
    bi_invariant: bool = False,
) -> ReducedLagrangianModel:
    """l(xi, xi_dot) = ||xi_dot^flat +/- ad*_xi xi^flat||^2 / 2
    + tau^2 <I xi, xi> / 2, the reduced elastic-spline Lagrangian.

    The dual norm is ||mu||^2 = <mu, I^-1 mu> so that ||x^flat|| = ||x||.
    With `bi_invariant`, I must be ad-invariant, which makes
    ad*_xi xi^flat = 0 and the acceleration term drop out.
    """
    _check_inertia_dim(algebra, I)
    if bi_invariant and not I.is_ad_invariant(algebra):
        raise ValueError("inertia is not ad-invariant but bi_invariant was requested")
    s = chirality.sign
    c = algebra.structure_constants
    M, Minv = I.matrix, I.inverse

    def _eta_flat(xi, xid):
        return M @ xid + s * algebra.ad_star(xi, M @ xi)

    def ev(jets):
        jets = np.asarray(jets, dtype=float)
        xi, xid = jets[..., 0, :], jets[..., 1, :]
        p = np.einsum("ij,...j->...i", M, xid)
        if not algebra.is_abelian:
            p = p + s * np.einsum("kij,...i,...k->...j", c, xi, np.einsum("kl,...l->...k", M, xi))
        val = 0.5 * np.einsum("...i,ij,...j->...", p, Minv, p)
        if tau:
            val = val + 0.5 * tau**2 * np.einsum("...i,ij,...j->...", xi, M, xi)
        return val

    def _dl_dxi(xi, xid):
        eta = Minv @ _eta_flat(xi, xid)
        out = -s * (algebra.ad_star(eta, M @ xi) + M @ algebra.bracket(eta, xi))
        if tau:
            out = out + tau**2 * (M @ xi)
        return out

    def gr(jet):
        jet = np.asarray(jet, dtype=float)
        xi, xid = jet[0], jet[1]
        return np.stack([_dl_dxi(xi, xid), _eta_flat(xi, xid)])

    def _d_dt_pi1(xi, xid, xidd):
        # time derivative of eta^flat along the jet shift
        return M @ xidd + s * (algebra.ad_star(xid, M @ xi) + algebra.ad_star(xi, M @ xid))

    def momenta(full_jet):
        full_jet = np.asarray(full_jet, dtype=float)
        xi, xid, xidd = full_jet[0], full_jet[1], full_jet[2]
        pi1 = _eta_flat(xi, xid)
        pi0 = _dl_dxi(xi, xid) - _d_dt_pi1(xi, xid, xidd)
        return np.stack([pi0, pi1])

    def accel(jet, m, extra=None):
        jet = np.asarray(jet, dtype=float)
        xi, xid = jet[0], jet[1]
        rhs = _dl_dxi(xi, xid) - m - s * (
            algebra.ad_star(xid, M @ xi) + algebra.ad_star(xi, M @ xid)
        )
        return Minv @ rhs

    model = ReducedLagrangianModel(
        order=2, algebra=algebra, chirality=chirality, inertia=I,
        eval=ev, grads=gr, accel=accel, momenta=momenta,
        tau=float(tau), bi_invariant=bool(bi_invariant), kind="spline2",
    )
    object.__setattr__(model, "hessian_ok", _check_hessian(2, algebra.dim, gr))
    return model


def spline2_hamiltonian(model: ReducedLagrangianModel) -> ReducedHamiltonianModel:
    """Hamiltonian of the 2-spline system,
    h = ||pi_(1)||^2/2 + <pi_(0), xi> -/+ <pi_(1), (ad*_xi xi^flat)^sharp>,
    minus tau^2 <I xi, xi> / 2 for the elastic variant.
    """
    if model.kind != "spline2":
        raise ValueError("expected a spline2 model")
    algebra, I, s, tau = model.algebra, model.inertia, model.chirality.sign, model.tau
    M, Minv = I.matrix, I.inverse

    def ev(xi_jet, pis, pi0):
        xi, pi1 = xi_jet[0], pis[0]
        val = 0.5 * float(pi1 @ Minv @ pi1) + float(pi0 @ xi)
        if not algebra.is_abelian:
            val -= s * float(pi1 @ (Minv @ algebra.ad_star(xi, M @ xi)))
        if tau:
            val -= 0.5 * tau**2 * float(xi @ M @ xi)
        return val

    def d_xi(xi_jet, pis, pi0):
        xi, pi1 = xi_jet[0], pis[0]
        w = Minv @ pi1
        out = pi0 - s * (M @ algebra.bracket(xi, w) - algebra.ad_star(w, M @ xi))
        if tau:
            out = out - tau**2 * (M @ xi)
        return out[None, :]

    def d_pi(xi_jet, pis, pi0):
        xi, pi1 = xi_jet[0], pis[0]
        return (Minv @ (pi1 - s * algebra.ad_star(xi, M @ xi)))[None, :]

    def d_pi0(xi_jet, pis, pi0):
        return xi_jet[0].copy()

    return ReducedHamiltonianModel(
        order=2, algebra=algebra, chirality=model.chirality,
        eval_h=ev, d_xi=d_xi, d_pi=d_pi, d_pi0=d_pi0, kind="spline2",
    )


# -- generic quadratic third-order model (k = 3) -------------------------------


def quadratic_k3(algebra: LieAlgebraDef, I: Inertia, chirality: Chirality) -> ReducedLagrangianModel:
    """l(xi, xi_dot, xi_ddot) = <I xi_ddot, xi_ddot>/2, for exercising the
    third-order equations."""
    _check_inertia_dim(algebra, I)
    M, Minv = I.matrix, I.inverse

    def ev(jets):
        x2 = np.asarray(jets, dtype=float)[..., 2, :]
        return 0.5 * np.einsum("...i,ij,...j->...", x2, M, x2)

    def gr(jet):
        jet = np.asarray(jet, dtype=float)
        out = np.zeros_like(jet)
        out[2] = M @ jet[2]
        return out

    def momenta(full_jet):
        full_jet = np.asarray(full_jet, dtype=float)
        pi2 = M @ full_jet[2]
        pi1 = -(M @ full_jet[3])
        pi0 = M @ full_jet[4]
        return np.stack([pi0, pi1, pi2])

    def accel(jet, m, extra):
        # pi_(1) = -I xi_dddot
        return -(Minv @ np.asarray(extra, dtype=float)[0])

    model = ReducedLagrangianModel(
        order=3, algebra=algebra, chirality=chirality, inertia=I,
        eval=ev, grads=gr, accel=accel, momenta=momenta, kind="quadratic_k3",
    )
    object.__setattr__(model, "hessian_ok", _check_hessian(3, algebra.dim, gr))
    return model


def quadratic_k3_hamiltonian(algebra, I: Inertia, chirality) -> ReducedHamiltonianModel:
    """h = <pi_(0), xi> + <pi_(1), xi_dot> + ||pi_(2)||^2 / 2."""
    _check_inertia_dim(algebra, I)
    Minv = I.inverse

    def ev(xi_jet, pis, pi0):
        return float(pi0 @ xi_jet[0]) + float(pis[0] @ xi_jet[1]) + 0.5 * float(
            pis[1] @ Minv @ pis[1]
        )

    def d_xi(xi_jet, pis, pi0):
        return np.stack([pi0, pis[0]])

    def d_pi(xi_jet, pis, pi0):
        return np.stack([xi_jet[1], Minv @ pis[1]])

    def d_pi0(xi_jet, pis, pi0):
        return xi_jet[0].copy()

    return ReducedHamiltonianModel(
        order=3, algebra=algebra, chirality=chirality,
        eval_h=ev, d_xi=d_xi, d_pi=d_pi, d_pi0=d_pi0, kind="quadratic_k3",
    )


def hamiltonian_counterpart(model: ReducedLagrangianModel) -> ReducedHamiltonianModel:
    """The built-in Hamiltonian matching a built-in Lagrangian model."""
    if model.kind == "rigid_body":
        return rigid_body_hamiltonian(model.algebra, model.inertia, model.chirality)
    if model.kind == "spline2":
        return spline2_hamiltonian(model)
    if model.kind == "quadratic_k3":
        return quadratic_k3_hamiltonian(model.algebra, model.inertia, model.chirality)
    raise ValueError(f"no built-in Hamiltonian for model kind {model.kind!r}")


def _check_inertia_dim(algebra, I):
    if I.dim != algebra.dim:
        raise DimensionError(
            f"inertia dimension {I.dim} does not match algebra dimension {algebra.dim}"
        )
