"""Fixed-step integration, finite-difference Jacobians, and the two-point
shooting solver for spline boundary-value problems."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Chirality, GroupElement
from .errors import CutLocusError, DivergenceError, NonconvergenceError

SCHEMES = ("rk4", "cf4")


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    scheme: str = "rk4"
    reprojection_interval: int = 100

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")


def n_steps(T: float, dt: float) -> int:
    if T <= 0:
        raise ValueError("horizon T must be positive")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"T={T} is not an integer multiple of dt={dt}")
    return n


def integrate(f, y0, T, config: IntegratorConfig = IntegratorConfig()):
    """Classical RK4 on a flat state vector. Returns (ts, ys) with
    ys[i] the state at t = i*dt. Raises DivergenceError on non-finite states.
    """
    if config.scheme != "rk4":
        raise ValueError("integrate() supports the rk4 scheme; cf4 is reconstruction-only")
    y = np.asarray(y0, dtype=float).copy()
    dt = config.dt
    n = n_steps(T, dt)
    ys = np.empty((n + 1, y.size))
    ys[0] = y
    for i in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise DivergenceError((i + 1) * dt)
        ys[i + 1] = y
    return np.arange(n + 1) * dt, ys


def fd_jacobian(fun, x, eps: float = 1e-6):
    """Centered-difference Jacobian; steps scaled by coordinate magnitude."""
    x = np.asarray(x, dtype=float)
    f0 = np.atleast_1d(np.asarray(fun(x), dtype=float))
    if not np.all(np.isfinite(f0)):
        raise ValueError("non-finite map value in fd_jacobian")
    J = np.empty((f0.size, x.size))
    for i in range(x.size):
        h = eps * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        fp = np.atleast_1d(np.asarray(fun(xp), dtype=float))
        fm = np.atleast_1d(np.asarray(fun(xm), dtype=float))
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise ValueError("non-finite map value in fd_jacobian")
        J[:, i] = (fp - fm) / (2 * h)
    return J


@dataclass(frozen=True)
class ShootingProblem:
    """Two-point boundary data for a 2-spline on a Lie group.

    Boundary velocities v0, v1 are algebra coordinates in the model's
    chirality convention (body or spatial per Chirality).
    """

    model: object
    g0: GroupElement
    g1: GroupElement
    v0: np.ndarray
    v1: np.ndarray
    T: float
    tol: float = 1e-8
    max_iter: int = 50
    config: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("horizon T must be positive")
        object.__setattr__(self, "v0", np.asarray(self.v0, dtype=float))
        object.__setattr__(self, "v1", np.asarray(self.v1, dtype=float))


def cubic_seed(delta, v0, v1, T):
    """Euclidean-cubic initial jet (xi_dot(0), xi_ddot(0)) for displacement
    `delta` = log of the relative pose; exact for abelian groups."""
    delta = np.asarray(delta, dtype=float)
    xid0 = 6.0 * delta / T**2 - (4.0 * v0 + 2.0 * v1) / T
    xidd0 = -12.0 * delta / T**3 + 6.0 * (v0 + v1) / T**2
    return xid0, xidd0


def shoot_spline(problem: ShootingProblem):
    """Damped-Newton shooting for the spline boundary-value problem.

    Unknowns are (xi_dot(0), xi_ddot(0)); the residual stacks the endpoint
    pose error (via the group logarithm) and the endpoint velocity error.
    Returns (jet0 (3, d), trajectory, info dict).
    """
    from . import euler_poincare as ep  # local import to avoid a module cycle

    model = problem.model
    if model.order != 2:
        raise ValueError("shoot_spline expects a k=2 spline model")
    algebra, chir = model.algebra, model.chirality
    d = algebra.dim
    g0m, g1m = problem.g0.matrix, problem.g1.matrix
    right = chir is Chirality.RIGHT

    def _relative_pose(ga, gb):
        # log of the pose error, in the frame matching the chirality
        M = gb @ np.linalg.inv(ga) if right else np.linalg.inv(ga) @ gb
        return algebra.log(GroupElement(algebra.project(M), algebra))

    last_traj = {}

    def residual(u):
        jet_full = np.stack([problem.v0, u[:d], u[d:]])
        state0 = ep.ep_state_from_jet(model, jet_full, g0=problem.g0)
        traj = ep.integrate_ep(model, state0, problem.T, problem.config)
        last_traj["traj"] = traj
        gT = traj.gs[-1]
        pose_err = _relative_pose(gT, g1m)
        vel_err = traj.jets[-1, 0] - problem.v1
        return np.concatenate([pose_err, vel_err])

    try:
        delta = _relative_pose(g0m, g1m)
    except CutLocusError as exc:
        raise CutLocusError(f"{exc}; re-seed with an intermediate pose") from exc
    xid0, xidd0 = cubic_seed(delta, problem.v0, problem.v1, problem.T)
    u = np.concatenate([xid0, xidd0])

    r = residual(u)
    rnorm = np.linalg.norm(r)
    iterations = 0
    residual_history = [rnorm]
    while rnorm >= problem.tol:
        if iterations >= problem.max_iter:
            raise NonconvergenceError(rnorm, iterations)
        J = fd_jacobian(residual, u)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        alpha = 1.0
        while True:
            try:
                r_new = residual(u + alpha * step)
            except CutLocusError:
                r_new = None
            if r_new is not None:
                rnorm_new = np.linalg.norm(r_new)
                if rnorm_new < (1.0 - 1e-4 * alpha) * rnorm:
                    break
            alpha *= 0.5
            if alpha < 1e-8:
                raise NonconvergenceError(
                    rnorm, iterations, "Armijo backtracking stalled in shoot_spline"
                )
        assert rnorm_new < rnorm, "residual must decrease monotonically"
        u = u + alpha * step
        r, rnorm = r_new, rnorm_new
        residual_history.append(rnorm)
        iterations += 1

    jet0 = np.stack([problem.v0, u[:d], u[d:]])
    info = {
        "iterations": iterations,
        "residual": rnorm,
        "residual_history": residual_history,
    }
    return jet0, last_traj["traj"], info
