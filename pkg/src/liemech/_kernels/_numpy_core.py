"""Pure-numpy implementations of the hot kernels.

Same call signatures as the compiled core in ``_core.pyx``; selected at
import time when the extension is unavailable or LIEMECH_PURE_PYTHON is set.
"""

import numpy as np

_CUT_LOCUS_MARGIN = 1e-6


def sc_bracket(c, x, y):
    """z^k = c^k_ij x^i y^j for structure constants c of shape (d, d, d)."""
    return np.einsum("kij,i,j->k", c, x, y)


def sc_ad(c, x):
    """Matrix of ad_x: (ad_x)^k_j = c^k_ij x^i."""
    return np.einsum("kij,i->kj", c, x)


def sc_ad_star(c, x, mu):
    """Coadjoint action, (ad*_x mu)_j = c^k_ij x^i mu_k."""
    return np.einsum("kij,i,k->j", c, x, mu)


def so3_hat(w):
    return np.array(
        [
            [0.0, -w[2], w[1]],
            [w[2], 0.0, -w[0]],
            [-w[1], w[0], 0.0],
        ]
    )


def so3_exp(w):
    """Rodrigues formula."""
    theta = np.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    K = so3_hat(w)
    if theta < 1e-8:
        a = 1.0 - theta**2 / 6.0
        b = 0.5 - theta**2 / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta**2
    return np.eye(3) + a * K + b * (K @ K)


def so3_log(R):
    """Inverse Rodrigues; raises ValueError near the angle-pi cut locus."""
    v = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    s = np.sqrt(v @ v)  # sin(theta)
    ctheta = 0.5 * (R[0, 0] + R[1, 1] + R[2, 2] - 1.0)
    theta = np.arctan2(s, ctheta)
    if theta >= np.pi - _CUT_LOCUS_MARGIN:
        raise ValueError("cut locus: rotation angle too close to pi")
    if theta < 1e-6:
        f = 1.0 + theta**2 / 6.0
    else:
        f = theta / s
    return f * v


def so3_exp_batch(W):
    """Rodrigues on rows of W, shape (n, 3) -> (n, 3, 3)."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    theta = np.linalg.norm(W, axis=1)
    small = theta < 1e-8
    t2 = theta**2
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(small, 1.0 - t2 / 6.0, np.sin(theta) / np.where(small, 1.0, theta))
        b = np.where(small, 0.5 - t2 / 24.0, (1.0 - np.cos(theta)) / np.where(small, 1.0, t2))
    K = np.zeros((n, 3, 3))
    K[:, 0, 1] = -W[:, 2]
    K[:, 0, 2] = W[:, 1]
    K[:, 1, 0] = W[:, 2]
    K[:, 1, 2] = -W[:, 0]
    K[:, 2, 0] = -W[:, 1]
    K[:, 2, 1] = W[:, 0]
    K2 = K @ K
    return np.eye(3)[None] + a[:, None, None] * K + b[:, None, None] * K2


def so3_log_batch(R):
    """Inverse Rodrigues on a stack of rotations, shape (n, 3, 3) -> (n, 3)."""
    R = np.asarray(R, dtype=float)
    v = 0.5 * np.stack(
        [
            R[:, 2, 1] - R[:, 1, 2],
            R[:, 0, 2] - R[:, 2, 0],
            R[:, 1, 0] - R[:, 0, 1],
        ],
        axis=1,
    )
    s = np.linalg.norm(v, axis=1)
    ctheta = 0.5 * (R[:, 0, 0] + R[:, 1, 1] + R[:, 2, 2] - 1.0)
    theta = np.arctan2(s, ctheta)
    if np.any(theta >= np.pi - _CUT_LOCUS_MARGIN):
        raise ValueError("cut locus: rotation angle too close to pi")
    small = theta < 1e-6
    f = np.where(small, 1.0 + theta**2 / 6.0, theta / np.where(small, 1.0, s))
    return f[:, None] * v


def _so3_left_jacobian(w):
    theta = np.linalg.norm(w)
    K = so3_hat(w)
    if theta < 1e-6:
        return np.eye(3) + 0.5 * K + (K @ K) / 6.0
    b = (1.0 - np.cos(theta)) / theta**2
    cc = (theta - np.sin(theta)) / theta**3
    return np.eye(3) + b * K + cc * (K @ K)


def _so3_left_jacobian_inv(w):
    theta = np.linalg.norm(w)
    K = so3_hat(w)
    if theta < 1e-6:
        k = 1.0 / 12.0 + theta**2 / 720.0
    else:
        k = (1.0 - 0.5 * theta * np.sin(theta) / (1.0 - np.cos(theta))) / theta**2
    return np.eye(3) - 0.5 * K + k * (K @ K)


def se3_exp(x):
    """Twist coordinates (w | v) -> 4x4 homogeneous matrix."""
    w = np.asarray(x[:3], dtype=float)
    v = np.asarray(x[3:6], dtype=float)
    H = np.eye(4)
    H[:3, :3] = so3_exp(w)
    H[:3, 3] = _so3_left_jacobian(w) @ v
    return H


def se3_log(H):
    """4x4 homogeneous matrix -> twist coordinates (w | v)."""
    w = so3_log(np.asarray(H, dtype=float)[:3, :3])
    v = _so3_left_jacobian_inv(w) @ np.asarray(H, dtype=float)[:3, 3]
    return np.concatenate([w, v])
