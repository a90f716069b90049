import numpy as np
import scipy.linalg

from liemech import _kernels
from liemech._kernels import _numpy_core as ref

RNG = np.random.default_rng(0)


def _rand_sc(d=3):
    # antisymmetrized random structure-like tensor (no Jacobi needed here)
    c = RNG.standard_normal((d, d, d))
    return np.ascontiguousarray(c - np.swapaxes(c, 1, 2))


def test_backend_matches_fallback_contractions():
    c = _rand_sc(5)
    x, y = RNG.standard_normal((2, 5))
    mu = RNG.standard_normal(5)
    np.testing.assert_allclose(_kernels.sc_bracket(c, x, y), ref.sc_bracket(c, x, y), atol=1e-13)
    np.testing.assert_allclose(_kernels.sc_ad(c, x), ref.sc_ad(c, x), atol=1e-13)
    np.testing.assert_allclose(_kernels.sc_ad_star(c, x, mu), ref.sc_ad_star(c, x, mu), atol=1e-13)


def test_so3_exp_matches_scipy():
    for _ in range(20):
        w = RNG.standard_normal(3)
        np.testing.assert_allclose(
            _kernels.so3_exp(w), scipy.linalg.expm(ref.so3_hat(w)), atol=1e-12
        )


def test_so3_exp_small_angle():
    w = np.array([1e-10, -2e-10, 5e-11])
    np.testing.assert_allclose(_kernels.so3_exp(w), np.eye(3) + ref.so3_hat(w), atol=1e-15)


def test_so3_log_roundtrip_and_batch_consistency():
    W = RNG.standard_normal((40, 3))
    norms = np.linalg.norm(W, axis=1, keepdims=True)
    W = W / np.maximum(norms, 1.0) * np.minimum(norms, 2.5)
    Rs = _kernels.so3_exp_batch(np.ascontiguousarray(W))
    back = _kernels.so3_log_batch(Rs)
    np.testing.assert_allclose(back, W, atol=1e-10)
    for i in range(5):
        np.testing.assert_allclose(_kernels.so3_exp(W[i]), Rs[i], atol=1e-14)
        np.testing.assert_allclose(_kernels.so3_log(Rs[i]), back[i], atol=1e-14)


def test_batch_matches_fallback():
    W = np.ascontiguousarray(0.8 * RNG.standard_normal((25, 3)))
    np.testing.assert_allclose(_kernels.so3_exp_batch(W), ref.so3_exp_batch(W), atol=1e-14)
    Rs = ref.so3_exp_batch(W)
    np.testing.assert_allclose(
        _kernels.so3_log_batch(np.ascontiguousarray(Rs)), ref.so3_log_batch(Rs), atol=1e-13
    )


def test_se3_exp_log_against_scipy():
    for _ in range(20):
        x = RNG.standard_normal(6)
        H = _kernels.se3_exp(x)
        Xhat = np.zeros((4, 4))
        Xhat[:3, :3] = ref.so3_hat(x[:3])
        Xhat[:3, 3] = x[3:]
        np.testing.assert_allclose(H, scipy.linalg.expm(Xhat), atol=1e-12)
        np.testing.assert_allclose(_kernels.se3_log(H), x, atol=1e-10)
