import json

import numpy as np
import pytest

from liemech import (
    Chirality,
    CutLocusError,
    DimensionError,
    GroupElement,
    Inertia,
    algebra_from_json,
    pair,
    rn,
    se3,
    so2,
    so3,
)

RNG = np.random.default_rng(42)


def test_so3_structure_constants():
    a = so3()
    c = a.structure_constants
    assert np.array_equal(c, -np.swapaxes(c, 1, 2))
    np.testing.assert_allclose(a.bracket([1, 0, 0], [0, 1, 0]), [0, 0, 1])
    np.testing.assert_allclose(a.bracket([0, 1, 0], [0, 0, 1]), [1, 0, 0])


def test_bracket_of_vector_with_itself_vanishes():
    for a in (so3(), se3()):
        x = RNG.standard_normal(a.dim)
        np.testing.assert_allclose(a.bracket(x, x), 0.0, atol=1e-14)


def test_se3_bracket_matches_matrix_commutator():
    a = se3()
    x = RNG.standard_normal(6)
    y = RNG.standard_normal(6)
    comm = a.matrix(x) @ a.matrix(y) - a.matrix(y) @ a.matrix(x)
    np.testing.assert_allclose(a.matrix(a.bracket(x, y)), comm, atol=1e-12)
    # the spec example pair: rotations about x and y axes
    z = a.bracket([1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0])
    np.testing.assert_allclose(z, [0, 0, 1, 0, 0, 0], atol=1e-14)


def test_ad_star_defining_contract():
    for a in (so3(), se3(), rn(4)):
        for _ in range(100):
            x, y = RNG.standard_normal((2, a.dim))
            mu = RNG.standard_normal(a.dim)
            lhs = pair(a.ad_star(x, mu), y)
            rhs = pair(mu, a.bracket(x, y))
            assert abs(lhs - rhs) < 1e-12


def test_ad_star_so3_is_cross_product():
    a = so3()
    np.testing.assert_allclose(a.ad_star([1, 0, 0], [0, 1, 0]), [0, 0, -1], atol=1e-15)
    x, mu = RNG.standard_normal((2, 3))
    np.testing.assert_allclose(a.ad_star(x, mu), np.cross(mu, x), atol=1e-13)


def test_ad_star_linearity_zero():
    a = se3()
    x = RNG.standard_normal(6)
    np.testing.assert_allclose(a.ad_star(x, np.zeros(6)), 0.0)


def test_abelian_bracket_and_ad_star_vanish():
    a = rn(3)
    x, mu = RNG.standard_normal((2, 3))
    assert not np.any(a.bracket(x, mu))
    assert not np.any(a.ad_star(x, mu))
    assert a.is_abelian


def test_adjoint_identity_and_own_generator():
    a = so3()
    x = RNG.standard_normal(3)
    np.testing.assert_allclose(a.adjoint(a.identity(), x), x, atol=1e-14)
    g = a.exp(0.7 * x)
    np.testing.assert_allclose(a.adjoint(g, x), x, atol=1e-12)


def test_coadjoint_pairing_contract():
    for a in (so3(), se3()):
        for _ in range(20):
            g = a.exp(0.5 * RNG.standard_normal(a.dim))
            x = RNG.standard_normal(a.dim)
            mu = RNG.standard_normal(a.dim)
            assert abs(pair(a.coadjoint(g, mu), x) - pair(mu, a.adjoint(g, x))) < 1e-12


def test_Ad_is_bracket_homomorphism():
    for a in (so3(), se3()):
        g = a.exp(0.4 * RNG.standard_normal(a.dim))
        x, y = RNG.standard_normal((2, a.dim))
        lhs = a.adjoint(g, a.bracket(x, y))
        rhs = a.bracket(a.adjoint(g, x), a.adjoint(g, y))
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_exp_zero_is_identity():
    for a in (so3(), se3(), rn(2), so2()):
        np.testing.assert_allclose(a.exp(np.zeros(a.dim)).matrix, np.eye(a.group_dim))


def test_so3_exp_quarter_turn():
    a = so3()
    R = a.exp([0.0, 0.0, np.pi / 2]).matrix
    np.testing.assert_allclose(R, [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-15)


def test_exp_log_roundtrip_within_unit_ball():
    for a in (so3(), se3(), rn(3), so2()):
        for _ in range(50):
            x = RNG.standard_normal(a.dim)
            n = np.linalg.norm(x)
            if n > 1.0:
                x /= n
            np.testing.assert_allclose(a.log(a.exp(x)), x, atol=1e-10)


def test_log_near_cut_locus_raises():
    a = so3()
    g = a.exp([0.0, 0.0, np.pi - 1e-8])
    with pytest.raises(CutLocusError):
        a.log(g)
    b = so2()
    with pytest.raises(CutLocusError):
        b.log(b.exp([np.pi - 1e-9]))


def test_group_element_validation():
    a = so3()
    with pytest.raises(ValueError):
        GroupElement(np.eye(3) * 1.5, a)
    with pytest.raises(DimensionError):
        GroupElement(np.eye(4), a)


def test_dimension_mismatch_is_input_error():
    a = so3()
    with pytest.raises(DimensionError):
        a.bracket([1.0, 0.0], [0.0, 1.0, 0.0])
    with pytest.raises(DimensionError):
        a.ad_star([1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0])


def test_inertia_flat_sharp():
    I = Inertia.diagonal([1.0, 2.0, 3.0])
    np.testing.assert_allclose(I.flat([1.0, 1.0, 1.0]), [1.0, 2.0, 3.0])
    x = RNG.standard_normal(3)
    np.testing.assert_allclose(I.sharp(I.flat(x)), x, atol=1e-12)
    Iid = Inertia(np.eye(3))
    np.testing.assert_allclose(Iid.flat(x), x)


def test_inertia_rejects_bad_matrices():
    with pytest.raises(ValueError):
        Inertia(np.array([[1.0, 0.5], [0.4, 1.0]]))  # not symmetric
    with pytest.raises(ValueError):
        Inertia(np.diag([1.0, -2.0]))  # not positive definite
    with pytest.raises(ValueError):
        Inertia(np.diag([1.0, 1e13]))  # too ill-conditioned


def test_chirality_signs():
    assert Chirality.RIGHT.sign == 1.0
    assert Chirality.LEFT.sign == -1.0


def test_algebra_from_json_roundtrip(tmp_path):
    a = so3()
    payload = {
        "name": "so3_json",
        "dim": 3,
        "group_dim": 3,
        "structure_constants": a.structure_constants.reshape(-1).tolist(),
        "basis_matrices": a.basis_matrices.reshape(3, -1).tolist(),
    }
    path = tmp_path / "alg.json"
    path.write_text(json.dumps(payload))
    b = algebra_from_json(str(path))
    x, y = RNG.standard_normal((2, 3))
    np.testing.assert_allclose(b.bracket(x, y), a.bracket(x, y))
    c = algebra_from_json(payload)
    np.testing.assert_allclose(c.basis_matrices, a.basis_matrices)


def test_jacobi_violation_rejected():
    # [e0,e1] = e1, [e0,e2] = e2, [e1,e2] = e0 violates Jacobi
    c = np.zeros((3, 3, 3))
    c[1, 0, 1], c[1, 1, 0] = 1.0, -1.0
    c[2, 0, 2], c[2, 2, 0] = 1.0, -1.0
    c[0, 1, 2], c[0, 2, 1] = 1.0, -1.0
    with pytest.raises(ValueError):
        from liemech.algebra import LieAlgebraDef

        LieAlgebraDef("bad", c, np.zeros((3, 3, 3)))


def test_projection_restores_orthogonality():
    a = so3()
    R = a.exp(RNG.standard_normal(3)).matrix + 1e-7 * RNG.standard_normal((3, 3))
    P = a.project(R)
    assert a.group_defect(P) < 1e-14
