"""Lie group/algebra kernel.

Structure-constant algebras with faithful matrix representations: brackets,
(co)adjoint actions, exponential/logarithm, and the metric flat/sharp pair.
Built-in factories cover so(3), se(3), abelian R^n and so(2); anything else
can be supplied as structure constants plus basis matrices (or loaded from
JSON).

Vectors are plain float64 numpy arrays: algebra elements in the chosen basis,
momenta in the dual basis. The pairing is the coordinate dot product; all
metric structure lives in `Inertia`.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import CutLocusError, DimensionError

_JACOBI_TOL = 1e-12
_BRACKET_CONSISTENCY_TOL = 1e-12
_GROUP_TOL = 1e-9
_CUT_LOCUS_MARGIN = 1e-6


class Chirality(enum.Enum):
    """Left/right invariance convention.

    Selects every coupled sign at once: RIGHT takes the upper sign of each
    +/- (and xi = g_dot g^-1), LEFT the lower sign (and xi = g^-1 g_dot).
    No formula elsewhere hard-codes a sign.
    """

    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self) -> float:
        """Value of the upper/lower +/- selector: +1 for RIGHT, -1 for LEFT."""
        return 1.0 if self is Chirality.RIGHT else -1.0


def _as_vec(x, dim, what="vector"):
    v = np.asarray(x, dtype=float)
    if v.shape != (dim,):
        raise DimensionError(f"{what} has shape {v.shape}, expected ({dim},)")
    return v


@dataclass(frozen=True)
class LieAlgebraDef:
    """A Lie algebra given by structure constants and a matrix realization.

    c[k, i, j] is the coefficient of e_k in [e_i, e_j]; basis_matrices[i] is
    the representation of e_i as an (n, n) matrix.
    """

    name: str
    structure_constants: np.ndarray
    basis_matrices: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.structure_constants, dtype=float))
        B = np.ascontiguousarray(np.asarray(self.basis_matrices, dtype=float))
        d = c.shape[0]
        if c.shape != (d, d, d):
            raise DimensionError(f"structure constants must be (d,d,d), got {c.shape}")
        if B.ndim != 3 or B.shape[0] != d or B.shape[1] != B.shape[2]:
            raise DimensionError(f"basis matrices must be (d,n,n), got {B.shape}")
        object.__setattr__(self, "structure_constants", c)
        object.__setattr__(self, "basis_matrices", B)
        if not np.array_equal(c, -np.swapaxes(c, 1, 2)):
            raise ValueError(f"{self.name}: structure constants not antisymmetric")
        jac = np.abs(_jacobi_residual(c)).max() if d else 0.0
        if jac > _JACOBI_TOL:
            raise ValueError(f"{self.name}: Jacobi identity violated ({jac:.3e})")
        cons = self._bracket_consistency()
        if cons > _BRACKET_CONSISTENCY_TOL:
            raise ValueError(f"{self.name}: bracket/commutator mismatch ({cons:.3e})")
        # pseudo-inverse of e -> matrix, for pulling matrices back to coords
        n = B.shape[1]
        object.__setattr__(
            self, "_basis_pinv", np.linalg.pinv(B.reshape(d, n * n).T) if d else None
        )

    def _bracket_consistency(self):
        B, c = self.basis_matrices, self.structure_constants
        if self.dim == 0:
            return 0.0
        comm = np.einsum("iab,jbc->ijac", B, B) - np.einsum("jab,ibc->ijac", B, B)
        rhs = np.einsum("kij,kab->ijab", c, B)
        return float(np.abs(comm - rhs).max())

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    @property
    def group_dim(self) -> int:
        return self.basis_matrices.shape[1]

    @property
    def is_abelian(self) -> bool:
        return self.dim == 0 or not np.any(self.structure_constants)

    # -- core operations ---------------------------------------------------

    def bracket(self, x, y) -> np.ndarray:
        """[x, y] in coordinates: z^k = c^k_ij x^i y^j."""
        x = _as_vec(x, self.dim, "x")
        y = _as_vec(y, self.dim, "y")
        if self.dim == 0:
            return np.zeros(0)
        return _kernels.sc_bracket(self.structure_constants, x, y)

    def ad(self, x) -> np.ndarray:
        """Matrix of ad_x = [x, .]."""
        x = _as_vec(x, self.dim, "x")
        if self.dim == 0:
            return np.zeros((0, 0))
        return _kernels.sc_ad(self.structure_constants, x)

    def ad_star(self, x, mu) -> np.ndarray:
        """ad*_x mu, defined by <ad*_x mu, y> = <mu, [x, y]> for all y."""
        x = _as_vec(x, self.dim, "x")
        mu = _as_vec(mu, self.dim, "mu")
        if self.dim == 0:
            return np.zeros(0)
        return _kernels.sc_ad_star(self.structure_constants, x, mu)

    def matrix(self, x) -> np.ndarray:
        """Representation of x as a group_dim x group_dim matrix."""
        x = _as_vec(x, self.dim, "x")
        return np.einsum("i,iab->ab", x, self.basis_matrices) if self.dim else np.zeros(
            (self.group_dim, self.group_dim)
        )

    def coords(self, X, tol=1e-8) -> np.ndarray:
        """Pull an algebra matrix back to coordinates (least squares + check)."""
        X = np.asarray(X, dtype=float)
        if self.dim == 0:
            return np.zeros(0)
        x = self._basis_pinv @ X.reshape(-1)
        if np.abs(self.matrix(x) - X).max() > tol * max(1.0, np.abs(X).max()):
            raise ValueError("matrix does not lie in the span of the basis")
        return x

    # -- exponential / logarithm -------------------------------------------

    def exp(self, x) -> "GroupElement":
        x = _as_vec(x, self.dim, "x")
        if self.name == "so3":
            M = _kernels.so3_exp(x)
        elif self.name == "se3":
            M = _kernels.se3_exp(x)
        elif self.name.startswith("rn"):
            M = np.eye(self.group_dim)
            M[:-1, -1] = x
        elif self.name == "so2":
            ca, sa = np.cos(x[0]), np.sin(x[0])
            M = np.array([[ca, -sa], [sa, ca]])
        else:
            M = scipy.linalg.expm(self.matrix(x))
        return GroupElement(M, self)

    def log(self, g: "GroupElement") -> np.ndarray:
        M = g.matrix if isinstance(g, GroupElement) else np.asarray(g, dtype=float)
        try:
            if self.name == "so3":
                return _kernels.so3_log(M)
            if self.name == "se3":
                return _kernels.se3_log(M)
        except ValueError as exc:
            raise CutLocusError(str(exc)) from exc
        if self.name.startswith("rn"):
            return M[:-1, -1].copy()
        if self.name == "so2":
            a = np.arctan2(M[1, 0], M[0, 0])
            if abs(a) >= np.pi - _CUT_LOCUS_MARGIN:
                raise CutLocusError("cut locus: rotation angle too close to pi")
            return np.array([a])
        X = scipy.linalg.logm(M)
        if np.abs(X.imag).max() > 1e-9:
            raise CutLocusError("matrix logarithm left the real algebra")
        return self.coords(X.real)

    # -- group-level helpers -------------------------------------------------

    def identity(self) -> "GroupElement":
        return GroupElement(np.eye(self.group_dim), self)

    def Ad_matrix(self, g) -> np.ndarray:
        """Matrix of Ad_g on coordinates: conjugation pulled back to the basis."""
        M = g.matrix if isinstance(g, GroupElement) else np.asarray(g, dtype=float)
        if self.dim == 0:
            return np.zeros((0, 0))
        Minv = np.linalg.inv(M)
        conj = np.einsum("ab,ibc,cd->iad", M, self.basis_matrices, Minv)
        # column i = coordinates of Ad_g e_i
        return (self._basis_pinv @ conj.reshape(self.dim, -1).T)

    def adjoint(self, g, x) -> np.ndarray:
        """Ad_g x."""
        return self.Ad_matrix(g) @ _as_vec(x, self.dim, "x")

    def coadjoint(self, g, mu) -> np.ndarray:
        """Ad*_g mu, defined by <Ad*_g mu, x> = <mu, Ad_g x>."""
        return self.Ad_matrix(g).T @ _as_vec(mu, self.dim, "mu")

    def project(self, M) -> np.ndarray:
        """Re-project a drifted matrix onto the group (polar decomposition of
        the rotation block for so3/se3/so2; identity elsewhere)."""
        M = np.asarray(M, dtype=float)
        if self.name in ("so3", "so2"):
            return _polar_rotation(M)
        if self.name == "se3":
            out = M.copy()
            out[:3, :3] = _polar_rotation(M[:3, :3])
            out[3, :3] = 0.0
            out[3, 3] = 1.0
            return out
        if self.name.startswith("rn"):
            out = np.eye(self.group_dim)
            out[:-1, -1] = M[:-1, -1]
            return out
        return M

    def group_defect(self, M) -> float:
        """Distance-to-group monitor (0 where no membership test exists)."""
        M = np.asarray(M, dtype=float)
        if self.name in ("so3", "so2"):
            return float(np.abs(M.T @ M - np.eye(M.shape[0])).max())
        if self.name == "se3":
            R = M[:3, :3]
            return float(
                max(
                    np.abs(R.T @ R - np.eye(3)).max(),
                    np.abs(M[3] - np.array([0, 0, 0, 1])).max(),
                )
            )
        return 0.0


def _polar_rotation(M):
    U, _, Vt = np.linalg.svd(M)
    R = U @ Vt
    if np.linalg.det(R) < 0:
        U[:, -1] *= -1
        R = U @ Vt
    return R


def _jacobi_residual(c):
    # sum over m of c^m_ij c^l_mk + cyclic permutations of (i, j, k)
    t = np.einsum("mij,lmk->lijk", c, c)
    return t + np.einsum("lijk->ljki", t) + np.einsum("lijk->lkij", t)


@dataclass(frozen=True)
class GroupElement:
    """Matrix representative of a group element, tied to its algebra."""

    matrix: np.ndarray
    algebra: LieAlgebraDef

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        n = self.algebra.group_dim
        if M.shape != (n, n):
            raise DimensionError(f"group matrix has shape {M.shape}, expected ({n},{n})")
        object.__setattr__(self, "matrix", M)
        defect = self.algebra.group_defect(M)
        if defect > _GROUP_TOL:
            raise ValueError(f"matrix is not in the group (defect {defect:.3e})")
        if self.algebra.name in ("so3", "so2") and np.linalg.det(M) <= 0:
            raise ValueError("rotation block has non-positive determinant")

    def inverse(self) -> "GroupElement":
        return GroupElement(np.linalg.inv(self.matrix), self.algebra)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ other.matrix, self.algebra)


@dataclass(frozen=True)
class Inertia:
    """SPD matrix defining the inner product gamma(x, y) = x^T M y on the
    algebra; provides the flat/sharp isomorphisms."""

    matrix: np.ndarray
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionError("inertia must be a square matrix")
        if M.size and np.abs(M - M.T).max() > 1e-12:
            raise ValueError("inertia must be symmetric (within 1e-12)")
        if M.size:
            w = np.linalg.eigvalsh(M)
            if w.min() <= 0:
                raise ValueError("inertia must be positive definite")
            if w.max() / w.min() > 1e12:
                raise ValueError(f"inertia too ill-conditioned ({w.max() / w.min():.2e})")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "inverse", np.linalg.inv(M) if M.size else M.copy())

    @classmethod
    def diagonal(cls, entries) -> "Inertia":
        return cls(np.diag(np.asarray(entries, dtype=float)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def flat(self, x) -> np.ndarray:
        """x^flat = gamma(x, .) as dual coordinates."""
        return self.matrix @ _as_vec(x, self.dim, "x")

    def sharp(self, mu) -> np.ndarray:
        """Inverse of flat."""
        return self.inverse @ _as_vec(mu, self.dim, "mu")

    def norm2(self, x) -> float:
        """Squared gamma-norm of an algebra vector."""
        x = _as_vec(x, self.dim, "x")
        return float(x @ self.matrix @ x)

    def dual_norm2(self, mu) -> float:
        """Squared dual norm, ||mu||^2 = <mu, sharp(mu)> (so ||flat(x)|| = ||x||)."""
        mu = _as_vec(mu, self.dim, "mu")
        return float(mu @ self.inverse @ mu)

    def is_ad_invariant(self, algebra: LieAlgebraDef, tol=1e-10) -> bool:
        """Check <M[x,y],z> + <My,[x,z]> = 0 over all basis triples."""
        c, M = algebra.structure_constants, self.matrix
        if algebra.dim == 0:
            return True
        lhs = np.einsum("kij,kl->ijl", c, M) + np.einsum("kil,jk->ijl", c, M)
        return bool(np.abs(lhs).max() <= tol)


def pair(mu, x) -> float:
    """Duality pairing: coordinate dot product."""
    mu = np.asarray(mu, dtype=float)
    x = np.asarray(x, dtype=float)
    if mu.shape != x.shape:
        raise DimensionError(f"pairing shapes differ: {mu.shape} vs {x.shape}")
    return float(mu @ x)


# -- built-in algebras ------------------------------------------------------


def _structure_constants_from_matrices(B):
    d = B.shape[0]
    c = np.zeros((d, d, d))
    pinv = np.linalg.pinv(B.reshape(d, -1).T)
    for i in range(d):
        for j in range(i + 1, d):
            comm = B[i] @ B[j] - B[j] @ B[i]
            coeff = pinv @ comm.reshape(-1)
            coeff[np.abs(coeff) < 1e-13] = 0.0
            c[:, i, j] = coeff
            c[:, j, i] = -coeff
    return c


def so3() -> LieAlgebraDef:
    """Rotations of R^3; basis = hat matrices of the coordinate axes."""
    B = np.stack([_kernels.so3_hat(e) for e in np.eye(3)])
    c = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                c[k, i, j] = _levi_civita(i, j, k)
    return LieAlgebraDef("so3", c, B)


def se3() -> LieAlgebraDef:
    """Rigid motions of R^3 as 4x4 homogeneous matrices; coords (w | v)."""
    B = np.zeros((6, 4, 4))
    for i, e in enumerate(np.eye(3)):
        B[i, :3, :3] = _kernels.so3_hat(e)
        B[3 + i, :3, 3] = e
    return LieAlgebraDef("se3", _structure_constants_from_matrices(B), B)


def rn(n: int) -> LieAlgebraDef:
    """Abelian R^n realized as (n+1)x(n+1) translation matrices."""
    B = np.zeros((n, n + 1, n + 1))
    for i in range(n):
        B[i, i, n] = 1.0
    return LieAlgebraDef(f"rn{n}", np.zeros((n, n, n)), B)


def so2() -> LieAlgebraDef:
    B = np.array([[[0.0, -1.0], [1.0, 0.0]]])
    return LieAlgebraDef("so2", np.zeros((1, 1, 1)), B)


def trivial() -> LieAlgebraDef:
    """The zero-dimensional algebra of the trivial group {e}."""
    return LieAlgebraDef("trivial", np.zeros((0, 0, 0)), np.zeros((0, 1, 1)))


def _levi_civita(i, j, k):
    if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        return 1.0
    if (i, j, k) in ((0, 2, 1), (2, 1, 0), (1, 0, 2)):
        return -1.0
    return 0.0


_BUILTINS = {"so3": so3, "se3": se3, "so2": so2, "trivial": trivial}


def get_algebra(name: str, dim: int | None = None) -> LieAlgebraDef:
    """Look up a built-in algebra by name ('so3', 'se3', 'so2', 'rn')."""
    if name == "rn":
        if dim is None:
            raise ValueError("abelian algebra 'rn' needs a dimension")
        return rn(dim)
    if name in _BUILTINS:
        return _BUILTINS[name]()
    raise ValueError(f"unknown algebra {name!r}")


def algebra_from_json(source) -> LieAlgebraDef:
    """Load an algebra description from a JSON file, string or dict.

    Expected keys: name, dim, group_dim, structure_constants (nested or flat
    row-major list of d^3 numbers), basis_matrices (d row-major n*n lists).
    """
    if isinstance(source, dict):
        data = source
    elif hasattr(source, "read"):
        data = json.load(source)
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text) as fh:
                data = json.load(fh)
    d = int(data["dim"])
    n = int(data["group_dim"])
    c = np.asarray(data["structure_constants"], dtype=float).reshape(d, d, d)
    B = np.asarray(data["basis_matrices"], dtype=float).reshape(d, n, n)
    return LieAlgebraDef(str(data["name"]), c, B)
