"""Dense projection kernels: affine-subspace projection, hyperplane
projection and signed distances.

The affine projector caches a Cholesky factorization of A A^T so repeated
projections cost one pair of triangular solves plus two mat-vecs.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import RankDeficient, ZeroNormal

TAU_ZERO = 1e-12
RCOND_MIN = 1e-14
TAU_OPP_DEFAULT = 1e-9


def tau_lin(b):
    """Residual tolerance for equality systems, scaled by the data."""
    if np.size(b) == 0:
        return 1e-9
    return 1e-9 * (1.0 + np.max(np.abs(b)))


def tau_cert(h):
    """Reconstruction / separation tolerance for certified hyperplanes."""
    return 1e-8 * (1.0 + float(np.linalg.norm(h)))


def as_matrix(A, cols=None):
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        n = cols if cols is not None else (A.shape[1] if A.ndim == 2 else 0)
        return np.zeros((0, n))
    return np.ascontiguousarray(np.atleast_2d(A))


def as_vector(v):
    return np.ascontiguousarray(np.asarray(v, dtype=np.float64).ravel())


@dataclass(frozen=True)
class AffineProjector:
    """Orthogonal projector onto {x : Ax = b} for full-row-rank A.

    Immutable after construction; safe to share between concurrent solves.
    A may have zero rows, in which case projection is the identity.
    """

    A: np.ndarray
    b: np.ndarray
    At: np.ndarray = field(repr=False)
    L: np.ndarray = field(repr=False)

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]


def build_projector(A, b):
    """Factor A A^T once and return a reusable projector.

    Raises RankDeficient when A A^T is numerically singular (Cholesky
    breakdown or reciprocal condition estimate below RCOND_MIN).
    """
    A = as_matrix(A)
    b = as_vector(b)
    m, n = A.shape
    if b.shape[0] != m:
        raise ValueError(f"b has {b.shape[0]} entries for {m} equality rows")
    if m == 0:
        empty = np.zeros((0, 0))
        return AffineProjector(A=_frozen(A), b=_frozen(b),
                               At=_frozen(np.zeros((n, 0))), L=_frozen(empty))
    if m > 0 and np.min(np.max(np.abs(A), axis=1)) == 0.0:
        raise RankDeficient("equality matrix has a zero row")
    M = A @ A.T
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient("A A^T is not positive definite") from exc
    # SVD-based reciprocal condition estimate; build-time only
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= 0.0 or sv[-1] / sv[0] < RCOND_MIN:
        raise RankDeficient(
            f"A A^T reciprocal condition {sv[-1] / sv[0]:.2e} below {RCOND_MIN:.0e}")
    At = np.ascontiguousarray(A.T)
    return AffineProjector(A=_frozen(A), b=_frozen(b), At=_frozen(At), L=_frozen(L))


def _frozen(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def project_affine(P, z):
    """Nearest point to z on {x : Ax = b}."""
    z = as_vector(z)
    if z.shape[0] != P.n:
        raise ValueError(f"point has dimension {z.shape[0]}, expected {P.n}")
    p, _ = _kernels._affine_project(P.A, P.At, P.b, P.L, z)
    return p


def project_affine_with_multipliers(P, z):
    """Projection plus the normal-equation multipliers u = (AA^T)^-1 (Az-b).

    The projection direction satisfies z - p = A^T u, so u certifies the
    separator built from a failed projection.
    """
    z = as_vector(z)
    p, u = _kernels._affine_project(P.A, P.At, P.b, P.L, z)
    return p, u


def project_hyperplane(h, delta, z):
    """Nearest point to z on the hyperplane h.x = delta."""
    h = as_vector(h)
    z = as_vector(z)
    hh = float(h @ h)
    if np.sqrt(hh) <= TAU_ZERO:
        raise ZeroNormal("hyperplane normal is (numerically) zero")
    return z - ((float(h @ z) - float(delta)) / hh) * h


def signed_distance(c, d, z):
    """(c.z - d)/|c|: negative iff z strictly satisfies c.x <= d."""
    c = as_vector(c)
    z = as_vector(z)
    nc = float(np.linalg.norm(c))
    if nc <= TAU_ZERO:
        raise ZeroNormal("constraint normal is (numerically) zero")
    return (float(c @ z) - float(d)) / nc
