"""Algebra of 3x3 symmetric traceless matrices in a fixed orthonormal basis.

Q-tensors are stored as 5 real coefficients in the basis

    B1 = (e1 e1 - e2 e2)/sqrt(2)
    B2 = (2 e3 e3 - e1 e1 - e2 e2)/sqrt(6)
    B3 = (e1 e2 + e2 e1)/sqrt(2)
    B4 = (e1 e3 + e3 e1)/sqrt(2)
    B5 = (e2 e3 + e3 e2)/sqrt(2)

which satisfies Bi:Bj = delta_ij, so the Frobenius inner product of two
tensors is the dot product of their coefficient vectors and symmetry /
tracelessness hold by construction.  All functions accept a single
coefficient vector of shape (5,) or a field of shape (5, ...) and broadcast
over the trailing axes.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "BASIS",
    "STRUCTURE",
    "from_matrix",
    "to_matrix",
    "project_traceless_symmetric",
    "frobenius_inner",
    "frobenius_norm",
    "traceless_square",
    "tr_q3",
    "random_coefficients",
    "random_rotation",
]


def _build_basis() -> np.ndarray:
    b = np.zeros((5, 3, 3))
    b[0, 0, 0], b[0, 1, 1] = 1.0, -1.0
    b[1, 0, 0], b[1, 1, 1], b[1, 2, 2] = -1.0, -1.0, 2.0
    b[2, 0, 1] = b[2, 1, 0] = 1.0
    b[3, 0, 2] = b[3, 2, 0] = 1.0
    b[4, 1, 2] = b[4, 2, 1] = 1.0
    b[0] /= np.sqrt(2.0)
    b[1] /= np.sqrt(6.0)
    b[2] /= np.sqrt(2.0)
    b[3] /= np.sqrt(2.0)
    b[4] /= np.sqrt(2.0)
    return b


#: Orthonormal basis of the traceless symmetric 3x3 matrices, shape (5, 3, 3).
BASIS = _build_basis()
BASIS.setflags(write=False)

#: Fully symmetric structure constants T[i,j,k] = tr(Bi Bj Bk), shape (5, 5, 5).
STRUCTURE = np.einsum("iab,jbc,kca->ijk", BASIS, BASIS, BASIS)
STRUCTURE[np.abs(STRUCTURE) < 1e-15] = 0.0
STRUCTURE.setflags(write=False)


def _check_finite(m: np.ndarray) -> None:
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")


def from_matrix(m: np.ndarray) -> np.ndarray:
    """Project a 3x3 matrix (or (3, 3, ...) field) onto basis coefficients.

    Because the basis spans exactly the traceless symmetric subspace, this is
    the orthogonal projection M -> (M + M^T)/2 - tr(M)/3 * I expressed in
    coefficients; it realizes the trace Lagrange multiplier exactly.
    """
    _check_finite(m)
    return np.einsum("iab,ab...->i...", BASIS, m)


def to_matrix(c: np.ndarray) -> np.ndarray:
    """Reconstruct the symmetric traceless matrix, shape (3, 3) + trailing."""
    return np.einsum("i...,iab->ab...", c, BASIS)


def project_traceless_symmetric(m: np.ndarray) -> np.ndarray:
    """Alias of `from_matrix`; named for its role as the constraint projection."""
    return from_matrix(m)


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """A:B = tr(AB) for symmetric tensors, evaluated as a coefficient dot."""
    return np.einsum("i...,i...->...", a, b)


def frobenius_norm(c: np.ndarray) -> np.ndarray:
    """|Q| pointwise."""
    return np.sqrt(frobenius_inner(c, c))


def traceless_square(c: np.ndarray) -> np.ndarray:
    """Coefficients of Q^2 - (tr Q^2 / 3) I, the constrained square."""
    return np.einsum("kij,i...,j...->k...", STRUCTURE, c, c)


def tr_q3(c: np.ndarray) -> np.ndarray:
    """tr(Q^3) = <Q^2, Q>; conjugation invariant."""
    return np.einsum("ijk,i...,j...,k...->...", STRUCTURE, c, c, c)


def random_coefficients(rng: np.random.Generator, n: int = 1, radius: float = 1.0) -> np.ndarray:
    """n random coefficient vectors, shape (5, n), norms uniform in (0, radius]."""
    c = rng.standard_normal((5, n))
    norms = np.sqrt(np.sum(c * c, axis=0))
    norms[norms == 0.0] = 1.0
    return c / norms * (radius * rng.uniform(0.0, 1.0, n))


def random_rotation(rng: np.random.Generator, proper: bool | None = None) -> np.ndarray:
    """Haar-random element of O(3) (or SO(3)/reflection when `proper` is set)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if proper is not None and (np.linalg.det(q) > 0) != proper:
        q[:, 0] = -q[:, 0]
    return q
