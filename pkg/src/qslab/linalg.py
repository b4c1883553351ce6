"""Dense complex linear algebra primitives with fixed conventions.

All matrices are numpy complex arrays (C memory order; the storage order is
irrelevant to the math, only the vectorization convention below matters).
Vectorization is column stacking throughout: ``vec(rho)`` stacks the columns
of ``rho`` top to bottom, so the identity

    vec(A B C) = kron(C^T, A) @ vec(B)

holds exactly.  Every superoperator matrix built anywhere in this package
uses this convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative tolerance for Hermiticity checks at input boundaries.
HERMITICITY_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when matrix or vector dimensions are inconsistent."""


def as_complex_matrix(m) -> np.ndarray:
    """Validate and convert input to a 2-d complex array with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


@dataclass(frozen=True)
class Spectrum:
    """Hermitian eigendecomposition: ascending eigenvalues, unitary columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def spread(self) -> float:
        """Difference between the largest and smallest eigenvalue."""
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def vec(a) -> np.ndarray:
    """Column-stack a matrix into a 1-d vector (Fortran order)."""
    return as_complex_matrix(a).reshape(-1, order="F")


def unvec(v, d: int) -> np.ndarray:
    """Inverse of :func:`vec` for a d x d matrix."""
    w = np.asarray(v, dtype=complex).reshape(-1)
    if w.size != d * d:
        raise DimensionError(f"expected length {d * d}, got {w.size}")
    return w.reshape((d, d), order="F")


def require_hermitian(h, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Check Hermiticity up to ``tol`` (relative) and return the symmetrized matrix."""
    a = as_complex_matrix(h)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    dev = float(np.abs(a - a.conj().T).max())
    if dev > tol * scale:
        raise ValueError(f"matrix is not Hermitian: deviation {dev:.3e} exceeds {tol:.1e}*{scale:.3e}")
    return 0.5 * (a + a.conj().T)


def hermitian_eig(h) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix (symmetrized internally)."""
    a = require_hermitian(h)
    evals, evecs = np.linalg.eigh(a)
    return Spectrum(eigenvalues=evals, eigenvectors=evecs)


def largest_singular_value(m) -> float:
    """Largest singular value, i.e. the spectral (2,2) operator norm."""
    a = as_complex_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False)[0])


# Scaling-and-squaring matrix exponential with diagonal Pade approximants
# (orders 3/5/7/9/13 selected by the 1-norm, 13 with squaring above the last
# threshold).  Truncation targets ~1e-13 relative per Pade evaluation; the
# accuracy contract tested downstream is 1e-10 relative for ||M||_2 <= 50.
_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
         33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0),
}
_PADE_THETA = ((3, 0.01495585217958292), (5, 0.2539398330063230),
               (7, 0.9504178996162932), (9, 2.097847961257068),
               (13, 5.371920351148152))


def _pade_low(a: np.ndarray, order: int) -> np.ndarray:
    b = _PADE_COEFFS[order]
    n = a.shape[0]
    ident = np.eye(n, dtype=complex)
    a2 = a @ a
    pows = {0: ident, 2: a2}
    for k in range(4, order, 2):
        pows[k] = pows[k - 2] @ a2
    u = b[1] * ident
    v = b[0] * ident
    for k in range(2, order + 1, 2):
        u = u + b[k + 1] * pows[k]
        v = v + b[k] * pows[k]
    u = a @ u
    return np.linalg.solve(v - u, v + u)


def _pade_13(a: np.ndarray) -> np.ndarray:
    b = _PADE_COEFFS[13]
    n = a.shape[0]
    ident = np.eye(n, dtype=complex)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    return np.linalg.solve(v - u, v + u)


def matrix_exp(m) -> np.ndarray:
    """Matrix exponential e^M by scaling and squaring with Pade approximants."""
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    norm1 = float(np.linalg.norm(a, 1))
    if norm1 == 0.0:
        return np.eye(a.shape[0], dtype=complex)
    for order, theta in _PADE_THETA[:-1]:
        if norm1 <= theta:
            return _pade_low(a, order)
    theta13 = _PADE_THETA[-1][1]
    s = 0
    if norm1 > theta13:
        s = int(np.ceil(np.log2(norm1 / theta13)))
        a = a / 2.0**s
    f = _pade_13(a)
    for _ in range(s):
        f = f @ f
    return f
