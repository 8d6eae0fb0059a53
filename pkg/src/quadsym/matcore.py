"""Dense real-matrix kernels.

Everything here works on small real matrices (dimension up to ~16) laid out
in (p, q) ordering: the first N coordinates are momenta, the last N are
positions.
"""

from itertools import combinations
from math import comb

import numpy as np

from .errors import ArgumentError, SingularityError

SYMMETRY_TOL = 1e-9

# Taylor order and scaling target for the matrix exponential.
_EXPM_ORDER = 18
_EXPM_THETA = 0.5


def as_real_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-d float array or raise ArgumentError."""
    A = np.asarray(M)
    if np.iscomplexobj(A):
        if np.any(np.imag(A) != 0):
            raise ArgumentError(f"{name} must be real")
        A = np.real(A)
    A = np.array(A, dtype=float)
    if A.ndim != 2:
        raise ArgumentError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ArgumentError(f"{name} contains non-finite entries")
    return A


def _square(M, name="matrix"):
    A = as_real_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise ArgumentError(f"{name} must be square, got shape {A.shape}")
    return A


def _even_square(M, name="matrix"):
    A = _square(M, name)
    if A.shape[0] % 2:
        raise ArgumentError(f"{name} must have even dimension, got {A.shape[0]}")
    return A


def max_abs(M):
    """Max-abs-entry norm."""
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def symplectic_form(modes):
    """The canonical form J = [[0, I], [-I, 0]] for ``modes`` degrees of freedom."""
    if int(modes) != modes or modes < 1:
        raise ArgumentError(f"modes must be a positive integer, got {modes!r}")
    n = int(modes)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def is_symmetric(M, tol=SYMMETRY_TOL):
    M = np.asarray(M)
    return max_abs(M - M.T) <= tol


def characteristic_coefficient(M, r):
    """Sum of all ``r x r`` principal minors of ``M``.

    ``C_n(M)`` is the determinant and ``C_1(M)`` the trace. With this sign
    convention ``det(x I - M) = sum_r (-1)^r C_r(M) x^(n-r)``.
    """
    A = _square(M)
    n = A.shape[0]
    if int(r) != r or not 1 <= r <= n:
        raise ArgumentError(f"order r must be an integer in [1, {n}], got {r!r}")
    r = int(r)
    if r == n:
        return float(np.linalg.det(A))
    total = 0.0
    for idx in combinations(range(n), r):
        total += np.linalg.det(A[np.ix_(idx, idx)])
    return float(total)


def characteristic_coefficients(M):
    """All characteristic coefficients ``[C_1(M), ..., C_n(M)]``."""
    A = _square(M)
    return np.array([characteristic_coefficient(A, r) for r in range(1, A.shape[0] + 1)])


def commutator_characteristic_coefficient(modes, r):
    """Closed form of ``C_r(-J/2)``: binom(N, r/2) / 4^(r/2) for even r, else 0."""
    if r % 2:
        return 0.0
    k = r // 2
    return comb(modes, k) / 4.0**k


def matrix_exponential(M):
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    The matrix is scaled by ``2**-s`` until its 1-norm is at most 0.5, the
    exponential of the scaled matrix is summed to order 18 with Horner's
    scheme, and the result is squared ``s`` times.
    """
    A = _square(M)
    n = A.shape[0]
    norm = np.linalg.norm(A, 1)
    s = 0
    if norm > _EXPM_THETA:
        s = int(np.ceil(np.log2(norm / _EXPM_THETA)))
    X = A / 2.0**s
    eye = np.eye(n)
    E = eye.copy()
    for k in range(_EXPM_ORDER, 0, -1):
        E = eye + (X @ E) / k
    for _ in range(s):
        E = E @ E
    return E


def symplectic_defect(L):
    """Max-abs entry of ``L J L^T - J``."""
    A = _even_square(L)
    J = symplectic_form(A.shape[0] // 2)
    return max_abs(A @ J @ A.T - J)


def resymplectify(L):
    """One averaging step ``L -> (L + J L^-T J^-1) / 2`` towards Sp(2N).

    Symplectic matrices are fixed points. For nearly symplectic input the
    defect shrinks quadratically.
    """
    A = _even_square(L)
    J = symplectic_form(A.shape[0] // 2)
    try:
        inv_t = np.linalg.inv(A).T
    except np.linalg.LinAlgError as exc:
        raise SingularityError("cannot resymplectify a singular matrix") from exc
    # J^-1 = -J
    return 0.5 * (A - J @ inv_t @ J)


def check_positive_definite(M, tol=SYMMETRY_TOL):
    """True iff the smallest eigenvalue of the symmetric matrix exceeds ``tol``."""
    A = _square(M)
    if not is_symmetric(A, tol):
        raise ArgumentError("matrix is not symmetric within tolerance")
    return bool(np.linalg.eigvalsh(0.5 * (A + A.T))[0] > tol)


def symmetric_sqrt(M):
    """Principal square root and inverse square root of a symmetric PD matrix."""
    A = _square(M)
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    if w[0] <= 0:
        raise ArgumentError("matrix is not positive definite")
    root = np.sqrt(w)
    return (V * root) @ V.T, (V / root) @ V.T
