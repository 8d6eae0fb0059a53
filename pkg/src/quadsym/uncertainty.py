"""Uncertainty relations for canonical observables.

All quantities are computed from the covariance matrix sigma of a
:class:`~quadsym.states.GaussianState` and the commutator matrix
``C = -J/2`` of the canonical observables (hbar = 1).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .canonical import SymplecticMatrix
from .errors import ArgumentError, SingularityError
from .matcore import (
    as_real_matrix,
    characteristic_coefficient,
    max_abs,
    symmetric_sqrt,
    symplectic_form,
)
from .states import GaussianState

MINIMALITY_TOL = 1e-8
DISCRIMINANT_TOL = 1e-8
_CLUSTER_RTOL = 1e-8


def _cov(x):
    if isinstance(x, GaussianState):
        return x.cov
    s = as_real_matrix(x, "sigma")
    if s.shape[0] != s.shape[1] or s.shape[0] % 2:
        raise ArgumentError(f"sigma must be 2N x 2N, got shape {s.shape}")
    return 0.5 * (s + s.T)


def commutator_matrix(modes):
    """``C_{mu nu} = -i <[Q_mu, Q_nu]> / 2``, which equals ``-J/2``."""
    return -0.5 * symplectic_form(modes)


# Williamson normal form ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class WilliamsonDecomposition:
    """``S sigma S^T = diag(nu, nu)`` with S symplectic and nu ascending."""

    S: SymplecticMatrix
    nu: np.ndarray

    @property
    def diagonal(self):
        return np.concatenate([self.nu, self.nu])

    def residual(self, sigma):
        S = self.S.matrix
        return max_abs(S @ _cov(sigma) @ S.T - np.diag(self.diagonal))


def _canonical_pairs(K):
    """Orthonormal vectors u_k, v_k with K u_k = nu_k v_k, K v_k = -nu_k u_k.

    Works from the symmetric eigenproblem of ``K^T K`` (eigenvalues nu_k^2,
    each twice). Nearly equal eigenvalues are grouped and their eigenspace is
    split into pairs explicitly, so degeneracy never breaks the pairing.
    """
    n2 = K.shape[0]
    w, V = np.linalg.eigh(K.T @ K)
    w = np.clip(w, 0.0, None)
    groups = []
    start = 0
    for i in range(1, n2 + 1):
        if i == n2 or w[i] - w[i - 1] > _CLUSTER_RTOL * max(w[i], 1.0):
            groups.append(range(start, i))
            start = i

    us, vs, nus = [], [], []
    for g in groups:
        E = V[:, list(g)]
        if len(g) % 2:
            raise SingularityError("unpaired symplectic eigenvalue; input is not positive definite")
        basis = []
        while len(basis) < len(g):
            # pick the eigenvector least explained by the pairs found so far
            R = E.copy()
            for _ in range(2):
                for b in basis:
                    R -= np.outer(b, b @ R)
            j = int(np.argmax(np.linalg.norm(R, axis=0)))
            u = R[:, j] / np.linalg.norm(R[:, j])
            Ku = K @ u
            nu = np.linalg.norm(Ku)
            if nu == 0.0:
                raise SingularityError("zero symplectic eigenvalue; input is not positive definite")
            v = Ku / nu
            for b in basis:
                v -= (b @ v) * b
            v -= (u @ v) * u
            v /= np.linalg.norm(v)
            basis.extend([u, v])
            us.append(u)
            vs.append(v)
            nus.append(nu)
    order = np.argsort(nus, kind="stable")
    return (
        np.array(nus)[order],
        np.array(us)[order].T,
        np.array(vs)[order].T,
    )


def williamson(sigma):
    """Symplectic diagonalization of a symmetric positive-definite matrix.

    Builds ``K = sigma^(1/2) J sigma^(1/2)``, brings it to canonical
    antisymmetric form with an orthogonal ``O`` (columns v_1..v_N, u_1..u_N),
    and returns ``S = D^(1/2) O^T sigma^(-1/2)`` with ``D = diag(nu, nu)``.
    The symplectic eigenvalues nu are the moduli of the eigenvalues of
    ``J sigma``.
    """
    s = _cov(sigma)
    n = s.shape[0] // 2
    try:
        root, inv_root = symmetric_sqrt(s)
    except ArgumentError:
        raise ArgumentError("williamson needs a positive-definite matrix") from None
    J = symplectic_form(n)
    K = root @ J @ root
    K = 0.5 * (K - K.T)
    nu, U, Vv = _canonical_pairs(K)
    O = np.hstack([Vv, U])
    d = np.sqrt(np.concatenate([nu, nu]))
    S = (d[:, None] * O.T) @ inv_root
    return WilliamsonDecomposition(SymplecticMatrix(S), nu)


def symplectic_eigenvalues(sigma):
    return williamson(sigma).nu


# scalar margins ------------------------------------------------------------


def robertson_margin(state):
    """``det sigma - (1/4)^N``; nonnegative for every physical state."""
    s = _cov(state)
    return float(np.linalg.det(s) - 0.25 ** (s.shape[0] // 2))


def schrodinger_margin(state):
    """``sigma_pp sigma_qq - sigma_pq^2 - 1/4`` for a single mode."""
    s = _cov(state)
    if s.shape != (2, 2):
        raise ArgumentError("the Schrodinger relation is defined for one mode only")
    return float(s[0, 0] * s[1, 1] - s[0, 1] ** 2 - 0.25)


def characteristic_margins(state):
    """``C_r(sigma) - C_r(C)`` for r = 1..2N.

    The last entry is the Robertson margin. Odd orders of the antisymmetric
    commutator matrix vanish, so odd margins are plain ``C_r(sigma)``.
    """
    s = _cov(state)
    C = commutator_matrix(s.shape[0] // 2)
    return np.array(
        [
            characteristic_coefficient(s, r) - characteristic_coefficient(C, r)
            for r in range(1, s.shape[0] + 1)
        ]
    )


def normalized_sigma(sigma):
    """``sigma / det(sigma)^(1/2N)``, a unit-determinant matrix."""
    s = _cov(sigma)
    det = np.linalg.det(s)
    if not det > 0 or np.linalg.eigvalsh(s)[0] <= 0:
        raise ArgumentError("normalized_sigma needs a positive-definite matrix")
    return s / det ** (1.0 / s.shape[0])


@dataclass(frozen=True)
class SigmaSymplecticity:
    defect: float
    products: np.ndarray
    target: float

    @property
    def products_spread(self):
        return float(np.max(np.abs(self.products - self.target)))


def symplectic_sigma_test(state):
    """How far the normalized covariance is from being symplectic.

    ``defect`` is max-abs of ``s J s^T - J`` for the normalized matrix s.
    ``products`` are the per-mode variance products s_k s_{N+k} in the
    Williamson frame, to be compared with ``target = det(sigma)^(1/N)``;
    they all coincide exactly when the defect vanishes.
    """
    s = _cov(state)
    n = s.shape[0] // 2
    st = normalized_sigma(s)
    J = symplectic_form(n)
    nu = williamson(s).nu
    target = float(np.linalg.det(s) ** (1.0 / n))
    return SigmaSymplecticity(max_abs(st @ J @ st.T - J), nu**2, target)


def block_conditions(state):
    """Residuals of the block form of the symplectic-covariance condition.

    Returns ``(first, second)``: max-abs of
    ``s_pp s_qq - s_pq s_pq - det(s)^(1/N) I`` and the larger of
    ``s_pp s_qp - s_pq s_pp`` and ``s_qp s_qq - s_qq s_pq``.
    """
    s = _cov(state)
    n = s.shape[0] // 2
    pp, pq, qp, qq = s[:n, :n], s[:n, n:], s[n:, :n], s[n:, n:]
    target = np.linalg.det(s) ** (1.0 / n)
    first = max_abs(pp @ qq - pq @ pq - target * np.eye(n))
    second = max(max_abs(pp @ qp - pq @ pp), max_abs(qp @ qq - qq @ pq))
    return first, second


def block_determinant(state):
    """``det[s_pp s_qq - s_pp s_qp s_pp^-1 s_pq]``, equal to det sigma."""
    s = _cov(state)
    n = s.shape[0] // 2
    pp, pq, qp, qq = s[:n, :n], s[:n, n:], s[n:, :n], s[n:, n:]
    try:
        inner = pp @ qq - pp @ qp @ np.linalg.solve(pp, pq)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("momentum block of sigma is singular") from exc
    return float(np.linalg.det(inner))


def block_robertson_margin(state):
    s = _cov(state)
    return block_determinant(s) - 0.25 ** (s.shape[0] // 2)


@dataclass(frozen=True)
class HeisenbergQuadratic:
    """``x^2 var_q - x + var_p >= 0`` for one mode.

    ``lam_star`` is the double root, set only when the discriminant vanishes.
    """

    coefficients: tuple
    discriminant: float
    lam_star: Optional[float]


def heisenberg_lambda_form(state, mode, tol=DISCRIMINANT_TOL):
    """Quadratic in lambda whose nonnegativity is the Heisenberg relation.

    ``mode`` is 1-based.
    """
    s = _cov(state)
    n = s.shape[0] // 2
    if int(mode) != mode or not 1 <= mode <= n:
        raise ArgumentError(f"mode must be in [1, {n}], got {mode!r}")
    k = int(mode) - 1
    var_p = float(s[k, k])
    var_q = float(s[n + k, n + k])
    disc = 1.0 - 4.0 * var_p * var_q
    lam = 1.0 / (2.0 * var_q) if abs(disc) <= tol else None
    return HeisenbergQuadratic((var_q, -1.0, var_p), disc, lam)


@dataclass(frozen=True)
class Minimality:
    minimal: bool
    certificate: WilliamsonDecomposition


def robertson_minimality(state, tol=MINIMALITY_TOL):
    """True iff every symplectic eigenvalue equals 1/2 (pure Gaussian class)."""
    w = williamson(state)
    return Minimality(bool(np.all(np.abs(w.nu - 0.5) <= tol)), w)


def robertson_matrix_defect(state):
    """Max-abs of ``R J R^dagger - J`` for ``R = s + i c``.

    ``s`` is the normalized covariance and ``c = C / det(C)^(1/2N) = -J``.
    Report-only; the product is formed from real and imaginary blocks.
    """
    s = _cov(state)
    n = s.shape[0] // 2
    J = symplectic_form(n)
    st = normalized_sigma(s)
    ct = -J
    real = st @ J @ st.T + ct @ J @ ct.T
    imag = ct @ J @ st.T - st @ J @ ct.T
    return max(max_abs(real - J), max_abs(imag))


# report ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UncertaintyReport:
    det_sigma: float
    robertson_margin: float
    char_margins: np.ndarray
    schrodinger_margin: Optional[float]
    nu: np.ndarray
    sympl_defect_normalized: float
    block_residuals: tuple
    is_robertson_minimal: bool
    mode_products: np.ndarray
    robertson_matrix_defect: float

    def to_dict(self):
        d = {
            "det_sigma": self.det_sigma,
            "robertson_margin": self.robertson_margin,
            "char_margins": [float(x) for x in self.char_margins],
            "nu": [float(x) for x in self.nu],
            "sympl_defect": self.sympl_defect_normalized,
            "block_residuals": {
                "o42a": self.block_residuals[0],
                "o42b": self.block_residuals[1],
            },
            "minimal": self.is_robertson_minimal,
        }
        if self.schrodinger_margin is not None:
            d["schrodinger_margin"] = self.schrodinger_margin
        return d


def analyze(state):
    """Full uncertainty audit of one state."""
    s = _cov(state)
    n = s.shape[0] // 2
    margins = characteristic_margins(s)
    sym = symplectic_sigma_test(s)
    minimal = robertson_minimality(s)
    return UncertaintyReport(
        det_sigma=float(np.linalg.det(s)),
        robertson_margin=robertson_margin(s),
        char_margins=margins,
        schrodinger_margin=schrodinger_margin(s) if n == 1 else None,
        nu=minimal.certificate.nu,
        sympl_defect_normalized=sym.defect,
        block_residuals=block_conditions(s),
        is_robertson_minimal=minimal.minimal,
        mode_products=sym.products,
        robertson_matrix_defect=robertson_matrix_defect(s),
    )
