"""Gaussian states described by first and second moments.

The covariance (uncertainty) matrix uses the symmetrized convention
``sigma_{mu nu} = <Q_mu Q_nu + Q_nu Q_mu>/2 - <Q_mu><Q_nu>`` with
``Q = (p_1..p_N, q_1..q_N)`` and hbar = 1, so the vacuum has sigma = I/2.
"""

from dataclasses import dataclass, field

import numpy as np

from .canonical import SymplecticMatrix, random_symplectic
from .errors import ArgumentError
from .matcore import as_real_matrix, max_abs, symplectic_form

SYMMETRY_TOL = 1e-9
EIGEN_FLOOR_TOL = 1e-9
TRANSPORT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an N-mode state.

    Construction checks shapes and symmetry only; use :func:`validate_state`
    for the physical (uncertainty-relation) checks.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        cov = as_real_matrix(self.cov, "cov")
        n2 = cov.shape[0]
        if cov.shape[1] != n2 or n2 % 2:
            raise ArgumentError(f"cov must be 2N x 2N, got shape {cov.shape}")
        if max_abs(cov - cov.T) > SYMMETRY_TOL:
            raise ArgumentError("cov is not symmetric")
        mean = np.array(self.mean, dtype=float).reshape(-1)
        if mean.shape != (n2,):
            raise ArgumentError(f"mean must have length {n2}, got {mean.shape[0]}")
        if not np.all(np.isfinite(mean)):
            raise ArgumentError("mean contains non-finite entries")
        cov = 0.5 * (cov + cov.T)
        for a in (mean, cov):
            a.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def modes(self):
        return self.cov.shape[0] // 2

    def blocks(self):
        """``(sigma_pp, sigma_pq, sigma_qp, sigma_qq)``."""
        n = self.modes
        s = self.cov
        return s[:n, :n], s[:n, n:], s[n:, :n], s[n:, n:]

    def to_dict(self):
        return {"modes": self.modes, "mean": self.mean.tolist(), "cov": self.cov.tolist()}


def coherent_state(modes, mean=None):
    """Glauber coherent state: covariance I/2, arbitrary displacement."""
    if int(modes) != modes or modes < 1:
        raise ArgumentError(f"modes must be a positive integer, got {modes!r}")
    n = int(modes)
    if mean is None:
        mean = np.zeros(2 * n)
    return GaussianState(mean, 0.5 * np.eye(2 * n))


def fock_state(n):
    """Second moments of the number state |n_1, ..., n_N>."""
    n = np.atleast_1d(np.asarray(n))
    if n.ndim != 1 or n.size == 0:
        raise ArgumentError("occupation numbers must be a non-empty 1-d sequence")
    if not np.all(n == np.round(n)) or np.any(n < 0):
        raise ArgumentError("occupation numbers must be nonnegative integers")
    d = 0.5 + n.astype(float)
    return GaussianState(np.zeros(2 * n.size), np.diag(np.concatenate([d, d])))


def thermal_state(nbar):
    """Thermal state with mean occupations ``nbar`` (same moments as Fock, real nbar)."""
    nbar = np.atleast_1d(np.asarray(nbar, dtype=float))
    if nbar.ndim != 1 or np.any(~np.isfinite(nbar)) or np.any(nbar < 0):
        raise ArgumentError("mean occupations must be finite and nonnegative")
    d = 0.5 + nbar
    return GaussianState(np.zeros(2 * nbar.size), np.diag(np.concatenate([d, d])))


def apply_ct(state, L):
    """Transport moments through a linear canonical transformation.

    ``mean -> L mean`` and ``cov -> L cov L^T``.
    """
    if not isinstance(L, SymplecticMatrix):
        L = SymplecticMatrix(L)
    if L.modes != state.modes:
        raise ArgumentError(f"mode mismatch: state has {state.modes}, transform has {L.modes}")
    if L.defect > TRANSPORT_TOL:
        raise ArgumentError(
            f"refusing non-symplectic transport: defect {L.defect:.3e} > {TRANSPORT_TOL:.0e}"
        )
    M = L.matrix
    cov = M @ state.cov @ M.T
    return GaussianState(M @ state.mean, 0.5 * (cov + cov.T))


def random_valid_state(modes, seed, purity="pure"):
    """Random Gaussian state ``S diag(nu, nu) S^T`` with ``S = exp(J K)``.

    ``seed`` may be an int, a sequence of ints, or a numpy Generator.
    Pure states have every nu_k = 1/2; mixed states draw nu_k = 1/2 + Exp(1).
    """
    if purity not in ("pure", "mixed"):
        raise ArgumentError(f"purity must be 'pure' or 'mixed', got {purity!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    S = random_symplectic(modes, rng).matrix
    nu = np.full(modes, 0.5)
    if purity == "mixed":
        nu = nu + rng.exponential(1.0, size=modes)
    cov = S @ np.diag(np.concatenate([nu, nu])) @ S.T
    return GaussianState(np.zeros(2 * modes), 0.5 * (cov + cov.T))


def robertson_embedding(cov):
    """Real symmetric embedding ``[[sigma, -C], [C, sigma]]`` of sigma + iC, C = -J/2."""
    n = cov.shape[0] // 2
    C = -0.5 * symplectic_form(n)
    return np.block([[cov, -C], [C, cov]])


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_state`: ``ok`` plus the list of failed checks."""

    ok: bool
    failures: list = field(default_factory=list)
    min_eigenvalue: float = float("nan")
    min_robertson_eigenvalue: float = float("nan")
    state: GaussianState = None

    def to_dict(self):
        return {
            "valid": self.ok,
            "failures": list(self.failures),
            "min_eigenvalue": self.min_eigenvalue,
            "min_robertson_eigenvalue": self.min_robertson_eigenvalue,
        }


def validate_state(mean, cov, tol=EIGEN_FLOOR_TOL):
    """Check that (mean, cov) describe a physical state; never raises on bad data."""
    failures = []
    try:
        cov = np.asarray(cov, dtype=float)
        mean = np.asarray(mean, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        return ValidationReport(False, [f"malformed input: {exc}"])
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        return ValidationReport(False, [f"cov must be 2N x 2N, got shape {cov.shape}"])
    if mean.shape != (cov.shape[0],):
        return ValidationReport(False, [f"mean must have length {cov.shape[0]}"])
    if not (np.all(np.isfinite(cov)) and np.all(np.isfinite(mean))):
        return ValidationReport(False, ["non-finite entries"])

    asym = max_abs(cov - cov.T)
    if asym > SYMMETRY_TOL:
        failures.append(f"symmetry: max |cov - cov^T| = {asym:.3e}")
    sym = 0.5 * (cov + cov.T)
    min_eig = float(np.linalg.eigvalsh(sym)[0])
    if min_eig <= tol:
        failures.append(f"positive definiteness: smallest eigenvalue {min_eig:.6g}")
    min_rob = float(np.linalg.eigvalsh(robertson_embedding(sym))[0])
    if min_rob < -tol:
        failures.append(f"robertson matrix: smallest eigenvalue {min_rob:.6g} < 0")

    report = ValidationReport(not failures, failures, min_eig, min_rob)
    if report.ok:
        report.state = GaussianState(mean, sym)
    return report


def state_from_dict(d):
    """Parse ``{"modes": N, "mean": [...], "cov": [[...]]}`` into a validation report."""
    if not isinstance(d, dict) or "cov" not in d:
        raise ArgumentError("state description must be an object with a 'cov' field")
    cov = d["cov"]
    n2 = len(cov)
    mean = d.get("mean", [0.0] * n2)
    if "modes" in d and 2 * int(d["modes"]) != n2:
        raise ArgumentError(f"'modes'={d['modes']} does not match cov size {n2}")
    return validate_state(mean, cov)
