"""Linear canonical transformations as symplectic matrices.

A transformation acts on the canonical vector as ``Q' = L Q`` with
``Q = (p_1..p_N, q_1..q_N)``. It preserves the commutation relations iff
``L J L^T = J``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DivergenceError
from .hamiltonian import HamiltonianSpec, assemble_grand_matrix
from .matcore import (
    as_real_matrix,
    matrix_exponential,
    max_abs,
    resymplectify,
    symplectic_defect,
    symplectic_form,
)

CONSTRUCTION_TOL = 1e-8
DIVERGENCE_DEFECT = 1e-4
RESYMPLECTIFY_EVERY = 100
RESYMPLECTIFY_ABOVE = 1e-10
DEFAULT_STEPS = 10_000


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """A 2N x 2N real matrix with its cached symplectic defect."""

    matrix: np.ndarray
    defect: float = field(init=False)

    def __post_init__(self):
        M = as_real_matrix(self.matrix, "symplectic matrix")
        d = symplectic_defect(M)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "defect", d)

    @classmethod
    def from_matrix(cls, M, tol=CONSTRUCTION_TOL):
        """Wrap ``M``; raise ArgumentError if its defect exceeds ``tol``.

        ``tol=None`` skips the check (used for raw integrator output).
        """
        S = cls(M)
        if tol is not None and S.defect > tol:
            raise ArgumentError(f"matrix is not symplectic: defect {S.defect:.3e} > {tol:.1e}")
        return S

    @classmethod
    def identity(cls, modes):
        return cls(np.eye(2 * modes))

    @property
    def modes(self):
        return self.matrix.shape[0] // 2

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @property
    def blocks(self):
        """``(lambda_pp, lambda_pq, lambda_qp, lambda_qq)``."""
        n = self.modes
        M = self.matrix
        return M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]

    def ccr_residuals(self):
        """Residuals of the blockwise commutation-preservation conditions.

        Returns the max-abs norms of ``l_pp l_qq^T - l_pq l_qp^T - I``,
        ``l_qq l_qp^T - l_qp l_qq^T`` and ``l_pq l_pp^T - l_pp l_pq^T``.
        """
        pp, pq, qp, qq = self.blocks
        eye = np.eye(self.modes)
        return (
            max_abs(pp @ qq.T - pq @ qp.T - eye),
            max_abs(qq @ qp.T - qp @ qq.T),
            max_abs(pq @ pp.T - pp @ pq.T),
        )

    def inverse(self):
        # L^-1 = -J L^T J for symplectic L
        J = symplectic_form(self.modes)
        return SymplecticMatrix(-J @ self.matrix.T @ J)


def _as_symplectic(L, tol=CONSTRUCTION_TOL):
    if isinstance(L, SymplecticMatrix):
        return L
    return SymplecticMatrix.from_matrix(L, tol)


def _mode_params(masses, frequencies):
    m = np.atleast_1d(np.asarray(masses, dtype=float))
    w = np.atleast_1d(np.asarray(frequencies, dtype=float))
    if m.shape != w.shape or m.ndim != 1:
        raise ArgumentError("masses and frequencies must be 1-d sequences of equal length")
    if np.any(~np.isfinite(m)) or np.any(m <= 0) or np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise ArgumentError("masses and frequencies must be positive")
    return m, w


def rotation_ct(masses, frequencies, t):
    """Free evolution of uncoupled oscillators over time ``t``.

    Per mode: ``q' = q cos(wt) + p sin(wt)/(m w)`` and
    ``p' = -m w q sin(wt) + p cos(wt)``.
    """
    m, w = _mode_params(masses, frequencies)
    n = len(m)
    c = np.cos(w * t)
    s = np.sin(w * t)
    L = np.zeros((2 * n, 2 * n))
    idx = np.arange(n)
    L[idx, idx] = c
    L[idx, n + idx] = -m * w * s
    L[n + idx, idx] = s / (m * w)
    L[n + idx, n + idx] = c
    return SymplecticMatrix(L)


def squeeze_ct(r):
    """Single-mode squeezers: p_k -> exp(-r_k) p_k, q_k -> exp(r_k) q_k."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if r.ndim != 1 or not np.all(np.isfinite(r)):
        raise ArgumentError("squeeze parameters must be a finite 1-d sequence")
    return SymplecticMatrix(np.diag(np.concatenate([np.exp(-r), np.exp(r)])))


def compose(L2, L1):
    """The transformation ``L1`` followed by ``L2`` (matrix product L2 @ L1)."""
    L2 = _as_symplectic(L2)
    L1 = _as_symplectic(L1)
    if L2.modes != L1.modes:
        raise ArgumentError(f"mode mismatch: {L2.modes} vs {L1.modes}")
    return SymplecticMatrix(L2.matrix @ L1.matrix)


def random_symplectic(modes, rng, scale=0.5):
    """``exp(J K)`` for a random symmetric K with entries ``scale * U[-1, 1]``."""
    K = rng.uniform(-1.0, 1.0, size=(2 * modes, 2 * modes))
    K = scale * 0.5 * (K + K.T)
    return SymplecticMatrix(matrix_exponential(symplectic_form(modes) @ K))


def hamiltonian_generator(H):
    """``-2 J H`` for a grand matrix ``H``: generator of its classical flow."""
    H = as_real_matrix(H, "grand matrix")
    return -2.0 * symplectic_form(H.shape[0] // 2) @ H


# propagation --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PropagationResult:
    times: np.ndarray
    lambdas: list
    max_defect: float
    corrected: bool

    @property
    def final(self):
        return self.lambdas[-1]

    @property
    def matrices(self):
        return np.stack([L.matrix for L in self.lambdas])

    @property
    def defects(self):
        return np.array([L.defect for L in self.lambdas])


def _step_grid(t0, t1, step, samples):
    if not (np.isfinite(t0) and np.isfinite(t1)) or t1 <= t0:
        raise ArgumentError(f"need t1 > t0, got t0={t0}, t1={t1}")
    if step is None:
        step = (t1 - t0) / DEFAULT_STEPS
    if not np.isfinite(step) or step <= 0:
        raise ArgumentError(f"step must be positive, got {step}")
    n = max(1, math.ceil((t1 - t0) / step - 1e-9))
    h = (t1 - t0) / n
    if samples is None:
        samples = 2
    if int(samples) != samples or samples < 2:
        raise ArgumentError(f"samples must be an integer >= 2, got {samples}")
    out = np.unique(np.round(np.linspace(0, n, int(samples))).astype(int))
    return n, h, out


def _propagate(spec, t0, t1, step, samples, lam0, sign, left):
    if not isinstance(spec, HamiltonianSpec):
        raise ArgumentError("spec must be a HamiltonianSpec")
    lo, hi = spec.domain()
    if t0 < lo or t1 > hi:
        raise ArgumentError(f"window [{t0}, {t1}] exceeds schedule domain [{lo}, {hi}]")
    n, h, out_idx = _step_grid(t0, t1, step, samples)
    dim = 2 * spec.modes
    J = symplectic_form(spec.modes)
    if lam0 is None:
        L = np.eye(dim)
    else:
        L0 = _as_symplectic(lam0)
        if L0.modes != spec.modes:
            raise ArgumentError("initial matrix has the wrong number of modes")
        L = L0.matrix.copy()

    if spec.is_constant:
        F_const = sign * 2.0 * J @ assemble_grand_matrix(spec, t0)

        def F(t):
            return F_const
    else:
        def F(t):
            return sign * 2.0 * J @ assemble_grand_matrix(spec, t)

    def defect(M):
        if not np.all(np.isfinite(M)):
            return np.inf
        return float(np.max(np.abs(M @ J @ M.T - J)))

    if left:
        def rhs(M, G):
            return G @ M
    else:
        def rhs(M, G):
            return M @ G

    times = []
    lambdas = []
    out_set = iter(out_idx)
    next_out = next(out_set)
    max_defect = symplectic_defect(L)
    corrected = False
    F_start = F(t0)

    def record(i, M):
        times.append(t0 + i * h)
        lambdas.append(SymplecticMatrix(M))

    if next_out == 0:
        record(0, L)
        next_out = next(out_set, None)

    for i in range(n):
        t = t0 + i * h
        F_mid = F(t + 0.5 * h)
        F_end = F(t + h) if i < n - 1 else F(t1)
        k1 = rhs(L, F_start)
        k2 = rhs(L + 0.5 * h * k1, F_mid)
        k3 = rhs(L + 0.5 * h * k2, F_mid)
        k4 = rhs(L + h * k3, F_end)
        L = L + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        F_start = F_end

        d = defect(L)
        max_defect = max(max_defect, d)
        if d > DIVERGENCE_DEFECT:
            raise DivergenceError(
                f"symplectic defect {d:.3e} at t={t + h:.6g} exceeds {DIVERGENCE_DEFECT:.0e};"
                " reduce the step"
            )
        if (i + 1) % RESYMPLECTIFY_EVERY == 0 and d > RESYMPLECTIFY_ABOVE:
            L = resymplectify(L)
            corrected = True
        if next_out is not None and i + 1 == next_out:
            record(i + 1, L)
            next_out = next(out_set, None)

    return PropagationResult(np.array(times), lambdas, float(max_defect), corrected)


def propagate_lambda1(spec, t0, t1, step=None, samples=None, lam0=None):
    """Integrate ``dL/dt = L F(t)`` with ``F = -2 J H(t)`` by classical RK4.

    Starts from ``lam0`` (identity by default). ``samples`` evenly spaced
    outputs are recorded on the step grid, endpoints included.
    """
    return _propagate(spec, t0, t1, step, samples, lam0, sign=-1.0, left=False)


def propagate_lambda2(spec, t0, t1, step=None, samples=None, lam0=None):
    """Integrate ``dL/dt = F(t) L`` with ``F = 2 J H'(t)`` for a target H'."""
    return _propagate(spec, t0, t1, step, samples, lam0, sign=1.0, left=True)


def _constant_grand(H):
    if isinstance(H, HamiltonianSpec):
        if not H.is_constant:
            raise ArgumentError("closed form needs a time-independent Hamiltonian")
        return assemble_grand_matrix(H, 0.0)
    M = as_real_matrix(H, "grand matrix")
    if M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ArgumentError("grand matrix must be square with even dimension")
    return M


def stationary_total_lambda(H, H_target, t):
    """``exp(2 J H_target t) exp(-2 J H t)`` for time-independent H, H_target."""
    Hm = _constant_grand(H)
    Ht = _constant_grand(H_target)
    if Hm.shape != Ht.shape:
        raise ArgumentError(f"mode mismatch: {Hm.shape[0] // 2} vs {Ht.shape[0] // 2}")
    J = symplectic_form(Hm.shape[0] // 2)
    return SymplecticMatrix(
        matrix_exponential(2.0 * t * J @ Ht) @ matrix_exponential(-2.0 * t * J @ Hm)
    )


# classical auxiliary oscillator ------------------------------------------


@dataclass(frozen=True, eq=False)
class ClassicalTrajectory:
    times: np.ndarray
    z: np.ndarray
    zdot: np.ndarray

    @property
    def wronskian(self):
        """``zdot conj(z) - z conj(zdot)`` at every sample."""
        return self.zdot * np.conj(self.z) - self.z * np.conj(self.zdot)

    @property
    def wronskian_drift(self):
        W = self.wronskian
        scale = abs(W[0]) if W[0] != 0 else 1.0
        return float(np.max(np.abs(W - W[0])) / scale)


def solve_classical_z(omega2, z0, zdot0, t0, t1, step=None):
    """RK4 solution of ``z'' + omega2(t) z = 0`` on every step of the grid."""
    if z0 == 0 and zdot0 == 0:
        raise ArgumentError("initial data must not be identically zero")
    n, h, _ = _step_grid(t0, t1, step, 2)
    times = t0 + h * np.arange(n + 1)
    z = np.empty(n + 1, dtype=complex)
    v = np.empty(n + 1, dtype=complex)
    z[0], v[0] = complex(z0), complex(zdot0)
    w_start = omega2(times[0])
    for i in range(n):
        t = times[i]
        w_mid = omega2(t + 0.5 * h)
        w_end = omega2(times[i + 1])
        zi, vi = z[i], v[i]
        k1z, k1v = vi, -w_start * zi
        k2z, k2v = vi + 0.5 * h * k1v, -w_mid * (zi + 0.5 * h * k1z)
        k3z, k3v = vi + 0.5 * h * k2v, -w_mid * (zi + 0.5 * h * k2z)
        k4z, k4v = vi + h * k3v, -w_end * (zi + h * k3z)
        z[i + 1] = zi + (h / 6.0) * (k1z + 2 * k2z + 2 * k3z + k4z)
        v[i + 1] = vi + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        w_start = w_end
    return ClassicalTrajectory(times, z, v)
