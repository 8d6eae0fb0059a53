"""Quadratic Hamiltonians in grand-matrix form.

An N-mode Hamiltonian ``H = p A p + p B q + q B^T p + q C q`` is stored as
three time-dependent N x N coefficient blocks. Its grand matrix in (p, q)
ordering is ``[[A, B], [B^T, C]]``. Units use hbar = 1.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ArgumentError, SingularityError, ValidationError
from .matcore import SYMMETRY_TOL, as_real_matrix, max_abs

MIN_TABLE_SAMPLES = 4


class Schedule:
    """A matrix-valued function of time with first and second derivatives."""

    kind = "abstract"
    shape: tuple

    def domain(self):
        return (-np.inf, np.inf)

    def check_time(self, t):
        lo, hi = self.domain()
        if not lo <= t <= hi:
            raise ArgumentError(f"t={t} outside schedule domain [{lo}, {hi}]")

    def value(self, t):
        raise NotImplementedError

    def derivative(self, t, order=1):
        raise NotImplementedError

    def __call__(self, t):
        return self.value(t)


def _matrix_param(x, name):
    arr = np.asarray(x)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    return as_real_matrix(arr, name)


@dataclass(frozen=True, eq=False)
class ConstantSchedule(Schedule):
    matrix: np.ndarray
    kind = "constant"

    def __post_init__(self):
        object.__setattr__(self, "matrix", _matrix_param(self.matrix, "value"))

    @property
    def shape(self):
        return self.matrix.shape

    def value(self, t):
        return self.matrix.copy()

    def derivative(self, t, order=1):
        return np.zeros_like(self.matrix)


@dataclass(frozen=True, eq=False)
class ExponentialSchedule(Schedule):
    """``alpha * exp(beta * t)`` with matrix ``alpha`` and scalar ``beta``."""

    alpha: np.ndarray
    beta: float
    kind = "exponential"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _matrix_param(self.alpha, "alpha"))
        if not np.isfinite(self.beta):
            raise ArgumentError("beta must be finite")

    @property
    def shape(self):
        return self.alpha.shape

    def value(self, t):
        return self.alpha * np.exp(self.beta * t)

    def derivative(self, t, order=1):
        return self.alpha * self.beta**order * np.exp(self.beta * t)


@dataclass(frozen=True, eq=False)
class HarmonicSchedule(Schedule):
    """Entrywise ``alpha + beta * cos(gamma * t + phi)``."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: float
    phi: float = 0.0
    kind = "harmonic"

    def __post_init__(self):
        alpha = _matrix_param(self.alpha, "alpha")
        beta = _matrix_param(self.beta, "beta")
        if alpha.shape != beta.shape:
            raise ArgumentError("harmonic alpha and beta must have the same shape")
        if not (np.isfinite(self.gamma) and np.isfinite(self.phi)):
            raise ArgumentError("gamma and phi must be finite")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def shape(self):
        return self.alpha.shape

    def value(self, t):
        return self.alpha + self.beta * np.cos(self.gamma * t + self.phi)

    def derivative(self, t, order=1):
        arg = self.gamma * t + self.phi
        g = self.gamma
        if order == 1:
            return -self.beta * g * np.sin(arg)
        if order == 2:
            return -self.beta * g * g * np.cos(arg)
        raise ArgumentError("only first and second derivatives are available")


class TableSchedule(Schedule):
    """Sampled matrices joined by a natural cubic spline."""

    kind = "table"

    def __init__(self, times, values, interp="cubic"):
        if interp != "cubic":
            raise ArgumentError(f"unsupported interpolation {interp!r}")
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or len(times) < MIN_TABLE_SAMPLES:
            raise ArgumentError(
                f"table schedule needs at least {MIN_TABLE_SAMPLES} samples for a cubic spline"
            )
        if values.ndim == 1:
            values = values.reshape(-1, 1, 1)
        if values.ndim != 3 or values.shape[0] != len(times):
            raise ArgumentError("table values must be a list of matrices, one per time")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ArgumentError("table contains non-finite entries")
        if np.any(np.diff(times) <= 0):
            raise ArgumentError("table times must be strictly increasing")
        self.times = times
        self.values = values
        self._spline = CubicSpline(times, values, axis=0, bc_type="natural")

    @property
    def shape(self):
        return self.values.shape[1:]

    def domain(self):
        return (float(self.times[0]), float(self.times[-1]))

    def value(self, t):
        self.check_time(t)
        return self._spline(t)

    def derivative(self, t, order=1):
        self.check_time(t)
        return self._spline(t, order)


class FunctionSchedule(Schedule):
    """Schedule backed by callables for the value and its derivatives.

    Used by presets whose coefficients fall outside the declarative kinds.
    """

    kind = "function"

    def __init__(self, value, first, second, shape=(1, 1)):
        self._f = (value, first, second)
        self.shape = tuple(shape)

    def _eval(self, i, t):
        out = np.asarray(self._f[i](t), dtype=float).reshape(self.shape)
        if not np.all(np.isfinite(out)):
            raise SingularityError(f"coefficient is singular at t={t}")
        return out

    def value(self, t):
        return self._eval(0, t)

    def derivative(self, t, order=1):
        if order not in (1, 2):
            raise ArgumentError("only first and second derivatives are available")
        return self._eval(order, t)


def as_schedule(x):
    """Wrap a plain matrix/scalar into a ConstantSchedule."""
    if isinstance(x, Schedule):
        return x
    return ConstantSchedule(x)


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """N-mode quadratic Hamiltonian given by coefficient schedules A, B, C."""

    modes: int
    A: Schedule
    B: Schedule
    C: Schedule

    def __post_init__(self):
        if int(self.modes) != self.modes or self.modes < 1:
            raise ArgumentError(f"modes must be a positive integer, got {self.modes!r}")
        n = int(self.modes)
        object.__setattr__(self, "modes", n)
        for name in "ABC":
            sched = as_schedule(getattr(self, name))
            if tuple(sched.shape) != (n, n):
                raise ArgumentError(
                    f"block {name} has shape {tuple(sched.shape)}, expected {(n, n)}"
                )
            object.__setattr__(self, name, sched)

    def domain(self):
        lo, hi = -np.inf, np.inf
        for sched in (self.A, self.B, self.C):
            a, b = sched.domain()
            lo, hi = max(lo, a), min(hi, b)
        return lo, hi

    def blocks(self, t):
        return self.A.value(t), self.B.value(t), self.C.value(t)

    def grand_matrix(self, t):
        return assemble_grand_matrix(self, t)

    @property
    def is_constant(self):
        return all(isinstance(s, ConstantSchedule) for s in (self.A, self.B, self.C))


def assemble_grand_matrix(spec, t, tol=SYMMETRY_TOL):
    """Grand matrix ``[[A, B], [B^T, C]]`` at time ``t`` (exactly symmetric)."""
    A, B, C = spec.blocks(t)
    for name, blk in (("A", A), ("C", C)):
        if max_abs(blk - blk.T) > tol:
            raise ValidationError(f"block {name} is not symmetric at t={t}")
    H = np.block([[A, B], [B.T, C]])
    return 0.5 * (H + H.T)


def zero_hamiltonian(modes):
    z = np.zeros((modes, modes))
    return HamiltonianSpec(modes, ConstantSchedule(z), ConstantSchedule(z), ConstantSchedule(z))


def target_oscillator(masses, frequencies):
    """Uncoupled stationary oscillators ``sum_k p_k^2/(2 m_k) + m_k w_k^2 q_k^2 / 2``."""
    m = np.atleast_1d(np.asarray(masses, dtype=float))
    w = np.atleast_1d(np.asarray(frequencies, dtype=float))
    if m.shape != w.shape or m.ndim != 1:
        raise ArgumentError("masses and frequencies must be 1-d sequences of equal length")
    if np.any(~np.isfinite(m)) or np.any(m <= 0) or np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise ArgumentError("masses and frequencies must be positive")
    n = len(m)
    return HamiltonianSpec(
        n,
        ConstantSchedule(np.diag(1.0 / (2.0 * m))),
        ConstantSchedule(np.zeros((n, n))),
        ConstantSchedule(np.diag(m * w**2 / 2.0)),
    )


def _scalar(x):
    arr = np.asarray(x, dtype=float)
    if arr.size != 1:
        raise ArgumentError("omega_squared needs one-mode (scalar) coefficients")
    return float(arr.reshape(()))


def omega_squared(a, b, c, t):
    """Frequency squared of the classical auxiliary oscillator for one mode.

    ``4ac + 2b a'/a + a''/(2a) - 3a'^2/(4a^2) - 4b^2 - 2b'`` where a, b, c are
    the p^2, pq and q^2 coefficients.
    """
    a, b, c = (as_schedule(s) for s in (a, b, c))
    for s in (a, b, c):
        s.check_time(t)
    av = _scalar(a.value(t))
    if av == 0.0:
        raise SingularityError(f"p^2 coefficient vanishes at t={t}")
    ad = _scalar(a.derivative(t, 1))
    add = _scalar(a.derivative(t, 2))
    bv = _scalar(b.value(t))
    bd = _scalar(b.derivative(t, 1))
    cv = _scalar(c.value(t))
    return (
        4.0 * av * cv
        + 2.0 * bv * ad / av
        + add / (2.0 * av)
        - 3.0 * ad**2 / (4.0 * av**2)
        - 4.0 * bv**2
        - 2.0 * bd
    )


def spec_omega_squared(spec, t):
    if spec.modes != 1:
        raise ArgumentError("omega_squared is defined for one-mode Hamiltonians only")
    return omega_squared(spec.A, spec.B, spec.C, t)


# presets ------------------------------------------------------------------


def _positive(name, x):
    x = float(x)
    if not np.isfinite(x) or x <= 0:
        raise ArgumentError(f"{name} must be positive, got {x}")
    return x


def _nonnegative(name, x):
    x = float(x)
    if not np.isfinite(x) or x < 0:
        raise ArgumentError(f"{name} must be nonnegative, got {x}")
    return x


def _stationary(m=1.0, omega=1.0):
    m = _positive("m", m)
    omega = _nonnegative("omega", omega)
    return HamiltonianSpec(
        1,
        ConstantSchedule([[1.0 / (2.0 * m)]]),
        ConstantSchedule([[0.0]]),
        ConstantSchedule([[m * omega**2 / 2.0]]),
    )


def _varying_mass(m0=1.0, b=0.1, omega0=1.0):
    """m(t) = m0 exp(-2 b t): a = exp(2bt)/(2 m0), c = m(t) omega0^2 / 2."""
    m0 = _positive("m0", m0)
    omega0 = _nonnegative("omega0", omega0)
    b = float(b)
    return HamiltonianSpec(
        1,
        ExponentialSchedule([[1.0 / (2.0 * m0)]], 2.0 * b),
        ConstantSchedule([[0.0]]),
        ExponentialSchedule([[m0 * omega0**2 / 2.0]], -2.0 * b),
    )


def _varying_frequency(m=1.0, omega2=1.0, omega2_amp=0.0, gamma=1.0, phi=0.0):
    """omega^2(t) = omega2 + omega2_amp * cos(gamma t + phi), constant mass."""
    m = _positive("m", m)
    return HamiltonianSpec(
        1,
        ConstantSchedule([[1.0 / (2.0 * m)]]),
        ConstantSchedule([[0.0]]),
        HarmonicSchedule([[m * omega2 / 2.0]], [[m * omega2_amp / 2.0]], gamma, phi),
    )


def _cosine_mass(m0=1.0, b=0.1, omega=1.0):
    """m(t) = m0 cos^2(b t); the p^2 coefficient blows up where cos(b t) = 0."""
    m0 = _positive("m0", m0)
    omega = _nonnegative("omega", omega)
    b = float(b)

    def sec2(t):
        c = np.cos(b * t)
        if abs(c) < 1e-12:
            return np.inf
        return 1.0 / (c * c)

    k = 1.0 / (2.0 * m0)
    a = FunctionSchedule(
        lambda t: k * sec2(t),
        lambda t: k * 2.0 * b * sec2(t) * np.tan(b * t),
        lambda t: k * 2.0 * b * b * sec2(t) * (3.0 * np.tan(b * t) ** 2 + 1.0),
    )
    # m(t) omega^2 / 2 = (m0 omega^2 / 4) (1 + cos 2bt)
    c = HarmonicSchedule([[m0 * omega**2 / 4.0]], [[m0 * omega**2 / 4.0]], 2.0 * b, 0.0)
    return HamiltonianSpec(1, a, ConstantSchedule([[0.0]]), c)


PRESETS = {
    "stationary": _stationary,
    "varying_mass": _varying_mass,
    "varying_frequency": _varying_frequency,
    "cosine_mass": _cosine_mass,
}


def preset(name, **params):
    """Build one of the named one-mode Hamiltonian families."""
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ArgumentError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ArgumentError(f"bad parameters for preset {name!r}: {exc}") from None


# JSON ---------------------------------------------------------------------


def schedule_from_dict(d):
    if not isinstance(d, dict) or "kind" not in d:
        raise ArgumentError("schedule must be an object with a 'kind' field")
    kind = d["kind"]
    try:
        if kind == "constant":
            return ConstantSchedule(d["value"])
        if kind == "exponential":
            return ExponentialSchedule(d["alpha"], float(d["beta"]))
        if kind == "harmonic":
            return HarmonicSchedule(
                d["alpha"], d["beta"], float(d["gamma"]), float(d.get("phi", 0.0))
            )
        if kind == "table":
            return TableSchedule(d["times"], d["values"], d.get("interp", "cubic"))
    except KeyError as exc:
        raise ArgumentError(f"schedule of kind {kind!r} is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ArgumentError):
            raise
        raise ArgumentError(f"malformed {kind!r} schedule: {exc}") from None
    raise ArgumentError(f"unknown schedule kind {kind!r}")


_LINEAR_KEYS = ("d", "e", "linear")


def hamiltonian_from_dict(d):
    """Parse the JSON Hamiltonian description (explicit blocks or a preset)."""
    if not isinstance(d, dict):
        raise ArgumentError("Hamiltonian description must be a JSON object")
    if any(k in d for k in _LINEAR_KEYS):
        raise ArgumentError(
            "linear Hamiltonian terms are not supported; displace the state mean instead"
        )
    if "preset" in d:
        params = {k: v for k, v in d.items() if k != "preset"}
        return preset(d["preset"], **params)
    for key in ("modes", "A", "B", "C"):
        if key not in d:
            raise ArgumentError(f"Hamiltonian description is missing {key!r}")
    return HamiltonianSpec(
        d["modes"],
        schedule_from_dict(d["A"]),
        schedule_from_dict(d["B"]),
        schedule_from_dict(d["C"]),
    )
