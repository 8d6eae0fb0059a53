"""Truncated Fock-space reference for single-mode squeezing (test-only).

Builds a, a^dagger on a ``dim``-level truncation, applies
``exp[r (a^dagger^2 - a^2) / 2]`` to the vacuum with scipy's dense expm and
reads off the quadrature moments with q = (a + a^dagger)/sqrt(2),
p = (a - a^dagger)/(i sqrt(2)).
"""

import numpy as np
from scipy.linalg import expm


def ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def squeezed_vacuum_moments(r, dim=60):
    """Return ``(var_p, var_q, cov_pq)`` of the squeezed vacuum."""
    a = ladder(dim)
    ad = a.conj().T
    S = expm(0.5 * r * (ad @ ad - a @ a))
    psi = S[:, 0]
    q = (a + ad) / np.sqrt(2.0)
    p = (a - ad) / (1j * np.sqrt(2.0))

    def mean(op):
        return psi.conj() @ op @ psi

    mq, mp = mean(q), mean(p)
    var_q = (mean(q @ q) - mq**2).real
    var_p = (mean(p @ p) - mp**2).real
    cov = (0.5 * mean(p @ q + q @ p) - mp * mq).real
    return float(var_p), float(var_q), float(cov)
