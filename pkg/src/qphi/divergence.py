"""Von Neumann entropy, quantum Jensen-Shannon divergence, and the derived metric.

All values are in nats (natural log). The square root of the divergence is a
metric on states; ln 2 minus the divergence behaves like a similarity kernel,
whose Gram spectrum is reported (not asserted) by :func:`negative_type_check`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import LayoutMismatch, NumericalBreakdown, TooFewStates
from .states import DensityMatrix, rng_from

LN2 = float(np.log(2.0))

_EIG_ZERO_TOL = 1e-10  # eigenvalues in [-tol, 0) count as exact zeros
_EIG_FAIL_TOL = 1e-9   # anything below this is a numerical breakdown


def entropy_of_spectrum(eigs: np.ndarray) -> float:
    """-sum(p ln p) over the spectrum, with 0 ln 0 == 0."""
    w = np.asarray(eigs, dtype=float)
    lo = float(w.min()) if w.size else 0.0
    if lo < -_EIG_FAIL_TOL:
        raise NumericalBreakdown(f"eigenvalue {lo:.3e} below -{_EIG_FAIL_TOL}")
    w = np.clip(w, 0.0, None)
    pos = w[w > 0.0]
    return float(-np.sum(pos * np.log(pos)))


def von_neumann_entropy(rho: Union[DensityMatrix, np.ndarray]) -> float:
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return entropy_of_spectrum(np.linalg.eigvalsh(mat))


def qjsd(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Jensen-Shannon divergence S((rho+sigma)/2) - S(rho)/2 - S(sigma)/2, in nats.

    Symmetric and bounded by ln 2; zero iff the states coincide. Tiny negative
    values (order 1e-16) can appear from eigensolver round-off and are returned
    as computed.
    """
    if rho.dims != sigma.dims:
        raise LayoutMismatch(f"layouts differ: {rho.dims} vs {sigma.dims}")
    mid = (np.asarray(rho.mat) + np.asarray(sigma.mat)) / 2.0
    s_mid = von_neumann_entropy(mid)
    return s_mid - 0.5 * von_neumann_entropy(rho) - 0.5 * von_neumann_entropy(sigma)


def delta(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """The metric sqrt(qjsd); obeys the triangle inequality."""
    return float(np.sqrt(max(qjsd(rho, sigma), 0.0)))


def qjsd_gram(states: Sequence[DensityMatrix]) -> np.ndarray:
    """Pairwise divergence matrix (symmetric, zero diagonal)."""
    m = len(states)
    if m < 2:
        raise TooFewStates(f"need at least 2 states, got {m}")
    dims0 = states[0].dims
    for s in states[1:]:
        if s.dims != dims0:
            raise LayoutMismatch("all states in an ensemble must share a layout")
    ent = [von_neumann_entropy(s) for s in states]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            mid = (np.asarray(states[i].mat) + np.asarray(states[j].mat)) / 2.0
            d = von_neumann_entropy(mid) - 0.5 * ent[i] - 0.5 * ent[j]
            out[i, j] = out[j, i] = d
    return out


@dataclass(frozen=True)
class GramReport:
    """Outcome of a negative-type probe over one ensemble."""

    size: int
    trials: int
    negative_type_max: float      # max of a.D.a over zero-sum unit vectors; <= 0 expected
    kernel_min_eigenvalue: float  # min eigenvalue of the shifted Gram ln2 - D (report only)


def negative_type_check(states: Sequence[DensityMatrix], trials: int, seed) -> GramReport:
    """Sample zero-sum coefficient vectors a and record max a.D.a.

    Conditional negative-definiteness of the divergence matrix shows up as the
    max staying <= 0 (up to float slack); the shifted-kernel eigenvalue is
    informational only.
    """
    dmat = qjsd_gram(states)
    m = dmat.shape[0]
    rng = rng_from(seed)
    worst = -np.inf
    for _ in range(int(trials)):
        a = rng.standard_normal(m)
        a -= a.mean()
        nrm = float(np.linalg.norm(a))
        if nrm < 1e-12:
            continue
        a /= nrm
        worst = max(worst, float(a @ dmat @ a))
    if not np.isfinite(worst):
        worst = 0.0
    kernel = LN2 - dmat
    min_eig = float(np.linalg.eigvalsh((kernel + kernel.T) / 2.0)[0])
    return GramReport(size=m, trials=int(trials), negative_type_max=worst,
                      kernel_min_eigenvalue=min_eig)
