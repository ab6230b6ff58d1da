"""Integrated information of a multipartite state.

Phi is the minimum quantum Jensen-Shannon divergence between the state and a
product state across a bipartition. ``marginal`` mode scores every cut with
the literal product of its marginals; ``optimized`` mode additionally refines
the product factors on the winning cut(s) by alternating coordinate descent in
an exponential (log-density) parametrization.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .divergence import qjsd, delta
from .errors import (
    BadParameter,
    InvalidPartition,
    SearchBudgetExceeded,
    SingleSubsystem,
)
from .search import golden_min
from .states import (
    Bipartition,
    DensityMatrix,
    assemble_on_subsets,
    enumerate_bipartitions,
    partial_trace,
    product_of_block_marginals,
    product_of_marginals,
)

TIE_TOL = 1e-9
DEFAULT_N_CAP = 12
REFINE_IMPROVEMENT_TOL = 1e-10
REFINE_MAX_PASSES = 500


@dataclass(frozen=True)
class PhiResult:
    """Outcome of a Phi evaluation.

    ``phi`` is the headline value for the requested mode; ``phi_marginal``
    always carries the plain product-of-marginals minimum, and
    ``phi_refined`` the descent value (optimized mode only).
    """

    phi: float
    optimal_cut: Bipartition
    sigma_star: DensityMatrix
    per_cut: tuple[tuple[Bipartition, float], ...]
    ties: tuple[Bipartition, ...]
    mode: str
    phi_marginal: float
    phi_refined: Optional[float] = None
    refinement_spread: Optional[float] = None

    @property
    def tie_count(self) -> int:
        return len(self.ties)


@dataclass(frozen=True)
class PartitionKBlocks:
    """A partition of range(n) into k >= 2 blocks, canonically ordered by minimum."""

    blocks: tuple[frozenset[int], ...]
    n: int

    def __post_init__(self):
        blocks = tuple(frozenset(int(i) for i in b) for b in self.blocks)
        if len(blocks) < 2:
            raise InvalidPartition("a partition needs at least 2 blocks")
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise InvalidPartition("empty block")
            if any(i < 0 or i >= self.n for i in b):
                raise InvalidPartition(f"block {sorted(b)} out of range for n={self.n}")
            if seen & b:
                raise InvalidPartition("blocks must be disjoint")
            seen |= b
        if seen != set(range(self.n)):
            raise InvalidPartition("blocks must cover every subsystem")
        blocks = tuple(sorted(blocks, key=min))
        object.__setattr__(self, "blocks", blocks)

    @property
    def k(self) -> int:
        return len(self.blocks)


def as_partition(blocks, n: int) -> PartitionKBlocks:
    if isinstance(blocks, PartitionKBlocks):
        return blocks
    return PartitionKBlocks(tuple(frozenset(b) for b in blocks), n)


def divergence_for_partition(rho: DensityMatrix, blocks) -> float:
    """QJSD between the state and the product of its block marginals."""
    p = as_partition(blocks, rho.n)
    return qjsd(rho, product_of_block_marginals(rho, [sorted(b) for b in p.blocks]))


def enumerate_partitions(n: int, max_n: int = 6) -> list[PartitionKBlocks]:
    """Every set partition of range(n) with at least two blocks."""
    if n > max_n:
        raise BadParameter(f"exhaustive partition enumeration capped at n={max_n}")
    out: list[PartitionKBlocks] = []

    def rec(i: int, blocks: list[list[int]]):
        if i == n:
            if len(blocks) >= 2:
                out.append(PartitionKBlocks(tuple(frozenset(b) for b in blocks), n))
            return
        for b in blocks:
            b.append(i)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    return out


def merge_blocks(p: PartitionKBlocks, i: int, j: int) -> PartitionKBlocks:
    if i == j or not (0 <= i < p.k) or not (0 <= j < p.k):
        raise InvalidPartition(f"cannot merge blocks {i} and {j} of a {p.k}-block partition")
    merged = [set(b) for b in p.blocks]
    merged[min(i, j)] |= merged[max(i, j)]
    del merged[max(i, j)]
    return PartitionKBlocks(tuple(frozenset(b) for b in merged), p.n)


def merge_inequality_check(rho: DensityMatrix, p: PartitionKBlocks, i: int, j: int):
    """Divergence before and after merging two blocks; coarsening should not increase it."""
    if p.k < 3:
        raise InvalidPartition("merging requires at least 3 blocks")
    before = divergence_for_partition(rho, p)
    after = divergence_for_partition(rho, merge_blocks(p, i, j))
    return before, after


# ---------------------------------------------------------------------------
# optimized-mode refinement

def _herm_params(d: int) -> int:
    return d * d


def _herm_from_reals(x: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=complex)
    idx = 0
    for i in range(d):
        h[i, i] = x[idx]
        idx += 1
    for i in range(d):
        for j in range(i + 1, d):
            h[i, j] = x[idx] + 1j * x[idx + 1]
            h[j, i] = x[idx] - 1j * x[idx + 1]
            idx += 2
    return h


def _reals_from_herm(h: np.ndarray) -> np.ndarray:
    d = h.shape[0]
    x = np.empty(d * d)
    idx = 0
    for i in range(d):
        x[idx] = h[i, i].real
        idx += 1
    for i in range(d):
        for j in range(i + 1, d):
            x[idx] = h[i, j].real
            x[idx + 1] = h[i, j].imag
            idx += 2
    return x


def _density_from_log(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    e = np.exp(w - w.max())
    m = (v * e) @ v.conj().T
    return m / np.real(np.trace(m))


def _log_of_density(mat: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, floor, None)
    return (v * np.log(w)) @ v.conj().T


def _refine_product(
    rho: DensityMatrix,
    cut: Bipartition,
    max_passes: int = REFINE_MAX_PASSES,
    improvement_tol: float = REFINE_IMPROVEMENT_TOL,
    x0: Optional[np.ndarray] = None,
):
    """Minimize qjsd(rho, sigma_A (x) sigma_B) over product states on the cut.

    Factors are parametrized as exp(H)/tr exp(H) with H Hermitian; descent is
    coordinate-wise golden-section starting from the marginals, so the result
    never exceeds the marginal-mode value.
    """
    a_idx, b_idx = cut.as_lists()
    da = int(np.prod([rho.dims[i] for i in a_idx]))
    db = int(np.prod([rho.dims[i] for i in b_idx]))
    na = _herm_params(da)

    def build(x: np.ndarray) -> DensityMatrix:
        ha = _herm_from_reals(x[:na], da)
        hb = _herm_from_reals(x[na:], db)
        return assemble_on_subsets(
            [_density_from_log(ha), _density_from_log(hb)], [a_idx, b_idx], rho.layout
        )

    def f(x: np.ndarray) -> float:
        return qjsd(rho, build(x))

    if x0 is None:
        ha0 = _log_of_density(np.asarray(partial_trace(rho, a_idx).mat))
        hb0 = _log_of_density(np.asarray(partial_trace(rho, b_idx).mat))
        x = np.concatenate([_reals_from_herm(ha0), _reals_from_herm(hb0)])
    else:
        x = np.array(x0, dtype=float)
    fx = f(x)
    radius = 1.0
    passes = 0
    for _ in range(int(max_passes)):
        passes += 1
        f_start = fx
        for c in range(x.size):
            xc = x[c]

            def g(t: float) -> float:
                x[c] = t
                return f(x)

            t_best, f_best, _ = golden_min(g, xc - radius, xc + radius, iters=22)
            if f_best < fx:
                x[c] = t_best
                fx = f_best
            else:
                x[c] = xc
        radius = max(radius * 0.5, 1e-4)
        if f_start - fx < improvement_tol:
            break
    return fx, build(x), passes, x


# ---------------------------------------------------------------------------
# the headline quantity

def phi(
    rho: DensityMatrix,
    mode: str = "marginal",
    *,
    n_cap: int = DEFAULT_N_CAP,
    tie_tol: float = TIE_TOL,
    probe_starts: int = 0,
    probe_seed: int = 0,
) -> PhiResult:
    """Integrated information of the state, minimized over canonical bipartitions.

    ``probe_starts`` (optimized mode) reruns the descent from that many
    perturbed initializations and records the spread of the resulting optima,
    as a uniqueness diagnostic.
    """
    if mode not in ("marginal", "optimized"):
        raise BadParameter(f"unknown mode {mode!r}")
    n = rho.n
    if n < 2:
        raise SingleSubsystem("phi needs at least two subsystems")
    if n > n_cap:
        raise SearchBudgetExceeded(f"n={n} exceeds the configured cap {n_cap}")
    cuts = enumerate_bipartitions(n)
    per_cut = []
    for cut in cuts:
        per_cut.append((cut, qjsd(rho, product_of_marginals(rho, cut))))
    vmin = min(v for _, v in per_cut)
    ties = tuple(c for c, v in per_cut if v <= vmin + tie_tol)
    optimal = ties[0]
    if mode == "marginal":
        return PhiResult(
            phi=vmin,
            optimal_cut=optimal,
            sigma_star=product_of_marginals(rho, optimal),
            per_cut=tuple(per_cut),
            ties=ties,
            mode=mode,
            phi_marginal=vmin,
        )
    best = None
    for cut in ties:
        val, sigma, _passes, xopt = _refine_product(rho, cut)
        if best is None or val < best[0]:
            best = (val, cut, sigma, xopt)
    val, cut, sigma, xopt = best
    spread = None
    if probe_starts > 0:
        rng = np.random.default_rng(probe_seed)
        devs = []
        for _ in range(int(probe_starts)):
            x_init = xopt + 0.05 * rng.standard_normal(xopt.size)
            v2, s2, _, _ = _refine_product(rho, cut, x0=x_init)
            devs.append(float(np.max(np.abs(np.asarray(s2.mat) - np.asarray(sigma.mat)))))
        spread = max(devs)
    return PhiResult(
        phi=val,
        optimal_cut=cut,
        sigma_star=sigma,
        per_cut=tuple(per_cut),
        ties=ties,
        mode=mode,
        phi_marginal=vmin,
        phi_refined=val,
        refinement_spread=spread,
    )


def min_over_partitions(rho: DensityMatrix, max_n: int = 6):
    """Exhaustive minimum of the partition divergence over every k >= 2 partition.

    Returns (best_value, best_partition); used to confirm that bipartitions
    already attain the global minimum.
    """
    best: Optional[tuple[float, PartitionKBlocks]] = None
    for p in enumerate_partitions(rho.n, max_n=max_n):
        v = divergence_for_partition(rho, p)
        if best is None or v < best[0]:
            best = (v, p)
    return best


# ---------------------------------------------------------------------------
# empirical checkers (convexity is measured, not assumed)

@dataclass(frozen=True)
class ConvexityReport:
    t_grid: tuple[float, ...]
    violations: tuple[float, ...]  # phi(mix) - [t phi1 + (1-t) phi2], positive = violation
    max_violation: float


def convexity_check(
    rho1: DensityMatrix,
    rho2: DensityMatrix,
    t_grid: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
    mode: str = "marginal",
) -> ConvexityReport:
    if rho1.dims != rho2.dims:
        raise BadParameter("states must share a layout")
    p1 = phi(rho1, mode).phi
    p2 = phi(rho2, mode).phi
    viol = []
    for t in t_grid:
        if not 0.0 <= t <= 1.0:
            raise BadParameter(f"mixing weight {t} outside [0, 1]")
        mix = DensityMatrix(
            rho1.layout, t * np.asarray(rho1.mat) + (1.0 - t) * np.asarray(rho2.mat)
        )
        viol.append(phi(mix, mode).phi - (t * p1 + (1.0 - t) * p2))
    mx = max(viol)
    return ConvexityReport(tuple(float(t) for t in t_grid), tuple(viol), mx)


@dataclass(frozen=True)
class LipschitzReport:
    lhs: float  # |sqrt(phi1) - sqrt(phi2)|
    rhs: float  # delta(rho1, rho2)
    violation: float  # lhs - rhs


def lipschitz_check(rho1: DensityMatrix, rho2: DensityMatrix, mode: str = "marginal") -> LipschitzReport:
    """Compares the sqrt-phi gap against the state distance (1-Lipschitz bound)."""
    if rho1.dims != rho2.dims:
        raise BadParameter("states must share a layout")
    p1 = max(phi(rho1, mode).phi, 0.0)
    p2 = max(phi(rho2, mode).phi, 0.0)
    lhs = abs(float(np.sqrt(p1)) - float(np.sqrt(p2)))
    rhs = delta(rho1, rho2)
    return LipschitzReport(lhs=lhs, rhs=rhs, violation=lhs - rhs)
