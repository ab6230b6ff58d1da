"""Petz transpose-channel recovery and the blanket scan built on it.

``petz_recover`` rebuilds the ``rebuild`` subsystems through the ``blanket``
from the state with ``rebuild`` traced out: exact whenever the blanket
mediates all correlations (products, classical Markov chains), lossy when
coherence bypasses it.

``blanket_scan`` scores each candidate blanket Z by the divergence between
the state and (recovered conditional on the complement) tensor (blanket
marginal) — the reconstruction achievable from Z alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .divergence import qjsd
from .errors import (
    BadParameter,
    BadSize,
    DisjointnessViolation,
    IndexOutOfRange,
    SupportBreakdown,
)
from .phi import phi as phi_fn
from .states import (
    DensityMatrix,
    SubsystemLayout,
    assemble_on_subsets,
    partial_trace,
    validate_state,
)

PINV_CUTOFF = 1e-12
TRACE_DRIFT_TOL = 1e-8


def _sqrt_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def _invsqrt_psd(mat: np.ndarray, cutoff: float = PINV_CUTOFF) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    inv = np.where(w > cutoff, 1.0 / np.sqrt(np.clip(w, cutoff, None)), 0.0)
    return (v * inv) @ v.conj().T


def _embed(op: np.ndarray, op_idx: list[int], space_idx: list[int], layout: SubsystemLayout) -> np.ndarray:
    """Operator acting as ``op`` on op_idx and identity on the rest of space_idx.

    Both index lists hold original subsystem labels in ascending order.
    """
    rest = [i for i in space_idx if i not in op_idx]
    d_rest = int(np.prod([layout.dims[i] for i in rest])) if rest else 1
    big = np.kron(op, np.eye(d_rest, dtype=complex))
    cur = list(op_idx) + rest
    dims_cur = [layout.dims[i] for i in cur]
    n = len(cur)
    order = [cur.index(s) for s in space_idx]
    t = big.reshape(tuple(dims_cur) * 2)
    axes = order + [n + i for i in order]
    d = int(np.prod(dims_cur))
    return np.ascontiguousarray(t.transpose(axes)).reshape(d, d)


def _check_subsets(rho: DensityMatrix, blanket: Iterable[int], rebuild: Iterable[int]):
    n = rho.n
    z = sorted(set(int(i) for i in blanket))
    y = sorted(set(int(i) for i in rebuild))
    if not z or not y:
        raise BadParameter("blanket and rebuild sets must both be non-empty")
    for i in z + y:
        if i < 0 or i >= n:
            raise IndexOutOfRange(f"subsystem index {i} out of range for n={n}")
    if set(z) & set(y):
        raise DisjointnessViolation(f"blanket {z} and rebuild {y} overlap")
    return z, y


def petz_recover(
    rho: DensityMatrix,
    blanket: Iterable[int],
    rebuild: Iterable[int],
    cutoff: float = PINV_CUTOFF,
) -> DensityMatrix:
    """Reconstruct the full state with ``rebuild`` regenerated through ``blanket``.

    Applies rho_{YZ}^{1/2} (rho_Z^{-1/2} . rho_Z^{-1/2} (x) I_Y) rho_{YZ}^{1/2}
    to the marginal without Y, with pseudo-inverses on the support of rho_Z
    (eigenvalues below ``cutoff`` are treated as zero). The output is
    renormalized when its trace drifts by at most 1e-8 and rejected otherwise.
    """
    z, y = _check_subsets(rho, blanket, rebuild)
    n = rho.n
    a = [i for i in range(n) if i not in z and i not in y]
    az = sorted(a + z)
    yz = sorted(y + z)
    lay = rho.layout

    rho_z = np.asarray(partial_trace(rho, z).mat)
    rho_yz = np.asarray(partial_trace(rho, yz).mat)
    rho_az = np.asarray(partial_trace(rho, az).mat)

    inv_on_az = _embed(_invsqrt_psd(rho_z, cutoff), z, az, lay)
    mid_az = inv_on_az @ rho_az @ inv_on_az
    mid_full = _embed(mid_az, az, list(range(n)), lay)
    sq_full = _embed(_sqrt_psd(rho_yz), yz, list(range(n)), lay)
    out = sq_full @ mid_full @ sq_full

    tr = float(np.real(np.trace(out)))
    if abs(tr - 1.0) > TRACE_DRIFT_TOL:
        raise SupportBreakdown(
            f"recovered trace {tr} drifted more than {TRACE_DRIFT_TOL} from 1"
        )
    out = out / tr
    return validate_state(out, lay)


def recovered_conditional(rho: DensityMatrix, blanket: Iterable[int]) -> DensityMatrix:
    """The state on the blanket's complement as recovered from the blanket alone.

    Runs the recovery sandwich on the blanket marginal and traces the blanket
    back out; correlations that do not pass through the blanket are lost.
    """
    n = rho.n
    z = sorted(set(int(i) for i in blanket))
    y = [i for i in range(n) if i not in z]
    full = petz_recover(rho, z, y)
    return partial_trace(full, y)


@dataclass(frozen=True)
class BlanketResult:
    target_size: int
    scores: tuple[tuple[tuple[int, ...], float], ...]  # canonical subset order
    argmin: tuple[int, ...]
    optimal_cut_side: tuple[int, ...]
    matches_optimal_cut_side: bool


def blanket_scan(rho: DensityMatrix, target_size: int, mode: str = "marginal") -> BlanketResult:
    """Score every size-``target_size`` subset Z as a candidate blanket.

    score(Z) = qjsd(rho, recovered_conditional (x) blanket marginal); zero
    exactly when Z shields the rest, i.e. the state factorizes across Z.
    The argmin subset is compared against the smaller side of the phi-optimal
    cut (reported, not asserted).
    """
    n = rho.n
    if not 1 <= target_size <= n - 1:
        raise BadSize(f"target size {target_size} outside [1, {n - 1}]")
    res = phi_fn(rho, mode)
    a_side, b_side = res.optimal_cut.as_lists()
    smaller = tuple(a_side) if len(a_side) <= len(b_side) else tuple(b_side)

    scores: list[tuple[tuple[int, ...], float]] = []
    for zc in combinations(range(n), target_size):
        z = list(zc)
        y = [i for i in range(n) if i not in zc]
        cond = recovered_conditional(rho, z)
        rho_z = partial_trace(rho, z)
        sigma = assemble_on_subsets(
            [np.asarray(cond.mat), np.asarray(rho_z.mat)], [y, z], rho.layout
        )
        scores.append((zc, qjsd(rho, sigma)))
    vmin = min(v for _, v in scores)
    argmin = next(zc for zc, v in scores if v <= vmin + 1e-12)
    return BlanketResult(
        target_size=int(target_size),
        scores=tuple(scores),
        argmin=argmin,
        optimal_cut_side=smaller,
        matches_optimal_cut_side=(set(argmin) == set(smaller)),
    )
