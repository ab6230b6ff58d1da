"""Search for the channel in a parametrized family whose output retains the
most integrated information.

The search is derivative-free: quasi-random (Sobol) restarts inside the
closed parameter box, coordinate-wise golden-section ascent per restart, and
a final polish from the best endpoint. Everything is deterministic for a
fixed seed, budget and restart count.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.stats import qmc

from .channels import (
    KrausChannel,
    LocalChannel,
    apply_channel,
    apply_local,
    dephasing,
    depolarizing,
    partial_trace_channel,
)
from .errors import BadBudget, BadParameter, GridTooLarge
from .phi import phi as phi_fn
from .search import golden_max
from .states import DensityMatrix, as_layout, substream

ChannelLike = Union[KrausChannel, LocalChannel]


@dataclass(frozen=True)
class ChannelFamily:
    """A box-parametrized family of channels acting on a fixed input layout."""

    kind: str
    box: tuple[tuple[float, float], ...]
    builder: Callable[[np.ndarray], ChannelLike]
    local: bool
    # layouts cannot be inferred when a channel shrinks the system; families
    # that change dimensions report the output layout per parameter point
    out_layout: Optional[Callable[[np.ndarray], tuple]] = None

    def __post_init__(self):
        for lo, hi in self.box:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise BadParameter(f"malformed parameter interval ({lo}, {hi})")

    @property
    def n_params(self) -> int:
        return len(self.box)

    def instantiate(self, params: Sequence[float]) -> ChannelLike:
        p = np.asarray(params, dtype=float)
        if p.shape != (self.n_params,):
            raise BadParameter(f"expected {self.n_params} parameters, got shape {p.shape}")
        for x, (lo, hi) in zip(p, self.box):
            if x < lo - 1e-12 or x > hi + 1e-12:
                raise BadParameter(f"parameter {x} outside [{lo}, {hi}]")
        return self.builder(p)

    def apply(self, params: Sequence[float], rho: DensityMatrix) -> DensityMatrix:
        ch = self.instantiate(params)
        if isinstance(ch, LocalChannel):
            return apply_local(ch, rho)
        lay = None
        if self.out_layout is not None:
            lay = self.out_layout(np.asarray(params, dtype=float))
        return apply_channel(ch, rho, lay)


def local_dephasing_family(layout) -> ChannelFamily:
    """Per-qubit basis dephasing; parameters are (theta_i, phi_i) per site."""
    lay = as_layout(layout)
    if any(d != 2 for d in lay.dims):
        raise BadParameter("dephasing family is defined for qubit layouts")
    box = tuple(((0.0, np.pi), (0.0, 2.0 * np.pi))[k % 2] for k in range(2 * lay.n))

    def build(p: np.ndarray) -> LocalChannel:
        return LocalChannel(tuple(dephasing(p[2 * i], p[2 * i + 1]) for i in range(lay.n)))

    return ChannelFamily(kind="localDephasing", box=box, builder=build, local=True)


def local_depolarizing_family(layout) -> ChannelFamily:
    lay = as_layout(layout)
    box = tuple((0.0, 1.0) for _ in range(lay.n))

    def build(p: np.ndarray) -> LocalChannel:
        return LocalChannel(tuple(depolarizing(float(x), d) for x, d in zip(p, lay.dims)))

    return ChannelFamily(kind="localDepolarizing", box=box, builder=build, local=True)


def partial_trace_family(layout) -> ChannelFamily:
    """Discrete family over the drop sets that leave at least two subsystems.

    The single parameter is a continuous index rounded to the nearest choice,
    so the same search machinery applies.
    """
    lay = as_layout(layout)
    n = lay.n
    drops: list[tuple[int, ...]] = []
    for mask in range(1, 1 << n):
        drop = tuple(i for i in range(n) if mask >> i & 1)
        if n - len(drop) >= 2:
            drops.append(drop)
    if not drops:
        raise BadParameter("no drop set leaves two subsystems to cut")

    def pick(p: np.ndarray) -> tuple[int, ...]:
        k = int(round(float(p[0])))
        k = min(max(k, 0), len(drops) - 1)
        return drops[k]

    def build(p: np.ndarray) -> KrausChannel:
        return partial_trace_channel(lay, pick(p))

    def kept_layout(p: np.ndarray):
        drop = set(pick(p))
        return tuple(d for i, d in enumerate(lay.dims) if i not in drop)

    return ChannelFamily(
        kind="partialTrace",
        box=((0.0, float(len(drops) - 1)),),
        builder=build,
        local=False,
        out_layout=kept_layout,
    )


def custom_family(box, builder, local: bool = False, kind: str = "custom") -> ChannelFamily:
    return ChannelFamily(kind=kind, box=tuple(tuple(b) for b in box), builder=builder, local=local)


@dataclass(frozen=True)
class ObserverResult:
    best_params: tuple[float, ...]
    phi_before: float
    phi_after: float
    ratio: float
    evaluations: int
    trace: tuple[tuple[tuple[float, ...], float], ...]
    near_optimal: tuple[tuple[float, ...], ...]  # endpoints within 1e-6 of the best value


def _phi_of_output(rho: DensityMatrix, family: ChannelFamily, params: np.ndarray, mode: str) -> float:
    out = family.apply(params, rho)
    return phi_fn(out, mode).phi


def maximize_phi(
    rho: DensityMatrix,
    family: ChannelFamily,
    budget: int = 2000,
    restarts: int = 8,
    seed: int = 0,
    mode: str = "marginal",
    line_iters: int = 24,
) -> ObserverResult:
    """Maximize phi(F(rho)) over the family's parameter box.

    ``budget`` caps the number of objective evaluations; each of the
    ``restarts`` Sobol starting points receives an equal share, and whatever
    remains funds a final polish around the incumbent.
    """
    if budget < 1:
        raise BadBudget(f"budget must be >= 1, got {budget}")
    if restarts < 1:
        raise BadParameter(f"restarts must be >= 1, got {restarts}")
    phi_before = phi_fn(rho, mode).phi
    lows = np.array([b[0] for b in family.box])
    highs = np.array([b[1] for b in family.box])

    evals = 0
    log: list[tuple[tuple[float, ...], float]] = []

    def objective(p: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        v = _phi_of_output(rho, family, p, mode)
        log.append((tuple(float(x) for x in p), v))
        return v

    # Sobol points; draw a power-of-two block and slice to avoid balance warnings
    sob = qmc.Sobol(d=family.n_params, scramble=True, seed=substream(seed, "observer-starts"))
    m = 1
    while m < restarts:
        m *= 2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        unit = sob.random(m)[:restarts]
    starts = lows + unit * (highs - lows)

    per_restart = max(budget // restarts, family.n_params + 1)

    def ascend(p0: np.ndarray, eval_cap: int) -> tuple[np.ndarray, float]:
        p = np.array(p0, dtype=float)
        f_cur = objective(p)
        spent = 1
        while spent < eval_cap and evals < budget:
            f_pass_start = f_cur
            for c in range(p.size):
                if spent >= eval_cap or evals >= budget:
                    break
                pc = p[c]

                def g(t: float) -> float:
                    p[c] = t
                    return objective(p)

                # a line search costs iters + 4 evaluations; never start one
                # that would blow past either the restart share or the budget
                room = min(eval_cap - spent, budget - evals)
                if room < 5:
                    break
                iters = min(line_iters, room - 4)
                t_best, f_best, used = golden_max(g, lows[c], highs[c], iters)
                spent += used
                if f_best > f_cur:
                    p[c] = t_best
                    f_cur = f_best
                else:
                    p[c] = pc
            if f_cur - f_pass_start < 1e-12:
                break
        return p, f_cur

    best_p: Optional[np.ndarray] = None
    best_f = -np.inf
    for r in range(restarts):
        if evals >= budget:
            break
        p, f = ascend(starts[r], per_restart)
        if f > best_f:
            best_f, best_p = f, p
    if best_p is None:
        best_p = starts[0]
        best_f = objective(best_p)
    if evals < budget:
        p, f = ascend(best_p, budget - evals)
        if f > best_f:
            best_f, best_p = f, p

    near = tuple(
        params for params, v in log if best_f - v <= 1e-6
    )
    ratio = best_f / phi_before if phi_before > 0 else 0.0
    return ObserverResult(
        best_params=tuple(float(x) for x in best_p),
        phi_before=phi_before,
        phi_after=best_f,
        ratio=ratio,
        evaluations=evals,
        trace=tuple(log),
        near_optimal=near,
    )


@dataclass(frozen=True)
class SpectrumResult:
    axes: tuple[tuple[int, int], ...]         # (parameter index, point count)
    params: tuple[tuple[float, ...], ...]      # row-major over the axes
    values: tuple[float, ...]
    phi_input: float
    fraction_retaining_half: float


def observer_spectrum(
    rho: DensityMatrix,
    family: ChannelFamily,
    axes: Sequence[tuple[int, int]],
    fixed: Optional[dict] = None,
    cap: int = 1 << 16,
    mode: str = "marginal",
) -> SpectrumResult:
    """Evaluate phi(F(rho)) on a dense grid over one or two parameters.

    Non-axis parameters sit at the box midpoint unless pinned via ``fixed``.
    """
    if not 1 <= len(axes) <= 2:
        raise BadParameter("spectrum grids cover one or two parameters")
    total = 1
    for idx, npts in axes:
        if not (0 <= idx < family.n_params):
            raise BadParameter(f"axis parameter {idx} out of range")
        if npts < 2:
            raise BadParameter("each axis needs at least 2 points")
        total *= npts
    if total > cap:
        raise GridTooLarge(f"grid of {total} points exceeds cap {cap}")
    fixed = dict(fixed or {})
    base = np.array([(lo + hi) / 2.0 for lo, hi in family.box])
    for k, v in fixed.items():
        base[int(k)] = float(v)
    grids = [
        np.linspace(family.box[idx][0], family.box[idx][1], npts) for idx, npts in axes
    ]
    phi_before = phi_fn(rho, mode).phi
    params_out: list[tuple[float, ...]] = []
    values: list[float] = []
    if len(axes) == 1:
        combos = ((i,) for i in range(len(grids[0])))
    else:
        combos = ((i, j) for i in range(len(grids[0])) for j in range(len(grids[1])))
    for combo in combos:
        p = base.copy()
        for (idx, _), gi, ci in zip(axes, grids, combo):
            p[idx] = gi[ci]
        v = _phi_of_output(rho, family, p, mode)
        params_out.append(tuple(float(x) for x in p))
        values.append(v)
    vals = np.array(values)
    frac = float(np.mean(vals >= 0.5 * phi_before)) if phi_before > 0 else 1.0
    return SpectrumResult(
        axes=tuple((int(i), int(npts)) for i, npts in axes),
        params=tuple(params_out),
        values=tuple(float(v) for v in values),
        phi_input=phi_before,
        fraction_retaining_half=frac,
    )
