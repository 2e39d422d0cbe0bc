"""Closed-form transition predictions and the Monte-Carlo sweep harness."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .detect import detectability, partition
from .eigen import SolverConfig, leading_eigenpair
from .graph import EmptyGraphError
from .modularity import ModularityOperator, community_view, restricted_quadform
from .sbm import SbmParams, derive_seed, generate


def theoretical_threshold(p1: float, p2: float) -> float:
    """Critical inter-community probability sqrt(p1 p2)."""
    for q in (p1, p2):
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"{q} is not a probability")
    return math.sqrt(p1 * p2)


def subcritical_lambda_over_n(p1: float, p2: float, p: float, c: float) -> float:
    """Limit of lambda_max(B)/n below the threshold, with c = n1/n2.

    (p1 p2 - p^2) / (c p1 + 2 p + p2 / c); negative above the threshold,
    where callers clamp it at 0.
    """
    if not c > 0:
        raise ValueError("size ratio c must be positive")
    denom = c * p1 + 2.0 * p + p2 / c
    if not denom > 0:
        raise ValueError("denominator c*p1 + 2p + p2/c must be positive")
    return (p1 * p2 - p * p) / denom


def eigvec_entry_limits(n1: int, n2: int) -> tuple[float, float]:
    """Limiting |entry| of the leading eigenvector on each community."""
    if n1 < 1 or n2 < 1:
        raise ValueError("community sizes must be >= 1")
    n = n1 + n2
    return math.sqrt(n2 / (n * n1)), math.sqrt(n1 / (n * n2))


def predicted_lambda_over_n(p1: float, p2: float, p: float, c: float) -> float:
    return max(0.0, subcritical_lambda_over_n(p1, p2, p, c))


@dataclass(frozen=True)
class TheoryPoint:
    p_star: float
    lambda_over_n_subcritical: float
    y1_entry_limit: float
    y2_entry_limit: float


def theory_point(params: SbmParams) -> TheoryPoint:
    y1, y2 = eigvec_entry_limits(params.n1, params.n2)
    p_star = theoretical_threshold(params.p1, params.p2)
    # sqrt(p1 p2)**2 need not round back to p1 p2
    if params.p == p_star:
        lam = 0.0
    else:
        lam = subcritical_lambda_over_n(params.p1, params.p2, params.p, params.n1 / params.n2)
    return TheoryPoint(p_star, lam, y1, y2)


@dataclass(frozen=True)
class TrialResult:
    p_index: int
    trial: int
    seed: int
    converged: bool
    iterations: int
    residual: float
    lambda_over_n: float
    detectability: float
    y1_sum: float
    y2_sum: float
    y1_entry_scaled: float
    y2_entry_scaled: float
    restricted_quadform: float  # (|y1'B1y1| + |y2'B2y2|) / n, nan if a block is edgeless


@dataclass(frozen=True)
class SweepRecord:
    p: float
    trials: int
    trials_ok: int
    excluded: int
    valid: bool
    pred_lambda_over_n: float
    mean_lambda_over_n: float
    std_lambda_over_n: float
    mean_detectability: float
    std_detectability: float
    mean_y1_sum: float
    std_y1_sum: float
    mean_y2_sum: float
    std_y2_sum: float
    mean_y1_entry_scaled: float
    std_y1_entry_scaled: float
    mean_y2_entry_scaled: float
    std_y2_entry_scaled: float
    max_restricted_quadform: float
    results: tuple[TrialResult, ...] = ()


def trial_seed(master_seed: int, p_index: int, trial: int) -> int:
    """Seed of one sweep cell; recomputable without running the others."""
    return derive_seed("trial", int(master_seed), int(p_index), int(trial))


def run_trial(
    params: SbmParams,
    seed: int,
    cfg: SolverConfig,
    method: str = "sign",
    p_index: int = 0,
    trial: int = 0,
) -> TrialResult:
    sample = generate(params, seed)
    g, n1, n2, n = sample.graph, params.n1, params.n2, params.n
    try:
        op = ModularityOperator(g)
    except EmptyGraphError:
        nan = float("nan")
        return TrialResult(p_index, trial, seed, False, 0, nan, nan, nan, nan, nan, nan, nan, nan)
    res = leading_eigenpair(op, cfg)
    y = res.y
    # orient so community 1 carries the positive block sum
    if y[:n1].sum() < 0:
        y = -y
    y1, y2 = y[:n1], y[n1:]
    score = detectability(partition(y, method), sample.truth)
    try:
        v1 = community_view(g, np.arange(n1))
        v2 = community_view(g, np.arange(n1, n))
        quad = (abs(restricted_quadform(g, v1, y1)) + abs(restricted_quadform(g, v2, y2))) / n
    except EmptyGraphError:
        quad = float("nan")
    return TrialResult(
        p_index=p_index,
        trial=trial,
        seed=seed,
        converged=res.converged,
        iterations=res.iterations,
        residual=res.residual,
        lambda_over_n=res.lambda_max / n,
        detectability=score,
        y1_sum=float(y1.sum()),
        y2_sum=float(y2.sum()),
        y1_entry_scaled=math.sqrt(n * n1 / n2) * float(y1.mean()),
        y2_entry_scaled=math.sqrt(n * n2 / n1) * float(y2.mean()),
        restricted_quadform=quad,
    )


def _run_cell(args) -> TrialResult:
    return run_trial(*args)


def _aggregate(p: float, params: SbmParams, results: list[TrialResult]) -> SweepRecord:
    ok = [r for r in results if r.converged]

    def stats(field):
        if not ok:
            return float("nan"), float("nan")
        v = np.array([getattr(r, field) for r in ok])
        return float(v.mean()), float(v.std())

    quads = [r.restricted_quadform for r in ok if not math.isnan(r.restricted_quadform)]
    lam, det = stats("lambda_over_n"), stats("detectability")
    s1, s2 = stats("y1_sum"), stats("y2_sum")
    e1, e2 = stats("y1_entry_scaled"), stats("y2_entry_scaled")
    return SweepRecord(
        p=p,
        trials=len(results),
        trials_ok=len(ok),
        excluded=len(results) - len(ok),
        valid=bool(ok),
        pred_lambda_over_n=predicted_lambda_over_n(params.p1, params.p2, p, params.n1 / params.n2),
        mean_lambda_over_n=lam[0],
        std_lambda_over_n=lam[1],
        mean_detectability=det[0],
        std_detectability=det[1],
        mean_y1_sum=s1[0],
        std_y1_sum=s1[1],
        mean_y2_sum=s2[0],
        std_y2_sum=s2[1],
        mean_y1_entry_scaled=e1[0],
        std_y1_entry_scaled=e1[1],
        mean_y2_entry_scaled=e2[0],
        std_y2_entry_scaled=e2[1],
        max_restricted_quadform=max(quads) if quads else float("nan"),
        results=tuple(results),
    )


def run_sweep(
    base: SbmParams,
    p_grid: Sequence[float],
    trials: int,
    master_seed: int,
    cfg: SolverConfig | None = None,
    method: str = "sign",
    workers: int = 1,
) -> list[SweepRecord]:
    """One record per grid point; ``base.p`` is ignored.

    Cells run in any order on ``workers`` processes, but each cell's seed
    depends only on (master_seed, p_index, trial) and results are merged in
    grid order, so output does not depend on the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if len(p_grid) == 0:
        raise ValueError("p_grid is empty")
    cfg = cfg or SolverConfig()
    cells = []
    for i, p in enumerate(p_grid):
        params = replace(base, p=float(p))
        for t in range(trials):
            cells.append((params, trial_seed(master_seed, i, t), cfg, method, i, t))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, cells, chunksize=max(1, len(cells) // (4 * workers))))
    else:
        results = [_run_cell(c) for c in cells]

    return [
        _aggregate(float(p), base, results[i * trials:(i + 1) * trials])
        for i, p in enumerate(p_grid)
    ]


def p_grid(p_min: float, p_max: float, p_step: float) -> list[float]:
    """Inclusive grid p_min, p_min + step, ..., rounded to 12 decimals."""
    if not p_step > 0:
        raise ValueError("p step must be positive")
    if p_min > p_max:
        raise ValueError("p min exceeds p max")
    count = int(math.floor((p_max - p_min) / p_step + 1e-9)) + 1
    return [round(p_min + k * p_step, 12) for k in range(count)]


def crossing_bracket(records: Sequence[SweepRecord], level: float = 0.75) -> tuple[float, float] | None:
    """First grid interval where mean detectability falls below ``level``."""
    rows = [r for r in records if r.valid]
    for a, b in zip(rows, rows[1:]):
        if a.mean_detectability >= level > b.mean_detectability:
            return a.p, b.p
    return None


def intermediate_width(records: Sequence[SweepRecord], lo: float = 0.6, hi: float = 0.95) -> float:
    """Length of the p-range where the piecewise-linear detectability curve
    lies strictly between ``lo`` and ``hi``."""
    rows = [r for r in records if r.valid]
    width = 0.0
    for a, b in zip(rows, rows[1:]):
        pa, pb, da, db = a.p, b.p, a.mean_detectability, b.mean_detectability
        if da == db:
            width += (pb - pa) if lo < da < hi else 0.0
            continue
        # parameter t in [0, 1] where the segment value is in (lo, hi)
        t_lo, t_hi = sorted(((lo - da) / (db - da), (hi - da) / (db - da)))
        t0, t1 = max(0.0, t_lo), min(1.0, t_hi)
        if t1 > t0:
            width += (t1 - t0) * (pb - pa)
    return width
