"""Monte Carlo hitting-probability estimation, parameter sweeps, and
power-law slope fitting against the theoretical reference curves.

Trials are seeded per (cell, batch): a cell is one grid point of a
sweep, batches are fixed contiguous trial-id ranges inside it.  Batch
streams are derived from the master seed and the cell parameters, so
any worker schedule produces identical rows and a single cell can be
recomputed in isolation.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .lattice import Point
from .powerlaw import make_law
from .search import FixedAlpha, assign_exponents, default_threads, make_rng
from .simulate import walk_hit_time, walk_hit_times

_TAG_CELL = 0xCE11

BATCH_TRIALS = 4096

# Reflections/rotations of the target direction (x, y) -> ...
_DIHEDRAL = [(1, 1, False), (1, 1, True), (-1, 1, False), (-1, 1, True),
             (1, -1, False), (1, -1, True), (-1, -1, False), (-1, -1, True)]

CSV_COLUMNS = ["alpha", "ell", "k", "budget", "trial", "hit_step", "exhausted"]


class FitDomainError(ValueError):
    """Power-law fits need at least three strictly positive points."""


@dataclass(frozen=True)
class HitEstimate:
    p_hat: float
    ci_lo: float
    ci_hi: float
    trials: int
    hits: int


@dataclass
class TrialRecord:
    trial: int
    alpha: float
    ell: int
    k: int
    budget: int
    hit_step: int | None
    wallclock: float = 0.0

    @property
    def exhausted(self) -> bool:
        return self.hit_step is None


@dataclass(frozen=True)
class TheoreticalBounds:
    """Scale factors entering the hitting-time bounds: mu and nu cap the
    inverse distances to the exponent's regime edges at ln(ell), gamma
    collects the polylog loss of the superdiffusive lower bound, and
    alpha_star = 3 - ln k/ln ell is the distance-aware optimum."""

    mu: float
    nu: float
    gamma: float
    alpha_star: float


@dataclass(frozen=True)
class ReferenceCurves:
    alpha: float
    bounds: TheoreticalBounds
    regime: str
    hit_prob_slope: float
    budget_rule: str

    def budget(self, ell: int, constant: float = 10.0) -> int:
        if self.regime == "ballistic":
            return max(1, int(constant * ell))
        if self.regime == "superdiffusive":
            return max(1, int(constant * ell ** (self.alpha - 1.0)))
        return max(1, int(constant * ell * ell * math.log(ell) ** 2))


def wilson_interval(hits: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = hits / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return lo, hi


def _cell_key(alpha: float, ell: int, k: int, budget: int) -> tuple[int, ...]:
    bits = int(np.float64(alpha).view(np.uint64))
    return (bits, int(ell), int(k), int(budget))


def _batch_rng(seed: int, key: tuple[int, ...], batch: int) -> np.random.Generator:
    return make_rng(seed, _TAG_CELL, *key, batch)


def _batch_bounds(trials: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + BATCH_TRIALS, trials)) for lo in range(0, trials, BATCH_TRIALS)]


def _run_cell_batch(args) -> np.ndarray:
    alpha, ell, k, budget, seed, batch_index, lo, hi, target, cap, strategy = args
    key = _cell_key(alpha, ell, k, budget)
    rng = _batch_rng(seed, key, batch_index)
    n = hi - lo
    if strategy is not None and not isinstance(strategy, FixedAlpha):
        # per-walker exponents: one law per walker, trial by trial
        out = np.full(n, -1, dtype=np.int64)
        for t in range(n):
            alphas = assign_exponents(strategy, k, ell_hint=max(ell, 3), rng=rng)
            best = -1
            for a in alphas:
                hit = walk_hit_time(make_law(float(a), cap=cap), target, budget, rng)
                if hit is not None and (best < 0 or hit < best):
                    best = hit
            out[t] = best
        return out
    if isinstance(strategy, FixedAlpha):
        alpha = strategy.alpha
    law = make_law(alpha, cap=cap)
    if k == 1:
        if target == "avg8":
            return _avg8_hit_times(law, ell, budget, n, rng)
        return walk_hit_times(law, target, budget, n, rng)
    # k walkers per trial, common exponent; the parallel hitting time is
    # the min over the walkers' individual hit steps.
    out = np.full(n, -1, dtype=np.int64)
    for w in range(k):
        hits = walk_hit_times(law, target, budget, n, rng)
        better = (hits >= 0) & ((out < 0) | (hits < out))
        out[better] = hits[better]
    return out


def _avg8_hit_times(law, ell, budget, n, rng) -> np.ndarray:
    # Spread trials over the 8 symmetric placements of the east target;
    # the law is not rotation invariant, so this averages direction bias.
    out = np.empty(n, dtype=np.int64)
    edges = np.linspace(0, n, num=9).astype(int)
    for (sx, sy, swap), lo, hi in zip(_DIHEDRAL, edges[:-1], edges[1:]):
        t = (0 * sx, ell * sy) if swap else (ell * sx, 0 * sy)
        out[lo:hi] = walk_hit_times(law, t, budget, hi - lo, rng)
    return out


def cell_hit_steps(alpha: float, ell: int, budget: int, trials: int, seed: int,
                   k: int = 1, target: Point | str | None = None,
                   cap: int | None = None, threads: int | None = None,
                   strategy=None) -> np.ndarray:
    """Hit steps (-1 when exhausted) for one sweep cell, batch-seeded."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if target is None:
        target = (ell, 0)
    jobs = [(alpha, ell, k, budget, seed, b, lo, hi, target, cap, strategy)
            for b, (lo, hi) in enumerate(_batch_bounds(trials))]
    threads = threads if threads is not None else default_threads()
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_cell_batch, jobs))
    else:
        parts = [_run_cell_batch(job) for job in jobs]
    return np.concatenate(parts)


def estimate_hit_prob(alpha: float, ell: int, budget: int, trials: int, seed: int,
                      average_directions: bool = False, cap: int | None = None,
                      threads: int | None = None) -> HitEstimate:
    """Fraction of walks hitting the distance-ell target within the
    budget, with a 95% Wilson interval.  Target sits due east unless
    direction averaging is requested."""
    target = "avg8" if average_directions else (ell, 0)
    steps = cell_hit_steps(alpha, ell, budget, trials, seed, target=target,
                           cap=cap, threads=threads)
    hits = int((steps >= 0).sum())
    lo, hi = wilson_interval(hits, trials)
    return HitEstimate(hits / trials, lo, hi, trials, hits)


@dataclass(frozen=True)
class SweepGrid:
    alphas: tuple[float, ...]
    ells: tuple[int, ...]
    ks: tuple[int, ...] = (1,)
    budgets: tuple[int, ...] = ()
    budget_constant: float = 10.0

    def cells(self):
        budgets = self.budgets
        for alpha, ell, k in itertools.product(self.alphas, self.ells, self.ks):
            if budgets:
                for budget in budgets:
                    yield alpha, ell, k, budget
            else:
                yield alpha, ell, k, _default_budget(alpha, ell, self.budget_constant)


def _default_budget(alpha: float, ell: int, constant: float) -> int:
    return reference_curves(alpha, max(ell, 3)).budget(ell, constant)


def sweep(grid: SweepGrid, trials: int, seed: int, out=None,
          strategy=None, threads: int | None = None) -> list[TrialRecord]:
    """TrialRecord rows for the full grid cross product, sorted by
    (cell, trial); optionally written as CSV to `out`.

    By default each cell runs fixed-exponent walkers at the cell's
    alpha; a non-fixed `strategy` (e.g. UniformRandomAlpha) replaces
    the exponent assignment, with the cell alpha kept as a row label.
    """
    cells = list(grid.cells())
    if not cells:
        raise ValueError("empty sweep grid")
    rows: list[TrialRecord] = []
    for alpha, ell, k, budget in cells:
        t0 = time.perf_counter()
        steps = cell_hit_steps(alpha, ell, budget, trials, seed, k=k,
                               threads=threads, strategy=strategy)
        elapsed = time.perf_counter() - t0
        for trial, s in enumerate(steps):
            rows.append(TrialRecord(trial=trial, alpha=alpha, ell=ell, k=k,
                                    budget=budget, hit_step=int(s) if s >= 0 else None,
                                    wallclock=elapsed / trials))
    if out is not None:
        write_rows_csv(out, rows)
    return rows


def write_rows_csv(out, rows: list[TrialRecord]) -> None:
    close = False
    if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
        fh = open(out, "w", newline="")
        close = True
    else:
        fh = out
    try:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([f"{r.alpha:.12g}", r.ell, r.k, r.budget, r.trial,
                             "" if r.hit_step is None else r.hit_step,
                             1 if r.hit_step is None else 0])
    finally:
        if close:
            fh.close()


def summarize_rows(rows: list[TrialRecord]) -> list[dict]:
    """Per-cell p_hat and Wilson interval from trial rows."""
    cells: dict[tuple, list[TrialRecord]] = {}
    for r in rows:
        cells.setdefault((r.alpha, r.ell, r.k, r.budget), []).append(r)
    out = []
    for (alpha, ell, k, budget), rs in sorted(cells.items()):
        hits = sum(1 for r in rs if r.hit_step is not None)
        lo, hi = wilson_interval(hits, len(rs))
        out.append({"alpha": alpha, "ell": ell, "k": k, "budget": budget,
                    "trials": len(rs), "hits": hits, "p_hat": hits / len(rs),
                    "ci_lo": lo, "ci_hi": hi})
    return out


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r2: float


def fit_power_law(points) -> PowerLawFit:
    """Least-squares fit of ln y = slope * ln x + intercept."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise FitDomainError("need at least 3 points")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise FitDomainError("points must be strictly positive")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 and ss_res < 1e-18 else 1.0 - ss_res / ss_tot if ss_tot else 0.0
    return PowerLawFit(float(slope), float(intercept), r2)


def reference_curves(alpha: float, ell: int, k: int = 1) -> ReferenceCurves:
    """Regime classification with the predicted hitting-probability
    scaling exponent at the regime's natural budget."""
    if ell < 3:
        raise ValueError("ell must be >= 3")
    log_ell = math.log(ell)
    mu = min(log_ell, 1.0 / abs(alpha - 2.0)) if alpha != 2.0 else log_ell
    nu = min(log_ell, 1.0 / abs(3.0 - alpha)) if alpha != 3.0 else log_ell
    gamma = log_ell ** (2.0 / (alpha - 1.0)) / (3.0 - alpha) ** 2 if alpha < 3.0 else log_ell ** (2.0 / (alpha - 1.0))
    alpha_star = 3.0 - math.log(k) / log_ell
    bounds = TheoreticalBounds(mu=mu, nu=nu, gamma=gamma, alpha_star=alpha_star)
    if alpha <= 2.0:
        regime, slope, rule = "ballistic", -1.0, "ell"
    elif alpha < 3.0:
        regime, slope, rule = "superdiffusive", -(3.0 - alpha), "ell**(alpha-1)"
    else:
        regime, slope, rule = "diffusive", 0.0, "ell**2 * ln(ell)**2"
    return ReferenceCurves(alpha=alpha, bounds=bounds, regime=regime,
                           hit_prob_slope=slope, budget_rule=rule)


def rows_to_json_summary(rows: list[TrialRecord]) -> str:
    summary = summarize_rows(rows)
    by_cell = {}
    for s in summary:
        by_cell.setdefault((s["alpha"], s["k"], s["budget"]), []).append(s)
    fits = []
    for (alpha, k, budget), group in sorted(by_cell.items()):
        pts = [(g["ell"], g["p_hat"]) for g in group if g["p_hat"] > 0]
        if len(pts) >= 3:
            fit = fit_power_law(pts)
            fits.append({"alpha": alpha, "k": k, "budget": budget,
                         "slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2})
    return json.dumps({"cells": summary, "fits": fits}, sort_keys=True)
