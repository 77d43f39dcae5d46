"""Parallel k-walker search with exponent-assignment strategies.

Walkers are independent and share no state, so the parallel hitting
time is the minimum of the individual first-hit steps.  Per-walker
random streams are derived from (master_seed, walker id) through a
counter-based generator, which makes every outcome independent of the
execution schedule and of the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .lattice import Point, l1
from .powerlaw import make_law
from .simulate import walk_hit_time

# Stream tags keeping exponent assignment and walker trajectories apart.
_TAG_ALPHAS = 0xA1F
_TAG_WALKER = 0x3A1


class ConfigError(ValueError):
    """Invalid search configuration."""


@dataclass(frozen=True)
class FixedAlpha:
    alpha: float


@dataclass(frozen=True)
class OptimalAlpha:
    """Distance-aware exponent 3 - ln k/ln ell + coeff * ln ln ell/ln ell,
    clamped into the superdiffusive band (the correction term swamps the
    interval at small ell, where the asymptotic formula is meaningless)."""

    coeff: float = 5.0
    clamp: tuple[float, float] = (2.05, 2.95)


@dataclass(frozen=True)
class UniformRandomAlpha:
    """Each walker draws its own exponent uniformly from (lo, hi)."""

    lo: float = 2.0
    hi: float = 3.0


Strategy = FixedAlpha | OptimalAlpha | UniformRandomAlpha


def make_rng(*keys: int) -> np.random.Generator:
    """Counter-based generator keyed by a tuple of integers."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(keys))))


def assign_exponents(strategy: Strategy, k: int, ell_hint: int | None = None,
                     rng: np.random.Generator | None = None) -> np.ndarray:
    """Exponent per walker, as an array of length k."""
    if k < 1:
        raise ConfigError("k must be >= 1")
    if isinstance(strategy, FixedAlpha):
        return np.full(k, float(strategy.alpha))
    if isinstance(strategy, OptimalAlpha):
        if ell_hint is None:
            raise ConfigError("OptimalAlpha requires a distance hint")
        if ell_hint < 3:
            raise ConfigError("OptimalAlpha requires ell_hint >= 3")
        log_ell = math.log(ell_hint)
        alpha = 3.0 - math.log(k) / log_ell + strategy.coeff * math.log(log_ell) / log_ell
        lo, hi = strategy.clamp
        return np.full(k, min(max(alpha, lo), hi))
    if isinstance(strategy, UniformRandomAlpha):
        if rng is None:
            raise ConfigError("UniformRandomAlpha requires an rng")
        out = rng.uniform(strategy.lo, strategy.hi, size=k)
        while (out == strategy.lo).any():
            redraw = out == strategy.lo
            out[redraw] = rng.uniform(strategy.lo, strategy.hi, size=int(redraw.sum()))
        return out
    raise ConfigError(f"unknown strategy {strategy!r}")


@dataclass(frozen=True)
class SearchConfig:
    k: int
    target: Point
    budget: int
    master_seed: int
    strategy: Strategy
    threads: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")


@dataclass
class ParallelOutcome:
    """hit_step is the parallel hitting time (min over walkers), absent
    when every walker exhausted its budget; winner is the lowest walker
    id achieving it."""

    hit_step: int | None
    winner: int | None
    per_walker: list[tuple[float, int | None]] = field(default_factory=list)


def walker_exponents(config: SearchConfig) -> np.ndarray:
    rng = make_rng(config.master_seed, _TAG_ALPHAS)
    ell = l1(config.target)
    return assign_exponents(config.strategy, config.k,
                            ell_hint=ell if ell >= 1 else None, rng=rng)


def _run_walker(args) -> int | None:
    alpha, target, budget, master_seed, walker_id = args
    law = make_law(alpha)
    rng = make_rng(master_seed, _TAG_WALKER, walker_id)
    return walk_hit_time(law, target, budget, rng)


def run_parallel(config: SearchConfig) -> ParallelOutcome:
    """Run all k walkers to min(budget, first hit) and min-reduce.

    Ties go to the lowest walker id.  Output is identical for any
    thread count because aggregation is a pure minimum over per-walker
    results keyed by walker id.
    """
    alphas = walker_exponents(config)
    jobs = [(float(alphas[w]), config.target, config.budget, config.master_seed, w)
            for w in range(config.k)]
    if config.threads > 1 and config.k > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            hits = list(pool.map(_run_walker, jobs, chunksize=max(1, config.k // (4 * config.threads))))
    else:
        hits = [_run_walker(job) for job in jobs]
    per_walker = [(float(alphas[w]), hits[w]) for w in range(config.k)]
    best: int | None = None
    winner: int | None = None
    for w, h in enumerate(hits):
        if h is not None and (best is None or h < best):
            best, winner = h, w
    return ParallelOutcome(hit_step=best, winner=winner, per_walker=per_walker)


def any_hit_within(config: SearchConfig) -> bool:
    """Whether some walker hits within the budget; walkers are scanned
    in id order and the scan stops at the first success, which does not
    change the event (each walker's stream is keyed by its id)."""
    alphas = walker_exponents(config)
    for w in range(config.k):
        if _run_walker((float(alphas[w]), config.target, config.budget,
                        config.master_seed, w)) is not None:
            return True
    return False


def default_threads() -> int:
    env = os.environ.get("LEVY_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1
