"""Levy walks on the infinite 2D grid: hitting-time simulation,
parallel search strategies, and exact small-scale verification."""

from .engine import HitOutcome, LevyFlight, LevyWalk, VisitCounter, run_until_hit
from .experiments import (HitEstimate, PowerLawFit, SweepGrid, TrialRecord,
                          estimate_hit_prob, fit_power_law, reference_curves,
                          sweep, wilson_interval)
from .lattice import (enumerate_direct_paths, intermediate_distribution, l1,
                      linf, ring, sample_direct_path, sample_on_ring)
from .powerlaw import DomainError, JumpLaw, make_law
from .search import (ConfigError, FixedAlpha, OptimalAlpha, ParallelOutcome,
                     SearchConfig, UniformRandomAlpha, assign_exponents,
                     run_parallel)

__all__ = [
    "HitOutcome", "LevyFlight", "LevyWalk", "VisitCounter", "run_until_hit",
    "HitEstimate", "PowerLawFit", "SweepGrid", "TrialRecord",
    "estimate_hit_prob", "fit_power_law", "reference_curves", "sweep",
    "wilson_interval", "enumerate_direct_paths", "intermediate_distribution",
    "l1", "linf", "ring", "sample_direct_path", "sample_on_ring",
    "DomainError", "JumpLaw", "make_law", "ConfigError", "FixedAlpha",
    "OptimalAlpha", "ParallelOutcome", "SearchConfig", "UniformRandomAlpha",
    "assign_exponents", "run_parallel",
]

__version__ = "0.1.0"
