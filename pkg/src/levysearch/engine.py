"""Step processes on the grid: teleporting jumps and walked jumps.

The flight moves to each jump destination in a single step; the walk
traverses each jump along a uniformly random direct path, one lattice
edge per step (a zero-length jump is a one-step stay).  Both consume
identically ordered (length, destination) draws, so driving them from
the same stream couples them: the walk's phase-endpoint subsequence
equals the flight trajectory exactly.  Tie-breaking coins for the
walk's path interiors come from a separate stream, which keeps the
coupling intact.

Phases are never materialized: path nodes are recomputed layer by
layer, so arbitrarily long jumps stream in O(1) memory.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import Point, l1, ring_point
from .powerlaw import JumpLaw


class _Phase:
    """Lazy direct-path walker for one jump-phase.

    Yields the layer-i node of the sampled direct path without storing
    the path: the node is the exact-rounding minimizer at each layer,
    and `coin` decides the branch at the (isolated) two-way tie layers.
    A fair coin gives the uniform path law; a constant-False coin gives
    a fixed arbitrary direct path.
    """

    __slots__ = ("ox", "oy", "sx", "sy", "A", "d", "i", "xi")

    def __init__(self, start: Point, d: int, dest: Point):
        self.ox, self.oy = start
        dx, dy = dest[0] - start[0], dest[1] - start[1]
        self.sx = -1 if dx < 0 else 1
        self.sy = -1 if dy < 0 else 1
        self.A = abs(dx)
        self.d = d
        self.i = 0
        self.xi = 0

    def advance(self, coin) -> Point:
        i = self.i + 1
        q, r = divmod(i * self.A, self.d)
        if 2 * r == self.d:
            xi = q + (1 if coin() else 0)
        elif 2 * r > self.d:
            xi = q + 1
        else:
            xi = q
        if xi not in (self.xi, self.xi + 1):
            raise AssertionError("direct-path layers lost adjacency")
        self.i, self.xi = i, xi
        return (self.ox + self.sx * xi, self.oy + self.sy * (i - xi))

    @property
    def done(self) -> bool:
        return self.i >= self.d


class LevyFlight:
    """Jump process visiting only jump endpoints; one step per jump."""

    def __init__(self, law: JumpLaw, rng: np.random.Generator, start: Point = (0, 0)):
        self.law = law
        self.rng = rng
        self.position: Point = start
        self.steps = 0

    def step(self) -> Point:
        d = self.law.sample(self.rng)
        if d > 0:
            j = int(self.rng.integers(4 * d))
            self.position = ring_point(self.position, d, j)
        self.steps += 1
        return self.position


class LevyWalk:
    """Jump process walking each jump along a random direct path.

    Consecutive positions differ by at most one lattice edge; a phase of
    sampled length d >= 1 consumes exactly d steps, and d = 0 consumes
    one step in place.
    """

    def __init__(self, law: JumpLaw, rng: np.random.Generator, start: Point = (0, 0),
                 coin_rng: np.random.Generator | None = None, tie_rule: str = "random"):
        if tie_rule not in ("random", "low"):
            raise ValueError("tie_rule must be 'random' or 'low'")
        self.law = law
        self.rng = rng
        self.coin_rng = coin_rng if coin_rng is not None else rng
        self.tie_rule = tie_rule
        self.position: Point = start
        self.steps = 0
        self.phase_id = 0
        self._phase: _Phase | None = None

    def _coin(self) -> bool:
        if self.tie_rule == "low":
            return False
        return bool(self.coin_rng.integers(2))

    @property
    def at_phase_boundary(self) -> bool:
        return self._phase is None

    def step(self) -> Point:
        if self._phase is None:
            d = self.law.sample(self.rng)
            self.phase_id += 1
            if d == 0:
                self.steps += 1
                return self.position
            j = int(self.rng.integers(4 * d))
            dest = ring_point(self.position, d, j)
            self._phase = _Phase(self.position, d, dest)
        self.position = self._phase.advance(self._coin)
        if self._phase.done:
            self._phase = None
        self.steps += 1
        return self.position


@dataclass
class VisitCounter:
    """Counts visits per node, optionally restricted to a watched set."""

    watched: frozenset[Point] | None = None
    counts: dict[Point, int] = field(default_factory=dict)

    def observe(self, p: Point) -> None:
        if self.watched is None or p in self.watched:
            self.counts[p] = self.counts.get(p, 0) + 1

    def count(self, p: Point) -> int:
        return self.counts.get(p, 0)

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class HitOutcome:
    """First-visit result: hit_step is None when the budget ran out."""

    hit_step: int | None
    budget: int

    @property
    def exhausted(self) -> bool:
        return self.hit_step is None


def run_until_hit(process, target: Point, budget: int,
                  counter: VisitCounter | None = None) -> HitOutcome:
    """Run a process until it first visits `target` or uses up `budget`
    steps.  The starting position counts as the step-0 visit; the walk
    is checked at every lattice step, the flight at every endpoint.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if counter is not None:
        counter.observe(process.position)
    if process.position == target:
        return HitOutcome(0, budget)
    start_steps = process.steps
    while process.steps - start_steps < budget:
        pos = process.step()
        if counter is not None:
            counter.observe(pos)
        if pos == target:
            return HitOutcome(process.steps - start_steps, budget)
    return HitOutcome(None, budget)
