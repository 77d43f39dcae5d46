"""Vectorized phase-level hitting-time simulation.

Walking a jump-phase step by step is equivalent, for first-hit
purposes, to deciding whether the target sits on the sampled direct
path: the target can only be visited at the layer equal to its L1
distance from the phase start, and the probability that a uniform
direct path passes through it is 1, 1/2 or 0 (forced layer node, tie
node, off the path).  Each phase therefore reduces to one Bernoulli
check, which lets whole batches of trials advance one phase per numpy
pass.  Distributional equivalence with the step-level walk is covered
by tests against the stepping engine and exact enumeration oracles.

Layer arithmetic is exact in int64; phases with jumps beyond 2**31 are
recomputed with Python integers (they are rare under any exponent).
"""
from __future__ import annotations

import numpy as np

from .lattice import Point, ring_offsets_array
from .powerlaw import JumpLaw

# Above this jump length, i * A no longer fits safely in int64.
_BIG_JUMP = 1 << 31

_DEFAULT_CHUNK = 2048


def _phase_hit(tx, ty, dx, dy, coin):
    """Per-phase hit test against a target at offset (tx, ty) from the
    phase start, for jumps (dx, dy); coin is the U(0,1) tie-breaker.

    Returns (hit, layer): hit is True when the sampled direct path
    visits the target; layer is its step offset within the phase.
    """
    i = np.abs(tx) + np.abs(ty)
    dlen = np.abs(dx) + np.abs(dy)
    rest = np.abs(dx - tx) + np.abs(dy - ty)
    on_box = (dlen >= 1) & (i >= 1) & (i + rest == dlen)

    safe = np.maximum(dlen, 1)
    num = i * np.abs(dx)
    q, r = np.divmod(num, safe)
    two_r = 2 * r
    xi = np.abs(tx)
    tie = two_r == safe
    forced = q + (two_r > safe)
    ratio = np.where(tie, np.where((xi == q) | (xi == q + 1), 0.5, 0.0),
                     (xi == forced).astype(np.float64))
    big = dlen > _BIG_JUMP
    if big.any():
        for k in np.flatnonzero(big):
            ratio[k] = _hit_ratio_exact(int(tx[k]), int(ty[k]), int(dx[k]), int(dy[k]))
    hit = on_box & (coin < ratio)
    return hit, i


def _hit_ratio_exact(tx: int, ty: int, dx: int, dy: int) -> float:
    """Python-integer version of the per-phase hit probability."""
    i = abs(tx) + abs(ty)
    dlen = abs(dx) + abs(dy)
    if dlen < 1 or i < 1 or i + abs(dx - tx) + abs(dy - ty) != dlen:
        return 0.0
    q, r = divmod(i * abs(dx), dlen)
    xi = abs(tx)
    if 2 * r == dlen:
        return 0.5 if xi in (q, q + 1) else 0.0
    forced = q + (1 if 2 * r > dlen else 0)
    return 1.0 if xi == forced else 0.0


def walk_hit_times(law: JumpLaw, target: Point, budget: int, trials: int,
                   rng: np.random.Generator) -> np.ndarray:
    """First-hit steps for a batch of independent walks from the origin.

    Returns an int64 array of length `trials`: the hit step in
    [0, budget], or -1 when the budget was exhausted first.
    """
    tx0, ty0 = int(target[0]), int(target[1])
    out = np.full(trials, -1, dtype=np.int64)
    if (tx0, ty0) == (0, 0):
        out[:] = 0
        return out
    px = np.zeros(trials, dtype=np.int64)
    py = np.zeros(trials, dtype=np.int64)
    used = np.zeros(trials, dtype=np.int64)
    alive = np.ones(trials, dtype=bool)
    while True:
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            return out
        d = law.sample(rng, idx.size)
        j = rng.integers(0, np.maximum(4 * d, 1))
        coin = rng.random(idx.size)
        dx, dy = ring_offsets_array(d, j)
        hit, layer = _phase_hit(tx0 - px[idx], ty0 - py[idx], dx, dy, coin)
        hit &= used[idx] + layer <= budget
        done = idx[hit]
        out[done] = used[done] + layer[hit]
        alive[done] = False
        cont = ~hit
        new_used = used[idx] + np.maximum(d, 1)
        exhausted = cont & (new_used >= budget)
        alive[idx[exhausted]] = False
        keep = cont & ~exhausted
        sub = idx[keep]
        px[sub] += dx[keep]
        py[sub] += dy[keep]
        used[sub] = new_used[keep]


def walk_hit_time(law: JumpLaw, target: Point, budget: int,
                  rng: np.random.Generator, chunk: int = _DEFAULT_CHUNK) -> int | None:
    """First-hit step of a single walk, drawing phases in chunks.

    Same law as walk_hit_times with trials=1; used when each walker has
    its own exponent and cross-trial batching is impossible.
    """
    tx0, ty0 = int(target[0]), int(target[1])
    if (tx0, ty0) == (0, 0):
        return 0
    x = y = 0
    used = 0
    while True:
        d = law.sample(rng, chunk)
        j = rng.integers(0, np.maximum(4 * d, 1))
        coin = rng.random(chunk)
        dx, dy = ring_offsets_array(d, j)
        # clip the per-phase step counts for the cumsum only: any clipped
        # phase crosses the budget anyway, and the clip keeps the cumsum
        # (and the position prefix below) inside int64 even for the
        # enormous jumps near alpha = 1
        steps = np.minimum(np.maximum(d, 1), budget + 1)
        cum = used + np.cumsum(steps)
        crossed = cum[-1] > budget
        limit = int(np.argmax(cum > budget)) + 1 if crossed else chunk
        d, j, coin = d[:limit], j[:limit], coin[:limit]
        dx, dy, steps, cum = dx[:limit], dy[:limit], steps[:limit], cum[:limit]
        before = cum - steps
        px = x + np.concatenate(([0], np.cumsum(dx)[:-1]))
        py = y + np.concatenate(([0], np.cumsum(dy)[:-1]))
        hit, layer = _phase_hit(tx0 - px, ty0 - py, dx, dy, coin)
        hit &= before + layer <= budget
        if hit.any():
            k = int(np.argmax(hit))
            return int(before[k] + layer[k])
        if int(cum[-1]) >= budget:
            return None
        x = int(px[-1] + dx[-1])
        y = int(py[-1] + dy[-1])
        used = int(cum[-1])
