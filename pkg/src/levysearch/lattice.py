"""Geometry of the square grid Z^2: norms, rings, and direct paths.

A direct path from u to v is a shortest lattice path whose node at
distance i from u is a closest lattice point (among the radius-i ring)
to the point of the real segment uv at distance i.  Closest-point
comparisons are done in exact integer arithmetic (distances scaled by
the total length), so ties are detected exactly rather than through
floating-point rounding.

Structure of the tie layers (derived here, verified by the enumeration
oracle): after reflecting into the first quadrant, the ring nodes at
layer i that can minimize are (j, i - j), and the squared distance to
the segment point is 2 (j - i A / d)^2 where A = |dx|.  The minimizer
is the rounding of i A / d, with a two-way tie exactly when the
fraction is a half-integer.  Tie layers are isolated, both tie nodes
connect to the forced neighbors on either side, so the direct paths
are in bijection with independent binary choices at the tie layers and
their number is 2**(#tie layers).
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

Point = tuple[int, int]

ORIGIN: Point = (0, 0)

# Exhaustive path enumeration is an oracle for small scales only.
ENUMERATION_MAX_DISTANCE = 24


class OracleScaleError(ValueError):
    """Request exceeds the exhaustive-enumeration scale bound."""


def l1(u: Point, v: Point = ORIGIN) -> int:
    return abs(u[0] - v[0]) + abs(u[1] - v[1])


def linf(u: Point, v: Point = ORIGIN) -> int:
    return max(abs(u[0] - v[0]), abs(u[1] - v[1]))


def ring_size(d: int) -> int:
    return 1 if d == 0 else 4 * d


def ball_size(d: int) -> int:
    return 2 * d * d + 2 * d + 1


def square_size(d: int) -> int:
    return (2 * d + 1) ** 2


def ring_point(u: Point, d: int, index: int) -> Point:
    """The `index`-th node of the radius-d ring around u.

    Order is fixed: index 0 is due east, proceeding counter-clockwise.
    """
    if d == 0:
        return u
    q, r = divmod(index, d)
    if q == 0:
        dx, dy = d - r, r
    elif q == 1:
        dx, dy = -r, d - r
    elif q == 2:
        dx, dy = r - d, -r
    else:
        dx, dy = r, r - d
    return (u[0] + dx, u[1] + dy)


def ring(u: Point, d: int) -> list[Point]:
    """All nodes at L1 distance exactly d from u, in ring_point order."""
    if d == 0:
        return [u]
    return [ring_point(u, d, j) for j in range(4 * d)]


def ring_offsets_array(d: np.ndarray, index: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ring_point offsets for d >= 1 (entries with d = 0 yield 0)."""
    safe = np.maximum(d, 1)
    q, r = np.divmod(index, safe)
    dx = np.select([q == 0, q == 1, q == 2], [d - r, -r, r - d], default=r)
    dy = np.select([q == 0, q == 1, q == 2], [r, d - r, -r], default=r - d)
    zero = d == 0
    return np.where(zero, 0, dx), np.where(zero, 0, dy)


def sample_on_ring(u: Point, d: int, rng: np.random.Generator) -> Point:
    """Uniform node of the radius-d ring, without materializing it."""
    if d < 1:
        raise ValueError("sample_on_ring requires d >= 1; d = 0 means stay")
    return ring_point(u, d, int(rng.integers(4 * d)))


def _normalize(u: Point, v: Point) -> tuple[int, int, int, int]:
    """Reflect v - u into the closed first quadrant.

    Returns (A, B, sx, sy) with A = |dx|, B = |dy| and sign factors
    mapping quadrant coordinates back: actual = (u0 + sx*x, u1 + sy*y).
    """
    dx, dy = v[0] - u[0], v[1] - u[1]
    sx = -1 if dx < 0 else 1
    sy = -1 if dy < 0 else 1
    return abs(dx), abs(dy), sx, sy


def minimizer_set(u: Point, v: Point, i: int) -> list[Point]:
    """Nodes of the radius-i ring around u closest (in Euclidean norm) to
    the segment point at L1 distance i from u; exact integer comparison.

    Requires 1 <= i < l1(u, v); returns one or two nodes.
    """
    d = l1(u, v)
    if not 1 <= i < d:
        raise ValueError("minimizer_set requires 1 <= i < l1(u, v)")
    A, B, sx, sy = _normalize(u, v)
    num = i * A
    j0 = num // d
    candidates = {j0, j0 + (1 if num % d else 0)}
    # d^2-scaled squared distance of (j, i - j) to (iA/d, iB/d).
    best = None
    best_js: list[int] = []
    for j in sorted(candidates):
        dist = (j * d - i * A) ** 2 + ((i - j) * d - i * B) ** 2
        if best is None or dist < best:
            best, best_js = dist, [j]
        elif dist == best:
            best_js.append(j)
    return [(u[0] + sx * j, u[1] + sy * (i - j)) for j in best_js]


def minimizer_set_bruteforce(u: Point, v: Point, i: int) -> list[Point]:
    """Oracle variant of minimizer_set: scan the whole radius-i ring."""
    d = l1(u, v)
    if not 1 <= i < d:
        raise ValueError("requires 1 <= i < l1(u, v)")
    dx, dy = v[0] - u[0], v[1] - u[1]
    best = None
    best_pts: list[Point] = []
    for p in ring(u, i):
        # d^2 * ||p - w_i||^2 with w_i = u + (i/d)(v - u), all integers.
        ex = (p[0] - u[0]) * d - i * dx
        ey = (p[1] - u[1]) * d - i * dy
        dist = ex * ex + ey * ey
        if best is None or dist < best:
            best, best_pts = dist, [p]
        elif dist == best:
            best_pts.append(p)
    return best_pts


def tie_layers(u: Point, v: Point) -> list[int]:
    """Layers 1 <= i < l1(u,v) whose minimizer set has two nodes."""
    A, _, _, _ = _normalize(u, v)
    d = l1(u, v)
    return [i for i in range(1, d) if 2 * ((i * A) % d) == d]


def count_direct_paths(u: Point, v: Point) -> int:
    """Number of direct paths from u to v (1 for u = v)."""
    if u == v:
        return 1
    return 2 ** len(tie_layers(u, v))


def enumerate_direct_paths(u: Point, v: Point) -> list[list[Point]]:
    """Every direct path from u to v, by exhaustive layer products.

    Adjacency between consecutive layer choices is checked, not assumed;
    an empty result would contradict the existence of a direct path and
    is reported as an error.  Oracle-scale only (l1 <= 24).
    """
    d = l1(u, v)
    if d > ENUMERATION_MAX_DISTANCE:
        raise OracleScaleError(f"enumeration limited to l1 <= {ENUMERATION_MAX_DISTANCE}")
    if d == 0:
        return [[u]]
    layers = [[u]] + [minimizer_set(u, v, i) for i in range(1, d)] + [[v]]
    paths: list[list[Point]] = []

    def extend(prefix: list[Point], layer: int) -> None:
        if layer == len(layers):
            paths.append(prefix.copy())
            return
        for node in layers[layer]:
            if l1(prefix[-1], node) == 1:
                prefix.append(node)
                extend(prefix, layer + 1)
                prefix.pop()

    extend([u], 1)
    if not paths:
        raise AssertionError(f"no direct path between {u} and {v}: broken adjacency")
    return paths


def sample_direct_path(u: Point, v: Point, rng: np.random.Generator) -> list[Point]:
    """Uniform direct path from u to v via forward/backward counting on
    the layer DAG (nodes: minimizer-set members, edges: grid adjacency)."""
    d = l1(u, v)
    if d == 0:
        return [u]
    layers = [[u]] + [minimizer_set(u, v, i) for i in range(1, d)] + [[v]]
    counts: list[dict[Point, int]] = [{u: 1}]
    for layer in layers[1:]:
        prev = counts[-1]
        cur: dict[Point, int] = {}
        for node in layer:
            c = sum(c for p, c in prev.items() if l1(p, node) == 1)
            if c:
                cur[node] = c
        counts.append(cur)
    path = [v]
    for layer_counts in reversed(counts[:-1]):
        here = path[-1]
        choices = [(p, c) for p, c in layer_counts.items() if l1(p, here) == 1]
        total = sum(c for _, c in choices)
        if total == 1 or len(choices) == 1:
            path.append(choices[0][0])
            continue
        pick = int(rng.integers(total))
        acc = 0
        for p, c in choices:
            acc += c
            if pick < acc:
                path.append(p)
                break
    path.reverse()
    return path


def direct_path_visit_bounds(d: int, i: int) -> tuple[Fraction, Fraction]:
    """Exact bounds floor(d/i)/(4d) <= P(path node at layer i = w)
    <= ceil(d/i)/(4d) for a uniform destination and uniform path."""
    lo = Fraction(d // i, 4 * d)
    hi = Fraction(-(-d // i), 4 * d)
    return lo, hi


def intermediate_distribution(u: Point, d: int, i: int) -> dict[Point, Fraction]:
    """Exact law of the layer-i node of a uniform direct path to a
    uniform destination at distance d, by full enumeration.

    Rational arithmetic throughout; probabilities over the radius-i
    ring sum to exactly 1.
    """
    if not 1 <= i < d:
        raise ValueError("requires 1 <= i < d")
    if d > ENUMERATION_MAX_DISTANCE:
        raise OracleScaleError(f"enumeration limited to d <= {ENUMERATION_MAX_DISTANCE}")
    out: dict[Point, Fraction] = {}
    for v in ring(u, d):
        paths = enumerate_direct_paths(u, v)
        share = Fraction(1, 4 * d * len(paths))
        for path in paths:
            node = path[i]
            out[node] = out.get(node, Fraction(0)) + share
    return out


def dump_intermediate_csv(path, d_max: int) -> None:
    """Audit dump of the enumeration oracle: d,i,w_x,w_y,p_num,p_den."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["d", "i", "w_x", "w_y", "p_num", "p_den"])
        for d in range(2, d_max + 1):
            for i in range(1, d):
                dist = intermediate_distribution(ORIGIN, d, i)
                for (x, y), p in sorted(dist.items()):
                    writer.writerow([d, i, x, y, p.numerator, p.denominator])
