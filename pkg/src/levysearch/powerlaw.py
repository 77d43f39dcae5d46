"""Heavy-tailed integer jump lengths for grid walks.

The jump length is 0 with probability 1/2 and i >= 1 with probability
c_alpha / i**alpha.  Summing to one forces c_alpha = 1 / (2 zeta(alpha)).
zeta(alpha) is evaluated from a partial sum plus a rigorous integral-test
bracket, so the normalization carries a certified error bound instead of
relying on a library special function.

An optional cap L restricts the law to {0..L} and renormalizes, i.e. the
law conditioned on the jump being at most L.

Sampling is exact: inversion on a cumulative table up to a horizon, and
an analytic Pareto-envelope rejection step for the tail beyond it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

ALPHA_FLOOR = 1.01
DEFAULT_TABLE_HORIZON = 4096
PRECISION_HORIZON = 1 << 16

# Probability of a zero-length jump (a one-step stay for walked processes).
P_STAY = 0.5


class DomainError(ValueError):
    """Parameter outside the supported domain."""


def integral_tail_bracket(alpha: float, start: int) -> tuple[float, float]:
    """Bracket sum_{k>=start} k**-alpha between the integral from `start`
    and the same integral plus the first term (plain integral test)."""
    if start < 1:
        raise DomainError("bracket start must be >= 1")
    lo = start ** (1.0 - alpha) / (alpha - 1.0)
    return lo, lo + start ** (-alpha)


def sharp_tail_bracket(alpha: float, start: int) -> tuple[float, float]:
    """Tighter bracket for sum_{k>=start} k**-alpha.

    x**-alpha is convex and decreasing, so the trapezoid rule gives the
    lower bound (integral from start, plus half of the first term) and
    the midpoint rule the upper bound (integral from start - 1/2);
    intersected with the plain bracket, which is tighter near start = 1.
    Width is ~ (alpha/8) * start**-(alpha+1) for large start.
    """
    plain_lo, plain_hi = integral_tail_bracket(alpha, start)
    lo = plain_lo + 0.5 * start ** (-alpha)
    hi = (start - 0.5) ** (1.0 - alpha) / (alpha - 1.0)
    return max(lo, plain_lo), min(hi, plain_hi)


def zeta_bracket(alpha: float, horizon: int = PRECISION_HORIZON,
                 sharp: bool = True) -> tuple[float, float]:
    """Bracket zeta(alpha) = sum_{k>=1} k**-alpha.

    The bracket is widened by a pairwise-summation error allowance so
    it also covers floating-point rounding of the partial sum."""
    if alpha < ALPHA_FLOOR:
        raise DomainError(f"alpha must be >= {ALPHA_FLOOR}, got {alpha}")
    partial = float(np.sum(np.arange(1, horizon + 1, dtype=np.float64) ** (-alpha)))
    bracket = sharp_tail_bracket if sharp else integral_tail_bracket
    t_lo, t_hi = bracket(alpha, horizon + 1)
    fp_err = 4.0 * np.finfo(np.float64).eps * partial * math.log2(horizon + 2)
    return partial + t_lo - fp_err, partial + t_hi + fp_err


def mass_bracket(alpha: float, horizon: int = 10 ** 6) -> tuple[float, float]:
    """Bracket the total pmf mass 1/2 + c_alpha * zeta(alpha) using only
    partial sums and the plain integral-test bracket.

    The bracket must contain 1 by construction; its width certifies the
    accuracy of the normalization pipeline.
    """
    z_lo, z_hi = zeta_bracket(alpha, horizon, sharp=False)
    return 0.5 + z_lo / (2.0 * z_hi), 0.5 + z_hi / (2.0 * z_lo)


@dataclass
class JumpLaw:
    """Integer jump-length law with exponent `alpha` and optional `cap`.

    Immutable after construction; safe to share across threads.  Random
    streams are always owned by the caller.
    """

    alpha: float
    cap: int | None
    c_alpha: float
    zeta_lo: float
    zeta_hi: float
    table_horizon: int
    # P(d <= i) for i = 0..table_horizon (already renormalized if capped).
    cdf_table: np.ndarray
    # Renormalization constant: P_uncapped(d <= cap), 1.0 when uncapped.
    cap_mass: float
    _suffix: np.ndarray | None = field(default=None, repr=False)

    # -- evaluation ---------------------------------------------------

    def pmf(self, i):
        """P(d = i); accepts an int or an integer array."""
        i_arr = np.asarray(i)
        with np.errstate(divide="ignore"):
            vals = np.where(
                i_arr == 0,
                P_STAY,
                self.c_alpha * np.where(i_arr >= 1, i_arr, 1).astype(float) ** (-self.alpha),
            )
        if self.cap is not None:
            vals = np.where(i_arr <= self.cap, vals / self.cap_mass, 0.0)
        if np.isscalar(i) or i_arr.ndim == 0:
            return float(vals)
        return vals

    def tail(self, i: int) -> float:
        """P(d >= i) for i >= 1, certified to bracket width <= 1e-12
        (uncapped; the capped value inherits the same accuracy)."""
        if i < 1:
            raise DomainError("tail is defined for i >= 1")
        t = self._raw_tail(i)
        if self.cap is None:
            return t
        if i > self.cap:
            return 0.0
        return (t - self._raw_tail(self.cap + 1)) / self.cap_mass

    def tail_bracket(self, i: int) -> tuple[float, float]:
        """Certified bracket for the uncapped P(d >= i).

        Evaluated as 0.5 * (sum_{k>=i} k**-alpha) / zeta so that
        tail(1) is the exact complement of pmf(0)."""
        if i == 1:
            return 1.0 - P_STAY, 1.0 - P_STAY
        zeta_mid = 0.5 * (self.zeta_lo + self.zeta_hi)
        suffix = self._suffix_table()
        if i <= PRECISION_HORIZON:
            base = float(suffix[i])
            lo, hi = sharp_tail_bracket(self.alpha, PRECISION_HORIZON + 1)
        else:
            base = 0.0
            lo, hi = sharp_tail_bracket(self.alpha, i)
        # 80-bit cumulative summation error allowance
        fp_err = 2.0 * PRECISION_HORIZON * float(np.finfo(np.longdouble).eps) \
            * float(suffix[1])
        return (0.5 * max(base + lo - fp_err, 0.0) / zeta_mid,
                0.5 * (base + hi + fp_err) / zeta_mid)

    def _raw_tail(self, i: int) -> float:
        lo, hi = self.tail_bracket(i)
        return 0.5 * (lo + hi)

    def _suffix_table(self) -> np.ndarray:
        # sum_{k=i}^{H} k**-alpha in 80-bit floats, accumulated from the
        # small end so the absolute error stays far below 1e-12.
        if self._suffix is None:
            powers = np.arange(1, PRECISION_HORIZON + 1, dtype=np.longdouble) ** (
                -np.longdouble(self.alpha)
            )
            suffix = np.zeros(PRECISION_HORIZON + 2, dtype=np.longdouble)
            suffix[1:-1] = np.cumsum(powers[::-1])[::-1]
            object.__setattr__(self, "_suffix", suffix)
        return self._suffix

    def mean_step(self) -> float:
        """Expected lattice steps consumed by one jump-phase, E[max(d, 1)];
        infinite for alpha <= 2 uncapped."""
        if self.cap is None and self.alpha <= 2.0:
            return float("inf")
        horizon = self.cap if self.cap is not None else PRECISION_HORIZON
        ks = np.arange(1, horizon + 1, dtype=np.float64)
        s = float(np.sum(ks ** (1.0 - self.alpha)))
        if self.cap is None:
            s += sum(sharp_tail_bracket(self.alpha - 1.0, horizon + 1)) / 2.0
        return self.pmf(0) * 1.0 + float(self.c_alpha) * s / self.cap_mass

    # -- sampling -----------------------------------------------------

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw jump lengths; deterministic given the rng state.

        Inversion on the cumulative table; draws falling beyond the
        table horizon are completed by an exact Pareto-envelope
        rejection sampler for the conditional tail law.
        """
        n = 1 if size is None else size
        u = rng.random(n)
        out = np.searchsorted(self.cdf_table, u, side="left").astype(np.int64)
        over = out > self.table_horizon
        if over.any():
            out[over] = self._sample_tail(rng, int(over.sum()))
        if size is None:
            return int(out[0])
        return out

    def _sample_tail(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # Exact sampler for P(d = i | d > H) ∝ i**-alpha, i > H:
        # propose i = round(X) with X Pareto on [H + 1/2, inf); accept with
        # probability i**-alpha / ∫_{i-1/2}^{i+1/2} x**-alpha dx (<= 1 by
        # midpoint convexity).  Acceptance is ~1 - O(1/H^2).
        if self.cap is not None and self.cap <= self.table_horizon:
            raise AssertionError("capped table covers the support")
        h = self.table_horizon + 0.5
        am1 = self.alpha - 1.0
        out = np.empty(n, dtype=np.int64)
        todo = np.arange(n)
        while todo.size:
            w = rng.random(todo.size)
            w = np.maximum(w, 1e-300)
            x = h * w ** (-1.0 / am1)
            x = np.minimum(x, 2.0 ** 60)
            i = np.floor(x + 0.5).astype(np.int64)
            fi = i.astype(np.float64)
            # (i-1/2)^-am1 - (i+1/2)^-am1 without cancellation
            envelope = (fi - 0.5) ** (-am1) * -np.expm1(am1 * np.log1p(-1.0 / (fi + 0.5)))
            accept_p = am1 * fi ** (-self.alpha) / envelope
            ok = rng.random(todo.size) < accept_p
            if self.cap is not None:
                ok &= i <= self.cap
            out[todo[ok]] = i[ok]
            todo = todo[~ok]
        return out


def make_law(alpha: float, cap: int | None = None,
             table_horizon: int = DEFAULT_TABLE_HORIZON) -> JumpLaw:
    """Construct the jump law, bracketing the normalizing constant.

    `alpha` must be at least 1.01; a cap, when given, must be >= 1.
    """
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha < ALPHA_FLOOR:
        raise DomainError(f"alpha must be >= {ALPHA_FLOOR}, got {alpha}")
    if cap is not None:
        cap = int(cap)
        if cap < 1:
            raise DomainError(f"cap must be >= 1, got {cap}")

    z_lo, z_hi = zeta_bracket(alpha, PRECISION_HORIZON, sharp=True)
    zeta_mid = 0.5 * (z_lo + z_hi)
    c_alpha = 0.5 / zeta_mid

    horizon = min(table_horizon, cap) if cap is not None else table_horizon
    weights = np.arange(1, horizon + 1, dtype=np.float64) ** (-alpha)
    cdf = np.empty(horizon + 1, dtype=np.float64)
    cdf[0] = P_STAY
    cdf[1:] = P_STAY + c_alpha * np.cumsum(weights)

    cap_mass = 1.0
    if cap is not None:
        if cap <= table_horizon:
            cap_mass = float(cdf[cap])
            cdf = cdf / cap_mass
        else:
            partial = float(np.sum(np.arange(1, cap + 1, dtype=np.float64) ** (-alpha)))
            cap_mass = P_STAY + c_alpha * partial
            cdf = cdf / cap_mass

    # increments below one ulp plateau for large alpha; inversion then
    # never selects those sub-resolution outcomes, which is correct
    if not np.all(np.diff(cdf) >= 0):
        raise AssertionError("cumulative table must be nondecreasing")

    return JumpLaw(
        alpha=alpha,
        cap=cap,
        c_alpha=c_alpha,
        zeta_lo=z_lo,
        zeta_hi=z_hi,
        table_horizon=horizon,
        cdf_table=cdf,
        cap_mass=cap_mass,
    )
