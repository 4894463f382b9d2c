"""Closed-form value functions for the Brownian spider stopping problem.

A spider with n ribs carries reflected Brownian motion whose excursions pick a
rib uniformly at random; per-rib running maxima are s_1..s_n.  For the
penalized payoff  sup_tau E[ s_1(tau) + ... + s_n(tau) - C*tau ]  the value
function is known in closed form for n in {0, 1, 2} (n = 0 is plain Brownian
motion on the line with its one-sided running maximum).  This module evaluates
those forms, their stopping regions, and the associated constants

    theta_n = value at the all-zero state for C = 1,
    c_n     = 2*sqrt(theta_n) = sqrt(n+1),

together with the scaling map that reduces any C > 0 to C = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, DomainViolation, UnsupportedN

_THETA = {0: 0.25, 1: 0.5, 2: 0.75}


@dataclass(frozen=True)
class ValueParams:
    """Problem parameters: rib count n and time-penalty rate C > 0."""

    n: int
    C: float = 1.0

    def __post_init__(self):
        if self.n < 0:
            raise DomainViolation(f"rib count must be nonnegative, got {self.n}")
        if not (self.C > 0 and math.isfinite(self.C)):
            raise DomainViolation(f"penalty rate C must be positive and finite, got {self.C}")


@dataclass(frozen=True)
class EvalPoint:
    """State (x, r, s): position x on rib r, per-rib records s.

    r is 1-based and ignored for n <= 1.  For n = 0, s is the scalar one-sided
    running maximum and x may be any real <= s; for n >= 1 we need
    0 <= x <= s[r-1].
    """

    x: float
    r: int = 1
    s: tuple = (0.0,)

    def __post_init__(self):
        s = self.s
        if np.isscalar(s):
            s = (float(s),)
        else:
            s = tuple(float(v) for v in s)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "r", int(self.r))


def _validate(params: ValueParams, point: EvalPoint) -> tuple[float, int, tuple]:
    """Check the point against the state space; return (x, r0, s) with 0-based rib."""
    n = params.n
    if n not in (0, 1, 2):
        raise UnsupportedN(
            f"closed form available for n in {{0, 1, 2}} only, got n={n} (open problem)"
        )
    x, s = point.x, point.s
    n_records = max(n, 1)
    if len(s) != n_records:
        raise DimensionMismatch(f"expected {n_records} record(s) for n={n}, got {len(s)}")
    if not all(math.isfinite(v) for v in s) or not math.isfinite(x):
        raise DomainViolation("state contains non-finite values")
    if any(v < 0 for v in s):
        raise DomainViolation(f"records must be nonnegative, got {s}")
    r0 = point.r - 1
    if n <= 1:
        r0 = 0
    elif not (0 <= r0 < n):
        raise DomainViolation(f"rib index must be in 1..{n}, got {point.r}")
    if n == 0:
        if x > s[0]:
            raise DomainViolation(f"need x <= s for n=0, got x={x}, s={s[0]}")
    else:
        if x < 0:
            raise DomainViolation(f"need x >= 0 for n>=1, got x={x}")
        if x > s[r0]:
            raise DomainViolation(f"need x <= s_r, got x={x}, s_r={s[r0]}")
    return x, r0, s


def theta(n: int) -> float:
    """Value at the all-zero state for C = 1: 1/4, 1/2, 3/4 for n = 0, 1, 2."""
    try:
        return _THETA[n]
    except KeyError:
        raise UnsupportedN(
            f"theta known for n in {{0, 1, 2}} only, got n={n} (open problem)"
        ) from None


def c_n(n: int) -> float:
    """Optimal coverage-ratio constant 2*sqrt(theta_n) = sqrt(n+1)."""
    return 2.0 * math.sqrt(theta(n))


def optimal_c(n: int, m: float) -> tuple[float, float]:
    """Penalty rate minimizing theta_n/C + C*m and the resulting bound.

    For a stopping time with E[tau] = m the bound on E[sum s_i] is
    theta_n/C + C*m; the minimum over C sits at C* = sqrt(theta_n/m) and
    equals 2*sqrt(theta_n*m).
    """
    th = theta(n)
    if not (m > 0 and math.isfinite(m)):
        raise DomainViolation(f"mean stopping time must be positive and finite, got {m}")
    c_star = math.sqrt(th / m)
    return c_star, 2.0 * math.sqrt(th * m)


# ---------------------------------------------------------------------------
# closed forms, array-capable.  x, si, sj may be numpy arrays (broadcastable).

def _v0(C, x, s):
    # line: C*((x - s + 1/(2C))+)^2 + s, valid for x <= s
    hinge = np.maximum(x - s + 0.5 / C, 0.0)
    return C * hinge * hinge + s


def _v1(C, x, s):
    # half line with reflection at 0.  Two regimes split at s = 1/(2C).
    beta = 0.5 / C
    low = C * x * x + beta  # s <= beta: nothing stoppable yet
    return np.where(s <= beta, low, _v0(C, x, s))


def _v2_poly(C, x, si, sj):
    # small-records branch, s_i + s_j <= 1/C
    return C * x * x - C * x * (si - sj) + 0.5 * C * (si * si + sj * sj) + 0.75 / C


def _v2_hinge(C, x, si, sj):
    # large-records branch, s_i + s_j >= 1/C
    beta = 0.5 / C
    a = np.maximum(x - (si - beta), 0.0)
    b = np.maximum(-x - (sj - beta), 0.0)
    return C * (a * a + b * b) + si + sj


def _v2(C, x, si, sj):
    t = si + sj
    return np.where(t <= 1.0 / C, _v2_poly(C, x, si, sj), _v2_hinge(C, x, si, sj))


def _v_hat_arrays(n: int, C: float, x, r0, s):
    """Vectorized v_hat; x (...), r0 int (...), s (..., n_records).  No validation."""
    x = np.asarray(x, dtype=np.float64)
    if n == 0:
        return _v0(C, x, np.asarray(s)[..., 0])
    if n == 1:
        return _v1(C, x, np.asarray(s)[..., 0])
    s = np.asarray(s, dtype=np.float64)
    r0 = np.asarray(r0)
    si = np.take_along_axis(s, r0[..., None], axis=-1)[..., 0]
    sj = np.take_along_axis(s, (1 - r0)[..., None], axis=-1)[..., 0]
    return _v2(C, x, si, sj)


def v_hat(params: ValueParams, point: EvalPoint) -> float:
    """Candidate value function at a state, for n in {0, 1, 2}."""
    x, r0, s = _validate(params, point)
    C = params.C
    n = params.n
    if n == 0:
        return float(_v0(C, x, s[0]))
    if n == 1:
        return float(_v1(C, x, s[0]))
    si, sj = s[r0], s[1 - r0]
    if __debug__:
        # the two branches must agree on the seam s_i + s_j = 1/C
        t = si + sj
        if abs(t - 1.0 / C) < 1e-12:
            lo = float(_v2_poly(C, x, si, sj))
            hi = float(_v2_hinge(C, x, si, sj))
            assert abs(lo - hi) <= 1e-9 * max(1.0, abs(lo)), (lo, hi)
    return float(_v2(C, x, si, sj))


def rescale(params: ValueParams, point: EvalPoint) -> tuple[EvalPoint, float]:
    """Map a state to the C = 1 problem: v_hat(C) = scale * v_hat(1) at the image.

    Returns (scaled point, scale) with scale = 1/C; the image multiplies every
    length by C.
    """
    _validate(params, point)
    C = params.C
    scaled = EvalPoint(x=C * point.x, r=point.r, s=tuple(C * v for v in point.s))
    return scaled, 1.0 / C


def _in_stopping_set_arrays(n: int, C: float, x, r0, s):
    """Vectorized membership test for the region where v_hat equals sum(s)."""
    beta = 0.5 / C
    x = np.asarray(x, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if n == 0:
        return x <= s[..., 0] - beta
    if n == 1:
        s0 = s[..., 0]
        return (s0 >= beta) & (x <= s0 - beta)
    r0 = np.asarray(r0)
    si = np.take_along_axis(s, r0[..., None], axis=-1)[..., 0]
    sj = np.take_along_axis(s, (1 - r0)[..., None], axis=-1)[..., 0]
    return (si + sj >= 1.0 / C) & (x >= beta - sj) & (x <= si - beta)


def in_stopping_set(params: ValueParams, point: EvalPoint) -> bool:
    """True iff immediate stopping is optimal at the state (v_hat == sum s)."""
    x, r0, s = _validate(params, point)
    return bool(_in_stopping_set_arrays(params.n, params.C, x, np.asarray(r0), np.asarray(s)))
