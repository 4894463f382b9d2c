"""Lattice random-walk simulator for the Brownian spider and the line variant.

The walk lives on the spatial lattice {0, h, 2h, ...} along ribs (any multiple
of h on the line for n = 0) and advances process time by h^2 per step.  At the
origin the spider moves to h on a rib drawn uniformly from {1..n}; away from
the origin it moves +-h with probability 1/2 each.  Every visit to 0 is an
excursion endpoint on the lattice, which makes the fresh-rib rule exact; the
price is weak order O(h), quantified elsewhere.

States carry an integer step counter so that elapsed time is (step count)*h^2
exactly; the float coordinates are always (lattice index)*h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DimensionMismatch, DomainViolation
from .rng import PathStream


@dataclass(frozen=True)
class WalkConfig:
    """Lattice step h, rib count n (0 = unreflected line), seed, step budget.

    max_steps = 0 means "auto": 50/h^2 steps, i.e. 50 time units, far past the
    stopping times used here.
    """

    h: float = 0.01
    n: int = 1
    seed: int = 0
    max_steps: int = 0

    def __post_init__(self):
        if not (self.h > 0):
            raise DomainViolation(f"need h > 0, got {self.h}")
        if self.n < 0:
            raise DomainViolation(f"need n >= 0, got {self.n}")
        if self.max_steps < 0:
            raise DomainViolation("max_steps must be >= 0 (0 = auto)")

    def resolved_max_steps(self) -> int:
        if self.max_steps:
            return self.max_steps
        return int(math.ceil(50.0 / (self.h * self.h)))


@dataclass(frozen=True)
class SpiderState:
    x: float = 0.0
    r: int = 1
    s: tuple = (0.0,)
    elapsed: float = 0.0
    steps: int = 0

    def __post_init__(self):
        s = self.s
        if not isinstance(s, tuple):
            s = tuple(float(v) for v in s)
            object.__setattr__(self, "s", s)


@dataclass(frozen=True)
class LineState:
    x: float = 0.0
    s: float = 0.0
    elapsed: float = 0.0
    steps: int = 0


@dataclass(frozen=True)
class PathOutcome:
    tau: float
    s_final: tuple
    censored: bool


def _to_lattice(value: float, h: float, what: str) -> int:
    k = int(round(value / h))
    if abs(k * h - value) > 1e-9 * max(1.0, abs(value)):
        raise DomainViolation(f"{what}={value} is not on the h={h} lattice")
    return k


def step(state: SpiderState, config: WalkConfig, rng: PathStream) -> SpiderState:
    """One lattice move of the spider; consumes exactly one uniform."""
    n = config.n
    if n < 1:
        raise DomainViolation("step() needs n >= 1; use step_line for the line variant")
    if len(state.s) != n:
        raise DimensionMismatch(f"state has {len(state.s)} records, config.n={n}")
    h = config.h
    xi = _to_lattice(state.x, h, "x")
    si = [_to_lattice(v, h, "s") for v in state.s]
    r0 = state.r - 1
    if not (0 <= r0 < n):
        raise DomainViolation(f"rib index must be in 1..{n}, got {state.r}")
    if xi > si[r0]:
        raise DomainViolation(f"invariant x <= s[r] violated: x={state.x}, s_r={state.s[r0]}")

    u = rng.uniform()
    if xi == 0:
        r0 = min(int(u * n), n - 1)
        xi = 1
    elif u < 0.5:
        xi += 1
    else:
        xi -= 1
    if si[r0] < xi:
        si[r0] = xi
    k = state.steps + 1
    return SpiderState(
        x=xi * h,
        r=r0 + 1,
        s=tuple(v * h for v in si),
        elapsed=k * h * h,
        steps=k,
    )


def step_line(state: LineState, config: WalkConfig, rng: PathStream) -> LineState:
    """One lattice move of the unreflected line walk; one uniform consumed."""
    h = config.h
    xi = _to_lattice(state.x, h, "x")
    si = _to_lattice(state.s, h, "s")
    if xi > si:
        raise DomainViolation(f"invariant x <= s violated: x={state.x}, s={state.s}")
    u = rng.uniform()
    xi = xi + 1 if u < 0.5 else xi - 1
    if si < xi:
        si = xi
    k = state.steps + 1
    return LineState(x=xi * h, s=si * h, elapsed=k * h * h, steps=k)


def simulate_path(initial, rule, config: WalkConfig, rng: PathStream | None = None,
                  path_index: int = 0) -> PathOutcome:
    """Run one path until the rule fires or max_steps is hit.

    The rule is checked at the initial state and after every step, so
    FixedTime(0) stops immediately.  If rng is omitted, the path uses the
    counter-based stream for (config.seed, path_index), which reproduces path
    `path_index` of a batch estimate with the same seed.
    """
    from .stopping import should_stop  # local import to avoid a cycle

    if rng is None:
        rng = PathStream(config.seed, path_index)
    is_line = isinstance(initial, LineState)
    if not is_line and len(initial.s) != max(config.n, 1):
        raise DimensionMismatch(
            f"initial state has {len(initial.s)} records, config.n={config.n}")
    state = initial
    max_steps = config.resolved_max_steps()
    stepper = step_line if is_line else step
    while True:
        if should_stop(rule, state):
            s_final = (state.s,) if is_line else tuple(state.s)
            return PathOutcome(tau=state.elapsed, s_final=s_final, censored=False)
        if state.steps >= max_steps:
            s_final = (state.s,) if is_line else tuple(state.s)
            return PathOutcome(tau=state.elapsed, s_final=s_final, censored=True)
        state = stepper(state, config, rng)
