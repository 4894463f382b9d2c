"""Mechanical checks of the value function's optimality certificate.

Two halves:

* check_properties runs finite-difference audits of the six structural
  properties of v_hat on a grid: (a) rib exchangeability, (b) zero net slope
  across the origin, (c) flat response of the record coordinate at x = s_r,
  (d) 1/2 V'' <= C everywhere smooth, (e) dominance over the payoff sum(s),
  (f) 1/2 V'' = C where the dominance is strict.
* supermartingale_mc samples Y(t) = v_hat(state) - C*t along simulated paths
  and tests E[Y(t)] <= Y(0) (supermartingale) and constancy of the stopped
  mean E[Y(t ∧ tau*)] (martingale up to the first entry into the stopping
  set).

v_hat is piecewise quadratic, so every second-order stencil is exact on it up
to roundoff; stencil order is therefore demonstrated on a smooth transcendental
reference (stencil_order_check) where the h^2 truncation term is alive, while
the value-function residuals themselves sit at the roundoff floor.

The (.)^+ hinges and branch seams leave v_hat C^1 but not C^2; grid points
within 2*h_fd of them are excluded from derivative checks and counted, never
silently dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainViolation, ExcessiveCensoring, UnsupportedN
from .rng import path_keys_array
from .spider_core import WalkConfig, _to_lattice
from .value_fn import (EvalPoint, ValueParams, _in_stopping_set_arrays,
                       _v_hat_arrays, v_hat)


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: FD step, per-coordinate extent and sample counts."""

    h_fd: float = 1e-4
    s_max: float = 2.0
    n_s: int = 25
    n_x: int = 21

    def __post_init__(self):
        if not (self.h_fd > 0 and self.s_max > 0):
            raise DomainViolation("h_fd and s_max must be positive")
        if self.n_s < 3 or self.n_x < 3:
            raise DomainViolation(f"degenerate grid: n_s={self.n_s}, n_x={self.n_x}")


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    max_violation: float
    worst_point: EvalPoint | None
    n_points: int
    n_excluded: int = 0
    note: str = ""


@dataclass(frozen=True)
class PropertyReport:
    params: ValueParams
    grid: GridSpec
    properties: dict = field(default_factory=dict)
    tol_derivative: float = 0.0
    tol_exact: float = 0.0

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties.values())


def _derivative_tol(grid: GridSpec, C: float) -> float:
    # 10 * h_fd^2 * (third-derivative scale bound, taken as 10*C), floored by
    # the roundoff of the /h_fd^2 second-difference amplification
    return max(10.0 * grid.h_fd ** 2 * 10.0 * C, 1e-8)


def _worst(x, r0, s, viol) -> tuple[float, EvalPoint | None]:
    if viol.size == 0:
        return 0.0, None
    i = int(np.argmax(viol))
    m = float(viol[i])
    point = EvalPoint(x=float(x[i]), r=int(r0[i]) + 1, s=tuple(np.atleast_1d(s[i])))
    return m, point


def _cloud(n: int, grid: GridSpec):
    """Flat (x, r0, s) arrays covering the state space up to s_max."""
    sv = np.linspace(0.0, grid.s_max, grid.n_s)
    if n == 0:
        depth = np.linspace(0.0, grid.s_max, grid.n_x)
        S = np.repeat(sv, grid.n_x)
        X = S - np.tile(depth, grid.n_s)
        return X, np.zeros(X.shape, dtype=np.int64), S[:, None]
    frac = np.linspace(0.0, 1.0, grid.n_x)
    if n == 1:
        S = np.repeat(sv, grid.n_x)
        X = S * np.tile(frac, grid.n_s)
        return X, np.zeros(X.shape, dtype=np.int64), S[:, None]
    s1, s2 = np.meshgrid(sv, sv, indexing="ij")
    s_pairs = np.stack([s1.ravel(), s2.ravel()], axis=-1)
    xs, rs, ss = [], [], []
    for r0 in (0, 1):
        sr = s_pairs[:, r0]
        X = (sr[:, None] * frac[None, :]).ravel()
        ss.append(np.repeat(s_pairs, grid.n_x, axis=0))
        rs.append(np.full(X.shape, r0, dtype=np.int64))
        xs.append(X)
    return np.concatenate(xs), np.concatenate(rs), np.concatenate(ss, axis=0)


def _x_hinge_distance(n: int, C: float, x, r0, s):
    """Distance from x to the nearest kink of v_hat(., s) along the rib."""
    beta = 0.5 / C
    if n == 0:
        return np.abs(x - (s[:, 0] - beta))
    if n == 1:
        d = np.abs(x - (s[:, 0] - beta))
        return np.where(s[:, 0] > beta, d, np.inf)
    si = np.take_along_axis(s, r0[:, None], axis=-1)[:, 0]
    sj = np.take_along_axis(s, (1 - r0)[:, None], axis=-1)[:, 0]
    on_hinge_branch = si + sj > 1.0 / C
    d = np.minimum(np.abs(x - (si - beta)), np.abs(x - (beta - sj)))
    return np.where(on_hinge_branch, d, np.inf)


def _check_exchangeability(n, C, grid, tol) -> PropertyResult:
    if n < 2:
        return PropertyResult("a", True, 0.0, None, 0,
                              note="single rib (or none); r-independence is vacuous")
    sv = np.linspace(0.0, grid.s_max, grid.n_s)
    s1, s2 = np.meshgrid(sv, sv, indexing="ij")
    s = np.stack([s1.ravel(), s2.ravel()], axis=-1)
    zero = np.zeros(s.shape[0])
    r1 = np.zeros(s.shape[0], dtype=np.int64)
    r2 = np.ones(s.shape[0], dtype=np.int64)
    # at x = 0 the value cannot depend on which rib the walker sits on
    v_r1 = _v_hat_arrays(n, C, zero, r1, s)
    v_r2 = _v_hat_arrays(n, C, zero, r2, s)
    viol_origin = np.abs(v_r1 - v_r2)
    # relabeling ribs together with their records is a symmetry at every x
    x, r0, s_full = _cloud(n, grid)
    v = _v_hat_arrays(n, C, x, r0, s_full)
    v_swapped = _v_hat_arrays(n, C, x, 1 - r0, s_full[:, ::-1])
    viol_swap = np.abs(v - v_swapped)
    xs = np.concatenate([zero, x])
    rs = np.concatenate([r1, r0])
    ss = np.concatenate([s, s_full], axis=0)
    viol = np.concatenate([viol_origin, viol_swap])
    m, worst = _worst(xs, rs, ss, viol)
    return PropertyResult("a", m <= tol, m, worst, viol.size)


def _check_origin_slope(n, C, grid, tol) -> PropertyResult:
    h = grid.h_fd
    if n == 0:
        return PropertyResult("b", True, 0.0, None, 0,
                              note="no reflection at the origin for the line")
    sv = np.linspace(0.0, grid.s_max, grid.n_s)
    beta = 0.5 / C
    if n == 1:
        s = sv[sv >= 2 * h][:, None]
        keep = np.abs(s[:, 0] - beta) > 3 * h  # kink may sit inside the stencil
        s = s[keep]
        zeros = np.zeros(s.shape[0])
        r0 = np.zeros(s.shape[0], dtype=np.int64)
        g = (-3.0 * _v_hat_arrays(n, C, zeros, r0, s)
             + 4.0 * _v_hat_arrays(n, C, zeros + h, r0, s)
             - _v_hat_arrays(n, C, zeros + 2 * h, r0, s)) / (2 * h)
        viol = np.abs(g)
        excluded = int(np.sum(~keep))
        m, worst = _worst(zeros, r0, s, viol)
        return PropertyResult("b", m <= tol, m, worst, viol.size, excluded,
                              note="one-sided slope at x=0")
    s1, s2 = np.meshgrid(sv, sv, indexing="ij")
    s = np.stack([s1.ravel(), s2.ravel()], axis=-1)
    ok = (s[:, 0] >= 2 * h) & (s[:, 1] >= 2 * h)
    near_kink = (np.abs(s[:, 0] - beta) <= 3 * h) | (np.abs(s[:, 1] - beta) <= 3 * h)
    keep = ok & ~near_kink
    excluded = int(np.sum(ok & near_kink))
    s = s[keep]
    zeros = np.zeros(s.shape[0])
    mean_slope = np.zeros(s.shape[0])
    for r in (0, 1):
        r0 = np.full(s.shape[0], r, dtype=np.int64)
        g = (-3.0 * _v_hat_arrays(n, C, zeros, r0, s)
             + 4.0 * _v_hat_arrays(n, C, zeros + h, r0, s)
             - _v_hat_arrays(n, C, zeros + 2 * h, r0, s)) / (2 * h)
        mean_slope += g / n
    viol = np.abs(mean_slope)
    m, worst = _worst(zeros, np.zeros(s.shape[0], dtype=np.int64), s, viol)
    return PropertyResult("b", m <= tol, m, worst, viol.size, excluded,
                          note="net (rib-averaged) slope at the origin; "
                               "individual rib slopes cancel in pairs")


def _check_record_boundary(n, C, grid, tol) -> PropertyResult:
    """d/ds_r v_hat = 0 at s_r = x (one-sided, the record can only grow)."""
    h = grid.h_fd
    beta = 0.5 / C
    a = np.linspace(0.0, grid.s_max - 2 * h, grid.n_s)
    if n == 0:
        x = a
        s = a[:, None]
        r0 = np.zeros(a.shape[0], dtype=np.int64)
        keep = np.ones(a.shape[0], dtype=bool)
    elif n == 1:
        x = a
        s = a[:, None]
        r0 = np.zeros(a.shape[0], dtype=np.int64)
        keep = np.abs(a - beta) > 3 * h  # branch seam s = beta
    else:
        b = np.linspace(0.0, grid.s_max, grid.n_s)
        A, B = np.meshgrid(a, b, indexing="ij")
        x = A.ravel()
        s = np.stack([A.ravel(), B.ravel()], axis=-1)
        r0 = np.zeros(x.shape[0], dtype=np.int64)
        keep = np.abs(x + s[:, 1] - 1.0 / C) > 3 * h  # branch seam s_i+s_j = 1/C
    excluded = int(np.sum(~keep))
    x, s, r0 = x[keep], s[keep], r0[keep]

    def v_at(shift):
        ss = s.copy()
        ss[np.arange(ss.shape[0]), r0] += shift
        return _v_hat_arrays(n, C, x, r0, ss)

    g = (-3.0 * v_at(0.0) + 4.0 * v_at(h) - v_at(2 * h)) / (2 * h)
    viol = np.abs(g)
    m, worst = _worst(x, r0, s, viol)
    return PropertyResult("c", m <= tol, m, worst, viol.size, excluded)


def _second_difference(n, C, x, r0, s, h):
    vm = _v_hat_arrays(n, C, x - h, r0, s)
    v0 = _v_hat_arrays(n, C, x, r0, s)
    vp = _v_hat_arrays(n, C, x + h, r0, s)
    return (vp - 2.0 * v0 + vm) / (h * h)


def _interior_mask(n, x, r0, s, h):
    if n == 0:
        return x <= s[:, 0] - h
    sr = np.take_along_axis(s, r0[:, None], axis=-1)[:, 0]
    return (x >= h) & (x <= sr - h)


def _check_concavity_bound(n, C, grid, tol) -> PropertyResult:
    h = grid.h_fd
    x, r0, s = _cloud(n, grid)
    interior = _interior_mask(n, x, r0, s, h)
    smooth = _x_hinge_distance(n, C, x, r0, s) > 2 * h
    keep = interior & smooth
    excluded = int(np.sum(interior & ~smooth))
    xk, rk, sk = x[keep], r0[keep], s[keep]
    half_fd2 = 0.5 * _second_difference(n, C, xk, rk, sk, h)
    viol = np.maximum(half_fd2 - C, 0.0)
    m, worst = _worst(xk, rk, sk, viol)
    return PropertyResult("d", m <= tol, m, worst, viol.size, excluded)


def _check_dominance(n, C, grid, tol) -> PropertyResult:
    x, r0, s = _cloud(n, grid)
    v = _v_hat_arrays(n, C, x, r0, s)
    viol = np.maximum(np.sum(s, axis=-1) - v, 0.0)
    m, worst = _worst(x, r0, s, viol)
    return PropertyResult("e", m <= tol, m, worst, viol.size)


def _check_generator(n, C, grid, tol) -> PropertyResult:
    """1/2 V'' = C on the continuation region (Y drift-free there)."""
    h = grid.h_fd
    x, r0, s = _cloud(n, grid)
    interior = _interior_mask(n, x, r0, s, h)
    smooth = _x_hinge_distance(n, C, x, r0, s) > 2 * h
    cont = ~_in_stopping_set_arrays(n, C, x, r0, s)
    keep = interior & smooth & cont
    excluded = int(np.sum(interior & cont & ~smooth))
    xk, rk, sk = x[keep], r0[keep], s[keep]
    half_fd2 = 0.5 * _second_difference(n, C, xk, rk, sk, h)
    viol = np.abs(half_fd2 - C)
    m, worst = _worst(xk, rk, sk, viol)
    return PropertyResult("f", m <= tol, m, worst, viol.size, excluded)


def check_properties(params: ValueParams, grid: GridSpec | None = None) -> PropertyReport:
    """Audit properties (a)-(f) of the closed form on a grid; see module doc."""
    grid = grid or GridSpec()
    n, C = params.n, params.C
    if n not in (0, 1, 2):
        raise UnsupportedN(f"no closed form to verify for n={n} (open problem)")
    if grid.h_fd * 4 >= 0.5 / C:
        raise DomainViolation(
            f"degenerate grid: h_fd={grid.h_fd} too coarse for the kink scale 1/(2C)")
    tol = _derivative_tol(grid, C)
    tol_exact = 1e-11
    report = PropertyReport(params=params, grid=grid,
                            tol_derivative=tol, tol_exact=tol_exact)
    report.properties["a"] = _check_exchangeability(n, C, grid, tol_exact)
    report.properties["b"] = _check_origin_slope(n, C, grid, tol)
    report.properties["c"] = _check_record_boundary(n, C, grid, tol)
    report.properties["d"] = _check_concavity_bound(n, C, grid, tol)
    report.properties["e"] = _check_dominance(n, C, grid, tol_exact)
    report.properties["f"] = _check_generator(n, C, grid, tol)
    return report


def stencil_order_check(h_fd: float = 1e-2, x0: float = 0.3) -> dict:
    """Residual-halving ratios of the FD stencils on a smooth reference.

    v_hat is piecewise quadratic, so on it the second-order stencils are exact
    and their residuals sit at the roundoff floor with no h-dependence left to
    measure.  The operators' order is therefore demonstrated on exp(x), whose
    truncation term is alive: halving h_fd must shrink each residual by ~4.

    The default step is larger than check_properties' h_fd on purpose: the
    second difference amplifies roundoff by 1/h^2, and the h^2 truncation term
    only dominates that floor for h above ~3e-3.
    """
    f = np.exp
    out = {}

    def one_sided(h):
        return (-3.0 * f(x0) + 4.0 * f(x0 + h) - f(x0 + 2 * h)) / (2 * h)

    def central2(h):
        return (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h)

    exact = math.exp(x0)
    for name, stencil in (("one_sided_first", one_sided), ("central_second", central2)):
        r_h = abs(stencil(h_fd) - exact)
        r_half = abs(stencil(h_fd / 2) - exact)
        out[name] = {"residual_h": r_h, "residual_half": r_half,
                     "ratio": r_h / r_half if r_half else math.inf}
    return out


def report_to_dict(report: PropertyReport) -> dict:
    props = {}
    for name, p in report.properties.items():
        wp = None
        if p.worst_point is not None:
            wp = {"x": p.worst_point.x, "r": p.worst_point.r, "s": list(p.worst_point.s)}
        props[name] = {
            "passed": p.passed, "max_violation": p.max_violation,
            "worst_point": wp, "n_points": p.n_points,
            "n_excluded": p.n_excluded, "note": p.note,
        }
    return {
        "n": report.params.n, "C": report.params.C,
        "grid": {"h_fd": report.grid.h_fd, "s_max": report.grid.s_max,
                 "n_s": report.grid.n_s, "n_x": report.grid.n_x},
        "tol_derivative": report.tol_derivative,
        "tol_exact": report.tol_exact,
        "properties": props,
        "fd_order": stencil_order_check(),
        "passed": report.passed,
    }


# ---------------------------------------------------------------------------
# Monte Carlo supermartingale check


@dataclass(frozen=True)
class SupermartingaleReport:
    times: np.ndarray
    mean_y: np.ndarray
    se_y: np.ndarray
    mean_y_stopped: np.ndarray
    se_y_stopped: np.ndarray
    y0: float
    n_paths: int
    verdict: bool          # every E[Y(t)] <= Y(0) + 3 se
    verdict_stopped: bool  # every |E[Y(t ∧ tau*)] - Y(0)| <= 3 se


def supermartingale_mc(params: ValueParams, initial: EvalPoint, horizon: float,
                       config: WalkConfig, n_paths: int = 20_000,
                       n_times: int = 40) -> SupermartingaleReport:
    """Sample Y(t) = v_hat(state) - C*t on a checkpoint grid from `initial`.

    Reports per-time means of the running and the tau*-frozen process, where
    tau* is the first entry into the stopping set.  Y(t) must not rise above
    Y(0) (supermartingale); Y(t ∧ tau*) must hold constant (martingale).
    """
    n, C = params.n, params.C
    if n not in (0, 1, 2):
        raise UnsupportedN(f"v_hat needed for Y(t); unavailable for n={n} (open problem)")
    if config.n != n:
        raise DomainViolation(f"config.n={config.n} but params.n={n}")
    if horizon < 0:
        raise DomainViolation(f"need horizon >= 0, got {horizon}")
    if n_paths < 1:
        raise DomainViolation("need at least one path")
    h = config.h
    total_steps = int(round(horizon / (h * h)))
    if total_steps > config.resolved_max_steps():
        raise ExcessiveCensoring(
            f"horizon needs {total_steps} steps > max_steps={config.resolved_max_steps()}")
    y0 = v_hat(params, initial)

    if total_steps == 0:
        times = np.zeros(1)
        mean = np.full(1, y0)
        se = np.zeros(1)
        return SupermartingaleReport(times, mean, se, mean.copy(), se.copy(),
                                     y0, n_paths, True, True)

    n_cp = min(n_times, total_steps) + 1
    cp_steps = np.unique(np.round(np.linspace(0, total_steps, n_cp)).astype(np.int64))
    keys = path_keys_array(config.seed, n_paths)
    y_live = np.empty((n_paths, cp_steps.size), dtype=np.float64)
    y_stop = np.empty((n_paths, cp_steps.size), dtype=np.float64)
    xi0 = _to_lattice(initial.x, h, "x")
    si0 = np.array([_to_lattice(v, h, "s") for v in initial.s], dtype=np.int64)
    if n == 0:
        _kernels.run_line_payoff_paths(keys, C, h, xi0, si0[0], cp_steps, y_live, y_stop)
    else:
        r0 = initial.r - 1 if n >= 2 else 0
        _kernels.run_spider_payoff_paths(keys, n, C, h, xi0, r0, si0,
                                         cp_steps, y_live, y_stop)

    def reduce(y):
        mean = np.sum(y, axis=0) / n_paths
        d = y - mean[None, :]
        var = np.sum(d * d, axis=0) / (n_paths - 1)
        return mean, np.sqrt(var / n_paths)

    mean_live, se_live = reduce(y_live)
    mean_stop, se_stop = reduce(y_stop)
    times = (cp_steps * h) * h
    verdict = bool(np.all(mean_live <= y0 + 3.0 * se_live))
    verdict_stopped = bool(np.all(np.abs(mean_stop - y0) <= 3.0 * se_stop + 1e-12))
    return SupermartingaleReport(times, mean_live, se_live, mean_stop, se_stop,
                                 y0, n_paths, verdict, verdict_stopped)


def supermartingale_to_dict(rep: SupermartingaleReport) -> dict:
    return {
        "times": rep.times.tolist(),
        "mean_y": rep.mean_y.tolist(), "se_y": rep.se_y.tolist(),
        "mean_y_stopped": rep.mean_y_stopped.tolist(),
        "se_y_stopped": rep.se_y_stopped.tolist(),
        "y0": rep.y0, "n_paths": rep.n_paths,
        "verdict": rep.verdict, "verdict_stopped": rep.verdict_stopped,
    }
