"""Compiled per-path walk kernels.

Everything here mirrors the pure-Python reference implementations bit for bit:
the RNG is the same counter-based hash chain as rng.py, and stop predicates
and value-function branches repeat the exact float expressions used by
stopping.should_stop and value_fn, so a kernel path and simulate_path with the
same (seed, path_index) produce identical trajectories.

All 64-bit constants and shifts are wrapped in uint64() inside the jitted
bodies; mixing raw Python literals with int64 locals silently promotes to
float64 under numba and corrupts the stream.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, prange, uint64

RULE_FIRST_ENTRY = 0
RULE_DRAWDOWN = 1
RULE_FIXED_TIME = 2
RULE_SUM_THRESHOLD = 3


@njit(cache=True)
def _mix64(z):
    z = uint64(z)
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True)
def _uniform(key, counter):
    w = _mix64(uint64(key) ^ (uint64(counter) * uint64(0x9E3779B97F4A7C15)))
    return (w >> uint64(11)) * 2.0 ** -53


@njit(cache=True)
def _v_hat_s(n, C, x, s0, s1):
    # scalar copy of the closed forms; s0 is the current rib's record,
    # s1 the other rib's (n = 2 only).  Expression grouping matches value_fn.
    if n == 0:
        hinge = x - s0 + 0.5 / C
        if hinge < 0.0:
            hinge = 0.0
        return C * hinge * hinge + s0
    if n == 1:
        beta = 0.5 / C
        if s0 <= beta:
            return C * x * x + beta
        hinge = x - s0 + 0.5 / C
        if hinge < 0.0:
            hinge = 0.0
        return C * hinge * hinge + s0
    t = s0 + s1
    if t <= 1.0 / C:
        return C * x * x - C * x * (s0 - s1) + 0.5 * C * (s0 * s0 + s1 * s1) + 0.75 / C
    beta = 0.5 / C
    a = x - (s0 - beta)
    if a < 0.0:
        a = 0.0
    b = -x - (s1 - beta)
    if b < 0.0:
        b = 0.0
    return C * (a * a + b * b) + s0 + s1


@njit(cache=True)
def _in_stop_s(n, C, x, s0, s1):
    beta = 0.5 / C
    if n == 0:
        return x <= s0 - beta
    if n == 1:
        return s0 >= beta and x <= s0 - beta
    return (s0 + s1 >= 1.0 / C) and (x >= beta - s1) and (x <= s0 - beta)


@njit(cache=True)
def _stop_spider(rule_id, prm, n, h, xi, r, si, step):
    if rule_id == RULE_FIXED_TIME:
        return (step * h) * h >= prm[0]
    if rule_id == RULE_DRAWDOWN:
        return si[r] * h - xi * h >= prm[0]
    if rule_id == RULE_SUM_THRESHOLD:
        tot = 0.0
        for k in range(n):
            tot = tot + si[k] * h
        return tot >= prm[0]
    C = prm[0]
    x = xi * h
    s0 = si[r] * h
    if n == 1:
        return _in_stop_s(1, C, x, s0, 0.0)
    s1 = si[1 - r] * h
    return _in_stop_s(2, C, x, s0, s1)


@njit(cache=True)
def _stop_line(rule_id, prm, h, xi, si, step):
    if rule_id == RULE_FIXED_TIME:
        return (step * h) * h >= prm[0]
    if rule_id == RULE_DRAWDOWN:
        return si * h - xi * h >= prm[0]
    if rule_id == RULE_SUM_THRESHOLD:
        return si * h >= prm[0]
    return _in_stop_s(0, prm[0], xi * h, si * h, 0.0)


@njit(parallel=True, cache=True)
def run_spider_paths(keys, n, h, xi0, r0, si0, max_steps, rule_id, prm,
                     tau_steps, s_final, censored):
    """One walk per key until the rule fires; per-path output slots, no races."""
    for p in prange(keys.shape[0]):
        key = keys[p]
        counter = uint64(0)
        xi = xi0
        r = r0
        si = np.empty(n, np.int64)
        for k in range(n):
            si[k] = si0[k]
        step = 0
        cens = np.uint8(0)
        while True:
            if _stop_spider(rule_id, prm, n, h, xi, r, si, step):
                break
            if step >= max_steps:
                cens = np.uint8(1)
                break
            u = _uniform(key, counter)
            counter += uint64(1)
            if xi == 0:
                rr = int64(u * n)
                if rr > n - 1:
                    rr = n - 1
                r = rr
                xi = 1
            elif u < 0.5:
                xi += 1
            else:
                xi -= 1
            if si[r] < xi:
                si[r] = xi
            step += 1
        tau_steps[p] = step
        censored[p] = cens
        for k in range(n):
            s_final[p, k] = si[k] * h


@njit(parallel=True, cache=True)
def run_line_paths(keys, h, xi0, si0, max_steps, rule_id, prm,
                   tau_steps, s_final, censored):
    for p in prange(keys.shape[0]):
        key = keys[p]
        counter = uint64(0)
        xi = xi0
        si = si0
        step = 0
        cens = np.uint8(0)
        while True:
            if _stop_line(rule_id, prm, h, xi, si, step):
                break
            if step >= max_steps:
                cens = np.uint8(1)
                break
            u = _uniform(key, counter)
            counter += uint64(1)
            if u < 0.5:
                xi += 1
            else:
                xi -= 1
            if si < xi:
                si = xi
            step += 1
        tau_steps[p] = step
        censored[p] = cens
        s_final[p] = si * h


@njit(parallel=True, cache=True)
def run_spider_payoff_paths(keys, n, C, h, xi0, r0, si0, cp_steps, y_live, y_stop):
    """Sample Y(t) = v_hat(state) - C*t on a checkpoint grid, n in {1, 2}.

    y_live[p, c] is Y at checkpoint c of path p; y_stop freezes Y at the first
    entry into the stopping set (the walk itself keeps going for y_live).
    cp_steps must be strictly increasing step counts starting at 0.
    """
    n_cp = cp_steps.shape[0]
    for p in prange(keys.shape[0]):
        key = keys[p]
        counter = uint64(0)
        xi = xi0
        r = r0
        si = np.empty(n, np.int64)
        for k in range(n):
            si[k] = si0[k]
        total = cp_steps[n_cp - 1]
        stopped = False
        y_frozen = 0.0
        c = 0
        step = 0
        while True:
            x = xi * h
            s0 = si[r] * h
            s1 = si[1 - r] * h if n == 2 else 0.0
            if not stopped and _in_stop_s(n, C, x, s0, s1):
                stopped = True
                y_frozen = _v_hat_s(n, C, x, s0, s1) - C * ((step * h) * h)
            if c < n_cp and step == cp_steps[c]:
                y = _v_hat_s(n, C, x, s0, s1) - C * ((step * h) * h)
                y_live[p, c] = y
                y_stop[p, c] = y_frozen if stopped else y
                c += 1
            if step >= total:
                break
            u = _uniform(key, counter)
            counter += uint64(1)
            if xi == 0:
                rr = int64(u * n)
                if rr > n - 1:
                    rr = n - 1
                r = rr
                xi = 1
            elif u < 0.5:
                xi += 1
            else:
                xi -= 1
            if si[r] < xi:
                si[r] = xi
            step += 1


@njit(parallel=True, cache=True)
def run_line_payoff_paths(keys, C, h, xi0, si0, cp_steps, y_live, y_stop):
    n_cp = cp_steps.shape[0]
    for p in prange(keys.shape[0]):
        key = keys[p]
        counter = uint64(0)
        xi = xi0
        si = si0
        total = cp_steps[n_cp - 1]
        stopped = False
        y_frozen = 0.0
        c = 0
        step = 0
        while True:
            x = xi * h
            s0 = si * h
            if not stopped and _in_stop_s(0, C, x, s0, 0.0):
                stopped = True
                y_frozen = _v_hat_s(0, C, x, s0, 0.0) - C * ((step * h) * h)
            if c < n_cp and step == cp_steps[c]:
                y = _v_hat_s(0, C, x, s0, 0.0) - C * ((step * h) * h)
                y_live[p, c] = y
                y_stop[p, c] = y_frozen if stopped else y
                c += 1
            if step >= total:
                break
            u = _uniform(key, counter)
            counter += uint64(1)
            if u < 0.5:
                xi += 1
            else:
                xi -= 1
            if si < xi:
                si = xi
            step += 1


@njit(parallel=True, cache=True)
def count_rib_choices(keys, n, steps_per_path, counts):
    """Tally which rib each origin visit picks; counts has one row per path."""
    for p in prange(keys.shape[0]):
        key = keys[p]
        counter = uint64(0)
        xi = 0
        for _ in range(steps_per_path):
            u = _uniform(key, counter)
            counter += uint64(1)
            if xi == 0:
                rr = int64(u * n)
                if rr > n - 1:
                    rr = n - 1
                counts[p, rr] += 1
                xi = 1
            elif u < 0.5:
                xi += 1
            else:
                xi -= 1
