"""Lattice dynamic-programming solver for the stopping problem at C = 1.

States are canonical: (x, record on the current rib, sorted multiset of the
other records), all on the h-lattice, records truncated at S_max.  The Bellman
update is

    V(state) = max( sum(s),  mean over one-step successors of V  -  h^2 )

with successors exactly as the walk moves: +-h inside a rib, uniform rib
choice at the origin, record push at x = s_r, and the S_max face held at the
stop value (a lower bound that keeps everything monotone).

Rather than sweeping until the residual decays, the solver walks the record
multisets ("slices") in decreasing order of sum(s).  A push always lands in a
strictly larger-sum slice, so by the time a slice is processed every value it
depends on outside itself is final; inside the slice the free boundary is
found by policy iteration (start from all-stop, each round solves the
continuation runs exactly by a tridiagonal pass, values rise monotonely).
One traversal therefore yields the exact lattice fixed point; the reported
residual is the verified Bellman defect, and `iterations` counts policy
rounds summed over slices (`max_iters` caps them per slice).

Equal-sum slices are independent, which is where the parallelism lives.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .errors import DomainViolation, NonConvergence, SpiderError, UnsupportedN

S_MAX_DEFAULT = 3.0


# ---------------------------------------------------------------------------
# slice enumeration


def _enumerate_slices(n: int, M: int):
    """Sorted-descending record multisets, ordered by record sum descending.

    Returns (records (S, n) int64, order-of-processing is row order,
    group_bounds: list of (start, end) rows sharing one record sum,
    code_map: flat lookup code -> row, pows: code place values).
    """
    combos = np.array(
        list(itertools.combinations_with_replacement(range(M, -1, -1), n)),
        dtype=np.int64,
    )
    sums = combos.sum(axis=1)
    order = np.argsort(-sums, kind="stable")
    records = np.ascontiguousarray(combos[order])
    sums = sums[order]
    bounds = []
    start = 0
    for i in range(1, len(sums) + 1):
        if i == len(sums) or sums[i] != sums[start]:
            bounds.append((start, i))
            start = i
    pows = (M + 1) ** np.arange(n, dtype=np.int64)
    codes = records @ pows
    code_map = np.full((M + 1) ** n, -1, dtype=np.int64)
    code_map[codes] = np.arange(len(records), dtype=np.int64)
    return records, bounds, code_map, pows


def _slice_sizes(records: np.ndarray) -> np.ndarray:
    """Stored values per slice: origin + one chain per distinct positive record."""
    S, n = records.shape
    sizes = np.ones(S, dtype=np.int64)
    for j in range(n):
        fresh = records[:, j] > 0
        if j > 0:
            fresh &= records[:, j] != records[:, j - 1]
        sizes += np.where(fresh, records[:, j], 0)
    return sizes


# ---------------------------------------------------------------------------
# per-slice exact solve (policy iteration over the free boundary)


@njit(cache=True)
def _solve_slice(m, M, h, TV, code_map, pows, max_iters, vals):
    """Solve one slice given final push values in TV; fills vals, returns
    (w0, policy_rounds, bellman_residual, monotone_defect).

    vals layout: [origin, chain of m's largest distinct positive record
    (x = h..a), next distinct record, ...].
    """
    n = m.shape[0]
    cost = h * h
    sigma = 0
    for i in range(n):
        sigma += m[i]
    G = sigma * h

    # distinct records (descending) with multiplicities
    da = np.empty(n, np.int64)
    dc = np.empty(n, np.int64)
    nd = 0
    for i in range(n):
        if nd > 0 and m[i] == da[nd - 1]:
            dc[nd - 1] += 1
        else:
            da[nd] = m[i]
            dc[nd] = 1
            nd += 1

    if m[0] == M:  # truncation face: hold at the stop value
        for i in range(vals.shape[0]):
            vals[i] = G
        return G, 0, 0.0, 0.0

    # push values: top of the (a+h)-chain of the slice where one record a
    # moved up one lattice step
    P = np.empty(nd, np.float64)
    tmp = np.empty(n, np.int64)
    for j in range(nd):
        a = da[j]
        for i in range(n):
            tmp[i] = m[i]
        idx = 0
        for i in range(n):
            if tmp[i] == a:
                idx = i
                break
        tmp[idx] = a + 1
        while idx > 0 and tmp[idx - 1] < tmp[idx]:
            t = tmp[idx - 1]
            tmp[idx - 1] = tmp[idx]
            tmp[idx] = t
            idx -= 1
        code = 0
        for i in range(n):
            code += tmp[i] * pows[i]
        P[j] = TV[code_map[code], idx]

    # chain offsets into vals (vals[0] is the origin)
    off = np.empty(nd + 1, np.int64)
    off[0] = 1
    for j in range(nd):
        off[j + 1] = off[j] + (da[j] if da[j] > 0 else 0)
    L = off[nd] - 1

    # all-stop start; stop[0] is the origin, stop[1 + k] tracks vals[1 + k]
    stop = np.ones(L + 1, np.uint8)
    for i in range(L + 1):
        vals[i] = G
    prev = np.empty(L + 1, np.float64)
    U = np.empty(L, np.float64)
    Wc = np.empty(L, np.float64)
    cp = np.empty(L, np.float64)
    bp = np.empty(L, np.float64)
    ep = np.empty(L, np.float64)

    rounds = 0
    mono_defect = 0.0
    while True:
        rounds += 1
        if rounds > max_iters:
            return G, -1, math.inf, mono_defect
        for i in range(L + 1):
            prev[i] = vals[i]

        # --- policy evaluation: exact solve of the continuation runs ---
        # affine in the origin value: vals = U + Wc * W0 on continuation sites
        for j in range(nd):
            a = da[j]
            if a == 0:
                continue
            base = off[j] - 1  # vals[base + x] is chain site x (1-based x)
            x = 1
            while x <= a:
                if stop[base + x]:
                    U[base + x - 1] = G
                    Wc[base + x - 1] = 0.0
                    x += 1
                    continue
                st = x
                while x < a and not stop[base + x + 1]:
                    x += 1
                en = x  # run st..en all continuing
                # tridiagonal: -1/2 V(k-1) + V(k) - 1/2 V(k+1) = -cost
                for k in range(st, en + 1):
                    i = base + k - 1
                    rb = -cost
                    re = 0.0
                    if k == st:
                        if k == 1:
                            re = 0.5  # left neighbour is the origin
                        else:
                            rb += 0.5 * G  # left neighbour stopped
                    if k == en:
                        rb += 0.5 * (P[j] if k == a else G)
                    sub = -0.5 if k > st else 0.0
                    if k == st:
                        bp[i] = 1.0
                        U[i] = rb
                        Wc[i] = re
                    else:
                        w = sub / bp[i - 1]
                        bp[i] = 1.0 - w * cp[i - 1]
                        U[i] = rb - w * U[i - 1]
                        Wc[i] = re - w * Wc[i - 1]
                    cp[i] = -0.5 if k < en else 0.0
                for k in range(en, st - 1, -1):
                    i = base + k - 1
                    if k == en:
                        U[i] = U[i] / bp[i]
                        Wc[i] = Wc[i] / bp[i]
                    else:
                        U[i] = (U[i] - cp[i] * U[i + 1]) / bp[i]
                        Wc[i] = (Wc[i] - cp[i] * Wc[i + 1]) / bp[i]
                x = en + 1

        # --- close the origin equation ---
        if stop[0]:
            w0 = G
        else:
            num = -cost
            den = 1.0
            for j in range(nd):
                w = dc[j] / n
                if da[j] == 0:
                    num += w * P[j]
                elif stop[off[j]]:
                    num += w * G
                else:
                    num += w * U[off[j] - 1]
                    den -= w * Wc[off[j] - 1]
            w0 = num / den
        vals[0] = w0
        for j in range(nd):
            a = da[j]
            base = off[j] - 1
            for x in range(1, a + 1):
                i = base + x - 1
                vals[base + x] = G if stop[base + x] else U[i] + Wc[i] * w0

        # --- policy improvement ---
        changed = False
        c0 = -cost
        for j in range(nd):
            w = dc[j] / n
            c0 += w * (P[j] if da[j] == 0 else vals[off[j]])
        new0 = np.uint8(0) if c0 > G else np.uint8(1)
        if new0 != stop[0]:
            changed = True
            stop[0] = new0
        for j in range(nd):
            a = da[j]
            base = off[j] - 1
            for x in range(1, a + 1):
                left = vals[0] if x == 1 else vals[base + x - 1]
                right = P[j] if x == a else vals[base + x + 1]
                c = 0.5 * (left + right) - cost
                ns = np.uint8(0) if c > G else np.uint8(1)
                if ns != stop[base + x]:
                    changed = True
                    stop[base + x] = ns
        for i in range(L + 1):
            d = vals[i] - prev[i]
            if d < mono_defect:
                mono_defect = d
        if not changed and rounds > 1:
            break

    # --- verified Bellman residual ---
    resid = 0.0
    c0 = -cost
    for j in range(nd):
        w = dc[j] / n
        c0 += w * (P[j] if da[j] == 0 else vals[off[j]])
    r = abs(vals[0] - max(G, c0))
    if r > resid:
        resid = r
    for j in range(nd):
        a = da[j]
        base = off[j] - 1
        for x in range(1, a + 1):
            left = vals[0] if x == 1 else vals[base + x - 1]
            right = P[j] if x == a else vals[base + x + 1]
            c = 0.5 * (left + right) - cost
            r = abs(vals[base + x] - max(G, c))
            if r > resid:
                resid = r
    return vals[0], rounds, resid, mono_defect


@njit(parallel=True, cache=True)
def _solve_group(lo, hi, records, sizes, offsets, M, h, TV, W0, code_map, pows,
                 max_iters, dense, rounds_out, resid_out, mono_out):
    """Solve the equal-sum slice rows [lo, hi); they are mutually independent."""
    n = records.shape[1]
    store = dense.shape[0] > 0
    for s in prange(lo, hi):
        m = records[s]
        vals = dense[offsets[s]:offsets[s] + sizes[s]] if store \
            else np.empty(sizes[s], np.float64)
        w0, rounds, resid, mono = _solve_slice(m, M, h, TV, code_map, pows,
                                               max_iters, vals)
        W0[s] = w0
        rounds_out[s] = rounds
        resid_out[s] = resid
        mono_out[s] = mono
        # record the chain tops that later (smaller-sum) slices will push into
        pos = 1
        top = 0.0
        prev_rec = -1
        for i in range(n):
            a = m[i]
            if a != prev_rec:
                if a > 0:
                    pos += a
                    top = vals[pos - 1]
                else:
                    top = w0
                prev_rec = a
            TV[s, i] = top


# ---------------------------------------------------------------------------
# public surface


class GridValues:
    """Read access to the solved surface, keyed by canonical states.

    values[(x, r_s, others)] is the value at lattice position x on a rib with
    record r_s, the remaining records being the tuple `others` (any order).
    For the line solver (n = 0) the key is (x, s).   When the dense surface
    is not stored (n = 3) the slice is re-solved on demand from the recorded
    push values, which reproduces the original pass exactly.
    """

    def __init__(self, n, M, h, records, code_map, pows, W0, TV,
                 sizes=None, offsets=None, dense=None, max_iters=1000):
        self._n, self._M, self._h = n, M, h
        self._records, self._code_map, self._pows = records, code_map, pows
        self._W0, self._TV = W0, TV
        self._sizes, self._offsets, self._dense = sizes, offsets, dense
        self._max_iters = max_iters
        self._cache = {}

    def _lattice(self, v, what):
        k = int(round(v / self._h))
        if abs(k * self._h - v) > 1e-9 * max(1.0, abs(v)):
            raise DomainViolation(f"{what}={v} is not on the h={self._h} lattice")
        return k

    def __getitem__(self, key):
        x, r_s, others = key
        xi = self._lattice(x, "x")
        m = sorted((self._lattice(v, "record") for v in ((r_s,) + tuple(others))),
                   reverse=True)
        ai = self._lattice(r_s, "record")
        if not (0 <= xi <= ai) or m[0] > self._M or m[-1] < 0:
            raise DomainViolation(f"state {key} outside the grid")
        code = sum(v * p for v, p in zip(m, self._pows))
        sid = int(self._code_map[code])
        if self._dense is not None:
            vals = self._dense[self._offsets[sid]:self._offsets[sid] + self._sizes[sid]]
        elif sid in self._cache:
            vals = self._cache[sid]
        else:
            vals = np.empty(int(_slice_sizes(self._records[sid:sid + 1])[0]), np.float64)
            _solve_slice(self._records[sid], self._M, self._h, self._TV,
                         self._code_map, self._pows, self._max_iters, vals)
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache[sid] = vals
        if xi == 0:
            return float(vals[0])
        pos = 1
        prev = -1
        for a in m:
            if a == prev:
                continue
            if a == ai:
                return float(vals[pos + xi - 1])
            pos += a
            prev = a
        raise DomainViolation(f"record {r_s} not present in state {key}")


class LineValues:
    """Accessor for the n = 0 surface: values[(x, s)]."""

    def __init__(self, h, D, grid):
        self._h, self._D, self._grid = h, D, grid

    def __getitem__(self, key):
        x, s = key
        si = int(round(s / self._h))
        xi = int(round(x / self._h))
        if abs(si * self._h - s) > 1e-9 or abs(xi * self._h - x) > 1e-9 * max(1.0, abs(x)):
            raise DomainViolation(f"state {key} is not on the h={self._h} lattice")
        d = si - xi
        if not (0 <= si < self._grid.shape[0]) or not (0 <= d < self._grid.shape[1]):
            raise DomainViolation(f"state {key} outside the grid")
        return float(self._grid[si, d])


@dataclass(frozen=True)
class DPGrid:
    n: int
    h: float
    S_max: float
    values: object
    theta_estimate: float
    iterations: int
    residual: float
    boundary_settlement: float


def _check_lattice(h: float, extent: float, name: str) -> int:
    if not (h > 0):
        raise DomainViolation(f"need h > 0, got {h}")
    M = round(extent / h)
    if M < 2 or abs(M * h - extent) > 1e-9:
        raise DomainViolation(f"h={h} must divide {name}={extent}")
    return M


def solve(n: int, h: float, S_max: float = S_MAX_DEFAULT, tol: float = 1e-9,
          max_iters: int = 1000, store_dense: bool | None = None) -> DPGrid:
    """Solve the n-rib problem on the h-lattice with records capped at S_max."""
    if n < 1:
        raise DomainViolation("solve needs n >= 1; use solve_line for the line")
    if n > 3:
        raise UnsupportedN(f"state space for n={n} exceeds desk scale")
    if tol <= 0:
        raise DomainViolation("tol must be positive")
    M = _check_lattice(h, S_max, "S_max")
    records, bounds, code_map, pows = _enumerate_slices(n, M)
    S = records.shape[0]
    sizes = _slice_sizes(records)
    offsets = np.zeros(S + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    if store_dense is None:
        store_dense = n <= 2
    dense = np.empty(int(offsets[-1]) if store_dense else 0, dtype=np.float64)
    TV = np.empty((S, n), dtype=np.float64)
    W0 = np.empty(S, dtype=np.float64)
    rounds = np.empty(S, dtype=np.int64)
    resid = np.empty(S, dtype=np.float64)
    mono = np.empty(S, dtype=np.float64)
    for lo, hi in bounds:
        _solve_group(lo, hi, records, sizes, offsets, M, h, TV, W0, code_map,
                     pows, max_iters, dense, rounds, resid, mono)
    if np.any(rounds < 0):
        bad = int(np.argmax(rounds < 0))
        raise NonConvergence(
            f"free boundary not settled after {max_iters} policy rounds "
            f"(records {records[bad] * h})")
    residual = float(np.max(resid))
    if residual > tol:
        raise NonConvergence(f"Bellman residual {residual:.3e} above tol {tol:.3e}")
    defect = float(np.min(mono))
    if defect < -1e-9 * max(1.0, n * S_max):
        raise SpiderError(f"monotone iteration violated by {defect:.3e}")
    face = records[:, 0] >= M - 2
    settlement = float(np.max(resid[face])) if np.any(face) else 0.0
    if settlement > tol:
        raise NonConvergence(
            f"value within 2h of the S_max face changed in the final pass by "
            f"{settlement:.3e} (> tol); raise S_max")
    values = GridValues(n, M, h, records, code_map, pows, W0, TV,
                        sizes if store_dense else None,
                        offsets if store_dense else None,
                        dense if store_dense else None, max_iters)
    zero_sid = int(code_map[0])
    return DPGrid(n=n, h=h, S_max=S_max, values=values,
                  theta_estimate=float(W0[zero_sid]),
                  iterations=int(np.sum(rounds)), residual=residual,
                  boundary_settlement=settlement)


@njit(cache=True)
def _solve_line_kernel(M, D, h, max_iters, grid, rounds_out, resid_out, mono_out):
    """Backward pass over record levels; chain in drawdown depth d = (s-x)/h."""
    cost = h * h
    for si in range(M, -1, -1):
        G = si * h
        if si == M:
            for d in range(D + 1):
                grid[si, d] = G
            rounds_out[si] = 0
            resid_out[si] = 0.0
            mono_out[si] = 0.0
            continue
        P = grid[si + 1, 0]  # record push target
        stop = np.ones(D, np.uint8)  # d = 0..D-1; d = D is clamped
        for d in range(D + 1):
            grid[si, d] = G
        U = np.empty(D, np.float64)
        cp = np.empty(D, np.float64)
        bp = np.empty(D, np.float64)
        prev = np.empty(D, np.float64)
        rounds = 0
        mono = 0.0
        while True:
            rounds += 1
            if rounds > max_iters:
                rounds_out[si] = -1
                return
            for d in range(D):
                prev[d] = grid[si, d]
            d = 0
            while d < D:
                if stop[d]:
                    d += 1
                    continue
                st = d
                while d < D - 1 and not stop[d + 1]:
                    d += 1
                en = d
                for k in range(st, en + 1):
                    rb = -cost
                    if k == st:
                        rb += 0.5 * (P if k == 0 else G)
                    if k == en:
                        rb += 0.5 * (grid[si, D] if k == D - 1 else G)
                    if k == st:
                        bp[k] = 1.0
                        U[k] = rb
                    else:
                        w = -0.5 / bp[k - 1]
                        bp[k] = 1.0 - w * cp[k - 1]
                        U[k] = rb - w * U[k - 1]
                    cp[k] = -0.5 if k < en else 0.0
                for k in range(en, st - 1, -1):
                    if k == en:
                        U[k] = U[k] / bp[k]
                    else:
                        U[k] = (U[k] - cp[k] * U[k + 1]) / bp[k]
                    grid[si, k] = U[k]
                d = en + 1
            changed = False
            for k in range(D):
                up = P if k == 0 else grid[si, k - 1]
                down = grid[si, k + 1] if k < D - 1 else grid[si, D]
                c = 0.5 * (up + down) - cost
                ns = np.uint8(0) if c > G else np.uint8(1)
                if ns != stop[k]:
                    changed = True
                    stop[k] = ns
                if stop[k]:
                    grid[si, k] = G
            for k in range(D):
                delta = grid[si, k] - prev[k]
                if delta < mono:
                    mono = delta
            if not changed and rounds > 1:
                break
        resid = 0.0
        for k in range(D):
            up = P if k == 0 else grid[si, k - 1]
            down = grid[si, k + 1] if k < D - 1 else grid[si, D]
            c = 0.5 * (up + down) - cost
            r = abs(grid[si, k] - max(G, c))
            if r > resid:
                resid = r
        rounds_out[si] = rounds
        resid_out[si] = resid
        mono_out[si] = mono


def solve_line(h: float, X_depth: float = 1.5, S_max: float = S_MAX_DEFAULT,
               tol: float = 1e-9, max_iters: int = 1000) -> DPGrid:
    """Solve the n = 0 problem: unreflected walk, one-sided record."""
    M = _check_lattice(h, S_max, "S_max")
    D = _check_lattice(h, X_depth, "X_depth")
    grid = np.zeros((M + 1, D + 1), dtype=np.float64)
    rounds = np.zeros(M + 1, dtype=np.int64)
    resid = np.zeros(M + 1, dtype=np.float64)
    mono = np.zeros(M + 1, dtype=np.float64)
    _solve_line_kernel(M, D, h, max_iters, grid, rounds, resid, mono)
    if np.any(rounds < 0):
        raise NonConvergence(f"free boundary not settled after {max_iters} rounds")
    residual = float(np.max(resid))
    if residual > tol:
        raise NonConvergence(f"Bellman residual {residual:.3e} above tol {tol:.3e}")
    if float(np.min(mono)) < -1e-9 * max(1.0, S_max):
        raise SpiderError("monotone iteration violated")
    settlement = float(np.max(resid[M - 2:]))
    if settlement > tol:
        raise NonConvergence(
            f"value within 2h of the S_max face changed in the final pass by "
            f"{settlement:.3e} (> tol); raise S_max")
    return DPGrid(n=0, h=h, S_max=S_max, values=LineValues(h, D, grid),
                  theta_estimate=float(grid[0, 0]), iterations=int(np.sum(rounds)),
                  residual=residual, boundary_settlement=settlement)


# ---------------------------------------------------------------------------
# refinement study


@dataclass(frozen=True)
class StudyResult:
    n: int
    h_list: tuple
    thetas: tuple
    diffs: tuple
    diff_ratios: tuple
    monotone: bool
    extrapolated: float | None
    error_bar: float | None
    deviation_from_one: float | None
    boundary_settlements: tuple
    smax_sensitivity: float | None = None


def convergence_study(n: int, h_list, S_max: float = S_MAX_DEFAULT,
                      tol: float = 1e-9, X_depth: float = 1.5,
                      check_smax: bool | None = None) -> StudyResult:
    """theta_estimate along a refinement ladder plus Richardson extrapolation.

    The lattice error is first order, so with a constant-ratio ladder the
    successive differences should shrink by that ratio and the two finest
    levels extrapolate to theta ~ theta(h_min) + (theta(h_min) - theta(prev))
    / (ratio - 1).  Non-monotone ladders abort extrapolation and report raw
    values only.
    """
    hs = tuple(float(v) for v in h_list)
    if len(hs) < 3:
        raise DomainViolation("need at least 3 grid steps for a study")
    if any(hs[i] <= hs[i + 1] for i in range(len(hs) - 1)):
        raise DomainViolation("h_list must be strictly decreasing")
    ratios = [hs[i] / hs[i + 1] for i in range(len(hs) - 1)]
    if any(abs(r - ratios[0]) > 1e-9 * ratios[0] for r in ratios):
        raise DomainViolation(f"h_list must keep a constant refinement ratio, got {ratios}")
    ratio = ratios[0]

    def _snap_up(extent, h):
        # widen to the nearest lattice multiple; a farther truncation face
        # (or deeper clamp, both inside the exact-stop region) never hurts
        return int(math.ceil(extent / h - 1e-9)) * h

    thetas = []
    settlements = []
    for h in hs:
        s_h = _snap_up(S_max, h)
        g = solve_line(h, _snap_up(X_depth, h), s_h, tol) if n == 0 \
            else solve(n, h, s_h, tol, store_dense=False)
        thetas.append(g.theta_estimate)
        settlements.append(g.boundary_settlement)
    diffs = tuple(thetas[i + 1] - thetas[i] for i in range(len(thetas) - 1))
    diff_ratios = tuple(diffs[i] / diffs[i + 1] if diffs[i + 1] != 0 else math.inf
                        for i in range(len(diffs) - 1))
    monotone = all(d > 0 for d in diffs) or all(d < 0 for d in diffs)
    if monotone:
        extrapolated = thetas[-1] + (thetas[-1] - thetas[-2]) / (ratio - 1.0)
        error_bar = abs(thetas[-1] - extrapolated)
    else:
        extrapolated = None
        error_bar = None
    deviation = None
    if n == 3 and extrapolated is not None:
        deviation = extrapolated - 1.0
    if check_smax is None:
        check_smax = n == 3
    smax_sens = None
    if check_smax:
        h_fine = hs[-1]
        smaller = round((S_max - 0.5) / h_fine) * h_fine
        g2 = solve_line(h_fine, _snap_up(X_depth, h_fine), smaller, tol) if n == 0 \
            else solve(n, h_fine, smaller, tol, store_dense=False)
        smax_sens = abs(g2.theta_estimate - thetas[-1])
    return StudyResult(n=n, h_list=hs, thetas=tuple(thetas), diffs=diffs,
                       diff_ratios=diff_ratios, monotone=monotone,
                       extrapolated=extrapolated, error_bar=error_bar,
                       deviation_from_one=deviation,
                       boundary_settlements=tuple(settlements),
                       smax_sensitivity=smax_sens)


def grid_to_dict(g: DPGrid) -> dict:
    return {
        "n": g.n, "h": g.h, "S_max": g.S_max,
        "theta_estimate": g.theta_estimate,
        "iterations": g.iterations, "residual": g.residual,
        "boundary_settlement": g.boundary_settlement,
    }


def study_to_dict(st: StudyResult) -> dict:
    d = {
        "n": st.n, "h_list": list(st.h_list), "thetas": list(st.thetas),
        "diffs": list(st.diffs), "diff_ratios": list(st.diff_ratios),
        "monotone": st.monotone, "extrapolated": st.extrapolated,
        "error_bar": st.error_bar,
        "boundary_settlements": list(st.boundary_settlements),
    }
    if st.deviation_from_one is not None:
        d["deviation_from_one"] = st.deviation_from_one
    if st.smax_sensitivity is not None:
        d["smax_sensitivity"] = st.smax_sensitivity
    return d


STUDY_CSV_HEADER = "h,theta,extrapolated,error_bar"


def study_csv_rows(st: StudyResult) -> list:
    rows = []
    ext = f"{st.extrapolated:.12g}" if st.extrapolated is not None else ""
    bar = f"{st.error_bar:.12g}" if st.error_bar is not None else ""
    for h, th in zip(st.h_list, st.thetas):
        rows.append(f"{h:.12g},{th:.12g},{ext},{bar}")
    return rows
