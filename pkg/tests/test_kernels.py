"""Compiled kernels must reproduce the pure-python walk bit for bit."""

import numpy as np

from spiderlab import _kernels
from spiderlab.mc_engine import _encode_rule, _run_paths
from spiderlab.rng import path_keys_array
from spiderlab.spider_core import (LineState, SpiderState, WalkConfig,
                                   simulate_path)
from spiderlab.stopping import Drawdown, FirstEntry, FixedTime, SumThreshold
from spiderlab.value_fn import EvalPoint, ValueParams, v_hat


def _python_batch(rule, config, n_paths, initial):
    taus, finals, cens = [], [], []
    for p in range(n_paths):
        out = simulate_path(initial, rule, config, path_index=p)
        taus.append(out.tau)
        finals.append(out.s_final)
        cens.append(out.censored)
    return np.array(taus), np.array(finals), np.array(cens)


def test_kernel_matches_python_line():
    cfg = WalkConfig(h=0.02, n=0, seed=31, max_steps=200_000)
    params = ValueParams(n=0, C=1.0)
    for rule in (Drawdown(a=0.5), FixedTime(t=0.3),
                 FirstEntry(params=params), SumThreshold(b=0.4)):
        tau, s_sum, s_final, cens = _run_paths(rule, params, cfg, 40)
        ptau, pfin, pcen = _python_batch(
            rule, cfg, 40, LineState(x=0.0, s=0.0, elapsed=0.0, steps=0))
        assert np.array_equal(tau, ptau), rule
        assert np.array_equal(s_final[:, 0], pfin[:, 0]), rule
        assert np.array_equal(cens.astype(bool), pcen), rule


def test_kernel_matches_python_spider():
    params = ValueParams(n=2, C=1.0)
    cfg = WalkConfig(h=0.02, n=2, seed=32, max_steps=200_000)
    init = SpiderState(x=0.0, r=1, s=(0.0, 0.0), elapsed=0.0, steps=0)
    for rule in (FirstEntry(params=params), Drawdown(a=0.4),
                 FixedTime(t=0.25), SumThreshold(b=0.8)):
        tau, s_sum, s_final, cens = _run_paths(rule, params, cfg, 40)
        ptau, pfin, pcen = _python_batch(rule, cfg, 40, init)
        assert np.array_equal(tau, ptau), rule
        assert np.array_equal(s_final, pfin), rule
        assert np.array_equal(cens.astype(bool), pcen), rule


def test_kernel_matches_python_from_excited_state():
    params = ValueParams(n=1, C=2.0)
    cfg = WalkConfig(h=0.01, n=1, seed=33, max_steps=200_000)
    init = SpiderState(x=0.1, r=1, s=(0.3,), elapsed=0.0, steps=0)
    rule = FirstEntry(params=params)
    tau, s_sum, s_final, cens = _run_paths(rule, params, cfg, 30, initial=init)
    ptau, pfin, pcen = _python_batch(rule, cfg, 30, init)
    assert np.array_equal(tau, ptau)
    assert np.array_equal(s_final, pfin)


def test_kernel_value_matches_closed_form():
    """The njit scalar value must equal v_hat to the last bit; the payoff
    kernels rely on that to freeze the same numbers python would."""
    rng = np.random.default_rng(55)
    for n in (0, 1, 2):
        for C in (0.5, 1.0, 2.0):
            p = ValueParams(n=n, C=C)
            for _ in range(2000):
                s = rng.uniform(0.0, 2.0, size=2)
                x = rng.uniform(0.0, 1.0) * s[0]
                if n == 0:
                    x = s[0] - rng.uniform(0.0, 1.5)
                    got = _kernels._v_hat_s(0, C, x, s[0], 0.0)
                    want = v_hat(p, EvalPoint(x=x, r=1, s=(s[0],)))
                elif n == 1:
                    got = _kernels._v_hat_s(1, C, x, s[0], 0.0)
                    want = v_hat(p, EvalPoint(x=x, r=1, s=(s[0],)))
                else:
                    got = _kernels._v_hat_s(2, C, x, s[0], s[1])
                    want = v_hat(p, EvalPoint(x=x, r=1, s=(s[0], s[1])))
                assert got == want


def test_rib_choice_frequencies():
    """Origin rib draws are uniform over the ribs."""
    n_paths, steps = 500, 200
    for n in (2, 3):
        keys = path_keys_array(123, n_paths)
        counts = np.zeros((n_paths, n), dtype=np.int64)
        _kernels.count_rib_choices(keys, n, steps, counts)
        tot = counts.sum()
        freq = counts.sum(axis=0) / tot
        sigma = np.sqrt((1 / n) * (1 - 1 / n) / tot)
        assert np.all(np.abs(freq - 1 / n) < 5 * sigma), freq


def test_payoff_kernel_initial_point():
    """First checkpoint (step 0) must carry exactly v_hat(initial)."""
    n, C, h = 2, 1.0, 0.01
    keys = path_keys_array(77, 16)
    cp = np.array([0, 50, 100], dtype=np.int64)
    y_live = np.zeros((16, 3))
    y_stop = np.zeros((16, 3))
    si0 = np.array([30, 10], dtype=np.int64)
    _kernels.run_spider_payoff_paths(keys, n, C, h, 5, 0, si0, cp, y_live, y_stop)
    want = v_hat(ValueParams(n=2, C=1.0),
                 EvalPoint(x=0.05, r=1, s=(0.30000000000000004, 0.1)))
    assert np.allclose(y_live[:, 0], want, rtol=0, atol=0)
    assert np.array_equal(y_stop[:, 0], y_live[:, 0])
