"""Lattice walk mechanics: moves, record pushes, clocks, censoring."""

import math

import pytest

from spiderlab.errors import DomainViolation
from spiderlab.rng import PathStream
from spiderlab.spider_core import (LineState, SpiderState, WalkConfig,
                                   simulate_path, step, step_line)
from spiderlab.stopping import Drawdown, FixedTime
from spiderlab.value_fn import ValueParams


def test_config_validation():
    with pytest.raises(DomainViolation):
        WalkConfig(h=0.0, n=1, seed=0)
    with pytest.raises(DomainViolation):
        WalkConfig(h=0.01, n=-1, seed=0)
    cfg = WalkConfig(h=0.01, n=1, seed=0)
    assert cfg.resolved_max_steps() == math.ceil(50 / 0.01**2)
    assert WalkConfig(h=0.01, n=1, seed=0, max_steps=123).resolved_max_steps() == 123


def test_lattice_snapping():
    cfg = WalkConfig(h=0.01, n=1, seed=0)
    rng = PathStream(0, 0)
    with pytest.raises(DomainViolation):
        step(SpiderState(x=0.005, r=1, s=(0.005,), elapsed=0.0, steps=0), cfg, rng)
    # exact multiples pass
    step(SpiderState(x=0.05, r=1, s=(0.05,), elapsed=0.0, steps=0), cfg, rng)


def test_step_moves_and_clock():
    cfg = WalkConfig(h=0.1, n=1, seed=3)
    st = SpiderState(x=0.2, r=1, s=(0.3,), elapsed=0.0, steps=0)
    rng = PathStream(3, 0)
    seen = set()
    for _ in range(50):
        nxt = step(st, cfg, rng)
        seen.add(round(nxt.x - st.x, 10))
        assert nxt.steps == st.steps + 1
        assert abs(nxt.elapsed - nxt.steps * cfg.h**2) < 1e-15
        st = nxt
        if st.x == 0.0 or st.x >= st.s[st.r - 1]:
            break
    assert seen <= {0.1, -0.1}


def test_record_push_on_current_rib():
    cfg = WalkConfig(h=0.1, n=2, seed=0)
    st = SpiderState(x=0.3, r=2, s=(0.2, 0.3), elapsed=0.0, steps=0)

    class Up:
        def uniform(self):
            return 0.1  # low draws move +h

    nxt = step(st, cfg, Up())
    assert nxt.x == pytest.approx(0.4)
    assert nxt.s == (0.2, pytest.approx(0.4))
    assert nxt.r == 2


def test_origin_rib_choice_uniform():
    cfg = WalkConfig(h=0.1, n=3, seed=0)
    counts = [0, 0, 0]
    rng = PathStream(11, 0)
    st0 = SpiderState(x=0.0, r=1, s=(0.0, 0.0, 0.0), elapsed=0.0, steps=0)
    trials = 30_000
    for _ in range(trials):
        nxt = step(st0, cfg, rng)
        assert nxt.x == pytest.approx(0.1)
        counts[nxt.r - 1] += 1
    for c in counts:
        # 5 sigma on a fair three-way split
        assert abs(c - trials / 3) < 5 * math.sqrt(trials * (1 / 3) * (2 / 3))


def test_line_walk_unreflected():
    cfg = WalkConfig(h=0.1, n=0, seed=0)

    class Down:
        def uniform(self):
            return 0.9  # high draws move -h

    st = LineState(x=0.0, s=0.0, elapsed=0.0, steps=0)
    for _ in range(5):
        st = step_line(st, cfg, Down())
    assert st.x == pytest.approx(-0.5)
    assert st.s == 0.0


def test_simulate_path_fixed_time_zero():
    cfg = WalkConfig(h=0.01, n=1, seed=0)
    out = simulate_path(SpiderState(x=0.0, r=1, s=(0.0,), elapsed=0.0, steps=0),
                        FixedTime(t=0.0), cfg)
    assert out.tau == 0.0
    assert out.s_final == (0.0,)
    assert not out.censored


def test_simulate_path_censoring():
    cfg = WalkConfig(h=0.1, n=0, seed=1, max_steps=10)
    out = simulate_path(LineState(x=0.0, s=0.0, elapsed=0.0, steps=0),
                        Drawdown(a=5.0), cfg)
    assert out.censored
    assert out.tau == pytest.approx(10 * 0.1**2)


def test_simulate_path_deterministic():
    cfg = WalkConfig(h=0.02, n=2, seed=42)
    init = SpiderState(x=0.0, r=1, s=(0.0, 0.0), elapsed=0.0, steps=0)
    a = simulate_path(init, Drawdown(a=0.5), cfg, path_index=3)
    b = simulate_path(init, Drawdown(a=0.5), cfg, path_index=3)
    c = simulate_path(init, Drawdown(a=0.5), cfg, path_index=4)
    assert a == b
    assert a != c
