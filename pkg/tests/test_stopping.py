"""Stopping rule predicates, parsing, and the identity bookkeeping."""

import numpy as np
import pytest

from spiderlab.errors import DomainViolation, UnsupportedN
from spiderlab.spider_core import LineState, SpiderState
from spiderlab.stopping import (Drawdown, FirstEntry, FixedTime, SumThreshold,
                                expected_identity_check, parse_rule,
                                rule_label, should_stop)
from spiderlab.value_fn import ValueParams


def test_fixed_time_boundary():
    rule = FixedTime(t=1.0)
    assert not should_stop(rule, LineState(x=0.0, s=0.5, elapsed=0.99, steps=9900))
    assert should_stop(rule, LineState(x=0.0, s=0.5, elapsed=1.0, steps=10000))


def test_drawdown_line_and_spider():
    rule = Drawdown(a=1.0)
    assert should_stop(rule, LineState(x=-0.5, s=0.5, elapsed=0.0, steps=0))
    assert not should_stop(rule, LineState(x=-0.4, s=0.5, elapsed=0.0, steps=0))
    st = SpiderState(x=0.2, r=2, s=(0.5, 1.2), elapsed=0.0, steps=0)
    assert should_stop(rule, st)  # current rib record 1.2, drawdown 1.0
    st = SpiderState(x=0.3, r=2, s=(0.5, 1.2), elapsed=0.0, steps=0)
    assert not should_stop(rule, st)


def test_sum_threshold():
    rule = SumThreshold(b=2.0)
    assert should_stop(rule, SpiderState(x=0.0, r=1, s=(1.0, 1.0), elapsed=0.0, steps=0))
    assert not should_stop(rule, SpiderState(x=0.0, r=1, s=(1.0, 0.9), elapsed=0.0, steps=0))
    assert should_stop(rule, LineState(x=0.0, s=2.0, elapsed=0.0, steps=0))


def test_first_entry_line():
    rule = FirstEntry(params=ValueParams(n=0, C=1.0))
    assert should_stop(rule, LineState(x=0.0, s=0.6, elapsed=0.0, steps=0))
    assert not should_stop(rule, LineState(x=0.2, s=0.6, elapsed=0.0, steps=0))
    with pytest.raises(UnsupportedN):
        should_stop(FirstEntry(params=ValueParams(n=1, C=1.0)),
                    LineState(x=0.0, s=0.6, elapsed=0.0, steps=0))


def test_first_entry_equals_drawdown_on_line():
    """For one rib the entry set is exactly drawdown >= 1/(2C)."""
    rng = np.random.default_rng(99)
    fe = FirstEntry(params=ValueParams(n=0, C=2.0))
    dd = Drawdown(a=0.25)
    for _ in range(2000):
        s = float(rng.uniform(0.0, 2.0))
        x = s - float(rng.uniform(0.0, 1.5))
        if abs((s - x) - 0.25) < 1e-9:
            continue  # boundary ties can round either way
        st = LineState(x=x, s=s, elapsed=0.0, steps=0)
        assert should_stop(fe, st) == should_stop(dd, st)


def test_expected_identity_check():
    assert expected_identity_check(FirstEntry(params=ValueParams(n=1, C=2.0))) == 0.25
    assert expected_identity_check(FirstEntry(params=ValueParams(n=2, C=1.0))) == 0.75
    assert expected_identity_check(FirstEntry(params=ValueParams(n=0, C=0.5))) == 0.5


def test_rule_validation():
    with pytest.raises(DomainViolation):
        Drawdown(a=0.0)
    with pytest.raises(DomainViolation):
        FixedTime(t=-1.0)
    with pytest.raises(DomainViolation):
        SumThreshold(b=-2.0)


def test_parse_rule_round_trip():
    cases = ["first-entry:C=1", "drawdown:a=1", "fixed-time:t=1",
             "sum-threshold:b=2", "first-entry:C=0.5", "drawdown:a=0.25"]
    for text in cases:
        rule = parse_rule(text, n=2)
        assert rule_label(rule) == text
    assert isinstance(parse_rule("first-entry", n=1), FirstEntry)


def test_parse_rule_errors():
    for bad in ["nope:a=1", "drawdown:b=1", "drawdown:a=zero", "drawdown",
                "fixed-time:t=1,extra=2"]:
        with pytest.raises(DomainViolation):
            parse_rule(bad, n=0)
