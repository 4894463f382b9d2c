"""Stopping rules over walk states.

FirstEntry is the optimal rule (stop on entering the stopping set of the
closed-form solution); the others are simple comparison policies used to
exercise the payoff bound from the suboptimal side.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainViolation, UnsupportedN
from .spider_core import LineState
from .value_fn import EvalPoint, ValueParams, in_stopping_set, theta


@dataclass(frozen=True)
class FirstEntry:
    """Stop on first entry into the stopping set for the given cost params."""

    params: ValueParams | None = None


@dataclass(frozen=True)
class Drawdown:
    """Stop once the current rib's record leads the walker by at least a."""

    a: float

    def __post_init__(self):
        if not (self.a > 0):
            raise DomainViolation(f"need a > 0, got {self.a}")


@dataclass(frozen=True)
class FixedTime:
    t: float

    def __post_init__(self):
        if self.t < 0:
            raise DomainViolation(f"need t >= 0, got {self.t}")


@dataclass(frozen=True)
class SumThreshold:
    """Stop once the records sum to at least b."""

    b: float

    def __post_init__(self):
        if not (self.b > 0):
            raise DomainViolation(f"need b > 0, got {self.b}")


StoppingRule = FirstEntry | Drawdown | FixedTime | SumThreshold


def _resolve_params(rule: FirstEntry, params: ValueParams | None, state) -> ValueParams:
    p = rule.params if rule.params is not None else params
    if p is None:
        n = 0 if isinstance(state, LineState) else len(state.s)
        p = ValueParams(n=n)
    return p


def should_stop(rule: StoppingRule, state, params: ValueParams | None = None) -> bool:
    """Pure stop predicate; `params` backs a FirstEntry built without any."""
    if isinstance(rule, FixedTime):
        return state.elapsed >= rule.t
    if isinstance(rule, Drawdown):
        if isinstance(state, LineState):
            return state.s - state.x >= rule.a
        return state.s[state.r - 1] - state.x >= rule.a
    if isinstance(rule, SumThreshold):
        if isinstance(state, LineState):
            return state.s >= rule.b
        return sum(state.s) >= rule.b
    if isinstance(rule, FirstEntry):
        p = _resolve_params(rule, params, state)
        if isinstance(state, LineState):
            if p.n != 0:
                raise UnsupportedN(f"line state needs n=0 params, got n={p.n}")
            point = EvalPoint(x=state.x, r=1, s=(state.s,))
        else:
            point = EvalPoint(x=state.x, r=state.r, s=state.s)
        return bool(in_stopping_set(p, point))
    raise TypeError(f"unknown rule {rule!r}")


def expected_identity_check(rule: FirstEntry, params: ValueParams | None = None) -> float:
    """Target value of E[sum(s) - C*tau] under the optimal rule from the origin."""
    if not isinstance(rule, FirstEntry):
        raise TypeError("identity only holds for the first-entry rule")
    p = rule.params if rule.params is not None else params
    if p is None:
        raise DomainViolation("no cost parameters given")
    return theta(p.n) / p.C


def rule_label(rule: StoppingRule) -> str:
    """Short stable tag used in CSV/JSON output."""
    if isinstance(rule, FirstEntry):
        c = rule.params.C if rule.params is not None else 1.0
        return f"first-entry:C={c:g}"
    if isinstance(rule, Drawdown):
        return f"drawdown:a={rule.a:g}"
    if isinstance(rule, FixedTime):
        return f"fixed-time:t={rule.t:g}"
    return f"sum-threshold:b={rule.b:g}"


def parse_rule(text: str, n: int = 0) -> StoppingRule:
    """Parse 'name:key=value' rule syntax, e.g. 'first-entry:C=1'."""
    name, _, argpart = text.partition(":")
    name = name.strip().lower()
    kv = {}
    if argpart.strip():
        for piece in argpart.split(","):
            key, eq, val = piece.partition("=")
            if not eq:
                raise DomainViolation(f"bad rule argument {piece!r} in {text!r}")
            try:
                kv[key.strip()] = float(val)
            except ValueError:
                raise DomainViolation(f"bad numeric value in rule {text!r}") from None

    def take(key: str, default=None):
        if key in kv:
            return kv.pop(key)
        if default is None:
            raise DomainViolation(f"rule {name!r} needs {key}=...")
        return default

    if name == "first-entry":
        rule = FirstEntry(ValueParams(n=n, C=take("C", 1.0)))
    elif name == "drawdown":
        rule = Drawdown(a=take("a"))
    elif name == "fixed-time":
        rule = FixedTime(t=take("t"))
    elif name == "sum-threshold":
        rule = SumThreshold(b=take("b"))
    else:
        raise DomainViolation(
            f"unknown rule {name!r}; expected first-entry, drawdown, fixed-time or sum-threshold")
    if kv:
        raise DomainViolation(f"unexpected arguments {sorted(kv)} for rule {name!r}")
    return rule
