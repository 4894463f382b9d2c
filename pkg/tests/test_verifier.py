"""Verifier audits: property checks, stencil order, supermartingale runs."""

import numpy as np
import pytest

import spiderlab.verifier as verifier
from spiderlab.errors import DomainViolation, ExcessiveCensoring, UnsupportedN
from spiderlab.spider_core import WalkConfig
from spiderlab.value_fn import EvalPoint, ValueParams
from spiderlab.verifier import (GridSpec, check_properties, report_to_dict,
                                stencil_order_check, supermartingale_mc,
                                supermartingale_to_dict)


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("C", [0.5, 1.0, 2.0])
def test_properties_pass_on_closed_form(n, C):
    report = check_properties(ValueParams(n=n, C=C))
    for name, res in report.properties.items():
        assert res.passed, (n, C, name, res.max_violation, res.worst_point)
    assert report.passed


def test_stencil_order_ratios():
    out = stencil_order_check()
    for name, d in out.items():
        assert 3.0 < d["ratio"] < 5.0, (name, d)


def test_perturbed_value_fn_fails(monkeypatch):
    orig = verifier._v_hat_arrays

    def bent(n, C, x, r0, s):
        return orig(n, C, x, r0, s) + 1e-3 * np.asarray(x) ** 3

    monkeypatch.setattr(verifier, "_v_hat_arrays", bent)
    report = check_properties(ValueParams(n=1, C=1.0))
    assert not report.passed
    # the cubic term puts curvature above C on x > 0
    assert not report.properties["f"].passed


def test_report_dict_shape():
    report = check_properties(ValueParams(n=0, C=1.0))
    d = report_to_dict(report)
    assert d["passed"] is True
    assert set(d["properties"]) == set("abcdef")
    assert set(d["fd_order"]) == {"one_sided_first", "central_second"}
    for res in d["properties"].values():
        # vacuous checks on the line say so instead of sampling nothing silently
        assert res["n_points"] > 0 or "vacuous" in res["note"] or "line" in res["note"]


def test_properties_validation():
    with pytest.raises(UnsupportedN):
        check_properties(ValueParams(n=3, C=1.0))
    with pytest.raises(DomainViolation):
        GridSpec(n_s=2)
    with pytest.raises(DomainViolation):
        # kink scale 1/(2C) = 0.05 vs 4*h_fd = 0.08
        check_properties(ValueParams(n=1, C=10.0), GridSpec(h_fd=2e-2))


def test_supermartingale_small_run():
    params = ValueParams(n=0, C=1.0)
    cfg = WalkConfig(h=0.005, n=0, seed=11)
    rep = supermartingale_mc(params, EvalPoint(x=0.0, r=1, s=(0.0,)),
                             horizon=0.1, config=cfg, n_paths=2000)
    assert rep.verdict and rep.verdict_stopped
    assert rep.times[0] == 0.0 and rep.times[-1] == pytest.approx(0.1)
    # Y starts at v_hat(origin) on both the live and the frozen ledger
    assert rep.mean_y[0] == pytest.approx(rep.y0)
    assert rep.mean_y_stopped[0] == pytest.approx(rep.y0)
    d = supermartingale_to_dict(rep)
    assert d["verdict"] and d["verdict_stopped"]
    assert len(d["times"]) == len(d["mean_y"]) == len(d["se_y"])


def test_supermartingale_zero_horizon():
    params = ValueParams(n=1, C=1.0)
    cfg = WalkConfig(h=0.01, n=1, seed=3)
    rep = supermartingale_mc(params, EvalPoint(x=0.1, r=1, s=(0.2,)),
                             horizon=0.0, config=cfg, n_paths=10)
    assert rep.times.shape == (1,)
    assert rep.verdict and rep.verdict_stopped
    assert rep.se_y[0] == 0.0


def test_supermartingale_validation():
    params = ValueParams(n=1, C=1.0)
    origin = EvalPoint(x=0.0, r=1, s=(0.0,))
    with pytest.raises(UnsupportedN):
        supermartingale_mc(ValueParams(n=3, C=1.0),
                           EvalPoint(x=0.0, r=1, s=(0.0, 0.0, 0.0)),
                           0.1, WalkConfig(h=0.01, n=3, seed=0))
    with pytest.raises(DomainViolation):
        supermartingale_mc(params, origin, 0.1, WalkConfig(h=0.01, n=2, seed=0))
    with pytest.raises(DomainViolation):
        supermartingale_mc(params, origin, -1.0, WalkConfig(h=0.01, n=1, seed=0))
    with pytest.raises(ExcessiveCensoring):
        supermartingale_mc(params, origin, 2.0,
                           WalkConfig(h=0.01, n=1, seed=0, max_steps=100))
