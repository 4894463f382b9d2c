"""Command line front end.

One subcommand per capability: closed-form constants, value evaluation,
property verification, path simulation, Monte Carlo estimation, the lattice
solver, and the refinement study.  Output is machine readable; JSON (sorted
keys) is the default, CSV is available for the table producers.  The same
flags and seed always produce the same bytes; --threads caps worker threads
without changing any number.

Exit codes: 0 success / all checks pass, 1 a check failed (coverage bound
violated, property failed, no convergence), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (DimensionMismatch, DomainViolation, ExcessiveCensoring,
                     NonConvergence, UnsupportedN)

RULE_GRAMMAR = ("rule grammar: first-entry[:C=<v>] | drawdown:a=<v> | "
                "fixed-time:t=<v> | sum-threshold:b=<v>")


def _apply_threads(threads: int) -> None:
    if threads is None or threads <= 0:  # 0 = auto
        return
    import numba
    numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def _json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _parse_s(text: str | None, n: int) -> tuple:
    if text is None:
        return (0.0,) * max(n, 1)
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as e:
        raise DomainViolation(f"bad record list {text!r}: {e}")


def _csv_unsupported(fmt: str, name: str) -> None:
    if fmt == "csv":
        raise DomainViolation(f"{name} has no CSV form; use --format json")


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (text, exit_code)


def cmd_constants(args):
    from .value_fn import c_n, optimal_c, theta
    _csv_unsupported(args.format, "constants")
    if args.n not in (0, 1, 2):
        raise UnsupportedN(
            f"n={args.n} unsupported: the constant beyond n=2 is an open problem")
    payload = {
        "n": args.n,
        "theta": theta(args.n),
        "c_n": c_n(args.n),
        "c_star_m1": optimal_c(args.n, 1.0)[0],
    }
    return _json(payload), 0


def cmd_eval(args):
    from .value_fn import EvalPoint, ValueParams, in_stopping_set, v_hat
    _csv_unsupported(args.format, "eval")
    params = ValueParams(n=args.n, C=args.c)
    point = EvalPoint(x=args.x, r=args.r, s=_parse_s(args.s, args.n))
    payload = {
        "config": {"n": args.n, "c": args.c, "x": args.x, "r": args.r,
                   "s": list(point.s)},
        "value": v_hat(params, point),
        "in_stopping_set": bool(in_stopping_set(params, point)),
    }
    return _json(payload), 0


def cmd_verify(args):
    from .value_fn import ValueParams
    from .verifier import GridSpec, check_properties, report_to_dict
    _csv_unsupported(args.format, "verify")
    params = ValueParams(n=args.n, C=args.c)
    grid = GridSpec(h_fd=args.h_fd, s_max=args.s_max, n_s=args.n_s, n_x=args.n_x)
    report = check_properties(params, grid)
    payload = report_to_dict(report)
    payload["config"] = {"n": args.n, "c": args.c, "h_fd": args.h_fd,
                         "s_max": args.s_max, "n_s": args.n_s, "n_x": args.n_x}
    return _json(payload), 0 if report.passed else 1


def cmd_simulate(args):
    from .spider_core import LineState, SpiderState, WalkConfig, simulate_path
    from .stopping import parse_rule, rule_label
    _csv_unsupported(args.format, "simulate")
    rule = parse_rule(args.rule, args.n)
    config = WalkConfig(h=args.h, n=args.n, seed=args.seed,
                        max_steps=args.max_steps)
    initial = LineState(x=0.0, s=0.0, elapsed=0.0, steps=0) if args.n == 0 \
        else SpiderState(x=0.0, r=1, s=(0.0,) * args.n, elapsed=0.0, steps=0)
    rows = []
    for p in range(args.paths):
        out = simulate_path(initial, rule, config, path_index=p)
        rows.append({"path": p, "tau": out.tau, "s_final": list(out.s_final),
                     "censored": bool(out.censored)})
    payload = {
        "config": {"n": args.n, "h": args.h, "seed": args.seed,
                   "paths": args.paths, "rule": rule_label(rule),
                   "max_steps": config.resolved_max_steps()},
        "paths": rows,
    }
    return _json(payload), 0


def cmd_estimate(args):
    from .mc_engine import (CSV_HEADER, bound_check, csv_row, estimate,
                            estimate_to_dict)
    from .spider_core import WalkConfig
    from .stopping import parse_rule, rule_label
    from .value_fn import ValueParams
    rule = parse_rule(args.rule, args.n)
    params = ValueParams(n=args.n, C=args.c)
    config = WalkConfig(h=args.h, n=args.n, seed=args.seed,
                        max_steps=args.max_steps)
    est = estimate(rule, params, config, args.paths,
                   censoring_threshold=args.censor)
    code = 0
    if args.n in (0, 1, 2):
        chk = bound_check(est, args.n)
        bound = {"satisfied": bool(chk.satisfied), "slack": chk.slack,
                 "bound": chk.bound, "allowance": chk.allowance}
        if not chk.satisfied:
            code = 1
    else:
        bound = None
    if args.format == "csv":
        return CSV_HEADER + "\n" + csv_row(est) + "\n", code
    payload = {
        "config": {"n": args.n, "c": args.c, "h": args.h, "seed": args.seed,
                   "paths": args.paths, "rule": rule_label(rule),
                   "censoring_threshold": args.censor,
                   "max_steps": config.resolved_max_steps()},
        "estimate": estimate_to_dict(est),
        "coverage_bound": bound,
    }
    return _json(payload), code


def cmd_dp(args):
    from .dp_solver import grid_to_dict, solve, solve_line
    _csv_unsupported(args.format, "dp")
    if args.n == 0:
        grid = solve_line(args.h, X_depth=args.x_depth, S_max=args.s_max,
                          tol=args.tol, max_iters=args.max_iters)
    else:
        grid = solve(args.n, args.h, S_max=args.s_max, tol=args.tol,
                     max_iters=args.max_iters)
    payload = grid_to_dict(grid)
    payload["config"] = {"n": args.n, "h": args.h, "S_max": args.s_max,
                         "tol": args.tol, "max_iters": args.max_iters}
    if args.n == 0:
        payload["config"]["X_depth"] = args.x_depth
    return _json(payload), 0


def cmd_study(args):
    from .dp_solver import (STUDY_CSV_HEADER, convergence_study,
                            study_csv_rows, study_to_dict)
    ladder = [float(v) for v in args.h_ladder.split(",")]
    st = convergence_study(args.n, ladder, S_max=args.s_max, tol=args.tol,
                           X_depth=args.x_depth)
    if args.format == "csv":
        return STUDY_CSV_HEADER + "\n" + "\n".join(study_csv_rows(st)) + "\n", 0
    payload = study_to_dict(st)
    payload["config"] = {"n": args.n, "h_ladder": list(st.h_list),
                         "S_max": args.s_max, "tol": args.tol,
                         "X_depth": args.x_depth}
    return _json(payload), 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="write output to this path")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=0,
                        help="worker thread cap, 0 = auto (never changes numbers)")

    ap = argparse.ArgumentParser(
        prog="spiderlab",
        description="numerical laboratory for stopped walks on star graphs")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("constants", parents=[common],
                       help="closed-form theta_n, C_n and the m=1 penalty rate")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("eval", parents=[common],
                       help="evaluate the candidate value function at a state")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--r", type=int, default=1, help="current rib, 1-based")
    p.add_argument("--s", default=None, help="comma list of records, e.g. 0.5,0.2")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("verify", parents=[common],
                       help="finite-difference checks of the value function"
                            " (exit 1 if any fails)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--h-fd", type=float, default=1e-4)
    p.add_argument("--s-max", type=float, default=2.0)
    p.add_argument("--n-s", type=int, default=25)
    p.add_argument("--n-x", type=int, default=21)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("simulate", parents=[common],
                       help="walk a few paths under a rule; " + RULE_GRAMMAR)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--paths", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rule", required=True)
    p.add_argument("--max-steps", type=int, default=0, help="0 = auto horizon")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common],
                       help="Monte Carlo coverage ratio and penalized objective"
                            " for a rule (exit 1 if the bound fails); "
                            + RULE_GRAMMAR)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rule", required=True)
    p.add_argument("--censor", type=float, default=None,
                   help="max tolerated censored fraction")
    p.add_argument("--max-steps", type=int, default=0, help="0 = auto horizon")
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("dp", parents=[common],
                       help="solve the lattice fixed point and report theta")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=float, default=0.02)
    p.add_argument("--s-max", type=float, default=3.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--x-depth", type=float, default=1.5,
                   help="n=0 only: drawdown depth kept on the grid")
    p.set_defaults(fn=cmd_dp)

    p = sub.add_parser("study", parents=[common],
                       help="refinement ladder with Richardson extrapolation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h-ladder", default=None,
                   help="comma list, strictly decreasing, constant ratio")
    p.add_argument("--s-max", type=float, default=3.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--x-depth", type=float, default=1.5)
    p.set_defaults(fn=cmd_study)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "h_ladder", None) is None and args.subcommand == "study":
        args.h_ladder = "0.08,0.04,0.02" if args.n == 3 else "0.04,0.02,0.01"
    if getattr(args, "censor", None) is None and args.subcommand == "estimate":
        from .mc_engine import DEFAULT_CENSORING_THRESHOLD
        args.censor = DEFAULT_CENSORING_THRESHOLD
    try:
        _apply_threads(args.threads)
        text, code = args.fn(args)
    except (DomainViolation, UnsupportedN, DimensionMismatch) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (NonConvergence, ExcessiveCensoring) as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
