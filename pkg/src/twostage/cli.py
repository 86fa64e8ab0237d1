"""Command-line front end.

Subcommands ``solve``, ``compare-cases``, ``sweep``, ``convergence`` and
``validate`` all read a scenario file (``--config``) and write CSV to
``--out`` or standard output.  Numbers carry 6 significant digits.

Exit codes: 0 success, 1 property failure, 2 config error, 3 infeasible.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import continuous, properties, warranty, wom
from .config import ScenarioConfig, load_config
from .errors import ConfigError, DomainError, InfeasibleError, SolverError
from .params import SWEEP_AXES, apply_axis

EXIT_OK, EXIT_PROPERTY, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2, 3

SOLVE_COLUMNS = ("case", "p1", "p2", "markdown", "theta", "m_star", "n_periods", "p_w",
                 "purchase_prob", "expected_claims", "profit", "profit_sales",
                 "profit_warranty")
CASE_COLUMNS = ("case", "p1", "p2", "theta", "m_star", "n_periods", "p_w", "profit",
                "pct_of_case_i")
SWEEP_COLUMNS = ("value", "p1", "p2", "markdown", "theta", "m_star", "profit", "error")
WARRANTY_SWEEP_COLUMNS = ("value", "p1", "p2", "markdown", "theta", "profit",
                          "p1_w", "p2_w", "markdown_w", "theta_w", "p_w", "profit_w",
                          "profit_gap", "error")


def fmt(value) -> str:
    """6 significant digits; blank for missing values."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value.replace(",", ";").replace("\n", " ")
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return f"{value:.6g}"


@contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path, columns, rows):
    with _sink(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row.get(col)) for col in columns])


def _case_label(cfg: ScenarioConfig) -> str:
    base = {(False, False): "I", (True, False): "II", (False, True): "III",
            (True, True): "IV"}[(cfg.wom, cfg.warranty)]
    return base if not cfg.wom else f"{base}-{cfg.estimation}"


def solve_config(cfg: ScenarioConfig, params=None) -> dict:
    """Dispatch to the solver selected by the wom/warranty switches."""
    p = params or cfg.active_params
    if cfg.warranty:
        sol = warranty.solve_joint(p) if cfg.wom else warranty.solve_warranty_continuous(p)
        return dict(p1=sol.p1, p2=sol.p2, markdown=sol.markdown, theta=sol.theta,
                    m_star=sol.m_star, n_periods=sol.n_periods, p_w=sol.p_w,
                    purchase_prob=sol.purchase_prob, expected_claims=sol.expected_claims,
                    profit=sol.profit_total, profit_sales=sol.profit_sales,
                    profit_warranty=sol.profit_warranty)
    if cfg.wom:
        sol = wom.solve_M_star(p)
    else:
        sol = continuous.solve_theta_star(p.replace(r0=p.rm))
    return dict(p1=sol.p1, p2=sol.p2, markdown=sol.markdown, theta=sol.theta,
                m_star=sol.m_star, n_periods=sol.n_periods, profit=sol.profit,
                profit_sales=sol.profit)


def cmd_solve(cfg, args):
    row = solve_config(cfg)
    row["case"] = _case_label(cfg)
    out = args.out or cfg.output
    # keep stdout parseable when the CSV itself goes there
    summary = sys.stderr if out in (None, "-") else sys.stdout
    print(f"case {row['case']}", file=summary)
    for key in ("p1", "p2", "theta", "m_star", "p_w", "profit"):
        if row.get(key) is not None:
            print(f"  {key:8s} {fmt(row[key])}", file=summary)
    write_csv(out, SOLVE_COLUMNS, [row])
    return EXIT_OK


def cmd_compare_cases(cfg, args):
    cfg.require_warranty()
    rows = warranty.case_comparison(cfg.params, cfg.require_r0_ue())
    write_csv(args.out or cfg.output, CASE_COLUMNS, [vars(r) for r in rows])
    return EXIT_OK


def _sweep_grid(axis, lo, hi, steps):
    if steps < 2:
        raise ConfigError("--steps must be >= 2", key="steps")
    if not lo < hi:
        raise ConfigError("--lo must be < --hi", key="lo")
    grid = np.linspace(lo, hi, steps)
    return np.round(grid) if axis == "N" else grid


def cmd_sweep(cfg, args):
    grid = _sweep_grid(args.axis, args.lo, args.hi, args.steps)
    if cfg.warranty:
        table = warranty.sweep_warranty(cfg.active_params, args.axis, grid, use_wom=cfg.wom)
        rows = [dict(value=r.value, p1=r.p1, p2=r.p2, markdown=r.markdown, theta=r.theta,
                     profit=r.profit, p1_w=r.p1_w, p2_w=r.p2_w, markdown_w=r.markdown_w,
                     theta_w=r.theta_w, p_w=r.p_w, profit_w=r.profit_w,
                     profit_gap=r.profit_gap, error=r.error) for r in table]
        columns = WARRANTY_SWEEP_COLUMNS
    else:
        rows = []
        for value in grid:
            try:
                row = solve_config(cfg, apply_axis(cfg.active_params, args.axis, value))
            except (DomainError, InfeasibleError, SolverError) as exc:
                row = dict(error=str(exc))
            row["value"] = value
            rows.append(row)
        columns = SWEEP_COLUMNS
    write_csv(args.out or cfg.output, columns, rows)
    return EXIT_OK if any(not r.get("error") for r in rows) else EXIT_INFEASIBLE


def _n_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--n-list must be comma-separated integers, got {text!r}",
                          key="n-list") from None
    if not values or min(values) < 2:
        raise ConfigError("--n-list entries must be >= 2", key="n-list")
    return values


def cmd_convergence(cfg, args):
    rows = [dict(N=n, ratio=wom.convergence_ratio(cfg.params, n)) for n in _n_list(args.n_list)]
    write_csv(args.out or cfg.output, ("N", "ratio"), rows)
    return EXIT_OK


def cmd_validate(cfg, args):
    if args.samples < 1:
        raise ConfigError("--samples must be >= 1", key="samples")
    results = properties.run_all(args.samples, args.seed)
    failed = [r for r in results if not r.passed]
    with _sink(args.out) as fh:
        print(f"# samples={args.samples} seed={args.seed}", file=fh)
        print(f"# ranges: {properties.sampling_ranges()}", file=fh)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{r.name}: {r.checked - r.failures}/{r.checked} {status}", file=fh)
        if failed:
            print(f"first failure: {failed[0].name}: {failed[0].first_failure}", file=fh)
    return EXIT_PROPERTY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twostage",
        description="Two-stage markdown pricing with learning, word of mouth and warranty.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario file (key = value)")
        p.add_argument("--out", default=None, help="output path (default: standard output)")
        p.set_defaults(func=func)
        return p

    add("solve", cmd_solve, "solve the configured case")
    add("compare-cases", cmd_compare_cases, "solve all four cases, OE and UE")
    p = add("sweep", cmd_sweep, "solve along one parameter axis")
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--steps", type=int, default=10)
    p = add("convergence", cmd_convergence, "discrete/continuous profit ratio per N")
    p.add_argument("--n-list", default="2,4,6,10,15,30,100")
    p = add("validate", cmd_validate, "run the randomized property suites")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(cfg, args)
    except ConfigError as exc:
        key = f" [{exc.key}]" if exc.key else ""
        print(f"config error{key}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleError, SolverError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
