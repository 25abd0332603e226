"""Command-line front end.

Subcommands: validate-delay, check-seed, transform, compare, simulate,
optimize.  Exit codes: 0 success, 1 usage or config error, 2 assumption or
admissibility failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, load_config
from .errors import ConfigError, FixdelayError
from .search import SearchProblem, optimize_seed
from .seeds import check_admissible
from .simulate import equivalence_error, simulate_fixed, simulate_varying
from .transform import TimeTransform
from .delays import validate_delay

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSUMPTION = 2
EXIT_NUMERICAL = 3


def _out_dir(cfg: ExperimentConfig, override) -> Path:
    d = Path(override) if override else Path(cfg.output_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_validate_delay(cfg: ExperimentConfig, args) -> int:
    delay = cfg.require_delay()
    horizon = args.horizon or cfg.horizon
    report = validate_delay(delay, (0.0, horizon), cfg.grid_n)
    out = _out_dir(cfg, args.out)
    _write_json(out / "delay_report.json", report.to_dict())
    print(f"min tau = {report.min_tau:.6g} at t = {report.argmin_tau:.6g}")
    print(f"max tau' = {report.max_tau_dot:.6g} at t = {report.argmax_tau_dot:.6g}")
    print("PASS" if report.passed else "FAIL: delay assumptions violated")
    return EXIT_OK if report.passed else EXIT_ASSUMPTION


def cmd_check_seed(cfg: ExperimentConfig, args) -> int:
    constraints = cfg.require_constraints()
    seed = cfg.require_seed()
    report = check_admissible(seed, constraints, tol=1e-8)
    out = _out_dir(cfg, args.out)
    _write_json(out / "seed_report.json", report.to_dict())
    print(f"|phi(0)|                    = {report.residual_value0:.3e}")
    print(f"|phi(-tau*) + tau0|         = {report.residual_value_left:.3e}")
    print(f"|phi'(0)(1-tau0')-phi'(-t*)| = {report.residual_ratio:.3e}")
    print(f"monotone: {report.monotone.verdict} ({report.monotone.method})")
    print("ADMISSIBLE" if report.passed else "NOT ADMISSIBLE")
    return EXIT_OK if report.passed else EXIT_ASSUMPTION


def _build_transform(cfg: ExperimentConfig, seed) -> TimeTransform:
    return TimeTransform(cfg.require_delay(), seed, cfg.require_constraints().tau_star,
                         newton=cfg.newton)


def cmd_transform(cfg: ExperimentConfig, args) -> int:
    seed = cfg.require_seed()
    tt = _build_transform(cfg, seed)
    horizon = args.horizon or cfg.horizon
    grid_n = args.grid_n or cfg.grid_n
    max_hp, argmax, trace = tt.max_h_prime(horizon, grid_n)
    out = _out_dir(cfg, args.out)
    trace.write_csv(out / "trace.csv")
    summary = {"max_h_prime": max_hp, "argmax": argmax,
               "max_abel_residual": trace.max_abel_residual,
               "horizon": horizon, "grid_n": grid_n}
    _write_json(out / "transform_summary.json", summary)
    print(f"max h' = {max_hp:.9g} at lambda = {argmax:.6g}")
    print(f"max |abel residual| = {trace.max_abel_residual:.3e}")
    print(f"trace written to {out / 'trace.csv'}")
    return EXIT_OK


def cmd_compare(cfg: ExperimentConfig, args) -> int:
    entries = cfg.require_seed_list()
    horizon = args.horizon or cfg.horizon
    grid_n = args.grid_n or cfg.grid_n
    out = _out_dir(cfg, args.out)
    ranking = []
    for name, seed in entries:
        tt = _build_transform(cfg, seed)
        max_hp, argmax, trace = tt.max_h_prime(horizon, grid_n)
        trace.write_csv(out / f"trace_{name}.csv")
        ranking.append({"name": name, "max_h_prime": max_hp, "argmax": argmax,
                        "max_abel_residual": trace.max_abel_residual})
    ranking.sort(key=lambda r: r["max_h_prime"])
    _write_json(out / "ranking.json", {"horizon": horizon, "grid_n": grid_n,
                                       "ranking": ranking})
    print(f"{'rank':>4}  {'seed':<20} {'max h_prime':>14}  {'argmax':>10}")
    for i, row in enumerate(ranking, 1):
        print(f"{i:>4}  {row['name']:<20} {row['max_h_prime']:>14.6f}  {row['argmax']:>10.4f}")
    return EXIT_OK


def cmd_simulate(cfg: ExperimentConfig, args) -> int:
    seed = cfg.require_seed()
    tt = _build_transform(cfg, seed)
    dde, dt, lambda_end, tolerance = cfg.require_simulation()
    out = _out_dir(cfg, args.out)

    def run(step):
        t_end = float(tt.eval_h(lambda_end)) + 10 * step
        x_traj = simulate_varying(dde, cfg.require_delay(), t_end, step)
        xbar_traj = simulate_fixed(dde, tt, lambda_end, step)
        return x_traj, xbar_traj, equivalence_error(x_traj, xbar_traj, tt)

    x_traj, xbar_traj, err = run(dt)
    x_traj.write_csv(out / "trajectory_t.csv")
    xbar_traj.write_csv(out / "trajectory_lambda.csv")
    payload = {"equivalence_error": err, "dt": dt, "lambda_end": lambda_end,
               "tolerance": tolerance}
    print(f"equivalence error = {err:.3e} (tolerance {tolerance:.1e})")
    if args.convergence_study:
        coarse = 32 * dt
        _, _, e1 = run(coarse)
        _, _, e2 = run(coarse / 2)
        order = float(np.log2(e1 / e2)) if e2 > 0 else float("inf")
        payload["convergence"] = {"dt_coarse": coarse, "error_coarse": e1,
                                  "dt_fine": coarse / 2, "error_fine": e2,
                                  "observed_order": order}
        print(f"step halving {coarse:g} -> {coarse/2:g}: error ratio {e1/e2:.2f} "
              f"(observed order {order:.2f})")
    _write_json(out / "equivalence_report.json", payload)
    return EXIT_OK if err <= tolerance else EXIT_ASSUMPTION


def cmd_optimize(cfg: ExperimentConfig, args) -> int:
    constraints = cfg.require_constraints()
    s = cfg.require_search()
    problem = SearchProblem(
        delay=cfg.require_delay(),
        constraints=constraints,
        basis_dim=int(s["basis_dim"]),
        horizon=args.horizon or cfg.horizon,
        grid_n=int(s.get("grid_n", cfg.grid_n)),
        budget=int(s.get("budget", 500)),
        penalty_weight=float(s.get("penalty_weight", 1000.0)),
        coarse_factor=int(s.get("coarse_factor", 10)),
        newton=cfg.newton,
    )
    result = optimize_seed(problem, seed_rng=int(s.get("seed_rng", 0)))
    out = _out_dir(cfg, args.out)
    _write_json(out / "search_report.json", result.to_dict())
    fragment = ("# optimized seed parameter (shifted-Legendre coefficients)\n"
                "seed:\n  kind: poly\n  coeffs: "
                + json.dumps(list(result.best_coeffs)) + "\n")
    (out / "optimized_seed.yaml").write_text(fragment)
    print(f"baseline max h' = {result.baseline_value:.9g}")
    print(f"best     max h' = {result.best_value:.9g} "
          f"({result.n_evaluations} evaluations)")
    print(f"coefficients written to {out / 'optimized_seed.yaml'}")
    return EXIT_OK


_COMMANDS = {
    "validate-delay": cmd_validate_delay,
    "check-seed": cmd_check_seed,
    "transform": cmd_transform,
    "compare": cmd_compare,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fixdelay",
        description="Fixed-delay reformulation of linear DDEs with time-varying delay.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("-c", "--config", required=True, help="experiment YAML file")
        p.add_argument("--horizon", type=float, default=None, help="override config horizon")
        p.add_argument("--grid-n", type=int, default=None, dest="grid_n",
                       help="override config grid_n")
        p.add_argument("--out", default=None, help="override output directory")
        if name == "simulate":
            p.add_argument("--convergence-study", action="store_true",
                           dest="convergence_study",
                           help="also report the observed convergence order")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except FixdelayError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
