"""Batch front-end: grid experiments driven by a JSON spec file.

Commands: analyze (both solvers per grid point), sweep (capacity, service
rate, and optional delay mapping), simulate (empirical effective capacity),
validate (analysis vs simulation within tolerance), optimize-ec and
optimize-eee (allocation vs the two baselines on a generated scenario).

Outputs are plain CSV with no timestamps so reruns are byte-identical.
Exit codes: 0 success, 2 validation failure, 3 configuration error.
"""

import argparse
import csv
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .capacity import (build_transforms, ec_four_state, ec_two_state,
                       mean_service_rate, spectral_check, theta_of_delay)
from .contention import solve_fixed_point
from .optimizer import (average_power, channel_inversion, maximize_ec,
                        maximize_eee, water_filling)
from .scenario import FCW, VCW, SystemParams, generate_scenario
from .simulator import estimate_ec, run, throughput

COMMANDS = ("analyze", "simulate", "sweep", "optimize-ec", "optimize-eee",
            "validate")


class ConfigError(ValueError):
    """Bad command line or spec file; maps to exit code 3."""


@dataclass
class ExperimentSpec:
    """One experiment: a command, a parameter grid, and run settings."""

    command: str
    theta: list
    n_laa: list
    m_wifi: list
    mode: list
    base_params: SystemParams
    rate_bps: float | None = None
    d_max_s: list = field(default_factory=list)
    p_th: float = 0.1
    arrival_bps: float | None = None
    replications: int = 1
    duration_s: float = 100.0
    block_s: float = 0.5
    seed: int = 1
    out: str = "."
    tolerance: float = 0.1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("theta", "n_laa", "m_wifi", "mode"):
            if not getattr(self, name):
                raise ConfigError(f"grid list {name!r} must be non-empty")
        if any(t <= 0 for t in self.theta):
            raise ConfigError("theta values must be > 0")
        if any(mode not in (FCW, VCW) for mode in self.mode):
            raise ConfigError("mode values must be FCW or VCW")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be > 0")
        if self.block_s <= 0:
            raise ConfigError("block_s must be > 0")
        if self.command in ("analyze", "simulate", "sweep", "validate"):
            if self.rate_bps is None or self.rate_bps <= 0:
                raise ConfigError(f"{self.command} needs rate_bps > 0")
        if self.d_max_s and self.arrival_bps is None:
            raise ConfigError("d_max_s sweep needs arrival_bps")

    def points(self):
        return list(itertools.product(self.theta, self.n_laa, self.m_wifi,
                                      self.mode))

    def params_at(self, n, m, mode):
        return self.base_params.with_(n_laa=n, m_wifi=m, mode=mode)


def load_spec(path, overrides=None):
    """Parse the JSON experiment file, applying CLI overrides."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"spec file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("spec file must hold a JSON object")
    try:
        base = SystemParams.from_json_dict(raw.get("params", {}))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad params block: {exc}") from exc
    grid = raw.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("grid must be a JSON object")
    kw = dict(
        command=raw.get("command", ""),
        theta=list(grid.get("theta", [1e-5])),
        n_laa=[int(v) for v in grid.get("n_laa", [base.n_laa])],
        m_wifi=[int(v) for v in grid.get("m_wifi", [base.m_wifi])],
        mode=list(grid.get("mode", [base.mode])),
        base_params=base,
        rate_bps=raw.get("rate_bps"),
        d_max_s=list(grid.get("d_max_s", [])),
        p_th=float(raw.get("p_th", 0.1)),
        arrival_bps=raw.get("arrival_bps"),
        replications=int(raw.get("replications", 1)),
        duration_s=float(raw.get("duration_s", 100.0)),
        block_s=float(raw.get("block_s", 0.5)),
        seed=int(raw.get("seed", 1)),
        out=raw.get("out", "."),
        tolerance=float(raw.get("tolerance", 0.1)),
    )
    for key, val in (overrides or {}).items():
        if val is not None:
            kw[key] = val
    known = {"command", "grid", "params", "rate_bps", "p_th", "arrival_bps",
             "replications", "duration_s", "block_s", "seed", "out",
             "tolerance"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown spec keys: {sorted(extra)}")
    return ExperimentSpec(**kw)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(v) for v in row])


def _solved_point(spec, theta, n, m, mode):
    params = spec.params_at(n, m, mode)
    cp = solve_fixed_point(params)
    return params, cp


def cmd_analyze(spec):
    """Rows: both solvers and the spectral defect per grid point."""
    header = ["theta", "n_laa", "m_wifi", "mode", "c_fourstate_bps",
              "c_twostate_bps", "spectral_defect", "error"]
    rows = []
    for theta, n, m, mode in spec.points():
        try:
            params, cp = _solved_point(spec, theta, n, m, mode)
            transforms = build_transforms(params, cp)
            four = ec_four_state(theta, spec.rate_bps, params, cp, transforms)
            two = ec_two_state(theta, spec.rate_bps, params, cp, transforms)
            defect = spectral_check(four, params, cp, transforms)
            rows.append([theta, n, m, mode, four.ec, two.ec, defect, ""])
        except Exception as exc:  # propagate per-row, keep the sweep going
            rows.append([theta, n, m, mode, None, None, None, str(exc)])
    return header, rows, True


def cmd_sweep(spec):
    """Capacity and service-rate sweep, plus the optional delay mapping."""
    header = ["theta", "n_laa", "m_wifi", "mode", "c_twostate_bps",
              "mean_service_rate_bps", "d_max_s", "theta_of_delay",
              "c_at_delay_bps", "error"]
    rows = []
    for theta, n, m, mode in spec.points():
        try:
            params, cp = _solved_point(spec, theta, n, m, mode)
            transforms = build_transforms(params, cp)
            two = ec_two_state(theta, spec.rate_bps, params, cp, transforms)
            msr = mean_service_rate(params, cp, spec.rate_bps, transforms)
            if not spec.d_max_s:
                rows.append([theta, n, m, mode, two.ec, msr, None, None,
                             None, ""])
                continue
            for d_max in spec.d_max_s:
                dm = theta_of_delay(d_max, spec.p_th, spec.arrival_bps,
                                    params, cp, spec.rate_bps)
                c_at = (ec_two_state(dm.theta, spec.rate_bps, params, cp,
                                     transforms).ec
                        if dm.feasible else msr)
                rows.append([theta, n, m, mode, two.ec, msr, d_max,
                             dm.theta, c_at, ""])
        except Exception as exc:
            rows.append([theta, n, m, mode, None, None, None, None, None,
                         str(exc)])
    return header, rows, True


def _simulate_task(task):
    """Worker: one simulation run, estimates for every theta."""
    params, rate, duration_s, seed, thetas, block_s = task
    trace = run(params, None, rate, duration_s, seed)
    ests = [estimate_ec(trace, theta, block_s) for theta in thetas]
    return [(est.value, est.halfwidth, est.blocks) for est in ests], \
        throughput(trace)


def _sim_grid(spec, workers):
    """One run per (n, m, mode, replication); estimates for all thetas."""
    combos = list(itertools.product(spec.n_laa, spec.m_wifi, spec.mode))
    tasks = []
    for n, m, mode in combos:
        params = spec.params_at(n, m, mode)
        for rep in range(spec.replications):
            tasks.append((params, spec.rate_bps, spec.duration_s,
                          spec.seed + rep, list(spec.theta), spec.block_s))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_task, tasks))
    else:
        results = [_simulate_task(t) for t in tasks]
    return combos, results


def cmd_simulate(spec, workers=1):
    """Rows: empirical vs analytical capacity per replication."""
    header = ["theta", "n_laa", "m_wifi", "mode", "replication", "seed",
              "ec_sim_bps", "halfwidth_bps", "blocks", "ec_analytic_bps",
              "throughput_bps"]
    combos, results = _sim_grid(spec, workers)
    analytic = {}
    for n, m, mode in combos:
        params, cp = _solved_point(spec, None, n, m, mode)
        transforms = build_transforms(params, cp)
        for theta in spec.theta:
            analytic[(theta, n, m, mode)] = ec_two_state(
                theta, spec.rate_bps, params, cp, transforms).ec
    rows = []
    idx = 0
    for n, m, mode in combos:
        for rep in range(spec.replications):
            ests, tput = results[idx]
            idx += 1
            for theta, (value, half, blocks) in zip(spec.theta, ests):
                rows.append([theta, n, m, mode, rep, spec.seed + rep, value,
                             half, blocks, analytic[(theta, n, m, mode)],
                             tput])
    return header, rows, True


def cmd_validate(spec, workers=1):
    """Analysis-vs-simulation agreement, pass/fail per grid point."""
    header, sim_rows, _ = cmd_simulate(spec, workers)
    agg = {}
    for row in sim_rows:
        key = tuple(row[:4])
        agg.setdefault(key, {"sim": [], "ref": row[9]})["sim"].append(row[6])
    out_header = ["theta", "n_laa", "m_wifi", "mode", "ec_analytic_bps",
                  "ec_sim_mean_bps", "rel_err", "tolerance", "status"]
    rows = []
    all_ok = True
    for key in agg:
        sims = agg[key]["sim"]
        ref = agg[key]["ref"]
        mean = sum(sims) / len(sims)
        rel = abs(mean - ref) / ref if ref else math.inf
        ok = rel <= spec.tolerance
        all_ok = all_ok and ok
        rows.append(list(key) + [ref, mean, rel, spec.tolerance,
                                 "pass" if ok else "fail"])
    return out_header, rows, all_ok


def _optimize_rows(spec, use_eee):
    header = ["theta", "n_laa", "m_wifi", "mode", "objective",
              "objective_waterfill", "objective_inversion", "mu", "omega",
              "duality_gap", "kkt_residual", "dominates", "error"]
    rows = []
    for theta, n, m, mode in spec.points():
        try:
            params, cp = _solved_point(spec, theta, n, m, mode)
            channels = generate_scenario(params, spec.seed)
            transforms = build_transforms(params, cp)
            wf = water_filling(channels, params, theta, cp, transforms)
            ci = channel_inversion(channels, params, theta, cp, transforms)
            if use_eee:
                alloc = maximize_eee(channels, theta, params, cp, transforms)
                obj = alloc.objective
                obj_wf = wf.objective / average_power(wf, params, cp)[0]
                obj_ci = ci.objective / average_power(ci, params, cp)[0]
            else:
                alloc = maximize_ec(channels, theta, params, cp, transforms)
                obj, obj_wf, obj_ci = alloc.objective, wf.objective, \
                    ci.objective
            dominates = obj >= max(obj_wf, obj_ci) - 1e-9 * max(obj, 1.0)
            rows.append([theta, n, m, mode, obj, obj_wf, obj_ci, alloc.mu,
                         alloc.omega, alloc.duality_gap, alloc.kkt_residual,
                         int(dominates), ""])
        except Exception as exc:
            rows.append([theta, n, m, mode, None, None, None, None, None,
                         None, None, None, str(exc)])
    return header, rows, True


def cmd_optimize_ec(spec):
    """Capacity-maximizing allocation vs baselines on a seeded scenario."""
    return _optimize_rows(spec, use_eee=False)


def cmd_optimize_eee(spec):
    """Efficiency-maximizing allocation vs baselines on a seeded scenario."""
    return _optimize_rows(spec, use_eee=True)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="laacap", description=__doc__.splitlines()[0])
    parser.add_argument("--spec", required=True, help="JSON experiment file")
    parser.add_argument("--out", help="output directory (overrides spec)")
    parser.add_argument("--seed", type=int, help="base seed (overrides spec)")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel simulation workers")
    parser.add_argument("--tolerance", type=float,
                        help="validation tolerance (overrides spec)")
    return parser


def dispatch(spec, workers=1):
    if spec.command == "analyze":
        return cmd_analyze(spec)
    if spec.command == "sweep":
        return cmd_sweep(spec)
    if spec.command == "simulate":
        return cmd_simulate(spec, workers)
    if spec.command == "validate":
        return cmd_validate(spec, workers)
    if spec.command == "optimize-ec":
        return cmd_optimize_ec(spec)
    return cmd_optimize_eee(spec)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        overrides = {"out": args.out, "seed": args.seed,
                     "tolerance": args.tolerance}
        spec = load_spec(args.spec, overrides)
        header, rows, ok = dispatch(spec, workers=args.workers)
        path = os.path.join(spec.out, f"{spec.command}.csv")
        write_csv(path, header, rows)
        print(f"{spec.command}: {len(rows)} rows -> {path}"
              + ("" if ok else " (validation FAILED)"))
        return 0 if ok else 2
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
