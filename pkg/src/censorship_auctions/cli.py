"""Config-driven batch runs.

Every subcommand reads one JSON object (``--config``), checks every
parameter, computes in memory and only then writes ``<command>.csv`` and
``summary.txt`` into ``--out``. Exit status: 0 ok, 2 unreadable or malformed
config, 3 invalid parameter, 4 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from .board import board_from_dict, censorship_resistance, offer_from_dict
from .distributions import from_dict
from .equilibrium import bounds_report, solve_auction
from .errors import InputError, SolverError
from .game import AuctionConfig, bribe_decision
from .montecarlo import baseline_spa, figure_data, simulate
from .multiproposer import MultiProposerConfig, simulate_multiproposer
from .verification import perturbed, verify_bidder0_subsets, verify_honest_br

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARAM = 3
EXIT_SOLVER = 4

UNIFORM = {"family": "uniform"}

DEFAULTS = {
    "solve": {"n": 1, "r": 0.0, "F": UNIFORM, "F0": UNIFORM, "strict": True, "grid_points": 101},
    "simulate": {"n": 1, "r": 0.0, "F": UNIFORM, "F0": UNIFORM, "board": {"type": "single"},
                 "trials": 100_000, "seed": 0, "workers": 1},
    "baseline": {"n_total": 2, "F": UNIFORM, "r": 0.0, "trials": 100_000, "seed": 0, "workers": 1},
    "figures": {"n_min": 2, "n_max": 50, "F": UNIFORM},
    "verify": {"n": 1, "r": 0.0, "F": UNIFORM, "F0": UNIFORM, "v_grid": 201, "t_grid": 2001,
               "tolerance": 1e-3, "shift": 0.05, "subset_instances": 1000, "subset_n_max": 8, "seed": 0},
    "bounds": {"n_min": 2, "n_max": 200},
    "multiproposer": {"m": 2, "n": 1, "F0": UNIFORM, "F1": UNIFORM, "trials": 100_000, "seed": 0, "workers": 1},
    "phi": {"board": {"type": "single"}, "tip": {"t": 0.0}},
}


class ConfigError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _int(cfg, key, lo=None):
    val = cfg[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise InputError(f"{key} must be an integer, got {val!r}")
    if lo is not None and val < lo:
        raise InputError(f"{key} must be >= {lo}, got {val!r}")
    return val


def _float(cfg, key, lo=None, hi=None):
    val = cfg[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise InputError(f"{key} must be a finite number, got {val!r}")
    val = float(val)
    if (lo is not None and val < lo) or (hi is not None and val > hi):
        raise InputError(f"{key}={val!r} outside [{lo}, {hi}]")
    return val


def _seed(cfg):
    seed = _int(cfg, "seed", 0)
    if seed >= 1 << 64:
        raise InputError(f"seed must fit in 64 bits, got {seed!r}")
    return seed


def load_config(command, path, seed_override=None) -> dict:
    cfg = dict(DEFAULTS[command])
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(raw) - set(cfg))
        if unknown:
            raise ConfigError(f"unknown keys for {command}: {', '.join(unknown)}")
        cfg.update(raw)
    if seed_override is not None:
        if "seed" not in cfg:
            raise ConfigError(f"{command} does not take a seed")
        cfg["seed"] = seed_override
    return cfg


# -- commands: each returns (header, rows, summary lines) ---------------------

def cmd_solve(cfg):
    n, r = _int(cfg, "n", 1), _float(cfg, "r", 0.0)
    F, F0 = from_dict(cfg["F"]), from_dict(cfg["F0"])
    grid = _int(cfg, "grid_points", 2)
    sol = solve_auction(n, F, F0, r, strict=bool(cfg["strict"]))
    v = np.linspace(0.0, F.upper, grid)
    tips = sol.tip(v)
    summary = [
        f"solver: {sol.kind}",
        f"n: {n}  reserve: {fmt(r)}",
        f"v_lo: {fmt(sol.v_lo)}",
        f"mean tip per bidder: {fmt(sol.mean_tip)}",
        f"expected total tip: {fmt(sol.expected_total_tip)}",
    ]
    if getattr(sol, "assumption_holds", True) is False:
        summary.append("warning: tip bound fails for this law; schedule flagged")
    return ["v", "tip"], list(zip(v, tips)), summary


def _estimate_rows(report):
    return [(name, est.mean, est.std_error) for name, est in report.estimates.items()]


def cmd_simulate(cfg):
    n, r = _int(cfg, "n", 1), _float(cfg, "r", 0.0)
    config = AuctionConfig(n, r, from_dict(cfg["F"]), from_dict(cfg["F0"]), board_from_dict(cfg["board"]))
    trials, seed, workers = _int(cfg, "trials", 1), _seed(cfg), _int(cfg, "workers", 1)
    sol = solve_auction(n, config.F, config.F0, r)
    rep = simulate(config, sol, trials, seed, workers)
    summary = [f"trials: {trials}  seed: {seed}", f"v_lo: {fmt(sol.v_lo)}",
               f"expected total tip (solver): {fmt(sol.expected_total_tip)}"]
    summary += [f"{name}: {fmt(m)} +/- {fmt(se)}" for name, m, se in _estimate_rows(rep)]
    for label, table in rep.reference.items():
        summary += [f"{label} {k}: {fmt(v)}" for k, v in table.items()]
    return ["name", "estimate", "std_error"], _estimate_rows(rep), summary


def cmd_baseline(cfg):
    n_total, r = _int(cfg, "n_total", 1), _float(cfg, "r", 0.0)
    F = from_dict(cfg["F"])
    trials, seed, workers = _int(cfg, "trials", 1), _seed(cfg), _int(cfg, "workers", 1)
    rep = baseline_spa(n_total, F, r, trials, seed, workers)
    summary = [f"{name}: {fmt(m)} +/- {fmt(se)}" for name, m, se in _estimate_rows(rep)]
    return ["name", "estimate", "std_error"], _estimate_rows(rep), summary


def cmd_figures(cfg):
    rows = figure_data(_int(cfg, "n_min", 2), _int(cfg, "n_max", 2), from_dict(cfg["F"]))
    flagged = [row.n for row in rows if not row.assumption_holds]
    summary = [f"rows: {len(rows)}"]
    if flagged:
        summary.append(f"tip bound fails (rows flagged) at n = {', '.join(map(str, flagged))}")
    return ["n", "v_lo", "total_tip"], [(row.n, row.v_lo, row.total_tip) for row in rows], summary


def cmd_verify(cfg):
    n, r = _int(cfg, "n", 1), _float(cfg, "r", 0.0)
    F, F0 = from_dict(cfg["F"]), from_dict(cfg["F0"])
    v_grid, t_grid = _int(cfg, "v_grid", 2), _int(cfg, "t_grid", 2)
    tol, shift = _float(cfg, "tolerance", 0.0), _float(cfg, "shift")
    instances, n_max, seed = _int(cfg, "subset_instances", 0), _int(cfg, "subset_n_max", 1), _seed(cfg)
    if n_max > 20:
        raise InputError("subset_n_max is limited to 20")
    sol = solve_auction(n, F, F0, r)
    rows = []
    br = verify_honest_br(sol, v_grid, t_grid, tol)
    rows.append(("honest_best_response", br.max_gain, tol, br.passed))
    bad = verify_honest_br(perturbed(sol, shift), v_grid, t_grid, tol)
    # the checker passes here when it finds the profitable deviation
    rows.append((f"perturbed_by_{shift:g}_detected", bad.max_gain, tol, not bad.passed))
    if instances:
        rng = np.random.default_rng(seed)
        worst, ok = -math.inf, True
        for _ in range(instances):
            k = int(rng.integers(2, max(2, n_max) + 1))
            values = rng.random(k)
            tips = rng.random(k) * values / k
            v0 = float(tips.sum() + rng.random())
            rep = verify_bidder0_subsets(tips, v0, values)
            agrees = bribe_decision(v0, tips).bribe == rep.passed
            worst = max(worst, rep.max_gain)
            ok = ok and rep.passed and agrees
        rows.append(("bidder0_full_buyout", worst, 1e-12, ok))
    summary = [f"{c}: max_gain={fmt(g)} tol={fmt(t)} {'pass' if p else 'FAIL'}" for c, g, t, p in rows]
    return ["check", "max_gain", "tolerance", "pass"], rows, summary


def cmd_bounds(cfg):
    rep = bounds_report(_int(cfg, "n_min", 2), _int(cfg, "n_max", 2))
    rows = [(b.n, b.vlo_pow_n, b.inv_n, b.inv_sqrt_n, b.lower_holds, b.upper_holds) for b in rep.rows]
    summary = [
        f"1/n <= v_lo^n from n = {rep.lower_holds_from}",
        f"v_lo^n <= 1/sqrt(n) from n = {rep.upper_holds_from}",
        f"both from n = {rep.both_hold_from}",
    ]
    return ["n", "vlo_pow_n", "inv_n", "inv_sqrt_n", "lower_holds", "upper_holds"], rows, summary


def cmd_multiproposer(cfg):
    config = MultiProposerConfig(_int(cfg, "m", 2), from_dict(cfg["F0"]), from_dict(cfg["F1"]), _int(cfg, "n", 1))
    trials, seed, workers = _int(cfg, "trials", 1), _seed(cfg), _int(cfg, "workers", 1)
    rep = simulate_multiproposer(config, trials, seed, workers)
    summary = [f"{name}: {fmt(m)} +/- {fmt(se)}" for name, m, se in _estimate_rows(rep)]
    return ["name", "estimate", "std_error"], _estimate_rows(rep), summary


def cmd_phi(cfg):
    board, offer = board_from_dict(cfg["board"]), offer_from_dict(cfg["tip"])
    value = censorship_resistance(board, offer)
    print(repr(float(value)))
    return ["phi"], [(value,)], [f"censorship resistance: {float(value)!r}"]


COMMANDS = {
    "solve": cmd_solve,
    "simulate": cmd_simulate,
    "baseline": cmd_baseline,
    "figures": cmd_figures,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
    "multiproposer": cmd_multiproposer,
    "phi": cmd_phi,
}


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _write_atomic(path, text):
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", prefix=".tmp-")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run(command, config_path=None, out_dir=".", seed=None) -> int:
    try:
        cfg = load_config(command, config_path, seed)
        header, rows, summary = COMMANDS[command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, KeyError, TypeError) as exc:
        print(f"invalid parameter: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    os.makedirs(out_dir, exist_ok=True)
    _write_atomic(os.path.join(out_dir, f"{command}.csv"), render_csv(header, rows))
    _write_atomic(os.path.join(out_dir, "summary.txt"), "\n".join([f"command: {command}"] + summary) + "\n")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="censorship-auctions", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config file (defaults used when omitted)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, help="override the config seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.command, args.config, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
