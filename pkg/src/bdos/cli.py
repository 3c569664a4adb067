"""
Command-line entry point: ``bdos <command> [flags] [--scenario FILE] [--out PATH] [--seed N]``.

Simple sweeps take grid flags; simulate, equilibrium and empirical read a YAML
scenario file whose values can be overridden by flags. Grids accept
comma-separated values (``0.1,0.2``) or ``start:stop:step`` ranges with an
inclusive stop.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import econ, equilibrium, markov
from .model import ParamError
from .sim import ConfigInvalid, make_config, run


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.9g}"


def parse_grid(text: str | None) -> list[float]:
    if text is None:
        return []
    text = text.strip()
    if not text:
        return []
    out: list[float] = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            try:
                start, stop, step = (float(x) for x in part.split(":"))
            except ValueError:
                raise UsageError(f"bad range {part!r}; expected start:stop:step")
            if step <= 0:
                raise UsageError(f"range step must be positive in {part!r}")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            out.extend(round(start + k * step, 12) for k in range(max(count, 0)))
        else:
            try:
                out.append(float(part))
            except ValueError:
                raise UsageError(f"bad grid value {part!r}")
    return out


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BDOS_THREADS", "1")))
    except ValueError:
        return 1


SCENARIO_KEYS = {
    "simulate": {"alpha_a", "gamma", "lam", "block_reward", "miners", "rounds", "seed", "spv_extension"},
    "equilibrium": {"gamma", "omega_b", "eta", "alpha_a", "pools"},
    "empirical": {
        "market", "hardware", "electricity_price", "opex_overhead", "gamma",
        "largest_share", "eta", "alpha_a",
    },
}
REQUIRED_KEYS = {
    "simulate": {"alpha_a", "gamma", "miners", "rounds"},
    "equilibrium": {"omega_b", "alpha_a", "pools"},
    "empirical": {"market", "hardware"},
}


def load_scenario(path: str | None, command: str) -> tuple[dict, Path]:
    if path is None:
        raise UsageError(f"{command} requires --scenario FILE")
    p = Path(path)
    try:
        data = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise UsageError(f"cannot read scenario {path}: {exc}")
    if not isinstance(data, dict):
        raise UsageError("scenario must be a mapping")
    unknown = set(data) - SCENARIO_KEYS[command]
    if unknown:
        raise UsageError(f"unknown scenario keys for {command}: {sorted(unknown)}")
    missing = REQUIRED_KEYS[command] - set(data)
    if missing:
        raise UsageError(f"missing scenario keys for {command}: {sorted(missing)}")
    return data, p.parent


def _as_list(v) -> list[float]:
    if isinstance(v, str):
        return parse_grid(v)
    if isinstance(v, (list, tuple)):
        return [float(x) for x in v]
    return [float(v)]


# commands ---------------------------------------------------------------------

def cmd_threshold(args) -> str:
    aa, gg, ai = parse_grid(args.alpha_a), parse_grid(args.gamma), parse_grid(args.alpha_i)
    if args.sigma is None:
        rows = [
            (a, g, i, markov.complete_shutdown_threshold(a, g, i))
            for a in aa for g in gg for i in ai
        ]
        return _csv(["alpha_a", "gamma", "alpha_i", "omega_threshold"], rows)
    rows = []
    for a in aa:
        for g in gg:
            for i in ai:
                for s in parse_grid(args.sigma):
                    others = s * (1.0 - a - i)
                    ctx = markov.AnalysisContext.make(a, g, i, alpha_Bstar=others)
                    rows.append((a, g, i, s, markov.stop_bound_Q(ctx)))
    return _csv(["alpha_a", "gamma", "alpha_i", "sigma", "omega_threshold"], rows)


def cmd_partial(args) -> str:
    rows = [
        (a, s, *markov.partial_shutdown(a, s))
        for a in parse_grid(args.alpha_a) for s in parse_grid(args.sigma)
    ]
    return _csv(["alpha_a", "sigma", "relative_throughput", "relative_cost"], rows)


def cmd_two_coin(args) -> str:
    rows = [
        (a, g, markov.two_coin_r_star(a, g))
        for a in parse_grid(args.alpha_a) for g in parse_grid(args.gamma)
    ]
    return _csv(["alpha_a", "gamma", "r_star"], rows)


def cmd_simulate(args) -> str:
    sc, _ = load_scenario(args.scenario, "simulate")
    seed = args.seed if args.seed is not None else int(sc.get("seed", 0))
    rounds = args.rounds if args.rounds is not None else int(sc["rounds"])
    miners, strategies = [], []
    for m in sc["miners"]:
        if not isinstance(m, dict) or set(m) - {"alpha", "omega", "cost", "strategy"}:
            raise UsageError(f"bad miner entry {m!r}")
        lam, K = float(sc.get("lam", 1.0)), float(sc.get("block_reward", 1.0))
        c = float(m["cost"]) if "cost" in m else lam * K / float(m.get("omega", 1.5))
        miners.append((float(m["alpha"]), c))
        strategies.append(m.get("strategy", "mine"))
    cfg = make_config(
        float(sc["alpha_a"]), float(sc["gamma"]), miners, strategies, rounds, seed,
        lam=float(sc.get("lam", 1.0)), K=float(sc.get("block_reward", 1.0)),
        spv_extension_enabled=bool(sc.get("spv_extension", False)),
    )
    print(f"seed={seed}", file=sys.stderr)
    return run(cfg).to_csv(fmt)


def _equilibrium_point(job):
    dist, a, gamma, omega = job
    return equilibrium.best_response_fixed_point(dist, a, gamma, omega)


def cmd_equilibrium(args) -> str:
    sc, _ = load_scenario(args.scenario, "equilibrium")
    pools = sc["pools"]
    if not isinstance(pools, dict) or not pools:
        raise UsageError("pools must be a non-empty mapping of label -> share")
    gamma = float(sc.get("gamma", 0.5))
    jobs, keys = [], []
    for omega in _as_list(sc["omega_b"]):
        for eta in _as_list(sc.get("eta", 0.0)):
            dist = equilibrium.PowerDistribution.from_shares({k: float(v) for k, v in pools.items()}, eta)
            for a in _as_list(sc["alpha_a"]):
                jobs.append((dist, a, gamma, omega))
                keys.append((omega, eta, a))
    if _threads() > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(_threads()) as ex:
            results = list(ex.map(_equilibrium_point, jobs))
    else:
        results = [_equilibrium_point(j) for j in jobs]
    return equilibrium.curve_csv([(*k, r) for k, r in zip(keys, results)], fmt)


def cmd_empirical(args) -> dict[str, str]:
    sc, base = load_scenario(args.scenario, "empirical")
    resolve = lambda p: Path(p) if Path(p).is_absolute() else base / p
    records = econ.read_market_csv(resolve(sc["market"]))
    rigs = econ.read_hardware_csv(resolve(sc["hardware"]))
    cost = econ.CostModel(float(sc.get("electricity_price", 0.04)), float(sc.get("opex_overhead", 1.15)))
    gamma = float(sc.get("gamma", 0.5))
    share = float(sc.get("largest_share", 0.2))
    etas = _as_list(sc.get("eta", [0.0]))
    alphas = _as_list(sc.get("alpha_a", []))

    prof = econ.profitability_series(records, rigs, cost)
    thresholds = econ.threshold_series(records, rigs, cost, gamma, share, etas)
    costs = []
    for rec in records:
        rig, _ = econ.best_rig(rec, rigs, cost)
        for a in alphas:
            for eta in etas:
                costs.append((rec.date.isoformat(), a, eta, econ.attack_daily_cost(rec, rig, cost, a, eta)))
    return {
        "profitability.csv": _csv(["date", "omega_b", "rig"], [(d.isoformat(), w, r) for d, w, r in prof]),
        "threshold.csv": _csv(["date", "eta", "alpha_a_min"], [(d.isoformat(), e, t) for d, e, t in thresholds]),
        "daily_cost.csv": _csv(["date", "alpha_a", "eta", "daily_cost"], costs),
    }


RIG_PRESETS = {"s17pro": econ.S17_PRO, "s9se": econ.S9_SE}


def cmd_majority_cost(args) -> str:
    rigs = []
    if args.rig_hashrate_ths is not None:
        if args.rig_power_kw is None:
            raise UsageError("--rig-power-kw is required with --rig-hashrate-ths")
        rigs.append(econ.HardwareSpec.from_ths("custom", args.rig_hashrate_ths, args.rig_power_kw, args.unit_price or 0.0))
    for name in (args.rig or ([] if rigs else list(RIG_PRESETS))):
        if name not in RIG_PRESETS:
            raise UsageError(f"unknown rig preset {name!r}; choose from {sorted(RIG_PRESETS)}")
        rigs.append(RIG_PRESETS[name])
    cost = econ.CostModel(args.electricity_price, args.overhead)
    rows = []
    for rig in rigs:
        units, capex, opex = econ.majority_attack_cost(args.network_hashrate_ths * econ.TH, rig, cost)
        rows.append((rig.name, units, capex, opex))
    return _csv(["rig", "units", "capex", "daily_opex"], rows)


# plumbing -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bdos", description=__doc__.splitlines()[1])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=False):
        p.add_argument("--out", help="output path (directory for empirical); stdout if omitted")
        p.add_argument("--seed", type=int)
        if scenario:
            p.add_argument("--scenario", required=False)
        return p

    p = common(sub.add_parser("threshold", help="complete-shutdown profitability bound sweep"))
    p.add_argument("--alpha-a", default="0.2")
    p.add_argument("--gamma", default="0.5")
    p.add_argument("--alpha-i", default="0.1")
    p.add_argument("--sigma", help="share of the other rational miners that keep mining")
    p.set_defaults(func=cmd_threshold)

    p = common(sub.add_parser("partial", help="partial-shutdown throughput and cost sweep"))
    p.add_argument("--alpha-a", default="0:0.5:0.05")
    p.add_argument("--sigma", default="0:1:0.25")
    p.set_defaults(func=cmd_partial)

    p = common(sub.add_parser("two-coin", help="two-coin defection ratio sweep"))
    p.add_argument("--alpha-a", default="0:0.45:0.05")
    p.add_argument("--gamma", default="0,0.5,1")
    p.set_defaults(func=cmd_two_coin)

    p = common(sub.add_parser("simulate", help="Monte Carlo simulation"), scenario=True)
    p.add_argument("--rounds", type=int)
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("equilibrium", help="best-response equilibrium throughput"), scenario=True)
    p.set_defaults(func=cmd_equilibrium)

    p = common(sub.add_parser("empirical", help="profitability, threshold and cost time series"), scenario=True)
    p.set_defaults(func=cmd_empirical)

    p = common(sub.add_parser("majority-cost", help="cost of a 51% attack"))
    p.add_argument("--network-hashrate-ths", type=float, default=120_000_000)
    p.add_argument("--rig", action="append", help="preset: s17pro or s9se (repeatable)")
    p.add_argument("--rig-hashrate-ths", type=float)
    p.add_argument("--rig-power-kw", type=float)
    p.add_argument("--unit-price", type=float)
    p.add_argument("--electricity-price", type=float, default=0.04)
    p.add_argument("--overhead", type=float, default=1.15)
    p.set_defaults(func=cmd_majority_cost)
    return parser


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    written: list[Path] = []
    try:
        out = args.func(args)
        if isinstance(out, dict):
            if args.out is None:
                for name, text in out.items():
                    sys.stdout.write(f"# {name}\n{text}")
            else:
                outdir = Path(args.out)
                for name, text in out.items():
                    _write_atomic(outdir / name, text)
                    written.append(outdir / name)
        elif args.out is None:
            sys.stdout.write(out)
        else:
            _write_atomic(Path(args.out), out)
    except (UsageError, ParamError, ConfigInvalid, markov.InvalidContext,
            equilibrium.NoConvergence, econ.NoRigAvailable, ValueError, OSError) as exc:
        for path in written:
            path.unlink(missing_ok=True)
        print(f"bdos {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
