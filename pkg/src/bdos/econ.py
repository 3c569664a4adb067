"""
Bitcoin-style mining economics: profitability from market and hardware data,
the attacker's resource threshold over time, attack costs, and the cost of a
majority attack for comparison.
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .markov import AnalysisContext, partial_shutdown, stop_bound_Q

log = logging.getLogger(__name__)

HASHES_PER_DIFFICULTY = 2**32
J_PER_KWH = 3.6e6
BITCOIN_LAMBDA = 1.0 / 600.0
TH = 1e12


class RigUnavailable(ValueError):
    pass


class NoRigAvailable(ValueError):
    pass


@dataclass(frozen=True)
class MarketRecord:
    date: dt.date
    difficulty: float
    coin_price: float
    block_reward: float
    network_hashrate: float | None = None  # hashes per second

    def __post_init__(self):
        for name in ("difficulty", "coin_price", "block_reward"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def hashes_per_block(self, per_difficulty: float = HASHES_PER_DIFFICULTY) -> float:
        return self.difficulty * per_difficulty

    def implied_hashrate(self, lam: float = BITCOIN_LAMBDA) -> float:
        if self.network_hashrate is not None:
            return self.network_hashrate
        return self.hashes_per_block() * lam


@dataclass(frozen=True)
class HardwareSpec:
    name: str
    hashrate: float  # H/s
    power: float  # W
    unit_price: float = 0.0
    available_from: dt.date = dt.date.min

    def __post_init__(self):
        if not (self.hashrate > 0 and self.power > 0):
            raise ValueError(f"{self.name}: hashrate and power must be positive")

    @classmethod
    def from_ths(cls, name, hashrate_ths, power_kw, unit_price=0.0, available_from=dt.date.min):
        return cls(name, hashrate_ths * TH, power_kw * 1e3, unit_price, available_from)

    @property
    def power_kw(self) -> float:
        return self.power / 1e3


@dataclass(frozen=True)
class CostModel:
    electricity_price: float = 0.04  # per kWh
    opex_overhead: float = 1.15

    def __post_init__(self):
        if not self.electricity_price > 0:
            raise ValueError("electricity_price must be positive")
        if self.opex_overhead < 1:
            raise ValueError("opex_overhead must be >= 1")

    def daily_cost(self, power_kw: float) -> float:
        return power_kw * 24.0 * self.electricity_price * self.opex_overhead


S17_PRO = HardwareSpec.from_ths("Antminer S17 Pro", 50, 1.975, 2128)
S9_SE = HardwareSpec.from_ths("Antminer S9 SE", 16, 1.280, 350)


def profitability(record: MarketRecord, rig: HardwareSpec, cost: CostModel) -> float:
    """Revenue per unit of operating cost for a miner using ``rig``."""
    if record.date < rig.available_from:
        raise RigUnavailable(f"{rig.name} not available on {record.date}")
    energy_kwh = record.hashes_per_block() / rig.hashrate * rig.power / J_PER_KWH
    block_cost = energy_kwh * cost.electricity_price * cost.opex_overhead
    return record.block_reward * record.coin_price / block_cost


def best_rig(record: MarketRecord, rigs: Iterable[HardwareSpec], cost: CostModel) -> tuple[HardwareSpec, float]:
    best = None
    for rig in rigs:
        if record.date < rig.available_from:
            continue
        w = profitability(record, rig, cost)
        if best is None or w > best[1]:
            best = (rig, w)
    if best is None:
        raise NoRigAvailable(f"no rig available on {record.date}")
    return best


def _attack_works(alpha_A, omega_b, gamma, share, eta) -> bool:
    alpha_i = share * (1.0 - eta) * (1.0 - alpha_A)
    ctx = AnalysisContext.make(alpha_A, gamma, alpha_i, alpha_Bstar=eta * (1.0 - alpha_A), omega_b=omega_b)
    return omega_b < stop_bound_Q(ctx)


def attack_threshold(
    omega_b: float,
    gamma: float,
    largest_rational_share: float,
    eta: float = 0.0,
    tol: float = 1e-6,
) -> float | None:
    """Smallest adversary power that stops the largest rational miner.

    Returns ``None`` when no power below one suffices and ``0.0`` when any
    positive power does.
    """
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta!r}")
    lo, hi = tol * 1e-3, 1.0 - 1e-9
    works = lambda a: _attack_works(a, omega_b, gamma, largest_rational_share, eta)
    if works(lo):
        return 0.0
    if not works(hi):
        return None
    grid = np.linspace(lo, hi, 64)
    flags = [works(a) for a in grid]
    if sum(flags[k] != flags[k + 1] for k in range(len(flags) - 1)) > 1:
        log.info("non-monotone attack feasibility for omega=%g; scanning at 1e-4", omega_b)
        for a in np.arange(lo, hi, 1e-4):
            if works(a):
                return float(a)
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if works(mid):
            hi = mid
        else:
            lo = mid
    return hi


def threshold_series(
    records: Sequence[MarketRecord],
    rigs: Sequence[HardwareSpec],
    cost: CostModel,
    gamma: float,
    largest_rational_share: float,
    eta_list: Sequence[float],
) -> list[tuple[dt.date, float, float | None]]:
    if not records or not rigs:
        raise ValueError("need at least one market record and one rig")
    out = []
    for rec in records:
        _, w = best_rig(rec, rigs, cost)
        for eta in eta_list:
            out.append((rec.date, eta, attack_threshold(w, gamma, largest_rational_share, eta)))
    return out


def profitability_series(records, rigs, cost) -> list[tuple[dt.date, float, str]]:
    out = []
    for rec in records:
        rig, w = best_rig(rec, rigs, cost)
        out.append((rec.date, w, rig.name))
    return out


def attack_daily_cost(
    record: MarketRecord, rig: HardwareSpec, cost: CostModel, alpha_A: float, eta: float
) -> float:
    """Attacker's daily operating cost while rational miners have stopped.

    The attacker is an entrant: her hashrate is added to the observed network.
    """
    if alpha_A <= 0.0:
        return 0.0
    attacker_hashrate = record.implied_hashrate() * alpha_A / (1.0 - alpha_A)
    full_rate = attacker_hashrate / rig.hashrate * cost.daily_cost(rig.power_kw)
    return full_rate * partial_shutdown(alpha_A, eta)[1]


def majority_attack_cost(network_hashrate: float, rig: HardwareSpec, cost: CostModel) -> tuple[int, float, float]:
    """(units, capex, daily opex) to match the whole network's hashrate."""
    units = math.ceil(network_hashrate / rig.hashrate)
    return units, units * rig.unit_price, units * cost.daily_cost(rig.power_kw)


# file formats ---------------------------------------------------------------

def _date(s: str) -> dt.date:
    return dt.date.fromisoformat(s.strip())


def read_market_csv(path: str | Path) -> list[MarketRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        nh = (row.get("network_hashrate") or "").strip()
        out.append(MarketRecord(
            _date(row["date"]), float(row["difficulty"]), float(row["coin_price"]),
            float(row["block_reward"]), float(nh) if nh else None,
        ))
    return sorted(out, key=lambda r: r.date)


def read_hardware_csv(path: str | Path) -> list[HardwareSpec]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            HardwareSpec.from_ths(
                row["name"], float(row["hashrate_ths"]), float(row["power_kw"]),
                float(row["unit_price"]), _date(row["available_from"]),
            )
            for row in csv.DictReader(fh)
        ]
