"""
Discrete-event Monte Carlo simulation of the mining game under a BDoS attack.

The scheduler runs in rounds. Each round it polls the adversary and every
rational miner for participation, draws an exponential round duration with
rate ``lam * active_power``, picks a winner proportionally to power, and
delivers the new block (or only its header, for an adversary winner) to every
ledger.

Random draws come from one PCG64 stream consumed in a fixed order per round:
duration, winner, then one draw per non-winning rational miner when a race
starts. Reports are therefore bit-identical for a given config and seed.

The simulator reproduces the closed forms of :mod:`bdos.markov` as long as the
race delivery probability ``gamma (1 - alpha_A) / (1 - alpha_A - alpha_w)``
stays within [0, 1] for every miner that can start a race. When it exceeds 1
it is clamped; the winner then keeps ``alpha_w`` rather than
``(1 - gamma)(1 - alpha_A)`` of the power behind her block.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import ADVERSARY, GENESIS, Block, GameParams, LedgerView, Strategy

log = logging.getLogger(__name__)

INACTIVE, WITHHELD, RACE = 0, 1, 2
_BUF = 1 << 16


class ConfigInvalid(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    params: GameParams
    strategy_table: tuple[Strategy, ...]
    rounds: int
    seed: int = 0
    spv_extension_enabled: bool = False
    record_ledgers: bool = False

    def __post_init__(self):
        table = tuple(Strategy.parse(s) for s in self.strategy_table)
        object.__setattr__(self, "strategy_table", table)
        if len(table) != self.params.n:
            raise ConfigInvalid(
                f"strategy table has {len(table)} entries for {self.params.n} miners"
            )
        if Strategy.SPV in table and not self.spv_extension_enabled:
            raise ConfigInvalid("SPV strategies require spv_extension_enabled")
        if not (isinstance(self.rounds, (int, np.integer)) and self.rounds > 0):
            raise ConfigInvalid(f"rounds must be a positive integer, got {self.rounds!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigInvalid("seed must fit in 64 unsigned bits")


@dataclass
class MinerStats:
    label: str
    alpha: float
    strategy: str
    revenue: float = 0.0
    cost: float = 0.0
    blocks_on_main_chain: int = 0
    blocks_orphaned: int = 0
    utility_estimate: float = 0.0


@dataclass
class SimReport:
    per_miner: list[MinerStats]
    adversary: MinerStats
    state_occupancy: tuple[float, float, float]
    relative_throughput: float
    elapsed_model_time: float
    rounds_completed: int
    absorbed: bool
    seed: int
    main_chain_length: int = 0

    CSV_COLUMNS = (
        "row", "alpha", "strategy", "revenue", "cost", "blocks_on_main_chain",
        "blocks_orphaned", "utility_estimate", "occupancy_inactive",
        "occupancy_withheld", "occupancy_race", "relative_throughput",
        "elapsed_model_time", "rounds", "seed",
    )

    def to_csv(self, fmt=lambda x: f"{x:.9g}") -> str:
        """One row per miner (adversary first), then a ``summary`` row."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        blank = [""] * 7
        for m in [self.adversary, *self.per_miner]:
            w.writerow([
                m.label, fmt(m.alpha), m.strategy, fmt(m.revenue), fmt(m.cost),
                m.blocks_on_main_chain, m.blocks_orphaned, fmt(m.utility_estimate),
                *blank,
            ])
        occ = [fmt(x) for x in self.state_occupancy]
        w.writerow([
            "summary", "", "", "", "", self.main_chain_length - 1, "", "",
            *occ, fmt(self.relative_throughput), fmt(self.elapsed_model_time),
            self.rounds_completed, self.seed,
        ])
        return buf.getvalue()


class _Uniforms:
    def __init__(self, seed: int):
        self._rng = np.random.Generator(np.random.PCG64(int(seed)))
        self._buf: list[float] = []
        self._pos = 0

    def __call__(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._rng.random(_BUF).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u


@dataclass
class _Ledger:
    """Recorded view of one participant (only kept when record_ledgers is set)."""

    order: list[int] = field(default_factory=lambda: [GENESIS])
    headers: set[int] = field(default_factory=set)


class Simulation:
    """Stateful scheduler; use :func:`run` unless you need to inspect ledgers."""

    def __init__(self, config: SimConfig):
        self.config = config
        p = config.params
        self.n = p.n
        self.alphas = [m.alpha for m in p.miners]
        self.costs = [m.cost for m in p.miners]
        self.strategy = list(config.strategy_table)

        # block table, indexed by issuance order; genesis is block 0
        self.parent: list[int] = [-1]
        self.owner: list[int] = [ADVERSARY]
        self.height: list[int] = [0]
        self.published: list[bool] = [True]  # full block known to the network
        self.connected: list[bool] = [True]  # whole ancestry published in full

        self.extend = [GENESIS] * self.n
        self.header = [None] * self.n  # withheld header known to miner i
        self.adv_extend = GENESIS
        self.withheld: int | None = None
        self.state = INACTIVE

        self.ledgers = (
            {i: _Ledger() for i in [ADVERSARY, *range(self.n)]} if config.record_ledgers else None
        )
        self._warned = False

    # ledger bookkeeping ---------------------------------------------------
    def _add_block(self, who: int, bid: int) -> None:
        if self.ledgers is not None:
            led = self.ledgers[who]
            led.order.append(bid)
            led.headers.discard(bid)
        if not self.connected[bid]:
            return
        if who == ADVERSARY:
            if bid == self.withheld:
                self.withheld = None
            if self.height[bid] > self.height[self.adv_extend]:
                self.adv_extend = bid
        else:
            if self.header[who] == bid:
                self.header[who] = None
            if self.height[bid] > self.height[self.extend[who]]:
                self.extend[who] = bid

    def _add_header(self, who: int, bid: int) -> None:
        self.header[who] = bid
        if self.ledgers is not None:
            self.ledgers[who].headers.add(bid)

    def _new_block(self, parent: int, owner: int, published: bool) -> int:
        bid = len(self.parent)
        self.parent.append(parent)
        self.owner.append(owner)
        self.height.append(self.height[parent] + 1)
        self.published.append(published)
        self.connected.append(published and self.connected[parent])
        return bid

    def _delivery_probability(self, alpha_w: float) -> float:
        p = self.config.params
        rest = 1.0 - p.alpha_A - alpha_w
        q = p.gamma * (1.0 - p.alpha_A) / rest if rest > 0 else 1.0
        if q > 1.0:
            if not self._warned:
                log.warning(
                    "race delivery probability %.6g exceeds 1 for winner power %.6g; clamped",
                    q, alpha_w,
                )
                self._warned = True
            q = 1.0
        return q

    # main loop ------------------------------------------------------------
    def run(self) -> SimReport:
        cfg = self.config
        p = cfg.params
        lam, aA = p.lam, p.alpha_A
        n, alphas = self.n, self.alphas
        draw = _Uniforms(cfg.seed)

        occupancy = [0.0, 0.0, 0.0]
        cost = [0.0] * n
        adv_cost = 0.0
        clock = 0.0
        settled = (0.0, [0.0] * n, 0)  # (time, costs, last block id) at last return to state 0
        absorbed = False
        rounds_done = 0

        for _ in range(cfg.rounds):
            # (1) poll participants
            adv_active = self.withheld is None and aA > 0.0
            templates: list[tuple[int, int]] = []  # (miner, parent block)
            total = aA if adv_active else 0.0
            if adv_active:
                templates.append((ADVERSARY, self.adv_extend))
            for i in range(n):
                if self.header[i] is None:
                    templates.append((i, self.extend[i]))
                    total += alphas[i]
                else:
                    s = self.strategy[i]
                    if s is Strategy.MINE:
                        templates.append((i, self.extend[i]))
                        total += alphas[i]
                    elif s is Strategy.SPV:
                        templates.append((i, self.header[i]))
                        total += alphas[i]
            if total <= 0.0:
                absorbed = True
                break

            # (2) round duration and costs
            dt = -math.log1p(-draw()) / (lam * total)
            clock += dt
            occupancy[self.state] += dt
            for who, _parent in templates:
                if who == ADVERSARY:
                    adv_cost += dt
                else:
                    cost[who] += self.costs[who] * alphas[who] * dt

            # (3) winner proportional to active power
            target = draw() * total
            acc = 0.0
            winner, tmpl = templates[-1]
            for who, parent in templates:
                acc += aA if who == ADVERSARY else alphas[who]
                if target < acc:
                    winner, tmpl = who, parent
                    break
            rounds_done += 1

            # (4)-(7) delivery
            if winner == ADVERSARY:
                if self.state == RACE:
                    bid = self._new_block(tmpl, ADVERSARY, True)
                    for who in [ADVERSARY, *range(n)]:
                        self._add_block(who, bid)
                    self.state = INACTIVE
                else:
                    bid = self._new_block(tmpl, ADVERSARY, False)
                    self.withheld = bid
                    for i in range(n):
                        self._add_header(i, bid)
                    self.state = WITHHELD
            else:
                spv_block = self.withheld is not None and tmpl == self.withheld
                bid = self._new_block(tmpl, winner, True)
                if spv_block:
                    # the adversary abandons the header; the SPV block is dead
                    self.withheld = None
                    for i in range(n):
                        self.header[i] = None
                    for who in [ADVERSARY, *range(n)]:
                        self._add_block(who, bid)
                    self.state = INACTIVE
                elif self.withheld is not None and self.height[bid] == self.height[self.withheld]:
                    rival = self.withheld
                    self.withheld = None
                    self.published[rival] = True
                    self.connected[rival] = self.connected[self.parent[rival]]
                    self._add_block(winner, bid)
                    self._add_block(winner, rival)
                    self._add_block(ADVERSARY, rival)
                    self._add_block(ADVERSARY, bid)
                    q = self._delivery_probability(alphas[winner]) if n > 1 else 0.0
                    for i in range(n):
                        if i == winner:
                            continue
                        if draw() < q:
                            self._add_block(i, rival)
                            self._add_block(i, bid)
                        else:
                            self._add_block(i, bid)
                            self._add_block(i, rival)
                    self.state = RACE
                else:
                    for who in [ADVERSARY, *range(n)]:
                        self._add_block(who, bid)
                    self.state = INACTIVE

            if self.state == INACTIVE:
                settled = (clock, list(cost), len(self.parent) - 1)

        return self._report(occupancy, cost, adv_cost, clock, settled, absorbed, rounds_done)

    # reporting ------------------------------------------------------------
    def final_chain(self) -> list[int]:
        """Main chain at the end of the run, as seen by the adversary."""
        chain = [self.adv_extend]
        while chain[-1] != GENESIS:
            chain.append(self.parent[chain[-1]])
        chain.reverse()
        return chain

    def view(self, who: int) -> LedgerView:
        """Reconstruct a participant's ledger; requires ``record_ledgers``."""
        if self.ledgers is None:
            raise RuntimeError("ledgers were not recorded; set record_ledgers=True")
        led = self.ledgers[who]
        blocks = [
            Block(b, None if b == GENESIS else self.parent[b], self.owner[b], self.height[b])
            for b in led.order
        ]
        blocks += [
            Block(b, self.parent[b], self.owner[b], self.height[b], header_only=True)
            for b in led.headers
        ]
        return LedgerView.from_blocks(blocks, led.order)

    def _report(self, occupancy, cost, adv_cost, clock, settled, absorbed, rounds_done) -> SimReport:
        cfg = self.config
        p = cfg.params
        K = p.block_reward_K
        chain = self.final_chain()
        on_chain = set(chain)

        mined = [0] * self.n
        kept = [0] * self.n
        kept_settled = [0] * self.n
        adv_mined = adv_kept = 0
        last_settled = settled[2]
        for b in range(1, len(self.owner)):
            o = self.owner[b]
            if o == ADVERSARY:
                adv_mined += 1
                adv_kept += b in on_chain
            else:
                mined[o] += 1
                if b in on_chain:
                    kept[o] += 1
                    if b <= last_settled:
                        kept_settled[o] += 1

        if absorbed:
            elapsed = math.inf
            occ = (0.0, 1.0, 0.0)
            throughput = 0.0
        else:
            elapsed = clock
            occ = tuple(x / clock for x in occupancy) if clock > 0 else (1.0, 0.0, 0.0)
            throughput = (len(chain) - 1) / (p.lam * clock) if clock > 0 else 0.0

        t_settled, cost_settled, _ = settled
        per_miner = []
        for i, m in enumerate(p.miners):
            if absorbed or t_settled <= 0:
                u = 0.0
            else:
                u = (K * kept_settled[i] - cost_settled[i]) / (t_settled * m.alpha)
            per_miner.append(MinerStats(
                label=f"miner_{i}", alpha=m.alpha, strategy=self.strategy[i].value,
                revenue=K * kept[i], cost=cost[i], blocks_on_main_chain=kept[i],
                blocks_orphaned=mined[i] - kept[i], utility_estimate=u,
            ))
        adversary = MinerStats(
            label="adversary", alpha=p.alpha_A, strategy="bdos", revenue=K * adv_kept,
            # adversary cost is reported in units of power-seconds (her cost rate is not modeled)
            cost=p.alpha_A * adv_cost, blocks_on_main_chain=adv_kept,
            blocks_orphaned=adv_mined - adv_kept,
        )
        return SimReport(
            per_miner=per_miner, adversary=adversary, state_occupancy=occ,
            relative_throughput=throughput, elapsed_model_time=elapsed,
            rounds_completed=rounds_done, absorbed=absorbed, seed=int(cfg.seed),
            main_chain_length=len(chain),
        )


def run(config: SimConfig) -> SimReport:
    return Simulation(config).run()


def estimate_utilities(report: SimReport, params: GameParams) -> list[float]:
    """(revenue - cost) / (elapsed time * alpha_i) per rational miner."""
    out = []
    for stats, m in zip(report.per_miner, params.miners):
        if math.isinf(report.elapsed_model_time):
            out.append(0.0)
        else:
            out.append((stats.revenue - stats.cost) / (report.elapsed_model_time * m.alpha))
    return out


def make_config(
    alpha_A: float,
    gamma: float,
    miners: Sequence[tuple[float, float]],
    strategies: Sequence[Strategy | str],
    rounds: int,
    seed: int = 0,
    lam: float = 1.0,
    K: float = 1.0,
    spv_extension_enabled: bool = False,
    record_ledgers: bool = False,
) -> SimConfig:
    params = GameParams(alpha_A, gamma, lam, K, tuple(miners))
    return SimConfig(params, tuple(strategies), rounds, seed, spv_extension_enabled, record_ledgers)
