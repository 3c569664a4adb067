"""
Domain types for the BDoS mining game: scenario parameters, strategies,
blocks and per-miner ledger views.

All power fractions are normalized so that the adversary plus every rational
miner sums to one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

POWER_TOL = 1e-9

#: Miner identity of the adversary; rational miners are 0..n-1.
ADVERSARY = -1
GENESIS = 0


class ParamError(ValueError):
    """Base class for invalid scenario parameters."""


class PowerNotNormalized(ParamError):
    pass


class NonPositiveParameter(ParamError):
    pass


class GammaOutOfRange(ParamError):
    pass


class Strategy(enum.Enum):
    """Action of a rational miner while the adversary withholds a block."""

    MINE = "mine"
    STOP = "stop"
    SPV = "spv"

    @classmethod
    def parse(cls, value: "str | Strategy") -> "Strategy":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


class Action(enum.Enum):
    MINE = "mine"
    STOP = "stop"


@dataclass(frozen=True)
class ActionProfile:
    """Per-state actions of one miner; only used by the generalized utility."""

    state0: Action = Action.MINE
    state1: Action = Action.MINE
    state2: Action = Action.MINE

    @classmethod
    def of(cls, a0: str, a1: str, a2: str) -> "ActionProfile":
        return cls(Action(a0), Action(a1), Action(a2))


@dataclass(frozen=True)
class Miner:
    alpha: float
    cost: float


@dataclass(frozen=True)
class GameParams:
    """Full parameterization of one attack scenario.

    ``miners`` holds ``(alpha_i, c_i)`` pairs; ``c_i`` is the normalized cost
    per second so that a miner with power ``alpha_i`` pays ``alpha_i * c_i``
    per second of mining.
    """

    alpha_A: float
    gamma: float
    lam: float
    block_reward_K: float
    miners: tuple[Miner, ...] = field(default_factory=tuple)

    def __post_init__(self):
        miners = tuple(m if isinstance(m, Miner) else Miner(*m) for m in self.miners)
        object.__setattr__(self, "miners", miners)
        validate(self)

    @property
    def n(self) -> int:
        return len(self.miners)

    def omega(self, i: int) -> float:
        """Honest-game profitability factor of miner ``i``."""
        return self.lam * self.block_reward_K / self.miners[i].cost


def validate(params: GameParams) -> None:
    """Raise a :class:`ParamError` subclass naming the violated invariant."""
    for name in ("lam", "block_reward_K"):
        value = getattr(params, name)
        if not (value > 0 and math.isfinite(value)):
            raise NonPositiveParameter(f"{name} must be positive, got {value!r}")
    if not 0.0 <= params.gamma <= 1.0:
        raise GammaOutOfRange(f"gamma must lie in [0, 1], got {params.gamma!r}")
    if not 0.0 <= params.alpha_A < 1.0:
        raise NonPositiveParameter(f"alpha_A must lie in [0, 1), got {params.alpha_A!r}")
    for i, m in enumerate(params.miners):
        if not m.alpha > 0:
            raise NonPositiveParameter(f"miner {i}: alpha must be positive, got {m.alpha!r}")
        if not m.cost > 0:
            raise NonPositiveParameter(f"miner {i}: cost must be positive, got {m.cost!r}")
    total = params.alpha_A + math.fsum(m.alpha for m in params.miners)
    if abs(total - 1.0) > POWER_TOL:
        raise PowerNotNormalized(f"total mining power is {total!r}, expected 1")


@dataclass(frozen=True)
class Block:
    id: int
    parent: int | None
    owner: int
    height: int
    header_only: bool = False


@dataclass(frozen=True)
class LedgerView:
    """One miner's local view: known blocks and first-seen order of full blocks."""

    blocks: Mapping[int, Block]
    order: Mapping[int, int]

    @classmethod
    def from_blocks(cls, blocks: Sequence[Block], order: Sequence[int] | None = None) -> "LedgerView":
        """Build a view; ``order`` lists full-block ids in first-seen order
        (defaults to the order of ``blocks``)."""
        table = {b.id: b for b in blocks}
        if order is None:
            order = [b.id for b in blocks if not b.header_only]
        return cls(table, {bid: k for k, bid in enumerate(order)})


def main_chain(view: LedgerView) -> list[int]:
    """Path from genesis to the tip of the longest chain of full blocks.

    Ties between equally long chains go to the tip seen first.
    """
    blocks = view.blocks
    if GENESIS not in blocks:
        raise ValueError("view does not contain the genesis block")

    # full blocks whose entire ancestry is full
    on_chain: dict[int, bool] = {GENESIS: True}

    def connected(bid: int) -> bool:
        path = []
        cur = bid
        while cur not in on_chain:
            b = blocks.get(cur)
            if b is None or b.header_only or b.parent is None:
                on_chain[cur] = False
                break
            path.append(cur)
            cur = b.parent
        ok = on_chain[cur]
        for p in path:
            on_chain[p] = ok
        return ok

    best = GENESIS
    for bid, b in blocks.items():
        if b.header_only or bid not in view.order or not connected(bid):
            continue
        cur = blocks[best]
        if b.height > cur.height or (
            b.height == cur.height and view.order[bid] < view.order[best]
        ):
            best = bid

    chain = [best]
    while chain[-1] != GENESIS:
        chain.append(blocks[chain[-1]].parent)
    chain.reverse()
    return chain
