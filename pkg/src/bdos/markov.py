"""
Closed-form analysis of the three-state attack chain.

State 0: no attack in progress, everyone mines on the main-chain tip.
State 1: the adversary holds a withheld block and has published its header.
State 2: a rational block competes with the released adversary block.

The chain's rates (in units of the round rate constant) are
0->1: alpha_A, 1->2: b, 1->0: a, 2->0: 1, where ``b`` is the power mining on
the main-chain tip during the attack and ``a`` the power SPV-mining on the
adversary's header.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Action, ActionProfile, GameParams, Miner, Strategy

CTX_TOL = 1e-12


class InvalidContext(ValueError):
    pass


@dataclass(frozen=True)
class StateDistribution:
    p0: float
    p1: float
    p2: float

    def __iter__(self):
        return iter((self.p0, self.p1, self.p2))


@dataclass(frozen=True)
class AnalysisContext:
    """Scenario seen from one focal rational miner.

    ``alpha_Bstar`` and ``alpha_BA`` exclude the focal miner: they are the
    power of the *other* rational miners that keep mining on the main-chain tip
    (resp. SPV-mine on the adversary's header) while the attack is active.
    """

    params: GameParams
    alpha_i: float
    c_i: float
    alpha_Bstar: float = 0.0
    alpha_BA: float = 0.0

    def __post_init__(self):
        if not (self.alpha_i > 0 and self.c_i > 0):
            raise InvalidContext("alpha_i and c_i must be positive")
        if self.alpha_Bstar < 0 or self.alpha_BA < 0:
            raise InvalidContext("alpha_Bstar and alpha_BA must be non-negative")
        room = 1.0 - self.params.alpha_A - self.alpha_i
        if self.alpha_Bstar + self.alpha_BA > room + CTX_TOL:
            raise InvalidContext(
                f"alpha_Bstar + alpha_BA = {self.alpha_Bstar + self.alpha_BA!r} "
                f"exceeds the other miners' power {room!r}"
            )

    @classmethod
    def make(
        cls,
        alpha_A: float,
        gamma: float,
        alpha_i: float,
        alpha_Bstar: float = 0.0,
        alpha_BA: float = 0.0,
        omega_b: float = 1.5,
        lam: float = 1.0,
        K: float = 1.0,
    ) -> "AnalysisContext":
        """Build a context from bare numbers; the remaining power is lumped
        into one rational miner with the focal miner's cost."""
        c_i = lam * K / omega_b
        miners = [Miner(alpha_i, c_i)]
        rest = 1.0 - alpha_A - alpha_i
        if rest > 1e-12:
            miners.append(Miner(rest, c_i))
        elif rest < -1e-12:
            raise InvalidContext("alpha_A + alpha_i exceeds 1")
        params = GameParams(alpha_A, gamma, lam, K, tuple(miners))
        return cls(params, alpha_i, c_i, alpha_Bstar, alpha_BA)

    @property
    def alpha_A(self) -> float:
        return self.params.alpha_A

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def omega_b(self) -> float:
        return self.params.lam * self.params.block_reward_K / self.c_i

    @property
    def race_share(self) -> float:
        """Expected power backing a rational block in a race."""
        return (1.0 - self.gamma) * (1.0 - self.alpha_A)

    def with_others(self, alpha_Bstar: float, alpha_BA: float = 0.0) -> "AnalysisContext":
        return AnalysisContext(self.params, self.alpha_i, self.c_i, alpha_Bstar, alpha_BA)


@dataclass(frozen=True)
class TwoCoinContext:
    base: AnalysisContext
    omega_b_prime: float

    def __post_init__(self):
        if not self.omega_b_prime > 0:
            raise InvalidContext("omega_b_prime must be positive")


def stationary(alpha_A: float, b: float, a: float = 0.0) -> StateDistribution:
    """Stationary distribution of the attack chain with on-tip power ``b``
    and SPV power ``a`` during the attack."""
    if alpha_A == 0.0:
        return StateDistribution(1.0, 0.0, 0.0)
    z = alpha_A * b + alpha_A + a + b
    return StateDistribution((b + a) / z, alpha_A / z, alpha_A * b / z)


def effective_power(ctx: AnalysisContext, s: Strategy) -> tuple[float, float]:
    """(on-tip power, SPV power) during the attack when the focal miner plays ``s``."""
    if s is Strategy.MINE:
        return ctx.alpha_Bstar + ctx.alpha_i, ctx.alpha_BA
    if s is Strategy.SPV:
        return ctx.alpha_Bstar, ctx.alpha_BA + ctx.alpha_i
    return ctx.alpha_Bstar, ctx.alpha_BA


def state_distribution(ctx: AnalysisContext, s: Strategy) -> StateDistribution:
    b, a = effective_power(ctx, s)
    return stationary(ctx.alpha_A, b, a)


def _reward_rate(ctx: AnalysisContext) -> float:
    return ctx.params.lam * ctx.params.block_reward_K


def utility_stop(ctx: AnalysisContext) -> float:
    p0, p1, p2 = state_distribution(ctx, Strategy.STOP)
    return (p0 + p2) * _reward_rate(ctx) - (1.0 - p1) * ctx.c_i


def mine_share(ctx: AnalysisContext) -> float:
    """Fraction of the honest reward rate kept by a miner playing Mine."""
    p0, p1, p2 = state_distribution(ctx, Strategy.MINE)
    return p0 + p2 + ctx.race_share * p1


def utility_mine(ctx: AnalysisContext) -> float:
    return mine_share(ctx) * _reward_rate(ctx) - ctx.c_i


def utility_spv(ctx: AnalysisContext) -> float:
    p0, _, p2 = state_distribution(ctx, Strategy.SPV)
    return (p0 + p2) * _reward_rate(ctx) - ctx.c_i


def utility(ctx: AnalysisContext, s: Strategy) -> float:
    return {Strategy.MINE: utility_mine, Strategy.STOP: utility_stop, Strategy.SPV: utility_spv}[s](ctx)


def utility_general(ctx: AnalysisContext, profile: ActionProfile) -> float:
    """Utility of a miner whose action may differ in every state.

    Other miners behave as in the two-strategy chains: everyone mines in
    states 0 and 2, and ``alpha_Bstar`` of them mine during the attack.
    """
    if ctx.alpha_BA != 0.0:
        raise InvalidContext("utility_general requires alpha_BA == 0")
    m0, m1, m2 = (a is Action.MINE for a in (profile.state0, profile.state1, profile.state2))
    aA, ai = ctx.alpha_A, ctx.alpha_i
    lam, K = ctx.params.lam, ctx.params.block_reward_K

    b = ctx.alpha_Bstar + (ai if m1 else 0.0)  # 1 -> 2
    r2 = 1.0 - (0.0 if m2 else ai)  # 2 -> 0
    if aA == 0.0:
        p0, p1, p2 = 1.0, 0.0, 0.0
    else:
        # balance: aA*p0 = b*p1 = r2*p2
        w0, w1, w2 = b / aA, 1.0, b / r2
        z = w0 + w1 + w2
        p0, p1, p2 = w0 / z, w1 / z, w2 / z

    revenue = lam * ai * K * (
        (p0 if m0 else 0.0) + (p2 if m2 else 0.0) + (ctx.race_share * p1 if m1 else 0.0)
    )
    active = (p0 if m0 else 0.0) + (p1 if m1 else 0.0) + (p2 if m2 else 0.0)
    return (revenue - ai * ctx.c_i * active) / ai


def utility_difference_D(ctx: AnalysisContext) -> float:
    """Normalized advantage of stopping over mining during the attack."""
    return (utility_stop(ctx) - utility_mine(ctx)) / ctx.c_i


def stop_bound_Q(ctx: AnalysisContext) -> float:
    """Largest profitability factor at which stopping beats mining.

    Returns ``math.inf`` when mining never keeps up with stopping. Without an
    attacker the bound is the honest break-even point, 1.
    """
    if ctx.alpha_A == 0.0:
        return 1.0
    stop = state_distribution(ctx, Strategy.STOP)
    denom = mine_share(ctx) - (stop.p0 + stop.p2)
    if denom <= 0.0:
        return math.inf
    return stop.p1 / denom


def complete_shutdown_threshold(alpha_A: float, gamma: float, alpha_i: float) -> float:
    """Bound on omega below which stopping is dominant for a miner of size alpha_i."""
    num = alpha_A + alpha_i + alpha_A * alpha_i
    den = alpha_i + alpha_A * alpha_i + (1.0 - gamma) * alpha_A * (1.0 - alpha_A)
    return num / den


def spv_dominance_gap(ctx: AnalysisContext) -> float:
    return utility_mine(ctx) - utility_spv(ctx)


def two_coin_W(ctx: AnalysisContext) -> float:
    if ctx.alpha_BA != 0.0:
        raise InvalidContext("two-coin analysis requires alpha_BA == 0")
    return mine_share(ctx)


def two_coin_D(tc: TwoCoinContext) -> float:
    """Normalized gain of staying on the attacked coin over switching."""
    return two_coin_W(tc.base) * tc.base.omega_b - tc.omega_b_prime


def two_coin_r_star(alpha_A: float, gamma: float) -> float:
    """Smallest competitor/attacked profitability ratio that makes miners defect."""
    return (1.0 - alpha_A) * (alpha_A * (gamma - 2.0) - 1.0) / (alpha_A**2 - alpha_A - 1.0)


def partial_shutdown(alpha_A: float, sigma: float) -> tuple[float, float]:
    """(relative throughput, relative attacker cost) when a fraction ``sigma``
    of the non-adversarial power keeps mining during the attack."""
    p1 = stationary(alpha_A, sigma * (1.0 - alpha_A)).p1
    return 1.0 - p1, 1.0 - p1
