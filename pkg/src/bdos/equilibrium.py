"""
Best-response search for the stop/mine equilibrium among heterogeneous
rational miners sharing one profitability factor.

The adversary enters on top of the existing network, so every non-adversarial
power share is scaled by ``1 - alpha_A``; altruistic miners hold ``eta`` of the
non-adversarial power and always mine.

A miner's incentive to stop grows with the power of the others that keep
mining, so best responses are strategic substitutes. Simultaneous updates can
cycle; miners therefore update one at a time (smallest first) until a full
sweep changes nothing.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

from .markov import AnalysisContext, partial_shutdown, stop_bound_Q
from .model import GameParams, Miner


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class PowerDistribution:
    """Rational miners' relative shares plus the altruistic fraction ``eta``.

    Shares are normalized to sum to one over the rational miners.
    """

    rational: tuple[tuple[str, float], ...]
    eta: float = 0.0

    def __post_init__(self):
        rational = tuple((str(k), float(v)) for k, v in self.rational)
        if not rational:
            raise ValueError("need at least one rational miner")
        if len({k for k, _ in rational}) != len(rational):
            raise ValueError("miner labels must be unique")
        if any(v <= 0 for _, v in rational):
            raise ValueError("rational powers must be positive")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")
        object.__setattr__(self, "rational", rational)

    @classmethod
    def from_shares(cls, shares: dict[str, float] | Sequence[float], eta: float = 0.0):
        if isinstance(shares, dict):
            items = list(shares.items())
        else:
            items = [(f"miner_{k}", v) for k, v in enumerate(shares)]
        return cls(tuple(items), eta)

    def embed(self, alpha_A: float) -> tuple[list[tuple[str, float]], float]:
        """Absolute powers of rational miners and the altruists' total power."""
        total = math.fsum(v for _, v in self.rational)
        scale = (1.0 - self.eta) * (1.0 - alpha_A) / total
        return [(k, v * scale) for k, v in self.rational], self.eta * (1.0 - alpha_A)


@dataclass(frozen=True)
class EquilibriumResult:
    stopped: frozenset[str]
    active_power: float
    relative_throughput: float
    iterations: int


def _context(alpha_A, gamma, omega_b, alpha_i, others):
    rest = max(0.0, 1.0 - alpha_A - alpha_i)
    others = min(max(others, 0.0), rest)
    miners = [Miner(alpha_i, 1.0 / omega_b)]
    if rest > 1e-12:
        miners.append(Miner(rest, 1.0 / omega_b))
    params = GameParams(alpha_A, gamma, 1.0, 1.0, tuple(miners))
    return AnalysisContext(params, alpha_i, 1.0 / omega_b, others)


def prefers_mining(alpha_A, gamma, omega_b, alpha_i, others_active) -> bool:
    """Best response of a miner of size ``alpha_i``; ties go to mining."""
    if alpha_A == 0.0:
        return True
    q = stop_bound_Q(_context(alpha_A, gamma, omega_b, alpha_i, others_active))
    return omega_b >= q


def best_response_fixed_point(
    dist: PowerDistribution,
    alpha_A: float,
    gamma: float,
    omega_b: float,
    max_sweeps: int | None = None,
) -> EquilibriumResult:
    """Iterate best responses from the all-mining state to a fixed point."""
    powers, altruists = dist.embed(alpha_A)
    n = len(powers)
    if max_sweeps is None:
        max_sweeps = 4 * (n + 1)
    order = sorted(range(n), key=lambda k: (powers[k][1], k))
    mining = [True] * n

    def others_active(k):
        return altruists + math.fsum(a for j, (_, a) in enumerate(powers) if j != k and mining[j])

    sweeps = 0
    while True:
        sweeps += 1
        if sweeps > max_sweeps:
            raise NoConvergence(
                f"no fixed point after {max_sweeps} sweeps (alpha_A={alpha_A}, omega_b={omega_b})"
            )
        changed = False
        for k in order:
            want = prefers_mining(alpha_A, gamma, omega_b, powers[k][1], others_active(k))
            if want != mining[k]:
                mining[k] = want
                changed = True
        if not changed:
            break

    active = altruists + math.fsum(a for (_, a), m in zip(powers, mining) if m)
    result = EquilibriumResult(
        stopped=frozenset(name for (name, _), m in zip(powers, mining) if not m),
        active_power=active,
        relative_throughput=partial_shutdown(alpha_A, active / (1.0 - alpha_A))[0],
        iterations=sweeps,
    )
    if not is_fixed_point(dist, alpha_A, gamma, omega_b, result):
        raise NoConvergence("post-hoc fixed point check failed")
    return result


def is_fixed_point(dist, alpha_A, gamma, omega_b, result: EquilibriumResult) -> bool:
    """True when no rational miner strictly prefers to switch."""
    powers, altruists = dist.embed(alpha_A)
    mining = [name not in result.stopped for name, _ in powers]
    for k, (_, a) in enumerate(powers):
        others = altruists + math.fsum(b for j, (_, b) in enumerate(powers) if j != k and mining[j])
        if prefers_mining(alpha_A, gamma, omega_b, a, others) != mining[k]:
            return False
    return True


def throughput_curve(
    dist: PowerDistribution,
    gamma: float,
    omega_b: float,
    alpha_A_grid: Sequence[float],
) -> list[tuple[float, float]]:
    return [(a, r.relative_throughput) for a, r in equilibrium_curve(dist, gamma, omega_b, alpha_A_grid)]


def equilibrium_curve(dist, gamma, omega_b, alpha_A_grid) -> list[tuple[float, EquilibriumResult]]:
    out = []
    for a in alpha_A_grid:
        if not 0.0 <= a < 1.0:
            raise ValueError(f"alpha_A grid value {a!r} outside [0, 1)")
        try:
            out.append((a, best_response_fixed_point(dist, a, gamma, omega_b)))
        except NoConvergence as exc:
            raise NoConvergence(f"at alpha_A={a}: {exc}") from exc
    return out


def curve_csv(rows, fmt=lambda x: f"{x:.9g}") -> str:
    """rows: iterable of (omega_b, eta, alpha_A, EquilibriumResult)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega_b", "eta", "alpha_a", "relative_throughput", "stopped_count", "active_power"])
    for omega, eta, a, r in rows:
        w.writerow([fmt(omega), fmt(eta), fmt(a), fmt(r.relative_throughput), len(r.stopped), fmt(r.active_power)])
    return buf.getvalue()
