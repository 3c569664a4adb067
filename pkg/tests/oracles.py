"""Independent reference computations used only by the tests."""

from fractions import Fraction

import numpy as np


def ctmc_stationary(rates: dict[tuple[int, int], float], n: int) -> np.ndarray:
    """Solve pi Q = 0, sum(pi) = 1 for a generator given by off-diagonal rates."""
    Q = np.zeros((n, n))
    for (i, j), r in rates.items():
        if i != j:
            Q[i, j] += r
    Q -= np.diag(Q.sum(axis=1))
    A = np.vstack([Q.T, np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    return pi


def attack_chain(alpha_A, b, a=0.0):
    rates = {(0, 1): alpha_A, (1, 2): b, (1, 0): a, (2, 0): 1.0}
    return ctmc_stationary(rates, 3)


def general_utility(alpha_A, gamma, alpha_i, alpha_Bstar, omega, m0, m1, m2):
    """Reward/cost rates over the generic chain, per unit of miner power (lam = K = 1)."""
    b = alpha_Bstar + (alpha_i if m1 else 0.0)
    r2 = 1.0 - (0.0 if m2 else alpha_i)
    pi = ctmc_stationary({(0, 1): alpha_A, (1, 2): b, (2, 0): r2}, 3)
    c = 1.0 / omega
    race = (1 - gamma) * (1 - alpha_A)
    reward = [alpha_i * m0, alpha_i * race * m1, alpha_i * m2]
    cost = [alpha_i * c * m0, alpha_i * c * m1, alpha_i * c * m2]
    return float(np.dot(pi, np.subtract(reward, cost))) / alpha_i


def q_exact(alpha_A, gamma, alpha_i, alpha_Bstar):
    """Stop bound by exact rational substitution (no shared code with bdos)."""
    aA, g, ai, bs = (Fraction(str(x)) for x in (alpha_A, gamma, alpha_i, alpha_Bstar))

    def dist(b):
        z = aA * b + aA + b
        return b / z, aA / z, aA * b / z

    s0, s1, s2 = dist(bs)
    m0, m1, m2 = dist(bs + ai)
    return s1 / (m0 + m2 + (1 - g) * (1 - aA) * m1 - (s0 + s2))


def profitability_by_hand(hashes_per_block, rig_hs, rig_watts, price_kwh, overhead, revenue):
    seconds = Fraction(hashes_per_block) / Fraction(rig_hs)
    kwh = seconds * Fraction(rig_watts) / 1000 / 3600
    cost = kwh * Fraction(str(price_kwh)) * Fraction(str(overhead))
    return Fraction(str(revenue)) / cost
