"""How profitable must mining be before an attacker can no longer scare miners off?"""
import numpy as np

from bdos.markov import AnalysisContext, complete_shutdown_threshold, stop_bound_Q

# Below this profitability factor a lone miner of size alpha_i prefers to stop
# as soon as the attacker shows a withheld header.
print("alpha_A  gamma=0  gamma=0.5  gamma=1   (alpha_i = 0.1)")
for alpha_A in np.arange(0.05, 0.45, 0.05):
    row = [complete_shutdown_threshold(alpha_A, g, 0.1) for g in (0.0, 0.5, 1.0)]
    print(f"{alpha_A:6.2f}  " + "  ".join(f"{w:8.3f}" for w in row))

# Bigger miners are harder to scare: they win more of the blocks that end an attack.
print()
for alpha_i in (0.05, 0.1, 0.2, 0.4):
    print(f"alpha_i={alpha_i:4.2f}: bound {complete_shutdown_threshold(0.2, 0.5, alpha_i):.3f}")

# If other miners keep mining, stopping becomes more attractive for everyone.
print()
for sigma in (0.0, 0.5, 1.0):
    others = sigma * (1 - 0.2 - 0.16)
    q = stop_bound_Q(AnalysisContext.make(0.2, 0.5, 0.16, alpha_Bstar=others))
    print(f"share of others still mining {sigma:.1f}: stop below omega = {q:.4f}")
