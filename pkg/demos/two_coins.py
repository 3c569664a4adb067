"""When a second coin exists, miners defect once it pays r* times as much."""
import numpy as np

from bdos.markov import AnalysisContext, TwoCoinContext, two_coin_D, two_coin_r_star

for gamma in (0.0, 0.5, 1.0):
    ratios = [two_coin_r_star(a, gamma) for a in np.arange(0, 0.46, 0.05)]
    print(f"gamma={gamma:.1f}: " + " ".join(f"{r:.3f}" for r in ratios))

# A 20% attacker pushes miners to a rival coin that pays only ~90% as much.
base = AnalysisContext.make(0.2, 0.5, 0.1, alpha_Bstar=0.7, omega_b=2.0)
for r in (0.85, two_coin_r_star(0.2, 0.5), 0.95):
    d = two_coin_D(TwoCoinContext(base, omega_b_prime=2.0 * r))
    print(f"rival pays {r:.4f}x: stay-minus-switch = {d:+.4f}")
