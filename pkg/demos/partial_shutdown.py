"""Throughput and attacker cost when only part of the network stops."""
import numpy as np

from bdos.markov import partial_shutdown

sigmas = np.linspace(0, 1, 5)
print("alpha_A " + " ".join(f"sigma={s:4.2f}" for s in sigmas))
for alpha_A in np.arange(0.0, 0.51, 0.1):
    cells = [partial_shutdown(alpha_A, s)[0] for s in sigmas]
    print(f"{alpha_A:6.2f}  " + " ".join(f"{t:10.3f}" for t in cells))

# The attacker pays only while she mines, so her relative cost equals the throughput.
thr, cost = partial_shutdown(0.2, 0.3)
print(f"\nalpha_A=0.2, 30% keep mining: throughput {thr:.3f}, attacker cost {cost:.3f} of full rate")
