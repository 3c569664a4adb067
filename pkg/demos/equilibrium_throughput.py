"""Equilibrium throughput for a pool-sized network as the attacker grows."""
import numpy as np

from bdos.equilibrium import PowerDistribution, equilibrium_curve

# approximate, reconstructed shares; the exact snapshot is external data
pools = [0.178, 0.150, 0.120, 0.113, 0.090, 0.066, 0.065, 0.040,
         0.035, 0.035, 0.035, 0.015, 0.013, 0.010, 0.010, 0.035]
grid = np.round(np.arange(0, 0.31, 0.05), 2)

for eta in (0.0, 0.2):
    print(f"eta={eta}")
    for omega in (1.25, 1.5, 1.75, 2.0):
        curve = equilibrium_curve(PowerDistribution.from_shares(pools, eta), 0.5, omega, grid)
        cells = " ".join(f"{r.relative_throughput:.2f}/{len(r.stopped):2d}" for _, r in curve)
        print(f"  omega={omega:4.2f}: {cells}")

# The largest pool decides between a ~35% and a ~51% slowdown.
for top in (0.178, 0.25):
    dist = PowerDistribution.from_shares([top] + pools[1:], 0.2)
    r = dict(equilibrium_curve(dist, 0.5, 1.75, [0.2]))[0.2]
    print(f"largest pool {top:.3f}: slowdown {1 - r.relative_throughput:.1%}")
