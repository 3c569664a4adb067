"""Monte Carlo runs against the three-state chain."""
from bdos.markov import AnalysisContext, stationary, utility_mine, utility_stop
from bdos.sim import make_config, run

c = 1 / 1.5
cfg = make_config(0.2, 0.5, [(0.1, c), (0.7, c)], ["mine", "stop"], 300_000, seed=42)
report = run(cfg)

print("occupancy (sim)  ", " ".join(f"{x:.4f}" for x in report.state_occupancy))
print("occupancy (chain)", " ".join(f"{x:.4f}" for x in stationary(0.2, 0.1)))
print(f"throughput {report.relative_throughput:.4f} vs {1 - stationary(0.2, 0.1).p1:.4f}")

miner, stopper = report.per_miner
print(f"mining miner: {miner.utility_estimate:.4f} vs "
      f"{utility_mine(AnalysisContext.make(0.2, 0.5, 0.1, omega_b=1.5)):.4f}")
print(f"stopping miner: {stopper.utility_estimate:.4f} vs "
      f"{utility_stop(AnalysisContext.make(0.2, 0.5, 0.7, 0.1, omega_b=1.5)):.4f}")

# With a single rational miner the race is hers alone: she always sees her own
# block first, so gamma has no one to sway.
lone = run(make_config(0.2, 0.5, [(0.8, c)], ["mine"], 300_000, seed=42)).per_miner[0]
p0, p1, p2 = stationary(0.2, 0.8)
print(f"\nlone miner: {lone.utility_estimate:.4f}; chain with her own race share "
      f"{p0 + p2 + 0.8 * p1 - c:.4f}; chain with gamma share "
      f"{utility_mine(AnalysisContext.make(0.2, 0.5, 0.8, omega_b=1.5)):.4f}")

# Nobody left to end the attack: the chain stops for good.
halted = run(make_config(0.2, 0.5, [(0.3, c), (0.5, c)], ["stop", "stop"], 10_000, seed=1))
print(f"everyone stops: absorbed={halted.absorbed} after {halted.rounds_completed} rounds")
