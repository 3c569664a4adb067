"""What matching the whole network would cost instead."""
from bdos.econ import S9_SE, S17_PRO, TH, CostModel, majority_attack_cost

cost = CostModel(0.04, 1.15)
for rig in (S17_PRO, S9_SE):
    units, capex, opex = majority_attack_cost(120e6 * TH, rig, cost)
    print(f"{rig.name}: {units:,} units, ${capex / 1e9:.3f}B up front, ${opex / 1e6:.2f}M per day")
