"""Profitability, attack threshold and attack cost over a synthetic market series."""
from pathlib import Path

from bdos import econ

data = Path(__file__).parent / "data"
records = econ.read_market_csv(data / "market.csv")
rigs = econ.read_hardware_csv(data / "hardware.csv")

for price in (0.04, 0.05, 0.06):
    cost = econ.CostModel(price)
    print(f"\nelectricity ${price}/kWh")
    for rec in records[::3]:
        rig, w = econ.best_rig(rec, rigs, cost)
        a0 = econ.attack_threshold(w, 0.5, 0.2, 0.0)
        a2 = econ.attack_threshold(w, 0.5, 0.2, 0.2)
        daily = econ.attack_daily_cost(rec, rig, cost, 0.2, 0.2)
        print(f"{rec.date} {rig.name:17s} omega={w:5.2f} "
              f"threshold eta=0: {a0:.3f}  eta=0.2: {a2:.3f}  20% attacker: ${daily:,.0f}/day")
