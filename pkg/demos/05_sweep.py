"""Regret as a function of the horizon.

With a constant setpoint the regret is a transient and stops growing. With a
setpoint that flips every step it grows in proportion to the path length.

Run with ``python3 demos/05_sweep.py``.
"""
from dataclasses import replace

from ogdcontrol.harness import stable_scalar_scenario, sweep, sweep_csv

horizons = [50, 100, 200]
flat = sweep(stable_scalar_scenario(), horizons)
print("constant setpoint")
print(sweep_csv(flat))

s = stable_scalar_scenario(horizon=200)
segs = [{"t_from": t, "theta": [0.3 if t % 2 else -0.3], "eta": [0.15 if t % 2 else -0.15]}
        for t in range(201)]
flipping = sweep(replace(s, costs={**s.costs, "segments": segs}), horizons, workers=2)
print("flipping setpoint")
print(sweep_csv(flipping))
