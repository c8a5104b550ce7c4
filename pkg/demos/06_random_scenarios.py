"""Seeded random scenarios and what the harness checks on each.

Run with ``python3 demos/06_random_scenarios.py``.
"""
from ogdcontrol.harness import execute, random_scenario, scenario_to_toml

print(scenario_to_toml(random_scenario(0)))

for seed in range(8):
    res = execute(random_scenario(seed))
    s = res.setup.scenario
    rr = res.regret
    print(f"seed {seed}: n={s.system.n} m={s.system.m} T={s.horizon:3d} mu={res.setup.cfg.mu} "
          f"regret={rr.regret:9.4f} bound={rr.bound_value:.2e} audit={res.audit.passed}")
