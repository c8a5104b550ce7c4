"""Closed-loop run of the controller on the three-state benchmark.

The setpoint switches twice; the state follows it while staying inside the
derived state set and the inputs stay inside the input box.

Run with ``python3 demos/03_closed_loop.py``.
"""
import numpy as np

from ogdcontrol.controller import run
from ogdcontrol.harness import benchmark_scenario, prepare

s = benchmark_scenario(horizon=100)
setup = prepare(s)
print("\n".join(setup.report.lines()))

trace = run(setup.controller(), setup.schedule, s.x0, s.horizon)
for t in (0, 10, 34, 45, 69, 80, 100):
    theta = setup.schedule.theta(t)
    err = np.linalg.norm(trace.xs[t] - theta)
    print(f"t={t:3d}  x={trace.xs[t].round(3)}  target={theta.round(3)}  error={err:.2e}")

print("worst state slack:", np.max(trace.xs @ setup.X.C.T - setup.X.d))
print("largest |u|:", np.max(np.abs(trace.us)))
alphas = np.array([d.alpha for d in trace.diagnostics])
print(f"steering weight alpha: mean {alphas.mean():.3f}, max {alphas.max():.3f}")
