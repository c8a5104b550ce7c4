"""Dynamic regret against the clairvoyant optimum and its upper bound.

Run with ``python3 demos/04_regret.py``.
"""
from ogdcontrol.harness import benchmark_scenario, execute

res = execute(benchmark_scenario(horizon=100))
rr = res.regret
print("status:", res.status)
print(f"controller cost  {res.trace.costs.sum():.4f}")
print(f"hindsight cost   {res.hindsight.optimal_cost:.4f}")
print(f"regret           {rr.regret:.4f}")
print(f"bound            {rr.bound_value:.4e}  holds: {rr.bound_satisfied}")
print(f"prediction error {rr.prediction_error:.4f} <= {rr.prediction_bound:.4e}: "
      f"{rr.prediction_bound_satisfied}")
print("path lengths:", rr.path.state_variation, rr.path.input_variation)

# The bound is loose but finite; both sides grow with the path length.
print("\nindependent audit:")
print("\n".join(res.audit.lines()))
