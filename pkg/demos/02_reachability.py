"""Finite-horizon reachability and the derived state set.

The controller needs every vertex of the state set to be able to reach every
other vertex in ``mu`` steps without leaving the set. This demo checks that
property on two systems.

Run with ``python3 demos/02_reachability.py``.
"""
from ogdcontrol import geometry, system
from ogdcontrol.geometry import Polytope
from ogdcontrol.harness.builtin import BENCH_A, BENCH_B
from ogdcontrol.system import LtiSystem

# Scalar integrator on [-1, 1]: one step cannot cross the segment, two can.
ig = LtiSystem([[1.0]], [[1.0]])
seg = Polytope.box([1.0])
print("integrator mu=1:", system.check_mu(ig, seg, seg, 1).ok)
print("integrator minimal mu:", system.find_mu(ig, seg, seg, 5).mu)

# Three-state benchmark. The raw box fails at any horizon because the
# second state is updated without the input.
bench = LtiSystem(BENCH_A, BENCH_B)
X0, U = Polytope.box([3.0, 2.0, 1.0]), Polytope.box([4.0])
print("benchmark raw box reachable:", system.find_mu(bench, X0, U, 8).ok)

# Scaling a box aligned with the reachable directions does work.
X, cert = system.shrink_to_feasible(bench, X0, U, 8, template=system.canonical_box(bench))
print("derived set certified with mu =", cert.mu, "scale", cert.witness_stats.get("scale"))
print("derived set vertices (inside the raw box):")
for v in geometry.vertices(X):
    print("  ", v.round(4), geometry.contains(X0, v, 1e-9))
