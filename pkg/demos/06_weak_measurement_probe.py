"""Probing the paw-graph protocol with a weak measurement by the hub.

Against the near-uniform family (1-3t, t, t, t) the hub party can measure
weakly without losing its lead.  Averaging the paw-graph value over the
two outcomes shows the protocol value can rise for t close to 1/4, so the
protocol is not optimal on such states.  The quadratic-response expression
printed alongside disagrees in sign there; both numbers are reported so
the discrepancy stays visible rather than resolved.
"""

from wdistill import g6_weak_improvement

delta = 0.02
print(f"bias delta = {delta}")
print(f"{'t':>6} {'direct average':>16} {'quadratic response':>20}")
for t in (0.05, 0.10, 0.15, 0.20, 0.22, 0.23, 0.24, 0.245):
    rep = g6_weak_improvement(t, delta)
    mark = "  <-- direct average turns positive" if rep.numeric_delta > 0 else ""
    print(f"{t:6.3f} {rep.numeric_delta:16.3e} {rep.quadratic_expression:20.3e}{mark}")

print(
    "\nthe direct average matches the response formula with the bracket"
    "\nterm read as (12 + 8 sqrt(3)); compare at t = 0.24:"
)
import math

t, d = 0.24, 0.02
rep = g6_weak_improvement(t, d)
corrected = -(d * d) * (t * t / (1 - 3 * t)) * (20 - t * (12 + 8 * math.sqrt(3)) / (1 - 3 * t))
print(f"  direct average      : {rep.numeric_delta:+.6e}")
print(f"  corrected response  : {corrected:+.6e}")
print(f"  printed response    : {rep.quadratic_expression:+.6e}")
