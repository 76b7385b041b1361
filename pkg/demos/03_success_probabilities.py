"""Protocol values across the whole configuration catalog.

For every named target-pair graph this prints the protocol value at the
standard W state, the subset-averaging baseline, and the best closed-form
bound.  The one open case is the paw graph, where the recursion lands at
(3 + sqrt(3))/6 strictly between the baseline 3/4 and the separable
reference 5/6.
"""

import math

from wdistill import graph_catalog, p_fl, p_lpo, resolve_bound, standard_w
from wdistill.lpo import PhaseThreeSolver

solver = PhaseThreeSolver()

print(f"{'graph':<10} {'P_LPO':>12} {'P_FL':>8} {'bound':>10}  bound name")
for name in ["wedge", "triangle", "I", "I'", "I''", "II", "III-a", "III-b",
              "III-c", "IV", "V", "VI"]:
    g = graph_catalog(name)
    s = standard_w(g.labels)
    value = p_lpo(s, g, solver)
    rep = resolve_bound(s, g)
    bound = f"{rep.value:10.6f}" if rep else "      none"
    bname = rep.bound_name if rep else ""
    print(f"{name:<10} {value:12.9f} {p_fl(g):8.4f} {bound}  {bname}")

print("\nthe paw-graph optimization in detail:")
g = graph_catalog("VI")
rep = solver.p3(tuple(g.labels), g.edges)
print(f"  value        = {rep.value:.12f}  (= (3+sqrt(3))/6 = {(3 + math.sqrt(3)) / 6:.12f})")
print(f"  best alpha   = {rep.argmax_alpha:.12f}  (= (sqrt(3)-1)/2 = {(math.sqrt(3) - 1) / 2:.12f})")
print(f"  cycle poly   = {tuple(round(c, 6) for c in rep.f_polynomial)}")

print("\nnon-uniform three-party example (0.5, 0.3, 0.2):")
from wdistill import WState

s = WState([0.5, 0.3, 0.2])
for name in ("wedge", "triangle"):
    g = graph_catalog(name)
    print(f"  {name:<9} P_LPO = {p_lpo(s, g, solver):.6f}")
