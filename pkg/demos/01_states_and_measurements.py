"""Component calculus walkthrough: states, measurements, and the oracle.

A W-class state on N qubits is a vector of per-party weights; the weight
of the all-zero amplitude is whatever is left over.  Binary local
measurements in upper-triangular Kraus form act on the weights through a
one-line update, and a dense 2^N state-vector computation must agree with
it bit for bit.
"""

import numpy as np

from wdistill import (
    LocalMeasurement,
    WState,
    apply_measurement,
    kt_averages,
    random_measurement,
    random_w_state,
    statevector_oracle,
)

state = WState([0.5, 0.3, 0.2])
print("state:", state.components, "x0 =", state.x0)

# party C compares its weight against the largest one
m = LocalMeasurement.diagonal("C", [(0.2 / 0.5, 1.0), (1 - 0.2 / 0.5, 0.0)])
print("\noutcomes of C's reweighting measurement:")
for (p, post), (po, ref) in zip(apply_measurement(state, m), statevector_oracle(state, m)):
    print(f"  p = {p:.6f}  components = {tuple(round(c, 6) for c in post.components)}")
    print(f"  oracle agreement: |dp| = {abs(p - po):.2e}")

# averaged component moves: x0 may only rise, party weights may only fall
rng = np.random.default_rng(0)
worst_up = -np.inf
worst_x0 = np.inf
for _ in range(2000):
    s = random_w_state(rng, 4)
    meas = random_measurement(rng, s.labels[int(rng.integers(4))])
    deltas = kt_averages(s, apply_measurement(s, meas))
    worst_x0 = min(worst_x0, deltas[0])
    worst_up = max(worst_up, max(deltas[1:]))
print("\naveraged-move extremes over 2000 random measurements:")
print(f"  largest average rise of any party weight: {worst_up:.2e}  (should be <= 0)")
print(f"  smallest average change of x0:            {worst_x0:.2e}  (should be >= 0)")
