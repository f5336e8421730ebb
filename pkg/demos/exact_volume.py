"""Exact expected volume ratio for a few small and large models."""

import math

from betapoly.asympt import threshold_log_n
from betapoly.exactvol import BetaModel, closed_form_simplex_ratio, expected_volume_ratio
from betapoly.logreal import SampleSize

# triangle in the disk: quadrature vs closed form
model = BetaModel(2, 0.0)
r, rep = expected_volume_ratio(model, 3)
print(f"d=2 beta=0 n=3   ratio {r:.15f}  closed form {closed_form_simplex_ratio(model):.15f}")
print(f"  method {rep.method}, nodes {rep.nodes_used}, rel err est {rep.rel_error_estimate:.1e}")

for d, beta, n in ((3, 0.0, 10), (5, -1.0, 50), (10, 2.0, 1000)):
    r, rep = expected_volume_ratio(BetaModel(d, beta), n)
    print(f"d={d} beta={beta:g} n={n}  ratio {r:.12f}  ({rep.method})")

# n far beyond float range: pass log n instead
d = 2000
log_n = threshold_log_n(d, 0.0, 1.0)
r, rep = expected_volume_ratio(BetaModel(d, 0.0), SampleSize(log_n=log_n))
print(f"d={d} at x=1 (log n = {log_n:.1f}): ratio {r:.6f}, e^-1 = {math.exp(-1):.6f}, {rep.nodes_used} nodes")
