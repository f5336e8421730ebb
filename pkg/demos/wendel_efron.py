"""Wendel probability, the simplex volume bound and Efron's vertex identity."""

from betapoly.exactvol import BetaModel, expected_volume_ratio
from betapoly.mcgeom import mc_origin_containment, mc_vertex_count, mc_volume_ratio, wendel_probability

for d in (2, 3, 4):
    for n in (d + 1, d + 3):
        model = BetaModel(d, 0.0)
        c = mc_origin_containment(model, n, 20000, seed=1)
        v, _ = expected_volume_ratio(model, n)
        print(f"d={d} n={n}  Wendel {wendel_probability(n, d):.5f}  containment MC {c.value:.5f}"
              f"  volume ratio {v:.5f}")

d, n = 3, 20
model = BetaModel(d, 0.0)
f0 = mc_vertex_count(model, n, 5000, seed=2)
prev, _ = expected_volume_ratio(model, n - 1)
print(f"Efron d={d} n={n}: E f0 MC {f0.value:.4f} +- {f0.std_error:.4f}, n (1 - ratio(n-1)) = {n * (1 - prev):.4f}")
print(f"simplex MC d=3: {mc_volume_ratio(model, 4, 20000, 20, seed=3).value:.5f} <= 2^-3")
