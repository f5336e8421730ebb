"""Intrinsic volume ratios through the reduction to a lower-dimensional model."""

from betapoly.exactvol import BetaModel, expected_volume_ratio
from betapoly.intrinsics import expected_intrinsic_ratio, reduce

d, beta, n = 6, 0.0, 20
for k in range(1, d + 1):
    d_red, beta_red = reduce(d, k, beta)
    print(f"k={k}  -> d={d_red}, beta={beta_red:g}   E V_k ratio {expected_intrinsic_ratio(d, k, beta, n):.10f}")

a = expected_intrinsic_ratio(6, 3, 0.0, 20)
b, _ = expected_volume_ratio(BetaModel(3, 1.5), 20)
print(f"two paths: {a:.15f} vs {b:.15f}")

# mean width on the line: expected range of n uniform points is 2 (n-1)/(n+1)
for n in (2, 5, 50):
    print(f"n={n}  k=1 ratio {expected_intrinsic_ratio(1, 1, 0.0, n):.12f}  (n-1)/(n+1) {(n - 1) / (n + 1):.12f}")
