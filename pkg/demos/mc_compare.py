"""Exact ratio against hit-or-miss Monte Carlo on small models."""

from betapoly.exactvol import BetaModel, expected_volume_ratio
from betapoly.mcgeom import mc_volume_ratio

for d, beta, n in ((2, 0.0, 3), (2, -1.0, 10), (3, 1.0, 6), (4, 2.5, 20)):
    model = BetaModel(d, beta)
    exact, _ = expected_volume_ratio(model, n)
    est = mc_volume_ratio(model, n, 4000, 200, seed=20200101)
    print(f"d={d} beta={beta:<4g} n={n:<3d} exact {exact:.6f}  MC {est.value:.6f} +- {est.std_error:.6f}"
          f"  z {est.z_score(exact):+.2f}")
