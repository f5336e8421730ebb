"""Phase-transition curve: exact ratio at the threshold sample size vs e^-x."""

import math

from betapoly.asympt import threshold_log_n
from betapoly.exactvol import BetaModel, expected_volume_ratio
from betapoly.logreal import SampleSize

xs = (0.25, 0.5, 1.0, 2.0, 4.0)
print("d      " + "".join(f"x={x:<9g}" for x in xs))
for d in (50, 200, 800, 1600, 6400):
    row = []
    for x in xs:
        r, _ = expected_volume_ratio(BetaModel(d, 0.0), SampleSize(log_n=threshold_log_n(d, 0.0, x)))
        row.append(f"{r:<11.5f}")
    print(f"{d:<7d}" + "".join(row))
print("e^-x   " + "".join(f"{math.exp(-x):<11.5f}" for x in xs))

# sharp threshold in the (d/2) log d scale
d = 2000
for c in (0.5, 0.9, 1.0, 1.1, 1.5):
    r, _ = expected_volume_ratio(BetaModel(d, 0.0), SampleSize(log_n=c * (d / 2) * math.log(d)))
    print(f"d={d}  log n = {c:g} (d/2) log d  ratio {r:.4f}")
