"""Show how the j-in-k radii built from the band rho/2 <= k <= rho fail, and by how much."""

import numpy as np

from hyperballs.geometry import UnitBall
from hyperballs.radii import radii_j_in_k
from hyperballs.verify import check_inclusion

G = UnitBall(2)
for ax in (0.0, 0.4, 0.8):
    for r in (0.5, 1.0, 2.0):
        b = radii_j_in_k(ax, r)
        x = np.array([ax, 0.0])
        lo, *_ = check_inclusion(G, ("j", b.m), ("k", r), x, 13)
        hi, *_ = check_inclusion(G, ("k", r), ("j", b.M), x, 13)
        print(f"|x|={ax:.1f} r={r:.1f}  m={b.m:.5f} margin {lo:+.2e}   M={b.M:.5f} margin {hi:+.2e}")
