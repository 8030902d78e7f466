"""Locate the radius where the uniform j-in-rho radius m1 starts to work at x = 0."""

import math

import numpy as np

from hyperballs.radii import uniform_m1
from hyperballs.verify import uniform_m1_margin, uniform_m1_threshold

for r in (0.5, 1.0, 1.5, 2.0, 3.0):
    m = uniform_m1(r)
    # at the origin both balls are Euclidean: radii 1 - e^{-m} and tanh(r/2)
    print(f"r={r:4.1f}  m1={m:.6f}  j-ball {1 - math.exp(-m):.6f}  rho-ball {math.tanh(r / 2):.6f}  margin {uniform_m1_margin(r):+.3e}")
lo, hi = uniform_m1_threshold(tol=1e-5)
print(f"threshold in [{lo:.6f}, {hi:.6f}], 2 log 2 = {2 * np.log(2):.6f}")
