"""
How fast can a state rotate?
============================

Two resources bound the time a state needs to reach overlap ``eps`` with
its initial self: the mean energy E above the ground level and the
energy spread dE.  Each gives a time, and the larger one wins.
"""
import math

import numpy as np

from qsl import alpha_upper, beta, qsl_time, regime

# The two bounding functions fall from 1 at eps = 0 to 0 at eps = 1.
for eps in (0.0, 0.1, 0.3, 0.5, 0.9, 1.0):
    print(f"eps={eps:4.2f}  alpha={alpha_upper(eps):.6f}  beta={beta(eps):.6f}")

# alpha is close to beta squared everywhere.
grid = np.linspace(0, 1, 1001)
gap = max(abs(alpha_upper(float(e)) - beta(float(e)) ** 2) for e in grid)
print(f"\nmax |alpha - beta^2| on [0, 1]: {gap:.4f}")

# Same target overlap, different resources: a low-spread state is limited
# by its spread, a high-spread one by its energy.
for e, de in ((1.0, 1.73), (10.0, 0.1), (1.0, 1.0)):
    t = qsl_time(0.3, e, de)
    print(f"E={e:5.2f} dE={de:5.2f}  T(0.3)={t:.6f}  ({regime(0.3, e, de)} regime)")

# Orthogonality (eps = 0) recovers the familiar pi/(2E) and pi/(2 dE).
print(f"\nT(0) for E = dE = 1: {qsl_time(0.0, 1.0, 1.0):.6f}  vs pi/2 = {math.pi / 2:.6f}")
