"""
The forbidden region of the (t, P) plane
========================================

For fixed E and dE no survival probability P(t) can drop below a floor
built from the inverses of alpha and beta.  A two-level state with the
right parameter grazes that floor at one point.
"""
import math

import numpy as np

from qsl import TwoLevelState, forbidden_floor, survival_probability, time_to_fidelity
from qsl.suites import random_pure_state

E = 1.0
omega = TwoLevelState(0.5, E / 0.25).pure
dE = omega.energy_spread
print(f"two-level state: E={omega.mean_energy:.4f}  dE={dE:.4f}  dE/E={dE / E:.4f}")

unit = math.pi / (2 * E)
t = np.linspace(0, unit, 11)
for ti, p, f in zip(t, survival_probability(omega, t), forbidden_floor(t, E, dE)):
    bar = "#" * int(40 * f)
    print(f"t={ti / unit:4.2f}  P={p:.4f}  floor={f:.4f}  {bar}")

tc = time_to_fidelity(omega, 0.30, 10.0)
print(f"\nP reaches 0.30 at t = {tc / unit:.4f} pi/(2E); floor there = "
      f"{forbidden_floor(tc, E, dE):.4f}")

# Random states keep clear of the floor.
rng = np.random.default_rng(0)
worst = math.inf
for _ in range(100):
    s = random_pure_state(rng)
    e, de = s.mean_energy, s.energy_spread
    tt = np.linspace(0, max(math.pi / (2 * e), math.pi / (2 * de)), 500)
    worst = min(worst, float(np.min(survival_probability(s, tt) - forbidden_floor(tt, e, de))))
print(f"smallest P - floor over 100 random states: {worst:.3g}")
