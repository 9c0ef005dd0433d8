"""
Mixed states
============

A mixture is never faster than its ground-ancilla purification, whose
energy and spread equal those of the mixture.  So the pure-state limit
carries over.
"""
import numpy as np

from qsl import ensemble_to_density, qsl_time, time_to_fidelity, uhlmann_fidelity
from qsl.dynamics import evolve_density, ground_ancilla_purification
from qsl.errors import NotReached
from qsl.suites import random_ensemble

rng = np.random.default_rng(4)
p, states = random_ensemble(rng)
rho = ensemble_to_density(p, states)
chi = ground_ancilla_purification(p, states)
print(f"{len(p)} members, dimension {rho.entries.shape[0]}; "
      f"E={rho.mean_energy:.4f} (purification {chi.joint_pure.mean_energy:.4f}), "
      f"dE={rho.energy_spread:.4f} (purification {chi.joint_pure.energy_spread:.4f})")

for t in np.linspace(0, 3, 7):
    f = uhlmann_fidelity(rho, evolve_density(rho, t))
    print(f"t={t:.2f}  F={f:.5f}  >=  |<chi|chi(t)>|^2={chi.survival(t):.5f}")

eps = 0.5
try:
    tc = time_to_fidelity(chi.joint_pure, eps, 50.0)
    print(f"\npurification reaches {eps} at t={tc:.4f}; limit {qsl_time(eps, rho.mean_energy, rho.energy_spread):.4f}")
except NotReached as exc:
    print(f"\npurification never reaches {eps}: {exc}")
