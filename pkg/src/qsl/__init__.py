"""Quantum speed limits: how fast a state with given mean energy and
energy spread can rotate to a prescribed overlap with itself."""

from .bounds import (HEISENBERG, ML, AlphaEstimate, GridSpec, QslQuery,
                     alpha, alpha_inverse, alpha_lower, alpha_upper, beta,
                     beta_inverse, forbidden_floor, orthogonality_time,
                     qsl_time, regime, tangent_line)
from .composite import (entangled_speedup_check, product_survival,
                        ratio_curve, ratio_lower_bound,
                        separable_mixture_diagnostic, touch_epsilon)
from .dynamics import (survival_amplitude, survival_derivative,
                       survival_probability, time_to_fidelity, trajectory,
                       uhlmann_fidelity)
from .errors import QslError
from .states import (CompositeState, DensityMatrix, EnergySpectrum, PureState,
                     TwoLevelState, composite_product, energy_spread,
                     ensemble_to_density, entangled_family, mean_energy,
                     read_state_file)

__version__ = "0.1.0"
