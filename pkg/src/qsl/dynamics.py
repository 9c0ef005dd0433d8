"""
Unitary evolution under a Hamiltonian that is diagonal in the stored basis.

Pure states pick up phases ``exp(-i E_n t)``; density matrices pick up
``exp(-i (E_j - E_k) t)`` on entry ``(j, k)``.  The first-crossing solver
combines a dense scan with bisection because ``P(t)`` is oscillatory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (BadProbabilities, Degenerate, NotReached, OutOfRange,
                     SpectrumMismatch, Unreachable)
from .numerics import RootBracket, bisect, matrix_sqrt_psd
from .states import (DensityMatrix, EnergySpectrum, PureState,
                     ensemble_to_density, _check_probs,
                     _common_spectrum)

__all__ = [
    "survival_amplitude", "survival_probability", "survival_derivative",
    "evolve_state", "evolve_density", "Trajectory", "trajectory",
    "uhlmann_fidelity", "time_to_fidelity", "two_level_crossing_time",
    "Purification", "ground_ancilla_purification",
]

SCAN_FRACTION = 0.01
ROOT_TOL = 1e-12
# Sampled local minima within this distance of eps get refined; a dip
# narrower than the scan step cannot hide more than this below a sample.
NEAR_MIN_WINDOW = 1e-4
TOUCH_TOL = 1e-12
_SCAN_CHUNK = 1 << 16


def survival_amplitude(s: PureState, t):
    """``<psi|psi(t)> = sum_n |c_n|^2 exp(-i E_n t)``; ``t`` may be an array."""
    t = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(t, s.levels))
    return phases @ s.weights


def survival_probability(s: PureState, t):
    amp = survival_amplitude(s, t)
    p = amp.real ** 2 + amp.imag ** 2
    p = np.clip(p, 0.0, 1.0)
    return float(p) if np.ndim(p) == 0 else p


def survival_derivative(s: PureState, t):
    """Analytic ``dP/dt``.

    Equal to ``-2 sum_{n,m} p_n p_m (E_n - E) sin((E_n - E_m) t)``,
    evaluated in the factored form ``-2 Im[A_1(t) conj(A_0(t))]`` where
    ``A_0 = sum p_n e^{-i E_n t}`` and ``A_1 = sum p_n (E_n - E) e^{-i E_n t}``
    up to conjugation.
    """
    t = np.asarray(t, dtype=float)
    w = s.weights
    centered = s.levels - s.mean_energy
    ph = np.exp(1j * np.multiply.outer(t, s.levels))
    a1 = ph @ (w * centered)
    a0 = ph.conj() @ w
    d = -2.0 * np.imag(a1 * a0)
    return float(d) if np.ndim(d) == 0 else d


def evolve_state(s: PureState, t: float) -> PureState:
    return PureState(s.spectrum, s.amplitudes * np.exp(-1j * s.levels * t))


def evolve_density(rho: DensityMatrix, t: float) -> DensityMatrix:
    lv = rho.levels
    phase = np.exp(-1j * np.subtract.outer(lv, lv) * t)
    return DensityMatrix(rho.spectrum, rho.entries * phase)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values differ in length")
        if np.any(np.diff(self.times) < 0):
            raise ValueError("times must be ascending")

    def __len__(self):
        return len(self.times)

    def rows(self):
        return zip(self.times.tolist(), self.values.tolist())


def trajectory(s: PureState, t_max: float, steps: int) -> Trajectory:
    """``P(t)`` at ``steps + 1`` equally spaced times on ``[0, t_max]``."""
    if steps < 1:
        raise ValueError("steps must be positive")
    times = np.linspace(0.0, t_max, steps + 1)
    return Trajectory(times, np.atleast_1d(survival_probability(s, times)))


def uhlmann_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``, clipped to ``[0, 1]``."""
    if rho.spectrum != sigma.spectrum:
        raise SpectrumMismatch("density matrices live on different spectra")
    r = matrix_sqrt_psd(rho.matrix).entries
    inner = r @ sigma.entries @ r
    root = matrix_sqrt_psd(0.5 * (inner + inner.conj().T))
    f = float(np.real(np.trace(root.entries))) ** 2
    return min(max(f, 0.0), 1.0)


# ----------------------------------------------------------------------------
# First crossing

def _scan_step(s: PureState) -> float:
    e, de = s.mean_energy, s.energy_spread
    steps = [SCAN_FRACTION / x for x in (e, de) if x > 0]
    # P(t) is a trig polynomial whose fastest frequency is the top level.
    steps.append(SCAN_FRACTION / float(s.levels[-1]))
    return min(steps)


def _refine_minimum(s: PureState, lo: float, hi: float) -> float:
    """Time of the local minimum of P bracketed by a sign change of dP/dt."""
    d = lambda x: survival_derivative(s, x)
    d_lo, d_hi = d(lo), d(hi)
    if d_lo >= 0 or d_hi <= 0:
        # No interior stationary point in reach; take the better end.
        return lo if survival_probability(s, lo) <= survival_probability(s, hi) else hi
    return bisect(d, RootBracket(lo, hi, d_lo, d_hi), ROOT_TOL)


def _crossing_in(s: PureState, eps: float, lo: float, hi: float) -> float:
    g = lambda x: survival_probability(s, x) - eps
    return bisect(g, RootBracket(lo, hi, g(lo), g(hi)), ROOT_TOL)


def time_to_fidelity(s: PureState, eps: float, t_max: float) -> float:
    """Smallest ``t`` in ``(0, t_max]`` with ``P(t) = eps``.

    The scan step is a hundredth of the shortest natural period.  Sign
    changes of ``P - eps`` are bisected directly; sampled local minima
    that come within ``NEAR_MIN_WINDOW`` of ``eps`` are refined through
    the analytic derivative so that tangential touches are not missed.

    Raises
    ------
    Degenerate
        The state is stationary (zero spread).
    NotReached
        ``P`` stays above ``eps`` up to ``t_max``.
    """
    if not 0.0 <= eps < 1.0:
        raise OutOfRange(f"eps must lie in [0, 1), got {eps}")
    if not t_max > 0:
        raise OutOfRange("t_max must be positive")
    if s.energy_spread == 0.0:
        raise Degenerate("stationary state: P(t) = 1 for all t")
    h = _scan_step(s)
    n_total = int(math.ceil(t_max / h))
    p_min_seen = 1.0
    start = 0
    prev_t, prev_p = 0.0, 1.0
    prev_prev_p = None
    while start < n_total:
        stop = min(start + _SCAN_CHUNK, n_total)
        idx = np.arange(start + 1, stop + 1)
        times = np.minimum(idx * h, t_max)
        p = np.atleast_1d(survival_probability(s, times))
        t_all = np.concatenate(([prev_t], times))
        p_all = np.concatenate(([prev_p], p))
        p_min_seen = min(p_min_seen, float(p.min()))

        below = np.flatnonzero(p_all[1:] <= eps)
        first_cross = below[0] + 1 if below.size else None

        # Local minima among interior samples of this chunk, including
        # the one at the chunk seam.
        left = np.concatenate(([prev_prev_p if prev_prev_p is not None else np.inf],
                               p_all[:-1]))
        is_min = np.zeros(p_all.size, dtype=bool)
        is_min[:-1] = (p_all[:-1] < left[:-1]) & (p_all[:-1] <= p_all[1:])
        is_min &= p_all <= eps + NEAR_MIN_WINDOW
        is_min[0] &= start > 0
        minima = np.flatnonzero(is_min)
        for k in minima:
            if first_cross is not None and k >= first_cross:
                break
            lo = t_all[k - 1] if k > 0 else t_all[0] - h
            hi = t_all[k + 1]
            tm = _refine_minimum(s, max(lo, 0.0), hi)
            pm = survival_probability(s, tm)
            p_min_seen = min(p_min_seen, pm)
            if pm <= eps + TOUCH_TOL:
                if pm >= eps:
                    return float(tm)
                lo_t = max(lo, 0.0)
                return _crossing_in(s, eps, lo_t, tm)
        if first_cross is not None:
            k = first_cross
            if p_all[k] == eps:
                return float(t_all[k])
            return _crossing_in(s, eps, t_all[k - 1], t_all[k])
        prev_prev_p = p_all[-2]
        prev_t, prev_p = t_all[-1], p_all[-1]
        start = stop
    raise NotReached(f"P(t) > {eps} on (0, {t_max}]; smallest value {p_min_seen:.6g}",
                     min_probability=p_min_seen)


def two_level_crossing_time(xi: float, eps: float) -> float:
    """First time, in units of ``hbar / E``, at which the fast two-level
    state with parameter ``xi`` reaches ``P = eps``.

    Returns ``E t = xi^2 arccos[(eps - 1 + s) / s]`` with ``s = 2 xi^2 (1 - xi^2)``.
    """
    if not 0.0 < xi < 1.0:
        raise OutOfRange(f"xi must lie in (0, 1), got {xi}")
    if not 0.0 <= eps <= 1.0:
        raise OutOfRange(f"eps must lie in [0, 1], got {eps}")
    z = xi * xi
    s = 2.0 * z * (1.0 - z)
    arg = (eps - 1.0 + s) / s
    if arg < -1.0 - 1e-15:
        raise Unreachable(f"P(t) >= {1 - 2 * s:.6g} > eps for xi={xi}")
    return z * math.acos(min(1.0, max(-1.0, arg)))


# ----------------------------------------------------------------------------
# Purifications

@dataclass(frozen=True, eq=False)
class Purification:
    """``|chi> = sum_n sqrt(p_n) e^{i phi_n} |phi_n>|xi_n>`` with ground-level ancilla.

    The joint basis is system-major: index ``i * K + n`` pairs system
    level ``i`` with ancilla state ``n``.
    """
    system_state: DensityMatrix
    joint_pure: PureState
    ancilla_phases: np.ndarray

    @property
    def ancilla_dimension(self) -> int:
        return len(self.ancilla_phases)

    def reduced(self) -> np.ndarray:
        """Partial trace of ``|chi><chi|`` over the ancilla."""
        k = self.ancilla_dimension
        psi = self.joint_pure.amplitudes.reshape(-1, k)
        return psi @ psi.conj().T

    def overlap(self, other: "Purification") -> complex:
        return complex(np.vdot(self.joint_pure.amplitudes, other.joint_pure.amplitudes))

    def survival(self, t):
        return survival_probability(self.joint_pure, t)


def ground_ancilla_purification(probs, states: Sequence[PureState],
                                phases=None) -> Purification:
    p = _check_probs(probs)
    if len(states) != p.size:
        raise BadProbabilities(f"{p.size} probabilities for {len(states)} states")
    spec = _common_spectrum(states)
    k = p.size
    ph = np.zeros(k) if phases is None else np.asarray(phases, dtype=float).ravel()
    if ph.size != k:
        raise ValueError(f"{ph.size} phases for {k} ensemble members")
    coeff = np.sqrt(p) * np.exp(1j * ph)
    amps = np.array([st.amplitudes for st in states]).T * coeff  # (d, k)
    joint_levels = np.repeat(spec.levels, k)
    joint = amps.ravel()
    joint = joint / np.linalg.norm(joint)
    # Normalization drift from non-orthogonal members is not possible: the
    # ancilla states are orthonormal, so the norm is sum p_n = 1.
    return Purification(ensemble_to_density(p, states),
                        PureState(EnergySpectrum(joint_levels), joint), ph)
