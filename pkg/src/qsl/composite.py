"""
Composite systems of non-interacting parts.

Covers the product law for separable survival probabilities, the
slowdown ratio of homogeneous separable states, the speedup of the
GHZ-type entangled family, and a resource-concentration diagnostic for
separable mixtures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import (HEISENBERG, ML, QslQuery, beta, qsl_time,
                     reconciled_alpha, regime, _stationarity)
from .dynamics import survival_probability, time_to_fidelity
from .errors import NotReached, NotSeparable, OutOfRange
from .numerics import RootBracket, bisect
from .states import (CompositeState, TwoLevelState, _check_probs,
                     composite_product, entangled_family)

__all__ = [
    "product_survival", "ratio_lower_bound", "ratio_branches", "RatioCurve",
    "ratio_curve", "touch_epsilon", "separable_crossing_time", "entangled_speedup_check",
    "separable_mixture_diagnostic",
]

ONE_EDGE = 1e-12
ZERO_RESOURCE = 1e-12


def product_survival(c: CompositeState, t):
    """``P_1(t) P_2(t) ... P_M(t)`` for a separable state."""
    if c.factors is None:
        raise NotSeparable("state carries no factor list")
    out = 1.0
    for f in c.factors:
        out = out * survival_probability(f, t)
    return out


def _root_m(eps: float, m: int) -> float:
    # eps**(1/m) through logs so tiny eps with large m does not underflow.
    return 0.0 if eps == 0.0 else math.exp(math.log(eps) / m)


def ratio_branches(eps: float, m: int):
    """``(M a(e)/a(eps), sqrt(M) b(e)/b(eps))`` with ``e = eps**(1/M)``."""
    if not 0.0 <= eps < 1.0:
        raise OutOfRange(f"eps must lie in [0, 1), got {eps}")
    if int(m) != m or m < 2:
        raise OutOfRange(f"m must be an integer >= 2, got {m}")
    e1 = _root_m(eps, m)
    ml = m * reconciled_alpha(e1) / reconciled_alpha(eps)
    heis = math.sqrt(m) * beta(e1) / beta(eps)
    return ml, heis


def ratio_lower_bound(eps: float, m: int) -> float:
    """Lower bound on how much slower a homogeneous product state is than
    the speed limit for its own total resources.  Exactly 1 at eps -> 1.
    """
    if eps >= 1.0 - ONE_EDGE and eps <= 1.0:
        if int(m) != m or m < 2:
            raise OutOfRange(f"m must be an integer >= 2, got {m}")
        return 1.0
    return min(ratio_branches(eps, m))


@dataclass(frozen=True)
class RatioCurve:
    m: int
    points: tuple  # (eps, r_lower, branch)

    def __post_init__(self):
        if self.m < 2:
            raise OutOfRange("m must be >= 2")


def ratio_curve(m: int, eps_values) -> RatioCurve:
    pts = []
    for e in np.asarray(eps_values, dtype=float):
        e = float(e)
        if e >= 1.0 - ONE_EDGE:
            pts.append((e, 1.0, ML))
            continue
        ml, heis = ratio_branches(e, m)
        pts.append((e, min(ml, heis), ML if ml < heis else HEISENBERG))
    return RatioCurve(int(m), tuple(pts))


# ----------------------------------------------------------------------------
# Entangled family

def touch_epsilon(xi: float) -> float:
    """The eps at which the fast two-level state with parameter ``xi``
    meets the boundary of the forbidden region.

    ``xi = 1/sqrt(2)`` saturates the spread branch for every eps; 0 is
    returned.  For ``xi < 1/sqrt(2)`` the mean-energy branch is touched
    where ``z = xi^2`` is the optimal two-level parameter.
    """
    if not 0.0 < xi < 1.0:
        raise OutOfRange(f"xi must lie in (0, 1), got {xi}")
    z = xi * xi
    if abs(z - 0.5) <= 1e-12:
        return 0.0
    if z > 0.5:
        raise OutOfRange(f"xi={xi} > 1/sqrt(2) never touches the boundary")
    lo = 1.0 - 4.0 * z * (1.0 - z)
    # The condition is -inf at lo, positive inside and back to 0 at eps = 1,
    # so scan for the first sign change instead of using the ends.
    grid = lo + (1.0 - lo) * np.linspace(0.0, 1.0, 2001)[1:-1]
    vals = _stationarity(z, grid)
    pos = np.flatnonzero(vals > 0)
    if pos.size == 0:
        raise OutOfRange(f"no touch point found for xi={xi}")
    j = int(pos[0])
    a = grid[j - 1] if j > 0 else lo
    f_a = float(vals[j - 1]) if j > 0 else -math.inf
    f = lambda e: float(_stationarity(z, e))
    return bisect(f, RootBracket(float(a), float(grid[j]), f_a, float(vals[j])), 1e-15)


def _scan_horizon(state) -> float:
    # Two full periods of the slowest phase bound any first crossing we ask for.
    gaps = state.levels[state.levels > 0]
    return 4.0 * math.pi / float(gaps.min())


def separable_crossing_time(c: CompositeState, eps: float) -> float:
    """First time a separable state reaches ``P = eps``.

    With identical factors this is the time for one factor to reach
    ``eps**(1/M)``.  That route avoids locating a high-multiplicity touch
    of the joint ``P = P_1**M``, which function values cannot resolve
    better than about ``1e-16**(1/M)``.  Otherwise the joint state is scanned.
    """
    if c.factors is None:
        raise NotSeparable("state carries no factor list")
    first = c.factors[0]
    same = all(f.spectrum == first.spectrum and np.array_equal(f.amplitudes, first.amplitudes)
               for f in c.factors[1:])
    if same:
        return time_to_fidelity(first, _root_m(eps, len(c.factors)), _scan_horizon(first))
    joint = c.as_pure_state()
    return time_to_fidelity(joint, eps, _scan_horizon(joint))


def entangled_speedup_check(xi: float, e0: float, m: int, eps: float | None = None) -> dict:
    """Compare the entangled family with the speed limit and with its
    homogeneous separable counterpart.

    The counterpart is the product of ``m`` copies of the two-level state
    with the same ``xi`` and ``e0``: its subsystems have the same energy
    and spread as the reduced states of the entangled one.
    """
    if not 0.0 < xi < 1.0:
        raise OutOfRange(f"xi must lie in (0, 1), got {xi}")
    if m < 1:
        raise OutOfRange("m must be positive")
    eps = touch_epsilon(xi) if eps is None else float(eps)
    ent = entangled_family(xi, e0, m).as_pure_state()
    e_ent, de_ent = ent.mean_energy, ent.energy_spread
    t_ent = time_to_fidelity(ent, eps, _scan_horizon(ent))
    bound_ent = qsl_time(eps, e_ent, de_ent)
    rel = abs(t_ent - bound_ent) / bound_ent

    factor = TwoLevelState(xi, e0).pure
    sep = composite_product([factor] * m)
    joint_sep = sep.as_pure_state()
    e_sep, de_sep = joint_sep.mean_energy, joint_sep.energy_spread
    t_sep = separable_crossing_time(sep, eps)
    try:
        t_joint = time_to_fidelity(joint_sep, eps, _scan_horizon(joint_sep))
    except NotReached:
        t_joint = None
    bound_sep = qsl_time(eps, e_sep, de_sep)
    r = ratio_lower_bound(eps, m) if m >= 2 else 1.0
    sub = sep.reduced_density(0)
    return {
        "xi": xi, "e0": e0, "m": m, "eps": eps,
        "entangled": {
            "mean_energy": e_ent, "spread": de_ent,
            "subsystem_energy": entangled_family(xi, e0, m).reduced_density(0).mean_energy,
            "subsystem_spread": entangled_family(xi, e0, m).reduced_density(0).energy_spread,
            "crossing_time": t_ent, "qsl_time": bound_ent,
            "relative_gap": rel, "regime": regime(eps, e_ent, de_ent),
            "saturates": rel <= 1e-6,
        },
        "separable": {
            "mean_energy": e_sep, "spread": de_sep,
            "subsystem_energy": sub.mean_energy, "subsystem_spread": sub.energy_spread,
            "crossing_time": t_sep, "joint_scan_time": t_joint,
            "qsl_time": bound_sep,
            "ratio_to_own_bound": t_sep / bound_sep,
            "ratio_to_entangled": t_sep / t_ent,
        },
        "ratio_lower_bound": r,
        "slowdown_ok": (t_sep / bound_sep >= r - 1e-6) and (t_sep / t_ent >= r - 1e-6),
    }


# ----------------------------------------------------------------------------
# Separable mixtures

def separable_mixture_diagnostic(probs, product_states: Sequence[CompositeState],
                                 eps: float) -> dict:
    """Check whether each run of a separable mixture concentrates its
    resources on one subsystem.

    Concentration is necessary (not sufficient) for the mixture to reach
    the speed limit.  For every component the report lists per-subsystem
    energies and spreads, the time ``T`` of the component's own speed
    limit, the rotation ``eps_k = P_k(T)`` of each subsystem, and the
    subadditivity margins ``alpha(eps) - sum alpha(eps_k)`` and
    ``beta^2(eps) - sum beta^2(eps_k)``.
    """
    p = _check_probs(probs)
    if len(product_states) != p.size:
        raise ValueError(f"{p.size} probabilities for {len(product_states)} states")
    if not 0.0 <= eps < 1.0:
        raise OutOfRange(f"eps must lie in [0, 1), got {eps}")
    comps = []
    for weight, c in zip(p, product_states):
        if not isinstance(c, CompositeState) or c.factors is None:
            raise NotSeparable("every component must be a product state")
        e_k = [f.mean_energy for f in c.factors]
        de_k = [f.energy_spread for f in c.factors]
        e_tot = float(sum(e_k))
        de_tot = math.sqrt(sum(x * x for x in de_k))
        entry = {"weight": float(weight), "subsystem_energy": e_k,
                 "subsystem_spread": de_k, "mean_energy": e_tot, "spread": de_tot}
        if de_tot <= ZERO_RESOURCE:
            entry.update(stationary=True, concentrated=False, active_subsystem=None)
            comps.append(entry)
            continue
        q = QslQuery(eps, e_tot, de_tot)
        t = qsl_time(q)
        reg = regime(q)
        eps_k = [survival_probability(f, t) for f in c.factors]
        tol = ZERO_RESOURCE * max(1.0, de_tot)
        moving = [k for k, d in enumerate(de_k) if d > tol]
        conc = len(moving) == 1
        if conc and reg == ML:
            etol = ZERO_RESOURCE * max(1.0, e_tot)
            conc = all(e <= etol for k, e in enumerate(e_k) if k != moving[0])
        a_sum = float(np.sum(reconciled_alpha(np.array(eps_k))))
        b_sum = float(np.sum(beta(np.array(eps_k)) ** 2))
        entry.update(
            stationary=False, regime=reg, qsl_time=t, subsystem_eps=eps_k,
            product_eps=float(np.prod(eps_k)),
            alpha_margin=reconciled_alpha(eps) - a_sum,
            beta_sq_margin=beta(eps) ** 2 - b_sum,
            concentrated=conc, active_subsystem=moving[0] if conc else None,
        )
        comps.append(entry)
    return {"eps": eps, "components": comps,
            "candidate": all(c["concentrated"] for c in comps)}
