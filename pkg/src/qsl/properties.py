"""
Numerical checks of the structural properties of alpha and beta and of
the inequalities that constrain P(t).

Every check returns plain data (lists of samples or JSON-ready dicts)
with margins, not just a verdict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import alpha_interp, beta, qsl_time, reconciled_alpha
from .dynamics import (ground_ancilla_purification, survival_amplitude,
                       survival_derivative, survival_probability,
                       uhlmann_fidelity, evolve_density)
from .errors import Degenerate, OutOfRange
from .states import PureState, _check_probs, ensemble_to_density

__all__ = [
    "SurfaceSample", "convexity_surface_alpha", "convexity_surface_beta",
    "subadditivity_surface", "subadditivity_chain_check",
    "derivative_bound_check", "cosine_floor_check",
    "mixture_saturation_check", "ALPHA_SURFACE_TOL", "EXACT_SURFACE_TOL",
]

EXACT_SURFACE_TOL = 1e-9
# alpha comes from a tabulated interpolant inside surface scans.
ALPHA_SURFACE_TOL = 1e-4
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class SurfaceSample:
    inputs: tuple
    lambda_value: float
    degenerate: bool

    def __post_init__(self):
        if self.degenerate and abs(self.lambda_value) > 1e-9:
            raise ValueError(f"degenerate sample with lambda={self.lambda_value:.3g}")


def _alpha_fn(source: str):
    if source == "table":
        return lambda e: np.asarray(alpha_interp(e), dtype=float)
    if source == "exact":
        return lambda e: np.asarray(reconciled_alpha(np.atleast_1d(e)), dtype=float).reshape(np.shape(e))
    raise ValueError(f"unknown alpha source {source!r}")


def _beta_sq(e):
    return np.asarray(beta(e), dtype=float) ** 2


def _convexity(f, eps1, eps2, phi):
    e1, e2, ph = np.broadcast_arrays(np.asarray(eps1, float), np.asarray(eps2, float),
                                     np.asarray(phi, float))
    for arr in (e1, e2):
        if np.any((arr < 0) | (arr > 1)):
            raise OutOfRange("eps values must lie in [0, 1]")
    c2, s2 = np.cos(ph) ** 2, np.sin(ph) ** 2
    mix = np.clip(e1 * c2 + e2 * s2, 0.0, 1.0)
    lam = f(e1 ** 2) * c2 + f(e2 ** 2) * s2 - f(mix ** 2)
    # Weight collapse happens at every zero of sin or cos, not only phi = 0, pi.
    degenerate = ((np.abs(e1 - e2) <= DEGENERATE_TOL)
                  | (np.abs(np.sin(ph)) <= DEGENERATE_TOL)
                  | (np.abs(np.cos(ph)) <= DEGENERATE_TOL))
    return [SurfaceSample((float(a), float(b), float(p)), float(v), bool(d))
            for a, b, p, v, d in zip(e1.ravel(), e2.ravel(), ph.ravel(),
                                     lam.ravel(), degenerate.ravel())]


def convexity_surface_alpha(eps1, eps2, phi_grid, source: str = "table"):
    """``alpha(e1^2) cos^2 phi + alpha(e2^2) sin^2 phi - alpha((e1 cos^2 phi + e2 sin^2 phi)^2)``.

    Arguments broadcast against each other; pass ``eps1[:, None]`` and
    ``phi_grid[None, :]`` for a surface.
    """
    return _convexity(_alpha_fn(source), eps1, eps2, phi_grid)


def convexity_surface_beta(eps1, eps2, phi_grid):
    """As :func:`convexity_surface_alpha` with ``beta^2`` in place of alpha."""
    return _convexity(_beta_sq, eps1, eps2, phi_grid)


def _subadditivity_values(f, e1, e2):
    return f(e1) + f(e2) - f(e1 * e2)


def subadditivity_surface(eps1, eps2, which: str = "alpha", source: str = "table"):
    """``f(e1) + f(e2) - f(e1 e2)`` for ``f`` = alpha or ``beta^2``.

    Zero only when one of the arguments is 1.
    """
    f = _pick(which, source)
    e1, e2 = np.broadcast_arrays(np.asarray(eps1, float), np.asarray(eps2, float))
    if np.any((e1 < 0) | (e1 > 1) | (e2 < 0) | (e2 > 1)):
        raise OutOfRange("eps values must lie in [0, 1]")
    lam = _subadditivity_values(f, e1, e2)
    degenerate = (np.abs(e1 - 1.0) <= DEGENERATE_TOL) | (np.abs(e2 - 1.0) <= DEGENERATE_TOL)
    return [SurfaceSample((float(a), float(b)), float(v), bool(d))
            for a, b, v, d in zip(e1.ravel(), e2.ravel(), lam.ravel(), degenerate.ravel())]


def _pick(which: str, source: str = "table"):
    if which == "alpha":
        return _alpha_fn(source)
    if which in ("beta_sq", "beta2", "beta"):
        return _beta_sq
    raise ValueError(f"which must be 'alpha' or 'beta_sq', got {which!r}")


def subadditivity_chain_check(which: str = "alpha", samples: int = 10000,
                              seed: int = 0, source: str = "table") -> dict:
    """Three-factor subadditivity, directly and through pairwise chaining.

    ``f(e1 e2 e3) <= f(e1 e2) + f(e3) <= f(e1) + f(e2) + f(e3)``.
    """
    f = _pick(which, source)
    e = np.random.default_rng(seed).uniform(0.0, 1.0, (3, samples))
    direct = f(e[0]) + f(e[1]) + f(e[2]) - f(e[0] * e[1] * e[2])
    step1 = f(e[0] * e[1]) + f(e[2]) - f(e[0] * e[1] * e[2])
    step2 = f(e[0]) + f(e[1]) - f(e[0] * e[1])
    return {"which": which, "samples": samples, "seed": seed,
            "min_direct": float(direct.min()), "min_outer_step": float(step1.min()),
            "min_inner_step": float(step2.min())}


# ----------------------------------------------------------------------------
# Inequalities on P(t)

def derivative_bound_check(s: PureState, t_grid) -> dict:
    """``|dP/dt| <= 2 dE sqrt(P (1 - P))`` on ``t_grid``, plus a finite-difference
    cross-check of the analytic derivative.

    ``slack`` is the right side minus the left side; saturating states
    have zero slack.
    """
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    de = s.energy_spread
    p = np.atleast_1d(survival_probability(s, t))
    d = np.atleast_1d(survival_derivative(s, t))
    rhs = 2.0 * de * np.sqrt(np.clip(p * (1.0 - p), 0.0, None))
    slack = rhs - np.abs(d)
    top = max(float(s.levels[-1]), 1.0)
    h = 1e-5 / top
    # P is even in t, so the stencil may reach below zero.
    fd = (np.atleast_1d(survival_probability(s, t + h))
          - np.atleast_1d(survival_probability(s, t - h))) / (2.0 * h)
    fd_err = np.abs(fd - d)
    fd_tol = max(1e-6, 1e-4 * de)
    return {
        "points": int(t.size), "spread": de,
        "min_slack": float(slack.min()), "max_abs_slack": float(np.abs(slack).max()),
        "violations": int(np.sum(slack < -EXACT_SURFACE_TOL)),
        "max_fd_error": float(fd_err.max()), "fd_tolerance": fd_tol,
        "fd_ok": bool(np.all(fd_err <= fd_tol)),
        "ok": bool(np.all(slack >= -EXACT_SURFACE_TOL) and np.all(fd_err <= fd_tol)),
    }


def cosine_floor_check(s: PureState, points: int = 2001) -> dict:
    """``P(t) >= cos^2(dE t)`` on ``[0, pi / (2 dE)]``."""
    de = s.energy_spread
    if de == 0.0:
        raise Degenerate("zero spread: the floor is the constant 1 = P")
    t = np.linspace(0.0, math.pi / (2.0 * de), points)
    slack = np.atleast_1d(survival_probability(s, t)) - np.cos(de * t) ** 2
    return {"points": points, "spread": de,
            "min_slack": float(slack.min()), "max_abs_slack": float(np.abs(slack).max()),
            "violations": int(np.sum(slack < -EXACT_SURFACE_TOL)),
            "ok": bool(np.all(slack >= -EXACT_SURFACE_TOL))}


def mixture_saturation_check(probs, states, eps: float, equal_tol: float = 1e-9) -> dict:
    """Necessary conditions for an ensemble to reach the speed limit at ``eps``.

    At ``T`` = speed-limit time of the mixture, each member rotates by
    ``eps_n = |<phi_n|phi_n(T)>|^2``.  The report gives
    ``bar_eps = (sum p_n sqrt(eps_n))^2``, the Jensen gaps
    ``alpha(bar_eps) - sum p_n alpha(eps_n)`` and
    ``beta^2(bar_eps) - sum p_n beta^2(eps_n)``, the fidelity of the mixture
    at ``T``, and flags a candidate only when every ``eps_n`` equals ``eps``.
    """
    p = _check_probs(probs)
    if not 0.0 <= eps < 1.0:
        raise OutOfRange(f"eps must lie in [0, 1), got {eps}")
    rho = ensemble_to_density(p, states)
    e, de = rho.mean_energy, rho.energy_spread
    t = qsl_time(eps, e, de)
    amps = np.array([complex(survival_amplitude(st, t)) for st in states])
    eps_n = np.abs(amps) ** 2
    bar = float(np.dot(p, np.sqrt(eps_n)) ** 2)
    alpha_n = reconciled_alpha(eps_n)
    gap_alpha = reconciled_alpha(min(bar, 1.0)) - float(np.dot(p, alpha_n))
    gap_beta = beta(min(bar, 1.0)) ** 2 - float(np.dot(p, np.asarray(beta(eps_n)) ** 2))
    # With ancilla phases cancelling arg<phi_n|phi_n(T)> the purification
    # overlap is exactly sqrt(bar_eps), so F(rho, rho(T)) >= bar_eps.
    chi = ground_ancilla_purification(p, states)
    chi_rot = ground_ancilla_purification(p, states, phases=-np.angle(amps))
    rot = chi_rot.joint_pure.amplitudes * np.exp(-1j * chi_rot.joint_pure.levels * t)
    overlap_sq = float(abs(np.vdot(chi.joint_pure.amplitudes, rot)) ** 2)
    fid = uhlmann_fidelity(rho, evolve_density(rho, t))
    return {
        "eps": eps, "time": t, "mean_energy": e, "spread": de,
        "member_eps": eps_n.tolist(), "bar_eps": bar,
        "purification_overlap": overlap_sq,
        "fidelity": fid, "fidelity_residual": fid - eps,
        "alpha_gap": gap_alpha, "beta_sq_gap": gap_beta,
        "jensen_ok": bool(bar <= eps_n.max() + 1e-12
                          and bar >= np.sqrt(eps_n).min() ** 2 - 1e-12),
        "candidate": bool(np.all(np.abs(eps_n - eps) <= equal_tol)),
    }
