"""
Seeded verification suites behind ``qsl verify``.

Each suite returns a JSON-ready report::

    {"suite": name, "seed": seed, "checks": [...], "violations": n, "ok": bool}

where every check carries its own margin.  Reports depend only on the seed.
"""
from __future__ import annotations

import math

import numpy as np

from . import bounds, composite, dynamics, properties
from .errors import NotReached
from .states import (PureState, TwoLevelState, composite_product,
                     ensemble_to_density)

__all__ = ["SUITES", "run_suite", "random_pure_state", "forbidden_suite",
           "derivative_suite", "convexity_suite", "subadditivity_suite",
           "mixture_suite", "composite_suite"]

TOL = 1e-9


def random_pure_state(rng: np.random.Generator, max_levels: int = 8,
                      min_levels: int = 2, scale: float = 5.0) -> PureState:
    """Random levels on ``[0, scale)`` with a zero ground level and
    complex Gaussian amplitudes."""
    d = int(rng.integers(min_levels, max_levels + 1))
    levels = np.sort(np.concatenate(([0.0], rng.uniform(0.0, scale, d - 1))))
    amp = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState.normalized(levels, amp)


def _check(name, margin, ok, **extra):
    out = {"name": name, "margin": float(margin), "ok": bool(ok)}
    out.update(extra)
    return out


def _report(suite, seed, checks):
    bad = sum(not c["ok"] for c in checks)
    return {"suite": suite, "seed": seed, "checks": checks,
            "violations": bad, "ok": bad == 0}


def forbidden_suite(seed: int, states: int = 200, points: int = 1000) -> dict:
    """No trajectory enters the forbidden region up to the orthogonality time."""
    rng = np.random.default_rng(seed)
    worst, worst_i, bad = math.inf, -1, 0
    for i in range(states):
        s = random_pure_state(rng)
        e, de = s.mean_energy, s.energy_spread
        t0 = bounds.orthogonality_time(e, de)
        t = np.linspace(0.0, t0, points)
        gap = dynamics.survival_probability(s, t) - bounds.forbidden_floor(t, e, de)
        m = float(gap.min())
        bad += int(m < -TOL)
        if m < worst:
            worst, worst_i = m, i
    return _report("forbidden", seed, [
        _check("forbidden_region", worst, bad == 0, states=states,
               points_per_state=points, violating_states=bad, worst_state=worst_i)])


def derivative_suite(seed: int, states: int = 50, points: int = 100) -> dict:
    rng = np.random.default_rng(seed)
    d_min, fd_max, floor_min, bad_d, bad_f = math.inf, 0.0, math.inf, 0, 0
    for _ in range(states):
        s = random_pure_state(rng, max_levels=6, min_levels=6)
        t = np.sort(rng.uniform(0.0, 20.0, points))
        rep = properties.derivative_bound_check(s, t)
        d_min = min(d_min, rep["min_slack"])
        fd_max = max(fd_max, rep["max_fd_error"] / rep["fd_tolerance"])
        bad_d += int(not rep["ok"])
        fl = properties.cosine_floor_check(s)
        floor_min = min(floor_min, fl["min_slack"])
        bad_f += int(not fl["ok"])
    fast = TwoLevelState(1.0 / math.sqrt(2.0), 1.0).pure
    sat_d = properties.derivative_bound_check(fast, np.linspace(0.0, 4.0 * math.pi, 401))
    sat_f = properties.cosine_floor_check(fast)
    return _report("derivative", seed, [
        _check("derivative_bound", d_min, bad_d == 0, states=states,
               worst_fd_error_ratio=fd_max),
        _check("cosine_floor", floor_min, bad_f == 0, states=states),
        _check("derivative_saturation", -sat_d["max_abs_slack"],
               sat_d["max_abs_slack"] <= TOL),
        _check("cosine_floor_saturation", -sat_f["max_abs_slack"],
               sat_f["max_abs_slack"] <= TOL),
    ])


def _surface_stats(samples, tol):
    lam = np.array([s.lambda_value for s in samples])
    deg = np.array([s.degenerate for s in samples])
    nondeg = lam[~deg]
    return {"min": float(lam.min()),
            "min_nondegenerate": float(nondeg.min()) if nondeg.size else math.inf,
            "degenerate_points": int(deg.sum()),
            "ok": bool(lam.min() >= -tol and (nondeg.size == 0 or nondeg.min() > 0))}


def convexity_suite(seed: int, resolution: int = 101, eps2: float = 0.7,
                    random_points: int = 10 ** 6) -> dict:
    e1 = np.linspace(0.0, 1.0, resolution)[:, None]
    phi = np.linspace(0.0, math.pi, resolution)[None, :]
    sa = _surface_stats(properties.convexity_surface_alpha(e1, eps2, phi),
                        properties.ALPHA_SURFACE_TOL)
    sb = _surface_stats(properties.convexity_surface_beta(e1, eps2, phi),
                        properties.EXACT_SURFACE_TOL)
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.0, 1.0, (2, random_points))
    w = rng.uniform(0.0, math.pi, random_points)
    c2, s2 = np.cos(w) ** 2, np.sin(w) ** 2
    b2 = lambda x: bounds.beta(x) ** 2
    lam = b2(r[0] ** 2) * c2 + b2(r[1] ** 2) * s2 - b2(np.clip(r[0] * c2 + r[1] * s2, 0, 1) ** 2)
    return _report("convexity", seed, [
        _check("alpha_convexity_surface", sa.pop("min"), sa.pop("ok"), **sa),
        _check("beta_sq_convexity_surface", sb.pop("min"), sb.pop("ok"), **sb),
        _check("beta_sq_convexity_random", lam.min(), lam.min() >= -TOL,
               points=random_points),
    ])


def subadditivity_suite(seed: int, resolution: int = 101,
                        random_points: int = 10 ** 6) -> dict:
    g = np.linspace(0.0, 1.0, resolution)
    checks = []
    for which, tol in (("alpha", properties.ALPHA_SURFACE_TOL),
                       ("beta_sq", properties.EXACT_SURFACE_TOL)):
        st = _surface_stats(properties.subadditivity_surface(g[:, None], g[None, :], which), tol)
        checks.append(_check(f"{which}_subadditivity_surface", st.pop("min"), st.pop("ok"), **st))
        ch = properties.subadditivity_chain_check(which, samples=10000, seed=seed)
        m = min(ch["min_direct"], ch["min_outer_step"], ch["min_inner_step"])
        checks.append(_check(f"{which}_subadditivity_triples", m, m >= -tol,
                             samples=ch["samples"]))
    r = np.random.default_rng(seed).uniform(0.0, 1.0, (2, random_points))
    b2 = lambda x: bounds.beta(x) ** 2
    lam = b2(r[0]) + b2(r[1]) - b2(r[0] * r[1])
    checks.append(_check("beta_sq_subadditivity_random", lam.min(), lam.min() >= -TOL,
                         points=random_points))
    return _report("subadditivity", seed, checks)


def random_ensemble(rng: np.random.Generator, max_dim: int = 6, max_members: int = 4):
    d = int(rng.integers(2, max_dim + 1))
    k = int(rng.integers(1, max_members + 1))
    levels = np.sort(np.concatenate(([0.0], rng.uniform(0.0, 5.0, d - 1))))
    states = [PureState.normalized(levels, rng.normal(size=d) + 1j * rng.normal(size=d))
              for _ in range(k)]
    p = rng.uniform(0.1, 1.0, k)
    return p / p.sum(), states


def mixture_suite(seed: int, ensembles: int = 50) -> dict:
    """Purification bound on the fidelity, and no purification beats the limit."""
    rng = np.random.default_rng(seed)
    fid_min, qsl_min, bad_f, bad_q, reached, res_max = math.inf, math.inf, 0, 0, 0, 0.0
    for _ in range(ensembles):
        p, states = random_ensemble(rng)
        rho = ensemble_to_density(p, states)
        chi = dynamics.ground_ancilla_purification(p, states)
        res_max = max(res_max, float(np.max(np.abs(chi.reduced() - rho.entries))),
                      abs(chi.joint_pure.mean_energy - rho.mean_energy),
                      abs(chi.joint_pure.energy_spread - rho.energy_spread))
        t = float(rng.uniform(0.0, 5.0))
        f = dynamics.uhlmann_fidelity(rho, dynamics.evolve_density(rho, t))
        m = f - chi.survival(t)
        fid_min = min(fid_min, m)
        bad_f += int(m < -TOL)
        eps = float(rng.uniform(0.0, 0.95))
        e, de = rho.mean_energy, rho.energy_spread
        if de == 0.0:
            continue
        try:
            tc = dynamics.time_to_fidelity(chi.joint_pure, eps,
                                           8.0 * bounds.orthogonality_time(e, de))
        except NotReached:
            continue
        reached += 1
        gap = tc - bounds.qsl_time(eps, e, de)
        qsl_min = min(qsl_min, gap)
        bad_q += int(gap < -TOL)
    return _report("mixture", seed, [
        _check("purification_fidelity_bound", fid_min, bad_f == 0, ensembles=ensembles),
        _check("purification_consistency", -res_max, res_max <= 1e-10),
        _check("purification_respects_limit", qsl_min, bad_q == 0, crossings=reached),
    ])


def composite_suite(seed: int, samples: int = 50) -> dict:
    rng = np.random.default_rng(seed)
    prod_err = 0.0
    for _ in range(samples):
        m = int(rng.integers(1, 5))
        factors = [random_pure_state(rng, max_levels=4) for _ in range(m)]
        c = composite_product(factors)
        t = float(rng.uniform(0.0, 10.0))
        prod_err = max(prod_err, abs(composite.product_survival(c, t)
                                     - dynamics.survival_probability(c.as_pure_state(), t)))
    eps_grid = np.linspace(0.0, 1.0, 201)[:-1]
    r_min, root_err = math.inf, 0.0
    for m in range(2, 9):
        r_min = min(r_min, min(composite.ratio_lower_bound(float(e), m) for e in eps_grid))
        root_err = max(root_err, abs(composite.ratio_lower_bound(0.0, m) - math.sqrt(m)))
    ent_gap, slow_margin = 0.0, math.inf
    for xi in (0.3, 0.5, 1.0 / math.sqrt(2.0)):
        for m in (2, 3, 5):
            rep = composite.entangled_speedup_check(xi, 1.0, m)
            ent_gap = max(ent_gap, rep["entangled"]["relative_gap"])
            r = rep["ratio_lower_bound"]
            slow_margin = min(slow_margin,
                              rep["separable"]["ratio_to_own_bound"] - r,
                              rep["separable"]["ratio_to_entangled"] - r)
    return _report("composite", seed, [
        _check("product_law", -prod_err, prod_err <= 1e-10, samples=samples),
        _check("ratio_at_least_one", r_min - 1.0, r_min >= 1.0 - TOL),
        _check("ratio_at_zero_is_sqrt_m", -root_err, root_err <= TOL),
        _check("entangled_saturation", -ent_gap, ent_gap <= 1e-6),
        _check("separable_slowdown", slow_margin, slow_margin >= -1e-6),
    ])


SUITES = {
    "forbidden": forbidden_suite,
    "derivative": derivative_suite,
    "convexity": convexity_suite,
    "subadditivity": subadditivity_suite,
    "mixture": mixture_suite,
    "composite": composite_suite,
}


def run_suite(name: str, seed: int) -> list[dict]:
    """Reports for one suite, or all of them in a fixed order for ``"all"``."""
    if name == "all":
        return [fn(seed) for fn in SUITES.values()]
    if name not in SUITES:
        raise KeyError(name)
    return [SUITES[name](seed)]
