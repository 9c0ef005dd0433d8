"""Acceptance criteria, each run at its stated tolerance.

Every test records a PASS/FAIL line that is repeated in the terminal
summary under "acceptance criteria".
"""
import math
import time

import numpy as np

from qsl import composite, properties, suites
from qsl.bounds import (GridSpec, alpha_interp, alpha_lower, alpha_upper, beta,
                        forbidden_floor, reconciled_alpha, tangent_line)
from qsl.dynamics import time_to_fidelity
from qsl.states import TwoLevelState

SEED = 42


def test_criterion_01_endpoints(verdict):
    a0, a1 = reconciled_alpha(0.0), reconciled_alpha(1.0)
    ok = abs(a0 - 1) <= 1e-3 and beta(0.0) == 1.0 and a1 == 0.0 and beta(1.0) == 0.0
    verdict(1, ok, f"alpha(0)={a0:.12g} beta(0)={beta(0.0)} alpha(1)={a1} beta(1)={beta(1.0)}")
    assert ok


def test_criterion_02_lower_and_upper_alpha_agree_within_error_bar(verdict):
    start = time.perf_counter()
    eps_values = np.random.default_rng(SEED).uniform(0.0, 1.0, 20)
    inside, worst = 0, 0.0
    for i, eps in enumerate(eps_values):
        low = alpha_lower(float(eps), GridSpec(seed=SEED + i))
        diff = alpha_upper(float(eps)) - low.value_at_zero
        inside += abs(diff) <= low.error_bar
        worst = max(worst, abs(diff) / low.error_bar if low.error_bar > 0 else math.inf)
    took = time.perf_counter() - start
    ok = inside == eps_values.size and took <= 600
    verdict(2, ok, f"{inside}/{eps_values.size} differences inside one error bar, "
                   f"worst |diff|/err={worst:.2f}, {took:.0f}s")
    assert ok


def test_criterion_03_tangent_slope(verdict):
    a = tangent_line(math.pi / 4).a
    ok = abs(a - 0.64) <= 0.01
    verdict(3, ok, f"a(pi/4)={a:.6f}")
    assert ok


def test_criterion_04_touch_of_the_two_level_state(verdict):
    e, de = 1.0, 1.73
    omega = TwoLevelState(0.5, e / 0.25).pure
    t = time_to_fidelity(omega, 0.30, 10.0)
    unit = math.pi / (2 * e)
    floor = forbidden_floor(t, e, de)
    ok = abs(t / unit - 0.42) <= 0.01 and abs(floor - 0.30) <= 1e-2
    verdict(4, ok, f"t={t / unit:.6f} (pi/2E), floor there={floor:.6f}")
    assert ok


def test_criterion_05_alpha_near_beta_squared(verdict):
    eps = np.linspace(0.0, 1.0, 10001)
    gap = float(np.max(np.abs(alpha_interp(eps) - beta(eps) ** 2)))
    ok = gap <= 0.05
    verdict(5, ok, f"max |alpha - beta^2| = {gap:.5f}")
    assert ok


def _suite_verdict(number, report, verdict):
    margins = ", ".join(f"{c['name']}={c['margin']:.3g}" for c in report["checks"])
    verdict(number, report["ok"], margins)
    assert report["ok"]


def test_criterion_06_forbidden_region(verdict):
    rep = suites.forbidden_suite(SEED, states=200)
    assert rep["checks"][0]["states"] == 200
    _suite_verdict(6, rep, verdict)


def test_criterion_07_derivative_and_cosine_floor(verdict):
    _suite_verdict(7, suites.derivative_suite(SEED), verdict)


def test_criterion_08_convexity_and_subadditivity(verdict):
    g = np.linspace(0.0, 1.0, 101)
    phi = np.linspace(0.0, math.pi, 101)
    surfaces = {
        "alpha convexity": (properties.convexity_surface_alpha(g[:, None], 0.7, phi[None, :]),
                            properties.ALPHA_SURFACE_TOL),
        "beta^2 convexity": (properties.convexity_surface_beta(g[:, None], 0.7, phi[None, :]),
                             properties.EXACT_SURFACE_TOL),
        "alpha subadditivity": (properties.subadditivity_surface(g[:, None], g[None, :], "alpha"),
                                properties.ALPHA_SURFACE_TOL),
        "beta^2 subadditivity": (properties.subadditivity_surface(g[:, None], g[None, :], "beta_sq"),
                                 properties.EXACT_SURFACE_TOL),
    }
    ok, parts = True, []
    for name, (samples, tol) in surfaces.items():
        lam = np.array([s.lambda_value for s in samples])
        deg = np.array([s.degenerate for s in samples])
        zero_only_at_degeneracies = bool(lam[~deg].min() > 0)
        ok &= bool(lam.min() >= -tol) and zero_only_at_degeneracies
        parts.append(f"{name} min={lam.min():.2g} nondegenerate min={lam[~deg].min():.2g}")
    verdict(8, ok, "; ".join(parts))
    assert ok


def test_criterion_09_ratio_curve(verdict):
    eps = np.linspace(0.0, 1.0, 1001)
    curve = composite.ratio_curve(5, eps)
    r = np.array([p[1] for p in curve.points])
    spots = np.linspace(0.05, 0.95, 10)
    spot_err = max(abs(composite.ratio_lower_bound(float(e), 5) - min(composite.ratio_branches(float(e), 5)))
                   for e in spots)
    curve_at_spots = [composite.ratio_lower_bound(float(e), 5) for e in spots]
    monotone = bool(np.all(np.diff(curve_at_spots) <= 0)) and bool(np.all(np.diff(r) <= 1e-12))
    ok = abs(r[0] - math.sqrt(5)) <= 1e-9 and r.min() >= 1.0 and spot_err == 0.0 and monotone
    verdict(9, ok, f"r(0)-sqrt5={r[0] - math.sqrt(5):.2g}, min r={r.min():.12g}, "
                   f"spot error={spot_err:.2g}, nonincreasing={monotone}")
    assert ok


def test_criterion_10_mixed_states(verdict):
    _suite_verdict(10, suites.mixture_suite(SEED, ensembles=50), verdict)


def test_criterion_11_entangled_speedup(verdict):
    ok, worst_gap, worst_slow = True, 0.0, math.inf
    for xi in (0.3, 0.5, 1 / math.sqrt(2)):
        for m in (2, 3, 5):
            rep = composite.entangled_speedup_check(xi, 1.0, m)
            gap = rep["entangled"]["relative_gap"]
            r = rep["ratio_lower_bound"]
            slow = rep["separable"]["crossing_time"] / rep["entangled"]["crossing_time"] - r
            own = rep["separable"]["ratio_to_own_bound"] - r
            worst_gap = max(worst_gap, gap)
            worst_slow = min(worst_slow, slow, own)
            ok &= gap <= 1e-6 and slow >= -1e-6 and own >= -1e-6
    verdict(11, ok, f"max relative gap={worst_gap:.2g}, min slowdown margin={worst_slow:.2g}")
    assert ok
