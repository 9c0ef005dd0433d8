import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsl.bounds import beta
from qsl.errors import Degenerate
from qsl.properties import (ALPHA_SURFACE_TOL, EXACT_SURFACE_TOL,
                            SurfaceSample, convexity_surface_alpha,
                            convexity_surface_beta, cosine_floor_check,
                            derivative_bound_check, mixture_saturation_check,
                            subadditivity_chain_check, subadditivity_surface)
from qsl.dynamics import survival_amplitude
from qsl.states import PureState, TwoLevelState
from qsl.suites import random_pure_state

FAST = TwoLevelState(1 / math.sqrt(2), 1.0).pure


def _lam(samples):
    return np.array([s.lambda_value for s in samples])


def test_alpha_convexity_degeneracies():
    phi = np.linspace(0, math.pi, 31)
    assert np.all(np.abs(_lam(convexity_surface_alpha(0.4, 0.4, phi))) <= 1e-12)
    s = convexity_surface_alpha(np.linspace(0, 1, 11), 0.7, 0.0)
    assert all(x.degenerate for x in s)
    assert np.all(np.abs(_lam(s)) <= 1e-12)


def test_alpha_convexity_surface():
    e1 = np.linspace(0, 1, 101)[:, None]
    phi = np.linspace(0, math.pi, 101)[None, :]
    s = convexity_surface_alpha(e1, 0.7, phi)
    lam = _lam(s)
    deg = np.array([x.degenerate for x in s])
    assert lam.min() >= -ALPHA_SURFACE_TOL
    assert lam[~deg].min() > 0


def test_beta_convexity_examples():
    assert convexity_surface_beta(0.5, 0.5, 1.0)[0].lambda_value == pytest.approx(0, abs=1e-15)
    # direct evaluation: beta^2(0) cos^2 + beta^2(1) sin^2 - beta^2(1/4) at phi = pi/4
    lam = convexity_surface_beta(0.0, 1.0, math.pi / 4)[0].lambda_value
    assert lam == pytest.approx(0.5 - (2 / 3) ** 2, abs=1e-12)
    assert lam >= 0


def test_beta_convexity_random():
    rng = np.random.default_rng(0)
    e1, e2, phi = rng.uniform(0, 1, (3, 10 ** 4))
    assert _lam(convexity_surface_beta(e1, e2, phi * math.pi)).min() >= -EXACT_SURFACE_TOL


@pytest.mark.parametrize("which", ["alpha", "beta_sq"])
def test_subadditivity_examples(which):
    g = np.linspace(0, 1, 21)
    assert np.all(np.abs(_lam(subadditivity_surface(g, 1.0, which))) <= 1e-12)
    assert subadditivity_surface(0.0, 0.0, which)[0].lambda_value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("which,tol", [("alpha", ALPHA_SURFACE_TOL), ("beta_sq", EXACT_SURFACE_TOL)])
def test_subadditivity_grid(which, tol):
    g = np.linspace(0, 1, 101)
    s = subadditivity_surface(g[:, None], g[None, :], which)
    lam = _lam(s)
    deg = np.array([x.degenerate for x in s])
    assert lam.min() >= -tol and lam[~deg].min() > 0


@pytest.mark.parametrize("which", ["alpha", "beta_sq"])
def test_subadditivity_triples(which):
    r = subadditivity_chain_check(which, samples=5000, seed=1)
    assert min(r["min_direct"], r["min_outer_step"], r["min_inner_step"]) >= -1e-9


def test_exact_alpha_source_agrees_with_table():
    a = _lam(convexity_surface_alpha(np.linspace(0, 1, 9), 0.7, 0.9, source="exact"))
    b = _lam(convexity_surface_alpha(np.linspace(0, 1, 9), 0.7, 0.9))
    np.testing.assert_allclose(a, b, atol=1e-8)


def test_surface_sample_rejects_nonzero_degenerate():
    with pytest.raises(ValueError):
        SurfaceSample((0.1, 0.1, 0.0), 0.01, True)


def test_derivative_bound_examples():
    eig = PureState.eigenstate([0, 1, 2], 1)
    r = derivative_bound_check(eig, np.linspace(0, 5, 11))
    assert r["max_abs_slack"] == 0.0 and r["ok"]
    r = derivative_bound_check(FAST, np.linspace(0, 4 * math.pi, 401))
    assert r["max_abs_slack"] <= 1e-9 and r["ok"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_derivative_bound_random(seed):
    rng = np.random.default_rng(seed)
    s = random_pure_state(rng, max_levels=6, min_levels=6)
    r = derivative_bound_check(s, np.sort(rng.uniform(0, 20, 100)))
    assert r["ok"] and r["fd_ok"]


def test_cosine_floor_examples():
    assert cosine_floor_check(FAST)["max_abs_slack"] <= 1e-9
    with pytest.raises(Degenerate):
        cosine_floor_check(PureState.eigenstate([0, 1], 0))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_cosine_floor_random(seed):
    assert cosine_floor_check(random_pure_state(np.random.default_rng(seed)))["min_slack"] >= -1e-9


def test_mixture_identical_members():
    s = random_pure_state(np.random.default_rng(2), max_levels=4)
    r = mixture_saturation_check([0.3, 0.7], [s, s], 0.4)
    assert r["member_eps"][0] == pytest.approx(r["member_eps"][1])
    assert r["bar_eps"] == pytest.approx(r["member_eps"][0])


def test_mixture_of_dephased_fast_states():
    twin = PureState(FAST.spectrum, FAST.amplitudes * np.array([1, 1j]))
    r = mixture_saturation_check([0.5, 0.5], [FAST, twin], 0.2)
    # oracle: direct per-member survival at the reported time
    for st_, e in zip([FAST, twin], r["member_eps"]):
        assert abs(survival_amplitude(st_, r["time"])) ** 2 == pytest.approx(e, abs=1e-12)
    assert r["purification_overlap"] == pytest.approx(r["bar_eps"], abs=1e-12)
    assert r["fidelity"] >= r["bar_eps"] - 1e-9


def test_mixture_with_different_spreads_is_not_a_candidate():
    slow = TwoLevelState(0.1, 1.0).pure
    fast = TwoLevelState(1 / math.sqrt(2), 1.0).pure
    r = mixture_saturation_check([0.5, 0.5], [slow, fast], 0.3)
    assert not r["candidate"]
    eps_n = np.array(r["member_eps"])
    bar = (0.5 * np.sqrt(eps_n).sum()) ** 2
    assert r["bar_eps"] == pytest.approx(bar, abs=1e-12)
    gap = beta(bar) ** 2 - 0.5 * (beta(eps_n[0]) ** 2 + beta(eps_n[1]) ** 2)
    assert r["beta_sq_gap"] == pytest.approx(gap, abs=1e-12)
    assert r["jensen_ok"]
