import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from cadlag_lab.errors import LabError
from cadlag_lab.lab import ks_distance, ks_to_cdf
from cadlag_lab.paths import Mode, compose, inverse, left_limit, make_path, max_jump, ramp
from cadlag_lab.simulators import (ChainSpec, CvMethod, InterarrivalDist, POTENTIALS, RadialPotential,
                                   Scenario, ScenarioConfig, brownian_path, chain_martingale_path,
                                   chain_states, compensator_of, compensator_path, counting_path,
                                   cv_quadrature, draw_renewal, build_scenario, martingale_increments,
                                   named_potential, occupation_path, renewal_arrivals, renewal_path,
                                   scenario_triplet, simulate_scenario, solve_poisson,
                                   stationary_distribution, substream)

STICKY = ChainSpec([[0.9, 0.1], [0.1, 0.9]], [1, -1])
IID = ChainSpec.iid([0.5, 0.5], [0, 2])


def case1(n, T=1.0, chain=IID, seed=0):
    return ScenarioConfig(Scenario.RENEWAL_FINITE_VAR, n, T, 0.01, InterarrivalDist.exponential(), chain, seed)


def case2(n, T=1.0, seed=0):
    return ScenarioConfig(Scenario.RENEWAL_STABLE_SUB1, n, T, 0.01, InterarrivalDist.pareto(0.7), STICKY, seed)


# ---------------------------------------------------------------- RNG

def test_substreams_are_reproducible_and_distinct():
    a = substream(7, 1, 2).random(5)
    assert np.array_equal(a, substream(7, 1, 2).random(5))
    assert not np.array_equal(a, substream(7, 1, 3).random(5))
    assert not np.array_equal(a, substream(8, 1, 2).random(5))


# ---------------------------------------------------------------- Brownian motion

def test_brownian_single_increment():
    w = brownian_path(2.0, 2.0, 1, substream(0))
    z = substream(0).standard_normal((1, 1))[0, 0] * math.sqrt(2.0)
    assert w.at(0.0) == 0 and w.at(2.0) == pytest.approx(z, abs=1e-15)


def test_brownian_bad_step():
    with pytest.raises(LabError) as e:
        brownian_path(1.0, 0.0, 1, substream(0))
    assert e.value.code == "BAD_STEP"


def test_brownian_moments():
    w1 = np.array([brownian_path(1.0, 0.5, 1, substream(11, r)).at(1.0) for r in range(100_000)])
    assert abs(w1.mean()) <= 0.01
    assert abs(w1.var(ddof=1) - 1) <= 0.015


def test_brownian_planar_shape():
    w = brownian_path(1.0, 0.1, 2, substream(0))
    assert w.dim == 2 and w.mode is Mode.LINEAR and np.all(w.at(0.0) == 0)


# ---------------------------------------------------------------- renewal

def test_deterministic_renewal():
    N = renewal_path(InterarrivalDist.deterministic(1), 7.5, substream(0))
    t = np.linspace(0, 7.5, 76)
    assert np.array_equal(N.at(t), np.floor(t))


def test_exponential_renewal_mean():
    vals = [renewal_path(InterarrivalDist.exponential(), 10.0, substream(3, r)).at(10.0) for r in range(10_000)]
    assert abs(np.mean(vals) - 10) <= 3 * math.sqrt(10 / 10_000)


def test_pareto_self_similarity():
    d = InterarrivalDist.pareto(0.7)
    meds = []
    for t in (1e2, 1e3, 1e4):
        meds.append(np.median([renewal_arrivals(d, t, substream(5, int(t), r)).size / t ** 0.7
                               for r in range(2000)]))
    assert max(meds) / min(meds) <= 1.25


@given(st.integers(0, 2**32), st.sampled_from(["exponential", "pareto"]))
def test_renewal_identity(seed, kind):
    d = InterarrivalDist.exponential() if kind == "exponential" else InterarrivalDist.pareto(0.7)
    S = renewal_arrivals(d, 50.0, substream(seed))
    N = counting_path(S, 1.0, 1.0, 50.0)
    for k, s in enumerate(S, start=1):
        assert N.at(s) == k
        assert left_limit(N, s)[0] == k - 1


def test_dist_validation():
    with pytest.raises(LabError):
        InterarrivalDist.pareto(-1)
    with pytest.raises(LabError):
        InterarrivalDist.exponential(0)


# ---------------------------------------------------------------- chains and the Poisson equation

def test_reducible_chain():
    with pytest.raises(LabError) as e:
        ChainSpec([[1, 0], [0.5, 0.5]], [0, 1])
    assert e.value.code == "REDUCIBLE_CHAIN"


def test_stationary_distribution():
    pi = stationary_distribution([[0.5, 0.5, 0], [0.25, 0.5, 0.25], [0, 0.5, 0.5]])
    assert np.allclose(pi, [0.25, 0.5, 0.25], atol=1e-15)


def test_poisson_iid_rows():
    sol = solve_poisson(ChainSpec.iid([0.2, 0.3, 0.5], [1, -2, 4]))
    V = np.array([1, -2, 4])
    mu = 0.2 - 0.6 + 2.0
    assert sol.mu == pytest.approx(mu)
    assert np.allclose(sol.f, V - mu) and np.allclose(sol.Pf, 0, atol=1e-14)
    assert sol.sigma2 == pytest.approx(0.2 * 1 + 0.3 * 4 + 0.5 * 16 - mu ** 2)


def test_poisson_alternating():
    sol = solve_poisson(ChainSpec([[0, 1], [1, 0]], [1, -1]))
    assert np.allclose(sol.pi, [0.5, 0.5]) and sol.mu == 0
    assert np.allclose(sol.f, [0.5, -0.5]) and sol.sigma2 < 1e-20


def test_poisson_sticky_against_monte_carlo():
    sol = solve_poisson(STICKY)
    assert sol.sigma2 == pytest.approx(9.0, abs=1e-9)
    n = 200
    sums = []
    for r in range(10_000):
        Y = martingale_increments(sol, chain_states(STICKY, n, substream(21, r), sol.pi))
        sums.append(Y.sum() / math.sqrt(n))
    assert abs(np.var(sums, ddof=1) / sol.sigma2 - 1) <= 0.05


def test_zero_variance():
    with pytest.raises(LabError) as e:
        chain_martingale_path(ChainSpec([[0, 1], [1, 0]], [1, -1]), 10, 1.0, substream(0))
    assert e.value.code == "ZERO_VARIANCE"


def test_single_term_path():
    sol = solve_poisson(IID)
    W = chain_martingale_path(IID, 1, 1.0, substream(4), sol)
    xi = chain_states(IID, 1, substream(4), sol.pi)
    assert W.at(1.0) == pytest.approx(martingale_increments(sol, xi)[0] / math.sqrt(sol.sigma2))
    assert W.at(0.5) == 0


def test_terminal_value_is_normal():
    sol = solve_poisson(IID)
    w = [chain_martingale_path(IID, 10_000, 1.0, substream(9, r), sol).at(1.0) for r in range(10_000)]
    assert ks_to_cdf(w, stats.norm.cdf) <= 0.02


def test_max_jump_shrinks():
    sol = solve_poisson(STICKY)
    n = 2500
    worst = max(max_jump(chain_martingale_path(STICKY, n, 1.0, substream(2, r), sol), 1.0) for r in range(100))
    assert worst <= 5 * np.abs(sol.f).max() / math.sqrt(n)


@given(st.integers(0, 2**32), st.integers(1, 500))
def test_telescoping(seed, n):
    chain = ChainSpec([[0.2, 0.5, 0.3], [0.6, 0.1, 0.3], [0.1, 0.1, 0.8]], [3, -1, 0.5])
    sol = solve_poisson(chain)
    xi = chain_states(chain, n + 1, substream(seed), sol.pi)
    Y = martingale_increments(sol, xi)[:n]
    V = chain.V0[xi[1:n + 1]] - sol.mu
    lhs = V.sum() - Y.sum()
    rhs = sol.Pf[xi[0]] - sol.Pf[xi[n]]
    assert abs(lhs - rhs) <= 1e-10


def test_martingale_increments_uncorrelated():
    sol = solve_poisson(STICKY)
    Y = martingale_increments(sol, chain_states(STICKY, 1_000_000, substream(33), sol.pi))
    Y = Y - Y.mean()
    var = np.dot(Y, Y)
    for lag in range(1, 6):
        assert abs(np.dot(Y[:-lag], Y[lag:]) / var) <= 0.01


# ---------------------------------------------------------------- scenarios

def test_scenario_validation():
    with pytest.raises(LabError) as e:
        ScenarioConfig(Scenario.RENEWAL_STABLE_SUB1, 10, 1, 0.01, InterarrivalDist.exponential(), STICKY)
    assert e.value.code == "CONFIG_INVALID"
    with pytest.raises(LabError):
        ScenarioConfig(Scenario.RENEWAL_FINITE_VAR, 10, 1, 0.01, InterarrivalDist.pareto(0.7), STICKY)
    with pytest.raises(LabError):
        ScenarioConfig(Scenario.RENEWAL_FINITE_VAR, 0, 1, 0.01, InterarrivalDist.exponential(), STICKY)
    with pytest.raises(LabError):
        ScenarioConfig(Scenario.RENEWAL_FINITE_VAR, 10, 1, 0.01, InterarrivalDist.exponential(), None)


def test_deterministic_staircase_scenario():
    cfg = ScenarioConfig(Scenario.RENEWAL_FINITE_VAR, 50, 2.0, 0.01, InterarrivalDist.deterministic(1), STICKY)
    M, A, W = scenario_triplet(cfg, substream(0))
    t = np.linspace(0, 2, 401)
    assert np.allclose(A.at(t), np.floor(50 * t + 1e-9) / 50, atol=1e-15)
    assert np.allclose(M.at(t), W.at(A.at(t)), atol=1e-15)


def test_case1_lln():
    cfg = case1(10_000)
    a1 = [simulate_scenario(cfg, substream(1, r)).A.at(1.0) for r in range(1000)]
    assert np.std(a1, ddof=1) <= 0.02


def test_case2_scale_self_consistency():
    def a_at_one(n, r):
        cfg = case2(n)
        return renewal_arrivals(cfg.dist, cfg.time_scale, substream(17, n, r)).size / n
    lo = [a_at_one(10_000, r) for r in range(10_000)]
    hi = [a_at_one(40_000, r) for r in range(10_000)]
    assert ks_distance(lo, hi) <= 0.03


def test_time_change_composition():
    s = simulate_scenario(case2(500, T=2.0), substream(3))
    t = np.linspace(0, 2, 97)
    assert np.allclose(s.M.at(t), s.W.at(s.A.at(t)))


def test_inverse_matches_first_passage_identity():
    cfg = case2(300)
    d = draw_renewal(cfg, substream(8))
    A = build_scenario(cfg, d).A
    tau = inverse(A)
    S = d.arrivals / cfg.time_scale
    for s in np.linspace(0, A.values[-1, 0] - 1e-9, 50):
        k = int(math.floor(cfg.n * s + 1e-12))
        if k < S.size:
            assert tau.at(s) == pytest.approx(S[k], abs=1e-12)
    # composing back gives the overshoot staircase (1 + N)/n
    comp = compensator_of(A)
    s = 0.37 * A.values[-1, 0]
    assert comp.at(s) == pytest.approx((math.floor(cfg.n * s) + 1) / cfg.n)


def test_reproducible_scenarios():
    a = simulate_scenario(case2(1000), substream(5, 1))
    b = simulate_scenario(case2(1000), substream(5, 1))
    assert a.M == b.M and a.A == b.A and a.W == b.W


def test_centered_process_case1():
    cfg = case1(400, chain=IID)
    s = simulate_scenario(cfg, substream(6))
    sol = solve_poisson(IID)
    t = 0.73
    expect = math.sqrt(400) * (s.X.at(t) - sol.mu * t / cfg.dist.mean)
    assert s.centered.at(t) == pytest.approx(expect)


# ---------------------------------------------------------------- compensator

def test_compensator_of_identity():
    assert np.allclose(compensator_of(ramp(2.0)).at([0, 0.5, 1.9]), [0, 0.5, 1.9])


def test_compensator_staircase_overshoot():
    n = 20
    A = make_path(np.arange(41) / n, np.arange(41) / n, Mode.STEP, 2.0)
    comp = compensator_of(A)
    t = (np.arange(38) + 0.3) / n      # continuity points of the staircase
    assert np.allclose(comp.at(t), (np.floor(n * t) + 1) / n)


def test_case1_compensator_mean():
    cfg = case1(1000, T=2.0)
    vals = [compensator_path(cfg, substream(12, r)).at(1.0) for r in range(2000)]
    assert 1.0 <= np.mean(vals) <= 1.01


def test_compensator_rejects_occupation():
    cfg = ScenarioConfig(Scenario.OCCUPATION_PLANAR, 100, 1.0)
    with pytest.raises(LabError) as e:
        compensator_path(cfg, substream(0))
    assert e.value.code == "CONFIG_INVALID"


# ---------------------------------------------------------------- potentials and c_V

def test_tabulated_g_matches_closed_form():
    pot = named_potential("gaussian-centered")
    r = np.linspace(0, 6, 1201)
    assert np.max(np.abs(pot.g(r) + r * r * np.exp(-r * r) / 2)) <= 1e-8
    wide = named_potential("gaussian-wide")
    assert np.max(np.abs(wide.g(r) + r * r * np.exp(-r * r / 2))) <= 1e-8


@pytest.mark.parametrize("name,exact", [
    ("gaussian-centered", math.pi / 4),
    ("gaussian-wide", 4 * math.pi),
    ("gaussian-difference", math.pi * math.log(9 / 8)),
])
def test_cv_closed_forms(name, exact):
    pot = named_potential(name)
    g = cv_quadrature(pot, CvMethod.GRADIENT, 1e-9)
    k = cv_quadrature(pot, CvMethod.LOGKERNEL, 1e-9)
    assert g == pytest.approx(exact, abs=1e-7)
    assert k == pytest.approx(exact, abs=1e-7)


def test_cv_compact_support_methods_agree():
    pot = named_potential("compact-quartic")
    assert cv_quadrature(pot, "GRADIENT", 1e-9) == pytest.approx(cv_quadrature(pot, "LOGKERNEL", 1e-9), abs=2e-9)


def test_cv_zero_potential():
    pot = named_potential("zero")
    assert cv_quadrature(pot, "GRADIENT") == 0 and cv_quadrature(pot, "LOGKERNEL") == 0


def test_uncentered_potential_rejected():
    with pytest.raises(LabError) as e:
        RadialPotential(lambda r: np.exp(-r * r), "bump")
    assert e.value.code == "NOT_CENTERED"


def test_unknown_potential():
    with pytest.raises(LabError):
        named_potential("nope")
    assert "gaussian-centered" in POTENTIALS


# ---------------------------------------------------------------- occupation paths

def test_occupation_basic():
    pot = named_potential("gaussian-centered")
    a = occupation_path(100, 0.05, pot, substream(1), T=2.0, record_every=5)
    assert a.at(0.0) == 0
    assert np.all(np.diff(a.values[:, 0]) >= 0)
    assert a.horizon == 2.0


def test_occupation_zero_potential():
    a = occupation_path(100, 0.05, named_potential("zero"), substream(1))
    assert np.all(a.values == 0)


def test_occupation_bad_step():
    with pytest.raises(LabError) as e:
        occupation_path(100, -0.1, named_potential("gaussian-centered"), substream(1))
    assert e.value.code == "BAD_STEP"


def test_occupation_reproducible():
    pot = named_potential("gaussian-centered")
    assert occupation_path(50, 0.1, pot, substream(2)) == occupation_path(50, 0.1, pot, substream(2))
