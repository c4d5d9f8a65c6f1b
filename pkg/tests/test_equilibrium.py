import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ivbounds.equilibrium import (
    DivergedError,
    MarketConfig,
    MarketError,
    MarketState,
    UnstableMarketError,
    equilibrium_point,
    initial_state,
    panel_to_csv,
    run_panel,
    simulate_interval,
    stability,
    step,
    structural_residuals,
)

REF = MarketConfig(alpha_d=10, beta_d=-1, alpha_s=2, beta_s=1, lam=0.5, delta=1e-3)
STABLE = REF.replace(lam=0.2)


def test_step_substitution():
    s = step(MarketState(0, 0.0, 10.0, 2.0), REF)
    assert (s.k, s.p, s.q_d, s.q_s) == (1, 4.0, 10.0, 2.0)


def test_step_fixed_point():
    s = MarketState(0, 4.0, 6.0, 6.0)
    nxt = step(s, REF)
    assert (nxt.p, nxt.q_d, nxt.q_s) == (4.0, 6.0, 6.0)


def test_step_fixed_point_with_disturbance():
    p, q = equilibrium_point(REF, 1.0, -0.5)
    nxt = step(MarketState(0, p, q, q), REF, 1.0, -0.5)
    assert nxt.p == pytest.approx(p, abs=1e-12)
    assert nxt.q_d == pytest.approx(q, abs=1e-12) and nxt.q_s == pytest.approx(q, abs=1e-12)


def test_zero_speed_freezes_price():
    cfg = REF.replace(lam=0.0, p_init=1.5)
    s = MarketState(0, 1.5, 0.0, 0.0)
    s = step(s, cfg)
    assert s.p == 1.5 and (s.q_d, s.q_s) == (cfg.demand(1.5), cfg.supply(1.5))
    s = step(s, cfg)
    assert s.p == 1.5 and (s.q_d, s.q_s) == (cfg.demand(1.5), cfg.supply(1.5))


def test_step_rejects_nonfinite():
    with pytest.raises(DivergedError, match="diverged"):
        step(MarketState(3, math.inf, 0.0, 0.0), REF)


@pytest.mark.parametrize("eps_d, p_star, q_star", [(0.0, 4.0, 6.0), (1.0, 4.5, 6.5)])
def test_equilibrium_point(eps_d, p_star, q_star):
    assert equilibrium_point(REF, eps_d, 0.0) == (p_star, q_star)


def test_equilibrium_needs_distinct_slopes():
    with pytest.raises(MarketError, match="no unique equilibrium"):
        equilibrium_point(REF.replace(beta_s=-1))


@pytest.mark.parametrize(
    "lam, contraction, radius, stable",
    [
        (0.5, 0.0, 1.0, False),  # period-6 cycle
        (1.0, 1.0, math.sqrt(2), False),
        (0.2, 0.6, math.sqrt(0.4), True),
        (0.1, 0.8, (1 + math.sqrt(0.2)) / 2, True),
        (0.0, 1.0, 1.0, False),
    ],
)
def test_stability(lam, contraction, radius, stable):
    s = stability(REF.replace(lam=lam))
    assert s.contraction == pytest.approx(contraction)
    assert s.spectral_radius == pytest.approx(radius)
    assert s.stable is stable


def test_reference_config_cycles():
    # lam (beta_d - beta_s) = -1: prices 0, 4, 8, 8, 4, 0 repeat
    s = initial_state(REF)
    ps = []
    for _ in range(12):
        ps.append(s.p)
        s = step(s, REF)
    assert ps == [0, 4, 8, 8, 4, 0] * 2


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 2.0), st.floats(0.0, 3.0))
def test_spectral_radius_predicts_settling(slope_d, lam, slope_s):
    cfg = MarketConfig(5.0, -slope_d, 1.0, slope_s, lam, delta=1.0 / 2000)
    s = stability(cfg)
    if abs(s.spectral_radius - 1) < 0.02:
        return
    avg = simulate_interval(cfg)
    if s.stable:
        assert abs(avg.residual) < 1e-6
    else:
        assert not avg.converged


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(-1, 1), st.floats(-1, 1))
def test_no_contraction_ever_claims_stable_when_contraction_at_least_one(p0, eps_d, eps_s):
    for lam in (1.0, 1.5, 0.0, -0.3):
        cfg = REF.replace(lam=lam, p_init=p0, delta=1e-2)
        s = stability(cfg)
        assert s.contraction >= 1 and not s.stable
        assert not simulate_interval(cfg, eps_d, eps_s).converged


def test_simulate_matches_repeated_step():
    cfg = STABLE.replace(delta=1 / 50, p_init=1.0)
    s = initial_state(cfg, 0.3, -0.2)
    traj = []
    for _ in range(50):
        traj.append(s)
        s = step(s, cfg, 0.3, -0.2)
    avg = simulate_interval(cfg, 0.3, -0.2)
    assert avg.p_bar == pytest.approx(sum(t.p for t in traj) / 50, rel=1e-14)
    assert avg.q_d_bar == pytest.approx(sum(t.q_d for t in traj) / 50, rel=1e-14)
    assert avg.end_state == s


def test_simulate_stable_small_delta():
    avg = simulate_interval(STABLE.replace(delta=1e-4))
    assert avg.converged
    assert abs(avg.p_bar - 4) < 1e-3
    assert abs(avg.q_d_bar - avg.q_s_bar) <= 25 * 1e-4


def test_error_constant_by_halving():
    # transient sum is fixed, so error / delta is constant
    errs = [abs(simulate_interval(STABLE.replace(delta=d)).p_bar - 4) / d for d in (1e-3, 5e-4, 2.5e-4)]
    assert errs[0] == pytest.approx(errs[1], rel=1e-6) == pytest.approx(errs[2], rel=1e-6)


def test_unstable_not_converged():
    avg = simulate_interval(REF.replace(lam=2.0))
    assert avg.diverged and not avg.converged
    assert math.isnan(avg.p_bar)


def test_single_step_interval():
    cfg = REF.replace(delta=1.0)
    avg = simulate_interval(cfg)
    # one left-endpoint sample: the starting state
    assert (avg.p_bar, avg.q_d_bar, avg.q_s_bar) == (0.0, 10.0, 2.0)
    # contraction 0: the single price update lands on p*
    assert avg.end_state.p == 4.0


@pytest.mark.parametrize("delta", [0.3, 0.0, 1.5, -0.1])
def test_bad_delta(delta):
    with pytest.raises(MarketError):
        REF.replace(delta=delta)


def test_config_json_round_trip():
    data = {"alpha_d": 10, "beta_d": -1, "alpha_s": 2, "beta_s": 1, "lambda": 0.2, "delta": 1e-3, "p_init": 0}
    cfg = MarketConfig.from_json(data)
    assert cfg == STABLE
    assert MarketConfig.from_json(cfg.to_json()) == cfg
    with pytest.raises(MarketError, match="missing"):
        MarketConfig.from_json({"alpha_d": 1})


def test_panel_residuals():
    cfg = STABLE.replace(delta=1e-4)
    rows = run_panel(cfg, 20, 1.0, 1.0, seed=3)
    worst = max(max(abs(r) for r in structural_residuals(cfg, row)) for row in rows)
    assert worst <= 1e-2


def test_panel_zero_noise_is_deterministic_equilibrium():
    cfg = STABLE.replace(delta=1e-4, p_init=4.0)
    rows = run_panel(cfg, 5, 0.0, 0.0, seed=1)
    for r in rows:
        assert (r.p_bar, r.q_bar, r.eps_d, r.eps_s) == (4.0, 6.0, 0.0, 0.0)


def test_panel_seed_reproducible():
    a = panel_to_csv(run_panel(STABLE, 10, 1.0, 0.5, seed=7))
    b = panel_to_csv(run_panel(STABLE, 10, 1.0, 0.5, seed=np.random.default_rng(7)))
    assert a == b
    assert a.splitlines()[0] == "t,p_bar,q_bar,eps_d,eps_s"


def test_price_handoff_is_immaterial():
    cfg = STABLE.replace(delta=1e-4)
    carried = run_panel(cfg, 20, 1.0, 1.0, seed=5)
    restarted = run_panel(cfg, 20, 1.0, 1.0, seed=5, carry_price=False)
    gap = max(abs(a.p_bar - b.p_bar) for a, b in zip(carried, restarted))
    assert gap <= 50 * cfg.delta


def test_panel_refuses_unstable():
    with pytest.raises(UnstableMarketError, match="will not equilibrate"):
        run_panel(REF.replace(lam=2.0), 3)
    with pytest.raises(MarketError):
        run_panel(STABLE, 0)
