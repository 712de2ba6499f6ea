"""Path engine tests: determinism, distributional oracles, accounting parity."""

import dataclasses
import math

import numpy as np
import pytest

import ammhedge.montecarlo as mc
from ammhedge.config_domain import DAYS_PER_YEAR, JumpParams, MarketParams, SimConfig

# hand-derived flat-market ROE: T * (reward - h*(r_a+r_b)/2 + cv*r_f) / pi0
FLAT_PATH_ROE = 0.058150684932


def _flat_paths(baseline, n=1):
    steps = int(round(baseline.position.horizon_days / baseline.sim.dt_days))
    return np.ones((n, steps + 1)), np.ones((n, steps + 1))


# ---------------------------------------------------------------------------
# path generation

def test_path_matrix_shape_and_start(baseline):
    m = baseline.market
    a, b = mc.generate_path_matrix(m, None, 90.0, 1.0 / 3.0, 100, seed=1)
    assert a.shape == b.shape == (100, 271)
    assert np.all(a[:, 0] == 1.0) and np.all(b[:, 0] == 1.0)
    assert np.all(a > 0) and np.all(b > 0)


def test_same_seed_reproduces_paths(baseline):
    m = baseline.market
    a1, b1 = mc.generate_path_matrix(m, None, 90.0, 1.0, 500, seed=11)
    a2, b2 = mc.generate_path_matrix(m, None, 90.0, 1.0, 500, seed=11)
    a3, _ = mc.generate_path_matrix(m, None, 90.0, 1.0, 500, seed=12)
    assert np.array_equal(a1, a2) and np.array_equal(b1, b2)
    assert not np.array_equal(a1, a3)


def test_worker_count_does_not_change_paths(baseline):
    m = baseline.market
    a1, b1 = mc.generate_path_matrix(m, None, 90.0, 1.0, 20000, seed=3, n_workers=1)
    a4, b4 = mc.generate_path_matrix(m, None, 90.0, 1.0, 20000, seed=3, n_workers=4)
    assert np.array_equal(a1, a4) and np.array_equal(b1, b4)


def test_path_count_prefix_property(baseline):
    # growing n_paths must extend the sample, not reshuffle it
    m = baseline.market
    a_small, b_small = mc.generate_path_matrix(m, None, 90.0, 1.0, 9000, seed=3)
    a_big, b_big = mc.generate_path_matrix(m, None, 90.0, 1.0, 20000, seed=3)
    assert np.array_equal(a_big[:9000], a_small)
    assert np.array_equal(b_big[:9000], b_small)


def test_generator_matches_matrix(baseline):
    m = baseline.market
    a, b = mc.generate_path_matrix(m, None, 30.0, 1.0, 5, seed=9)
    for i, p in enumerate(mc.generate_paths(m, None, 30.0, 1.0, 5, seed=9)):
        assert p.rel_a[0] == 1.0 and len(p.rel_a) == 31
        assert np.array_equal(p.rel_a, a[i]) and np.array_equal(p.rel_b, b[i])
    assert i == 4


def test_zero_intensity_jump_is_plain_gbm(baseline):
    m = baseline.market
    off = JumpParams(lam=0.0, mu_j=-0.05, sigma_j=0.15, rho_j=0.8)
    a0, b0 = mc.generate_path_matrix(m, None, 90.0, 1.0, 300, seed=5)
    a1, b1 = mc.generate_path_matrix(m, off, 90.0, 1.0, 300, seed=5)
    assert np.array_equal(a0, a1) and np.array_equal(b0, b1)


def test_grid_must_divide_horizon(baseline):
    with pytest.raises(ValueError, match="does not divide"):
        mc.generate_path_matrix(baseline.market, None, 90.0, 0.7, 10, seed=1)


def test_log_increment_moments(baseline):
    m = baseline.market
    n = 65536
    a, b = mc.generate_path_matrix(m, None, 1.0, 1.0, n, seed=21)
    la = np.log(a[:, 1])
    lb = np.log(b[:, 1])
    dt_y = 1.0 / DAYS_PER_YEAR

    for x, sig in ((la, m.sigma_a), (lb, m.sigma_b)):
        se = x.std(ddof=1) / math.sqrt(n)
        assert abs(x.mean() - (-0.5 * sig * sig * dt_y)) < 3.0 * se
        assert x.std(ddof=1) * math.sqrt(DAYS_PER_YEAR) == pytest.approx(sig, rel=0.01)
    assert np.corrcoef(la, lb)[0, 1] == pytest.approx(m.rho, abs=0.01)


def test_perfect_correlation_links_legs():
    m = MarketParams(sigma_a=0.8, sigma_b=1.2, rho=1.0)
    a, b = mc.generate_path_matrix(m, None, 1.0, 1.0, 2000, seed=2)
    dt_y = 1.0 / DAYS_PER_YEAR
    # one shared driver: centered log returns are proportional across legs
    ca = np.log(a[:, 1]) + 0.5 * m.sigma_a ** 2 * dt_y
    cb = np.log(b[:, 1]) + 0.5 * m.sigma_b ** 2 * dt_y
    assert np.allclose(ca * m.sigma_b, cb * m.sigma_a, atol=1e-13)


def test_jump_overlay_variance_and_martingale(baseline):
    m = baseline.market
    n = 65536
    t_y = 90.0 / DAYS_PER_YEAR

    def terminal(jump):
        a, b = mc.generate_path_matrix(m, jump, 90.0, 1.0, n, seed=33)
        return a[:, -1], b[:, -1]

    matched = JumpParams(lam=4.0, mu_j=-0.05, sigma_j=0.15, rho_j=0.8,
                         variance_matched=True)
    raw = dataclasses.replace(matched, variance_matched=False)

    a_g, b_g = terminal(None)
    a_m, b_m = terminal(matched)
    a_r, _ = terminal(raw)

    # compensated drift keeps every variant a martingale
    for x in (a_g, b_g, a_m, b_m, a_r):
        se = x.std(ddof=1) / math.sqrt(n)
        assert abs(x.mean() - 1.0) < 3.0 * se

    # variance matching holds the terminal log variance at the GBM level
    assert np.log(a_m).var(ddof=1) == pytest.approx(m.sigma_a ** 2 * t_y, rel=0.02)
    assert np.log(b_m).var(ddof=1) == pytest.approx(m.sigma_b ** 2 * t_y, rel=0.02)
    # without matching the jumps add lam*T*(mu_j^2 + sigma_j^2) on top
    assert np.log(a_r).var(ddof=1) > m.sigma_a ** 2 * t_y * 1.08


# ---------------------------------------------------------------------------
# accounting

def test_flat_path_accounting_oracle(baseline):
    rel_a, rel_b = _flat_paths(baseline)
    batch = mc.simulate_batch(rel_a, rel_b, baseline.market, baseline.rates,
                              baseline.position, baseline.sim)
    assert batch.roe_raw[0] == pytest.approx(FLAT_PATH_ROE, abs=1e-10)
    assert batch.roe[0] == batch.roe_raw[0]  # costs off by default
    assert not batch.liquidated[0] and math.isnan(batch.liq_time_days[0])
    assert batch.n_claims[0] == 6  # every 14 days inside 90
    assert batch.n_rebalances[0] == 0
    assert 0.30 < batch.max_ltv[0] < 0.31
    assert batch.tx_cost_paid[0] == pytest.approx(0.003 * 0.6, abs=1e-15)
    assert batch.roe_raw[0] - batch.roe_tx[0] == pytest.approx(0.0018 / 2.4, abs=1e-15)

    one = mc.simulate_position(mc.PricePath(rel_a[0], rel_b[0]), baseline.market,
                               baseline.rates, baseline.position, baseline.sim)
    assert one.roe == pytest.approx(batch.roe[0], abs=1e-12)
    assert one.max_ltv == pytest.approx(batch.max_ltv[0], abs=1e-12)


def test_immediate_crash_pays_flat_penalty(baseline):
    # both tokens double on the first step at full hedge: instant breach
    pos = dataclasses.replace(baseline.position, h=1.0)
    rel_a, rel_b = _flat_paths(baseline)
    rel_a[:, 1:] = 2.0
    rel_b[:, 1:] = 2.0
    batch = mc.simulate_batch(rel_a, rel_b, baseline.market, baseline.rates,
                              pos, baseline.sim)
    assert batch.liquidated[0]
    assert batch.liq_time_days[0] == pytest.approx(baseline.sim.dt_days, abs=1e-12)
    assert batch.roe_raw[0] == -0.2  # penalty*coll / pi0 exactly
    one = mc.simulate_position(mc.PricePath(rel_a[0], rel_b[0]), baseline.market,
                               baseline.rates, pos, baseline.sim)
    assert one.liquidated and one.roe == -0.2
    assert one.liq_time_days == pytest.approx(baseline.sim.dt_days, abs=1e-12)


def test_breached_paths_keep_diagnostics_but_stop_rebalancing(baseline):
    pos = dataclasses.replace(baseline.position, h=1.0)
    sim = dataclasses.replace(baseline.sim, rebalance="periodic(30)")
    rel_a, rel_b = _flat_paths(baseline, n=2)
    rel_a[0, 1:] = 2.0
    rel_b[0, 1:] = 2.0
    rel_a[0, 2:] = 3.0  # keeps climbing after the breach
    rel_b[0, 2:] = 3.0
    batch = mc.simulate_batch(rel_a, rel_b, baseline.market, baseline.rates, pos, sim)
    assert batch.liquidated[0] and not batch.liquidated[1]
    assert batch.max_ltv[0] > 1.4  # post-breach excursion still tracked
    assert batch.n_rebalances[0] == 0  # no trades after liquidation
    assert batch.n_rebalances[1] == 3


def test_periodic_rule_counts_rebalances(baseline):
    sim = dataclasses.replace(baseline.sim, dt_days=1.0, rebalance="periodic(30)")
    paths = mc.generate_path_matrix(baseline.market, None, 90.0, 1.0, 2000, seed=42)
    batch = mc.simulate_batch(paths[0], paths[1], baseline.market, baseline.rates,
                              baseline.position, sim)
    alive = ~batch.liquidated
    assert alive.any()
    assert np.all(batch.n_rebalances[alive] == 3)
    assert np.all(batch.n_rebalances <= 3)


@pytest.mark.parametrize("sim_changes", [
    dict(rebalance="threshold(15)"),
    dict(rebalance="periodic(30)", include_tx_costs=True, gas_cost=0.001),
])
def test_scalar_and_vector_kernels_agree(baseline, sim_changes):
    pos = dataclasses.replace(baseline.position, h=0.8)
    sim = dataclasses.replace(baseline.sim, **sim_changes)
    rel_a, rel_b = mc.generate_path_matrix(baseline.market, None, pos.horizon_days,
                                           sim.dt_days, 50, seed=7)
    batch = mc.simulate_batch(rel_a, rel_b, baseline.market, baseline.rates, pos, sim)
    for i in range(50):
        one = mc.simulate_position(mc.PricePath(rel_a[i], rel_b[i]), baseline.market,
                                   baseline.rates, pos, sim)
        assert one.roe == pytest.approx(batch.roe[i], abs=1e-10), i
        assert one.liquidated == batch.liquidated[i], i
        if one.liquidated:
            assert one.liq_time_days == pytest.approx(batch.liq_time_days[i], abs=1e-9)
        else:
            assert one.liq_time_days is None and math.isnan(batch.liq_time_days[i])
        assert one.max_ltv == pytest.approx(batch.max_ltv[i], abs=1e-10), i
        assert one.n_rebalances == batch.n_rebalances[i], i
        assert one.tx_cost_paid == pytest.approx(batch.tx_cost_paid[i], abs=1e-12), i


def test_batch_rejects_mismatched_grid(baseline):
    rel_a, rel_b = mc.generate_path_matrix(baseline.market, None, 90.0, 1.0, 3, seed=1)
    with pytest.raises(ValueError, match="does not match sim.dt_days"):
        mc.simulate_batch(rel_a, rel_b, baseline.market, baseline.rates,
                          baseline.position, baseline.sim)


def test_claim_interval_below_grid_step_rejected(baseline):
    sim = dataclasses.replace(baseline.sim, claim_interval_days=0.1)
    rel_a, rel_b = _flat_paths(baseline)
    with pytest.raises(ValueError, match="claim_interval_days"):
        mc.simulate_batch(rel_a, rel_b, baseline.market, baseline.rates,
                          baseline.position, sim)


def test_rebalance_rule_state_transitions(baseline):
    pos = baseline.position
    st = mc.initial_state(pos)
    assert st.lp_value == pos.v0
    assert st.debt_a == st.debt_b == pos.h * pos.v0 / 2.0
    assert st.collateral == pos.c_over_v0 * pos.v0

    assert mc.apply_rebalance_rule(st, 1.0, 1.0, "none", pos.h) == 0
    # on-target position stays untouched under a threshold rule
    assert mc.apply_rebalance_rule(st, 1.0, 1.0, "threshold(15)", pos.h) == 0
    assert st.cash == 0.0

    # leg A drifts to 0.84 effective vs 0.60 target: beyond the 15pp band
    assert mc.apply_rebalance_rule(st, 1.4, 1.0, "threshold(15)", pos.h) == 1
    assert st.debt_a == pytest.approx(pos.h * pos.v0 / (2.0 * 1.4))
    assert st.debt_b == pytest.approx(pos.h * pos.v0 / 2.0)
    assert st.cash == pytest.approx(0.72 - 0.60)

    st2 = mc.initial_state(pos)
    # periodic rules always fire; balanced prices make it a no-op trade
    assert mc.apply_rebalance_rule(st2, 1.0, 1.0, "periodic(30)", pos.h) == 1
    assert st2.cash == 0.0


# ---------------------------------------------------------------------------
# aggregation and output

def _mk_result(roe, liq=False, day=None, ltv=0.4, reb=0, tx=0.0):
    return mc.PathResult(roe=roe, liquidated=liq, liq_time_days=day,
                         max_ltv=ltv, n_rebalances=reb, tx_cost_paid=tx)


def test_aggregate_matches_numpy_reductions():
    roes = [0.10, -0.02, 0.04, -0.20]
    rs = [
        _mk_result(roes[0], reb=1),
        _mk_result(roes[1], reb=2, ltv=0.5),
        _mk_result(roes[2], reb=3, ltv=0.6),
        _mk_result(roes[3], liq=True, day=40.0, ltv=0.9, reb=7),
    ]
    sim = SimConfig(n_paths=4)
    agg = mc.aggregate(rs, sim, 90.0)
    arr = np.array(roes)
    assert agg.e_roe_pp == pytest.approx(arr.mean() * 100.0)
    assert agg.std_pp == pytest.approx(arr.std(ddof=1) * 100.0)
    assert agg.p_loss == 0.5
    assert agg.p_liq == 0.25
    assert agg.avg_rebalances == 2.0  # liquidated path excluded
    assert agg.var5_pp == pytest.approx(np.percentile(arr, 5.0) * 100.0)
    assert agg.p95_max_ltv == pytest.approx(np.percentile([0.4, 0.5, 0.6, 0.9], 95.0))
    ann = math.sqrt(DAYS_PER_YEAR / 90.0)
    assert agg.sr_raw == pytest.approx(arr.mean() / arr.std(ddof=1) * ann)
    assert agg.n_paths == 4

    # the funding hurdle only shifts the numerator
    agg_rf = mc.aggregate(rs, sim, 90.0, r_f=0.04)
    want = (arr.mean() - 0.04 * 90.0 / DAYS_PER_YEAR) / arr.std(ddof=1) * ann
    assert agg_rf.sr_raw == pytest.approx(want)


def test_aggregate_cost_basis_needs_equity_base():
    rs = [_mk_result(0.05, tx=0.0018), _mk_result(-0.01, tx=0.0018)]
    sim = SimConfig(n_paths=2)
    assert math.isnan(mc.aggregate(rs, sim, 90.0).sr_tx)
    agg = mc.aggregate(rs, sim, 90.0, pi0=2.4)
    shifted = np.array([0.05, -0.01]) - 0.0018 / 2.4
    ann = math.sqrt(DAYS_PER_YEAR / 90.0)
    assert agg.sr_tx == pytest.approx(shifted.mean() / shifted.std(ddof=1) * ann)


def test_aggregate_rejects_short_sequences():
    with pytest.raises(ValueError, match="at least 2"):
        mc.aggregate([_mk_result(0.01)], SimConfig(n_paths=1), 90.0)


def test_aggregate_degenerate_samples(baseline):
    # a single path or a zero-variance sample reports NaN dispersion stats
    rel_a, rel_b = _flat_paths(baseline)
    batch = mc.simulate_batch(rel_a, rel_b, baseline.market, baseline.rates,
                              baseline.position, baseline.sim)
    agg1 = mc.aggregate(batch, baseline.sim, 90.0)
    assert math.isnan(agg1.std_pp) and math.isnan(agg1.sr_raw)
    assert agg1.e_roe_pp == pytest.approx(FLAT_PATH_ROE * 100.0, abs=1e-8)

    rel_a2, rel_b2 = _flat_paths(baseline, n=2)
    batch2 = mc.simulate_batch(rel_a2, rel_b2, baseline.market, baseline.rates,
                               baseline.position, baseline.sim)
    agg2 = mc.aggregate(batch2, baseline.sim, 90.0)
    assert agg2.std_pp == 0.0 and math.isnan(agg2.sr_raw)


def test_run_scenario_accepts_prebuilt_paths(small_scn, small_paths):
    direct = mc.run_scenario(small_scn, paths=small_paths)
    regenerated = mc.run_scenario(small_scn)
    assert direct == regenerated


def test_write_path_dump_roundtrip(tmp_path, baseline):
    pos = dataclasses.replace(baseline.position, h=1.0)
    rel_a, rel_b = _flat_paths(baseline, n=2)
    rel_a[1, 1:] = 2.0
    rel_b[1, 1:] = 2.0
    batch = mc.simulate_batch(rel_a, rel_b, baseline.market, baseline.rates,
                              pos, baseline.sim)
    out = tmp_path / "paths.csv"
    mc.write_path_dump(batch, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "path_id,roe,liquidated,liq_day,max_ltv,n_rebalances"
    assert len(lines) == 3
    f0 = lines[1].split(",")
    f1 = lines[2].split(",")
    assert f0[0] == "0" and f1[0] == "1"
    assert f0[2] == "0" and f0[3] == ""  # survivor: no liquidation day
    assert f1[2] == "1" and float(f1[3]) == pytest.approx(1.0 / 3.0, abs=1e-6)
    assert float(f1[1]) == pytest.approx(batch.roe[1], rel=1e-9)

    # sequence input writes the identical table
    results = [mc.simulate_position(mc.PricePath(rel_a[i], rel_b[i]), baseline.market,
                                    baseline.rates, pos, baseline.sim)
               for i in range(2)]
    out2 = tmp_path / "paths2.csv"
    mc.write_path_dump(results, out2)
    assert out2.read_text() == out.read_text()
