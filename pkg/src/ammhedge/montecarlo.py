"""Path simulator: correlated GBM / jump-diffusion prices plus full
portfolio accounting (borrow interest, reward claims, LTV monitoring,
liquidation, rebalancing) and summary statistics.

Price generation is blocked for determinism: paths come in fixed blocks of
8192, block i drawing from SeedSequence(seed, spawn_key=(i,)) for the
diffusion and spawn_key=(i, 2) for the jump overlay. Full blocks are always
generated and then sliced, so any n_paths and any worker count yield
bit-identical paths for the same seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .config_domain import (DAYS_PER_YEAR, JumpParams, MarketParams, PositionParams,
                            RateParams, SimConfig, parse_rebalance)

BLOCK = 8192


class PricePath(NamedTuple):
    """One path of price relatives on the simulation grid, starting at 1.0."""

    rel_a: np.ndarray
    rel_b: np.ndarray


@dataclass
class PositionState:
    """Mutable accounting state of one hedged LP position.

    debt_a/debt_b are in token units; reserves hold claimed-but-unapplied
    reward dollars earmarked against each leg; accrued_borrow is unpaid
    borrow interest in numeraire.
    """

    lp_value: float
    debt_a: float
    debt_b: float
    collateral: float
    cash: float
    accrued_borrow: float
    pending_rewards: float = 0.0
    reserve_a: float = 0.0
    reserve_b: float = 0.0


class PathResult(NamedTuple):
    roe: float
    liquidated: bool
    liq_time_days: Optional[float]
    max_ltv: float
    n_rebalances: int
    tx_cost_paid: float


@dataclass
class BatchResult:
    """Vectorized twin of a sequence of PathResult, plus both ROE bases."""

    roe: np.ndarray
    roe_raw: np.ndarray
    roe_tx: np.ndarray
    liquidated: np.ndarray
    liq_time_days: np.ndarray  # nan where not liquidated
    max_ltv: np.ndarray
    n_rebalances: np.ndarray
    n_claims: np.ndarray
    tx_cost_paid: np.ndarray
    pi0: float


@dataclass(frozen=True)
class SummaryStats:
    e_roe_pp: float
    std_pp: float
    sr_raw: float
    sr_tx: float
    p_loss: float
    p_liq: float
    var5_pp: float
    mean_max_ltv: float
    p95_max_ltv: float
    p99_max_ltv: float
    avg_rebalances: float
    n_paths: int


# ---------------------------------------------------------------------------
# price paths

def _n_steps(horizon_days, dt_days):
    steps = int(round(horizon_days / dt_days))
    if steps < 1 or abs(steps * dt_days - horizon_days) > 1e-6 * max(1.0, horizon_days):
        raise ValueError("dt_days = %g does not divide horizon_days = %g" % (dt_days, horizon_days))
    return steps


def _generate_block(market, jump, steps, dt_days, seed, block_idx, n_rows):
    """One full block of price relatives, sliced to n_rows."""
    dt_y = dt_days / DAYS_PER_YEAR
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block_idx,)))
    za = rng.standard_normal((BLOCK, steps))
    zb = rng.standard_normal((BLOCK, steps))
    zb = market.rho * za + math.sqrt(1.0 - market.rho * market.rho) * zb

    sd_a, sd_b = market.sigma_a, market.sigma_b
    extra_a = extra_b = 0.0
    if jump is not None and jump.lam > 0:
        if jump.variance_matched:
            # shrink diffusion so total annualized variance matches plain GBM
            jump_var = jump.lam * (jump.mu_j ** 2 + jump.sigma_j ** 2)
            sd_a = math.sqrt(sd_a * sd_a - jump_var)
            sd_b = math.sqrt(sd_b * sd_b - jump_var)
        rng_j = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block_idx, 2)))
        # common stream first, then each leg's size noise and idiosyncratic counts
        kc = rng_j.poisson(jump.lam * jump.rho_j * dt_y, (BLOCK, steps))
        ea = rng_j.standard_normal((BLOCK, steps))
        ka = kc + rng_j.poisson(jump.lam * (1.0 - jump.rho_j) * dt_y, (BLOCK, steps))
        eb = rng_j.standard_normal((BLOCK, steps))
        kb = kc + rng_j.poisson(jump.lam * (1.0 - jump.rho_j) * dt_y, (BLOCK, steps))
        kappa = math.exp(jump.mu_j + 0.5 * jump.sigma_j ** 2) - 1.0
        # sum of k iid normal jump sizes = k mu_J + sigma_J sqrt(k) eps
        extra_a = jump.mu_j * ka + jump.sigma_j * np.sqrt(ka) * ea - jump.lam * kappa * dt_y
        extra_b = jump.mu_j * kb + jump.sigma_j * np.sqrt(kb) * eb - jump.lam * kappa * dt_y

    inc_a = (market.mu_a - 0.5 * sd_a * sd_a) * dt_y + sd_a * math.sqrt(dt_y) * za + extra_a
    inc_b = (market.mu_b - 0.5 * sd_b * sd_b) * dt_y + sd_b * math.sqrt(dt_y) * zb + extra_b
    rel_a = np.empty((BLOCK, steps + 1))
    rel_b = np.empty((BLOCK, steps + 1))
    rel_a[:, 0] = 1.0
    rel_b[:, 0] = 1.0
    np.exp(np.cumsum(inc_a, axis=1), out=rel_a[:, 1:])
    np.exp(np.cumsum(inc_b, axis=1), out=rel_b[:, 1:])
    return rel_a[:n_rows], rel_b[:n_rows]


def generate_path_matrix(market, jump, horizon_days, dt_days, n_paths, seed, n_workers=1):
    """All paths as two (n_paths, steps+1) arrays of price relatives."""
    steps = _n_steps(horizon_days, dt_days)
    n_blocks = -(-n_paths // BLOCK)
    rel_a = np.empty((n_paths, steps + 1))
    rel_b = np.empty((n_paths, steps + 1))

    def fill(bi):
        lo = bi * BLOCK
        hi = min(n_paths, lo + BLOCK)
        a, b = _generate_block(market, jump, steps, dt_days, seed, bi, hi - lo)
        rel_a[lo:hi] = a
        rel_b[lo:hi] = b

    if n_workers <= 1 or n_blocks == 1:
        for bi in range(n_blocks):
            fill(bi)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(fill, range(n_blocks)))
    return rel_a, rel_b


def generate_paths(market, jump, horizon_days, dt_days, n_paths, seed, n_workers=1):
    """Stream of PricePath records; same draws as generate_path_matrix."""
    steps = _n_steps(horizon_days, dt_days)
    n_blocks = -(-n_paths // BLOCK)
    for bi in range(n_blocks):
        lo = bi * BLOCK
        hi = min(n_paths, lo + BLOCK)
        a, b = _generate_block(market, jump, steps, dt_days, seed, bi, hi - lo)
        for i in range(hi - lo):
            yield PricePath(rel_a=a[i], rel_b=b[i])


# ---------------------------------------------------------------------------
# portfolio accounting

def _grid_strides(pos, sim, steps):
    dt_days = pos.horizon_days / steps
    if abs(dt_days - sim.dt_days) > 1e-9 * max(1.0, sim.dt_days):
        raise ValueError("path grid (%d steps over %g days) does not match sim.dt_days = %g"
                         % (steps, pos.horizon_days, sim.dt_days))
    day_stride = max(1, int(round(1.0 / dt_days)))
    claim_stride = 0
    if sim.claim_interval_days > 0:
        claim_stride = int(round(sim.claim_interval_days / dt_days))
        if claim_stride < 1:
            raise ValueError("claim_interval_days below the grid step")
    kind, par = parse_rebalance(sim.rebalance)
    reb_stride = int(round(par / dt_days)) if kind == "periodic" else 0
    return dt_days, day_stride, claim_stride, kind, par, reb_stride


def simulate_batch(rel_a, rel_b, market: MarketParams, rates: RateParams,
                   pos: PositionParams, sim: SimConfig) -> BatchResult:
    """Run the accounting loop over a matrix of paths.

    LTV is checked on every grid step; reward claims and rebalance triggers
    only on whole-day marks. A breached path keeps its price accounting
    running (so max-LTV diagnostics cover the full horizon) but can no longer
    rebalance, and its P&L is overridden with the flat penalty loss.
    """
    rel_a = np.atleast_2d(np.asarray(rel_a, dtype=float))
    rel_b = np.atleast_2d(np.asarray(rel_b, dtype=float))
    n, m = rel_a.shape
    steps = m - 1
    dt_days, day_stride, claim_stride, reb_kind, reb_par, reb_stride = _grid_strides(pos, sim, steps)
    dt_y = dt_days / DAYS_PER_YEAR

    v0, h = pos.v0, pos.h
    coll = pos.c_over_v0 * v0
    l_max = pos.l_max
    r_a, r_b, reward, r_f = rates.r_a, rates.r_b, rates.reward_rate, rates.r_f
    thr = reb_par / 100.0  # threshold parameter arrives in percentage points

    da = np.full(n, h * v0 / 2.0)
    db = np.full(n, h * v0 / 2.0)
    res_a = np.zeros(n)
    res_b = np.zeros(n)
    pending = np.zeros(n)
    cash = np.zeros(n)
    interest = np.zeros(n)
    liq = np.zeros(n, dtype=bool)
    liq_day = np.full(n, np.nan)
    max_ltv = np.full(n, h * v0 / coll)
    n_reb = np.zeros(n, dtype=np.int64)
    n_claims = np.zeros(n, dtype=np.int64)

    for t in range(1, steps + 1):
        a = rel_a[:, t]
        b = rel_b[:, t]
        interest = interest + (da * a * r_a + db * b * r_b) * dt_y
        pending = pending + reward * v0 * dt_y
        day_mark = (t % day_stride == 0)

        if claim_stride and day_mark and t % claim_stride == 0:
            # claimed rewards become per-leg repayment reserves, split
            # proportionally to current net debt value; excess goes to cash
            va = np.maximum(da * a - res_a, 0.0)
            vb = np.maximum(db * b - res_b, 0.0)
            tot = va + vb
            repay = np.minimum(pending, tot)
            w = np.divide(va, tot, out=np.full(n, 0.5), where=tot > 0)
            res_a = res_a + repay * w
            res_b = res_b + repay * (1.0 - w)
            cash = cash + pending - repay
            pending = np.zeros(n)
            n_claims = n_claims + (~liq)

        ltv = (np.maximum(da * a - res_a, 0.0) + np.maximum(db * b - res_b, 0.0) + interest) / coll
        np.maximum(max_ltv, ltv, out=max_ltv)
        breach = (~liq) & (ltv >= l_max)
        if breach.any():
            liq_day[breach] = t * dt_days
            liq = liq | breach

        if reb_kind != "none" and day_mark:
            if reb_kind == "periodic":
                trig = np.full(n, t % reb_stride == 0) & ~liq
            else:
                lp = v0 * np.sqrt(a * b)
                # trigger on gross per-leg hedge drift; reserves do not leak in
                ha = da * a / (lp / 2.0)
                hb = db * b / (lp / 2.0)
                trig = ((np.abs(ha - h) > thr) | (np.abs(hb - h) > thr)) & ~liq
            if trig.any():
                lp = v0 * np.sqrt(a * b)
                gross = da * a + db * b
                da = np.where(trig, h * lp / (2.0 * a), da)
                db = np.where(trig, h * lp / (2.0 * b), db)
                # resetting after a move realizes hedge pnl into cash
                cash = cash + np.where(trig, gross - h * lp, 0.0)
                n_reb = n_reb + trig

    a_t = rel_a[:, -1]
    b_t = rel_b[:, -1]
    lp_t = v0 * np.sqrt(a_t * b_t)
    debt_t = np.maximum(da * a_t - res_a, 0.0) + np.maximum(db * b_t - res_b, 0.0)
    pi_t = lp_t + pending + cash + coll * (1.0 + r_f * pos.horizon_days / DAYS_PER_YEAR) \
        - debt_t - interest
    pi0 = coll + (1.0 - h) * v0
    pnl_raw = np.where(liq, -sim.liq_penalty_frac * coll, pi_t - pi0)
    tx = sim.borrow_fee_frac * h * v0 + sim.gas_cost * (n_claims + n_reb)
    roe_raw = pnl_raw / pi0
    roe_tx = (pnl_raw - tx) / pi0
    return BatchResult(
        roe=roe_tx if sim.include_tx_costs else roe_raw,
        roe_raw=roe_raw, roe_tx=roe_tx, liquidated=liq, liq_time_days=liq_day,
        max_ltv=max_ltv, n_rebalances=n_reb, n_claims=n_claims,
        tx_cost_paid=tx if np.ndim(tx) else np.full(n, tx), pi0=pi0)


def initial_state(pos: PositionParams) -> PositionState:
    h, v0 = pos.h, pos.v0
    return PositionState(lp_value=v0, debt_a=h * v0 / 2.0, debt_b=h * v0 / 2.0,
                         collateral=pos.c_over_v0 * v0, cash=0.0, accrued_borrow=0.0)


def apply_rebalance_rule(state: PositionState, rel_a, rel_b, rule, h_target) -> int:
    """Apply one rebalance decision at current prices; returns tx count (0 or 1).

    threshold(pp) fires when either leg's gross effective hedge ratio drifts
    more than pp/100 from the target. periodic(days) always fires when
    invoked; the cadence is the caller's job. Resets both debts to
    h * lp / (2 price) and books the gross-vs-target difference to cash.
    """
    kind, par = parse_rebalance(rule)
    if kind == "none":
        return 0
    lp = state.lp_value
    if kind == "threshold":
        ha = state.debt_a * rel_a / (lp / 2.0)
        hb = state.debt_b * rel_b / (lp / 2.0)
        thr = par / 100.0
        if abs(ha - h_target) <= thr and abs(hb - h_target) <= thr:
            return 0
    gross = state.debt_a * rel_a + state.debt_b * rel_b
    state.debt_a = h_target * lp / (2.0 * rel_a)
    state.debt_b = h_target * lp / (2.0 * rel_b)
    state.cash += gross - h_target * lp
    return 1


def simulate_position(path: PricePath, market: MarketParams, rates: RateParams,
                      pos: PositionParams, sim: SimConfig) -> PathResult:
    """Scalar reference implementation of the accounting loop for one path.

    Mirrors simulate_batch step for step (the test suite holds the two to
    agreement); market enters only through the path itself.
    """
    rel_a = np.asarray(path.rel_a, dtype=float)
    rel_b = np.asarray(path.rel_b, dtype=float)
    steps = rel_a.shape[0] - 1
    dt_days, day_stride, claim_stride, reb_kind, reb_par, reb_stride = _grid_strides(pos, sim, steps)
    dt_y = dt_days / DAYS_PER_YEAR

    v0, h = pos.v0, pos.h
    coll0 = pos.c_over_v0 * v0
    st = initial_state(pos)
    liq = False
    liq_day = None
    max_ltv = h * v0 / coll0
    n_reb = 0
    n_claims = 0

    for t in range(1, steps + 1):
        a = float(rel_a[t])
        b = float(rel_b[t])
        st.lp_value = v0 * math.sqrt(a * b)
        st.accrued_borrow += (st.debt_a * a * rates.r_a + st.debt_b * b * rates.r_b) * dt_y
        st.collateral += coll0 * rates.r_f * dt_y
        st.pending_rewards += rates.reward_rate * v0 * dt_y
        day_mark = (t % day_stride == 0)

        if claim_stride and day_mark and t % claim_stride == 0:
            va = max(st.debt_a * a - st.reserve_a, 0.0)
            vb = max(st.debt_b * b - st.reserve_b, 0.0)
            tot = va + vb
            repay = min(st.pending_rewards, tot)
            w = va / tot if tot > 0 else 0.5
            st.reserve_a += repay * w
            st.reserve_b += repay * (1.0 - w)
            st.cash += st.pending_rewards - repay
            st.pending_rewards = 0.0
            if not liq:
                n_claims += 1

        ltv = (max(st.debt_a * a - st.reserve_a, 0.0)
               + max(st.debt_b * b - st.reserve_b, 0.0) + st.accrued_borrow) / coll0
        if ltv > max_ltv:
            max_ltv = ltv
        if not liq and ltv >= pos.l_max:
            liq = True
            liq_day = t * dt_days

        if reb_kind != "none" and day_mark and not liq:
            if reb_kind == "periodic":
                if t % reb_stride == 0:
                    n_reb += apply_rebalance_rule(st, a, b, ("periodic", reb_par), h)
            else:
                n_reb += apply_rebalance_rule(st, a, b, ("threshold", reb_par), h)

    a_t = float(rel_a[-1])
    b_t = float(rel_b[-1])
    debt_t = max(st.debt_a * a_t - st.reserve_a, 0.0) + max(st.debt_b * b_t - st.reserve_b, 0.0)
    pi_t = v0 * math.sqrt(a_t * b_t) + st.pending_rewards + st.cash + st.collateral \
        - debt_t - st.accrued_borrow
    pi0 = coll0 + (1.0 - h) * v0
    pnl = -sim.liq_penalty_frac * coll0 if liq else pi_t - pi0
    tx = sim.borrow_fee_frac * h * v0 + sim.gas_cost * (n_claims + n_reb)
    if sim.include_tx_costs:
        pnl -= tx
    return PathResult(roe=pnl / pi0, liquidated=liq, liq_time_days=liq_day,
                      max_ltv=max_ltv, n_rebalances=n_reb, tx_cost_paid=tx)


# ---------------------------------------------------------------------------
# aggregation

def _annualized_sharpe(roe, r_f, horizon_days):
    if roe.shape[0] < 2:
        return math.nan
    sd = float(np.std(roe, ddof=1))
    if sd == 0.0 or not math.isfinite(sd):
        return math.nan  # degenerate sample, reported distinctly
    mean = float(np.mean(roe))
    t_frac = horizon_days / DAYS_PER_YEAR
    return (mean - r_f * t_frac) / sd * math.sqrt(DAYS_PER_YEAR / horizon_days)


def aggregate(results, sim: SimConfig, horizon_days, r_f=0.0, pi0=None) -> SummaryStats:
    """Reduce path results to the summary row used by every table.

    Accepts a BatchResult or any sequence of PathResult (two or more). For a
    PathResult sequence, converting between raw and cost-adjusted Sharpe
    needs the equity base pi0; without it the other-basis Sharpe is NaN
    whenever costs are nonzero.
    """
    if isinstance(results, BatchResult):
        roe = results.roe
        roe_raw = results.roe_raw
        roe_tx = results.roe_tx
        liq = results.liquidated
        max_ltv = results.max_ltv
        n_reb = results.n_rebalances
    else:
        rs = list(results)
        if len(rs) < 2:
            raise ValueError("need at least 2 path results")
        roe = np.array([r.roe for r in rs], dtype=float)
        tx = np.array([r.tx_cost_paid for r in rs], dtype=float)
        liq = np.array([r.liquidated for r in rs], dtype=bool)
        max_ltv = np.array([r.max_ltv for r in rs], dtype=float)
        n_reb = np.array([r.n_rebalances for r in rs], dtype=float)
        shift = tx / pi0 if pi0 else np.where(tx == 0.0, 0.0, np.nan)
        if sim.include_tx_costs:
            roe_tx = roe
            roe_raw = roe + shift
        else:
            roe_raw = roe
            roe_tx = roe - shift

    not_liq = ~liq
    avg_reb = float(np.mean(n_reb[not_liq])) if not_liq.any() else math.nan
    std_pp = float(np.std(roe, ddof=1)) * 100.0 if roe.shape[0] > 1 else math.nan
    return SummaryStats(
        e_roe_pp=float(np.mean(roe)) * 100.0,
        std_pp=std_pp,
        sr_raw=_annualized_sharpe(roe_raw, r_f, horizon_days),
        sr_tx=_annualized_sharpe(roe_tx, r_f, horizon_days),
        p_loss=float(np.mean(roe < 0.0)),
        p_liq=float(np.mean(liq)),
        var5_pp=float(np.percentile(roe, 5.0)) * 100.0,
        mean_max_ltv=float(np.mean(max_ltv)),
        p95_max_ltv=float(np.percentile(max_ltv, 95.0)),
        p99_max_ltv=float(np.percentile(max_ltv, 99.0)),
        avg_rebalances=avg_reb,
        n_paths=int(roe.shape[0]))


def run_scenario(scn, n_workers=1, paths=None) -> SummaryStats:
    """Generate paths for a scenario and aggregate one full simulation."""
    pos, sim = scn.position, scn.sim
    if paths is None:
        paths = generate_path_matrix(scn.market, scn.jump, pos.horizon_days,
                                     sim.dt_days, sim.n_paths, sim.seed, n_workers)
    rel_a, rel_b = paths
    batch = simulate_batch(rel_a, rel_b, scn.market, scn.rates, pos, sim)
    return aggregate(batch, sim, pos.horizon_days, r_f=scn.rates.r_f)


def write_path_dump(results, path):
    """Per-path CSV dump: path_id,roe,liquidated,liq_day,max_ltv,n_rebalances."""
    if isinstance(results, BatchResult):
        rows = zip(results.roe, results.liquidated, results.liq_time_days,
                   results.max_ltv, results.n_rebalances)
    else:
        rows = ((r.roe, r.liquidated, r.liq_time_days, r.max_ltv, r.n_rebalances)
                for r in results)
    with open(path, "w") as fh:
        fh.write("path_id,roe,liquidated,liq_day,max_ltv,n_rebalances\n")
        for i, (roe, liq, day, ltv, reb) in enumerate(rows):
            day_s = "" if day is None or (isinstance(day, float) and math.isnan(day)) else "%g" % day
            fh.write("%d,%.10g,%d,%s,%.10g,%d\n" % (i, roe, bool(liq), day_s, ltv, reb))
