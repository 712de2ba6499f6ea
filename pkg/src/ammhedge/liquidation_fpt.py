"""Liquidation risk bounds via a moment-matched first-passage approximation.

The LTV numerator is h V0 (pA + pB)/2, a sum of two correlated lognormals.
We match its first two moments with a single lognormal, which turns the
barrier-crossing question into a textbook GBM first-passage problem with
drift nu = -sigma_tilde^2 / 2 and a reflection-style closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytics import h_star
from .config_domain import MarketParams, PositionParams, RateParams

_SQRT2 = math.sqrt(2.0)


def _norm_cdf(x):
    # erfc keeps absolute error ~1e-16 in the tails, well under the 1e-9 we need
    return 0.5 * math.erfc(-x / _SQRT2)


@dataclass(frozen=True)
class FptInputs:
    ltv0: float
    barrier_log: float
    sigma_tilde: float
    nu: float
    t_years: float


def sigma_tilde(market: MarketParams, t_years) -> float:
    """Annualized vol of the single GBM matched to the debt factor (pA + pB)/2.

    sigma_tilde^2 = (1/t) ln[(e^{sa^2 t} + e^{sb^2 t} + 2 e^{rho sa sb t}) / 4].
    As t -> 0 this approaches the instantaneous portfolio variance
    (sa^2 + sb^2 + 2 rho sa sb)/4.
    """
    sa2 = market.sigma_a * market.sigma_a
    sb2 = market.sigma_b * market.sigma_b
    cross = market.rho * market.sigma_a * market.sigma_b
    t = t_years
    num = math.exp(sa2 * t) + math.exp(sb2 * t) + 2.0 * math.exp(cross * t)
    return math.sqrt(math.log(num / 4.0) / t)


def fpt_inputs(h, market: MarketParams, pos: PositionParams) -> FptInputs:
    ltv0 = h / pos.c_over_v0
    st = sigma_tilde(market, pos.horizon_years)
    barrier = math.log(pos.l_max / ltv0) if ltv0 > 0 else math.inf
    return FptInputs(ltv0=ltv0, barrier_log=barrier, sigma_tilde=st,
                     nu=-0.5 * st * st, t_years=pos.horizon_years)


def liquidation_probability(h, market: MarketParams, pos: PositionParams) -> float:
    """P(max LTV over [0,T] reaches l_max) under the matched-GBM approximation.

    Monotone increasing in h. h = 0 carries no debt, so 0; an infeasible
    start (LTV0 >= l_max) is trivially 1.
    """
    if h == 0:
        return 0.0
    if h < 0:
        raise ValueError("h must be nonnegative")
    fi = fpt_inputs(h, market, pos)
    if fi.ltv0 >= pos.l_max:
        return 1.0
    s2t = fi.sigma_tilde * fi.sigma_tilde * fi.t_years
    sd = math.sqrt(s2t)
    b = fi.barrier_log
    return (_norm_cdf((-b - 0.5 * s2t) / sd)
            + (fi.ltv0 / pos.l_max) * _norm_cdf((-b + 0.5 * s2t) / sd))


def h_bar(alpha, market: MarketParams, pos: PositionParams, tol=1e-6) -> float:
    """Largest h in (0, min(1, l_max * C/V0)] with liquidation probability <= alpha.

    Bisection on the monotone probability; returns the upper bracket when the
    constraint does not bind there.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    # keep LTV0 strictly below l_max at the bracket end
    hi = min(1.0, pos.l_max * pos.c_over_v0 * (1.0 - 1e-9))
    if liquidation_probability(hi, market, pos) <= alpha:
        return hi
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if liquidation_probability(mid, market, pos) <= alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def h_double_star(alpha, market: MarketParams, rates: RateParams, pos: PositionParams) -> float:
    """Constrained optimum: min of the clamped Sharpe maximizer and h_bar(alpha)."""
    hs = min(max(h_star(market, rates, pos), 0.0), 1.0)
    return min(hs, h_bar(alpha, market, pos))
