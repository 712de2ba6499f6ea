"""Parameter records, validation, scenario files and market calibration.

Everything downstream (analytics, first-passage bounds, the simulator) is a
pure function of these records, so they are all frozen dataclasses.
"""

from __future__ import annotations

import csv
import hashlib
import math
import re
from dataclasses import dataclass
from datetime import date

import numpy as np

DAYS_PER_YEAR = 365.0
DEFAULT_SEED = 42


class ScenarioError(ValueError):
    """Malformed scenario file, bad key, or unparseable override."""


@dataclass(frozen=True)
class MarketParams:
    """Annualized vols, instantaneous correlation, optional drifts."""

    sigma_a: float
    sigma_b: float
    rho: float
    mu_a: float = 0.0
    mu_b: float = 0.0


@dataclass(frozen=True)
class RateParams:
    """Annual borrow rates, LP reward-to-value ratio, stablecoin supply rate."""

    r_a: float
    r_b: float
    reward_rate: float
    r_f: float


@dataclass(frozen=True)
class PositionParams:
    v0: float
    c_over_v0: float
    h: float
    l_max: float
    horizon_years: float
    horizon_days: float


@dataclass(frozen=True)
class JumpParams:
    """Compound-Poisson overlay on the diffusion.

    lam is the total jump intensity per year per token; a fraction rho_j of
    events is common to both tokens, the rest idiosyncratic. Jump sizes are
    lognormal, drawn independently per token even for common events. With
    variance_matched the diffusion vol is reduced so total annualized variance
    equals the plain-GBM calibration.
    """

    lam: float
    mu_j: float
    sigma_j: float
    rho_j: float
    variance_matched: bool = True


@dataclass(frozen=True)
class SimConfig:
    n_paths: int
    dt_days: float = 1.0
    claim_interval_days: float = 14.0
    liq_penalty_frac: float = 0.20
    borrow_fee_frac: float = 0.003
    gas_cost: float = 0.0
    rebalance: str = "none"  # none | threshold(pp) | periodic(days)
    seed: int = DEFAULT_SEED
    include_tx_costs: bool = False


@dataclass(frozen=True)
class Scenario:
    """One fully-specified run: market + rates + position + sim (+ jumps)."""

    market: MarketParams
    rates: RateParams
    position: PositionParams
    sim: SimConfig
    jump: JumpParams | None = None
    name: str = "custom"


# ---------------------------------------------------------------------------
# validation

def validate(market: MarketParams, rates: RateParams, pos: PositionParams) -> list:
    """Collect every violated invariant; an empty list means usable.

    Never stops at the first failure so a bad config file reports everything
    wrong with it at once.
    """
    errs = []
    if not market.sigma_a > 0:
        errs.append("sigma_a must be positive")
    if not market.sigma_b > 0:
        errs.append("sigma_b must be positive")
    if not -1.0 < market.rho < 1.0:
        errs.append("rho must lie strictly inside (-1,1)")
    for name in ("r_a", "r_b", "reward_rate", "r_f"):
        if getattr(rates, name) < 0:
            errs.append("%s must be nonnegative" % name)
    if not pos.v0 > 0:
        errs.append("v0 must be positive")
    if not pos.c_over_v0 > 0:
        errs.append("c_over_v0 must be positive")
    if not 0.0 <= pos.h <= 1.0:
        errs.append("h must lie in [0,1]")
    if not 0.0 < pos.l_max < 1.0:
        errs.append("l_max must lie in (0,1)")
    if pos.c_over_v0 > 0 and 0.0 < pos.l_max < 1.0:
        ltv0 = pos.h / pos.c_over_v0
        # feasible start requires LTV_0 strictly below the liquidation line
        if ltv0 >= pos.l_max:
            errs.append("initial LTV %.2f ≥ l_max" % ltv0)
    if not pos.horizon_days > 0:
        errs.append("horizon_days must be positive")
    if not pos.horizon_years > 0:
        errs.append("horizon_years must be positive")
    elif pos.horizon_days > 0 and abs(pos.horizon_years * DAYS_PER_YEAR - pos.horizon_days) > 1.0:
        errs.append("horizon_years and horizon_days disagree by more than one day")
    return errs


def validate_jump(jump: JumpParams, market: MarketParams) -> list:
    errs = []
    if jump.lam < 0:
        errs.append("lambda must be nonnegative")
    if jump.sigma_j < 0:
        errs.append("sigma_j must be nonnegative")
    if not 0.0 <= jump.rho_j <= 1.0:
        errs.append("rho_j must lie in [0,1]")
    if jump.variance_matched and jump.lam > 0:
        jump_var = jump.lam * (jump.mu_j ** 2 + jump.sigma_j ** 2)
        for name, sig in (("sigma_a", market.sigma_a), ("sigma_b", market.sigma_b)):
            if sig ** 2 - jump_var <= 0:
                errs.append("variance matching infeasible: %s^2 <= lambda*(mu_j^2 + sigma_j^2)" % name)
    return errs


def validate_sim(sim: SimConfig) -> list:
    errs = []
    if sim.n_paths < 1:
        errs.append("n_paths must be at least 1")
    if not sim.dt_days > 0:
        errs.append("dt_days must be positive")
    if sim.claim_interval_days < 0:
        errs.append("claim_interval_days must be nonnegative")
    if not 0.0 <= sim.liq_penalty_frac <= 1.0:
        errs.append("liq_penalty_frac must lie in [0,1]")
    try:
        parse_rebalance(sim.rebalance)
    except ScenarioError as exc:
        errs.append(str(exc))
    return errs


def validate_scenario(scn: Scenario) -> list:
    errs = validate(scn.market, scn.rates, scn.position)
    errs += validate_sim(scn.sim)
    if scn.jump is not None:
        errs += validate_jump(scn.jump, scn.market)
    return errs


_REBALANCE_RE = re.compile(r"(threshold|periodic)\(([^)]+)\)")


def parse_rebalance(desc):
    """'none' -> ('none', 0.0); 'threshold(15)' -> ('threshold', 15.0) in pp;
    'periodic(30)' -> ('periodic', 30.0) in days."""
    if isinstance(desc, tuple):
        return desc
    s = str(desc).strip().lower()
    if s in ("none", ""):
        return ("none", 0.0)
    m = _REBALANCE_RE.fullmatch(s)
    if m is None:
        raise ScenarioError(
            "unknown rebalance descriptor %r; expected none, threshold(pp) or periodic(days)" % (desc,))
    value = _parse_number(m.group(2))
    if value <= 0:
        raise ScenarioError("rebalance parameter must be positive in %r" % (desc,))
    return (m.group(1), float(value))


# ---------------------------------------------------------------------------
# market calibration from price history

def estimate_market_params(prices_a, prices_b) -> MarketParams:
    """Annualized vols and log-return correlation from aligned daily closes.

    sigma_i = sample std (n-1) of daily log returns * sqrt(365); rho is the
    Pearson correlation of the two return series. Drifts are set to zero.
    """
    pa = np.asarray(prices_a, dtype=float)
    pb = np.asarray(prices_b, dtype=float)
    if pa.ndim != 1 or pb.ndim != 1 or pa.shape != pb.shape:
        raise ValueError("price series must be aligned: equal length, one observation per day")
    if pa.size < 30:
        raise ValueError("need at least 30 aligned daily observations, got %d" % pa.size)
    if np.any(pa <= 0) or np.any(pb <= 0):
        raise ValueError("prices must be strictly positive")
    ra = np.diff(np.log(pa))
    rb = np.diff(np.log(pb))
    sig_a = float(np.std(ra, ddof=1)) * math.sqrt(DAYS_PER_YEAR)
    sig_b = float(np.std(rb, ddof=1)) * math.sqrt(DAYS_PER_YEAR)
    if sig_a == 0.0 or sig_b == 0.0:
        rho = 0.0  # degenerate series; validate() rejects sigma = 0 downstream
    else:
        rho = float(np.corrcoef(ra, rb)[0, 1])
    return MarketParams(sigma_a=sig_a, sigma_b=sig_b, rho=rho)


def read_price_csv(path):
    """Read a `date,price` CSV (ISO-8601 dates, one row per day).

    Returns (dates, prices) as parallel lists.
    """
    dates, prices = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["date", "price"]:
            raise ValueError("%s: expected header 'date,price'" % path)
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                d = date.fromisoformat(row[0].strip())
                p = float(row[1])
            except (ValueError, IndexError):
                raise ValueError("%s:%d: cannot parse row %r" % (path, lineno, row)) from None
            dates.append(d)
            prices.append(p)
    return dates, prices


# ---------------------------------------------------------------------------
# scenario files
#
# Flat `key = value` text with dotted section prefixes and # comments.
# Omitted keys fall back to the SUI/NS baseline calibration below, so preset
# files and --override strings only carry deltas. Unknown keys are hard
# errors (typo protection); every bad key in a file is reported at once.

BASELINE_VALUES = {
    "market.sigma_a": 0.922,
    "market.sigma_b": 1.084,
    "market.rho": 0.72,
    "market.mu_a": 0.0,
    "market.mu_b": 0.0,
    "rates.r_a": 0.03,
    "rates.r_b": 0.15,
    "rates.reward_rate": 0.54,
    "rates.r_f": 0.04,
    "position.v0": 1.0,
    "position.c_over_v0": 2.0,
    "position.h": 0.60,
    "position.l_max": 0.80,
    "position.horizon_years": 90.0 / 365.0,
    "position.horizon_days": 90.0,
    "sim.n_paths": 30000,
    "sim.dt_days": 1.0 / 3.0,
    "sim.claim_interval_days": 14.0,
    "sim.liq_penalty_frac": 0.20,
    "sim.borrow_fee_frac": 0.003,
    "sim.gas_cost": 0.0,
    "sim.rebalance": "none",
    "sim.seed": DEFAULT_SEED,
    "sim.include_tx_costs": False,
}

JUMP_DEFAULTS = {
    "jump.lambda": 4.0,
    "jump.mu_j": -0.05,
    "jump.sigma_j": 0.15,
    "jump.rho_j": 0.80,
    "jump.variance_matched": True,
}


def _parse_number(s):
    s = str(s).strip()
    if "/" in s:  # allow fractions like 1/3 for dt_days
        num, den = s.split("/", 1)
        return float(num) / float(den)
    return float(s)


def _parse_int(s):
    return int(str(s).strip())


def _parse_bool(s):
    t = str(s).strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ScenarioError("expected a boolean, got %r" % (s,))


def _parse_str(s):
    return str(s).strip()


_KEY_PARSERS = {}
for _k in BASELINE_VALUES:
    _KEY_PARSERS[_k] = _parse_number
for _k in JUMP_DEFAULTS:
    _KEY_PARSERS[_k] = _parse_number
_KEY_PARSERS["sim.n_paths"] = _parse_int
_KEY_PARSERS["sim.seed"] = _parse_int
_KEY_PARSERS["sim.rebalance"] = _parse_str
_KEY_PARSERS["sim.include_tx_costs"] = _parse_bool
_KEY_PARSERS["jump.variance_matched"] = _parse_bool

SCENARIO_KEYS = tuple(sorted(_KEY_PARSERS))


def _build_scenario(values, name):
    v = values
    market = MarketParams(
        sigma_a=v["market.sigma_a"], sigma_b=v["market.sigma_b"], rho=v["market.rho"],
        mu_a=v["market.mu_a"], mu_b=v["market.mu_b"])
    rates = RateParams(
        r_a=v["rates.r_a"], r_b=v["rates.r_b"],
        reward_rate=v["rates.reward_rate"], r_f=v["rates.r_f"])
    pos = PositionParams(
        v0=v["position.v0"], c_over_v0=v["position.c_over_v0"], h=v["position.h"],
        l_max=v["position.l_max"], horizon_years=v["position.horizon_years"],
        horizon_days=v["position.horizon_days"])
    sim = SimConfig(
        n_paths=v["sim.n_paths"], dt_days=v["sim.dt_days"],
        claim_interval_days=v["sim.claim_interval_days"],
        liq_penalty_frac=v["sim.liq_penalty_frac"], borrow_fee_frac=v["sim.borrow_fee_frac"],
        gas_cost=v["sim.gas_cost"], rebalance=v["sim.rebalance"], seed=v["sim.seed"],
        include_tx_costs=v["sim.include_tx_costs"])
    jump = None
    if any(k.startswith("jump.") for k in v):
        jv = dict(JUMP_DEFAULTS)
        jv.update({k: v[k] for k in v if k.startswith("jump.")})
        jump = JumpParams(lam=jv["jump.lambda"], mu_j=jv["jump.mu_j"],
                          sigma_j=jv["jump.sigma_j"], rho_j=jv["jump.rho_j"],
                          variance_matched=jv["jump.variance_matched"])
    return Scenario(market=market, rates=rates, position=pos, sim=sim, jump=jump, name=name)


def scenario_values(scn: Scenario) -> dict:
    """Flatten a Scenario back into its key->value form (inverse of _build_scenario)."""
    v = {
        "market.sigma_a": scn.market.sigma_a, "market.sigma_b": scn.market.sigma_b,
        "market.rho": scn.market.rho, "market.mu_a": scn.market.mu_a, "market.mu_b": scn.market.mu_b,
        "rates.r_a": scn.rates.r_a, "rates.r_b": scn.rates.r_b,
        "rates.reward_rate": scn.rates.reward_rate, "rates.r_f": scn.rates.r_f,
        "position.v0": scn.position.v0, "position.c_over_v0": scn.position.c_over_v0,
        "position.h": scn.position.h, "position.l_max": scn.position.l_max,
        "position.horizon_years": scn.position.horizon_years,
        "position.horizon_days": scn.position.horizon_days,
        "sim.n_paths": scn.sim.n_paths, "sim.dt_days": scn.sim.dt_days,
        "sim.claim_interval_days": scn.sim.claim_interval_days,
        "sim.liq_penalty_frac": scn.sim.liq_penalty_frac,
        "sim.borrow_fee_frac": scn.sim.borrow_fee_frac, "sim.gas_cost": scn.sim.gas_cost,
        "sim.rebalance": scn.sim.rebalance, "sim.seed": scn.sim.seed,
        "sim.include_tx_costs": scn.sim.include_tx_costs,
    }
    if scn.jump is not None:
        v["jump.lambda"] = scn.jump.lam
        v["jump.mu_j"] = scn.jump.mu_j
        v["jump.sigma_j"] = scn.jump.sigma_j
        v["jump.rho_j"] = scn.jump.rho_j
        v["jump.variance_matched"] = scn.jump.variance_matched
    return v


def parse_scenario(text, name="custom", base=None):
    """Parse flat `key = value` scenario text on top of the baseline (or `base`)."""
    values = dict(BASELINE_VALUES) if base is None else dict(base)
    unknown, bad = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            bad.append("line %d: expected key = value, got %r" % (lineno, raw.strip()))
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        parser = _KEY_PARSERS.get(key)
        if parser is None:
            unknown.append(key)
            continue
        try:
            values[key] = parser(val)
        except (ValueError, ScenarioError) as exc:
            bad.append("line %d: key %s: %s" % (lineno, key, exc))
    if unknown:
        bad.append("unknown keys: " + ", ".join(sorted(unknown)))
    if bad:
        raise ScenarioError("; ".join(bad))
    return _build_scenario(values, name)


def load_scenario(path, base=None):
    with open(path) as fh:
        text = fh.read()
    stem = str(path).rsplit("/", 1)[-1]
    stem = stem.rsplit(".", 1)[0]
    return parse_scenario(text, name=stem, base=base)


def apply_overrides(scn: Scenario, pairs) -> Scenario:
    """Apply `key=value` override strings; equivalent to editing the file."""
    values = scenario_values(scn)
    unknown, bad = [], []
    for pair in pairs:
        if "=" not in pair:
            bad.append("override %r is not key=value" % (pair,))
            continue
        key, _, val = pair.partition("=")
        key = key.strip()
        parser = _KEY_PARSERS.get(key)
        if parser is None:
            unknown.append(key)
            continue
        try:
            values[key] = parser(val)
        except (ValueError, ScenarioError) as exc:
            bad.append("override %s: %s" % (key, exc))
    if unknown:
        bad.append("unknown keys: " + ", ".join(sorted(unknown)))
    if bad:
        raise ScenarioError("; ".join(bad))
    return _build_scenario(values, scn.name)


def scenario_hash(scn: Scenario) -> str:
    """Short stable digest of every parameter, for output provenance headers."""
    items = sorted(scenario_values(scn).items())
    blob = ";".join("%s=%r" % kv for kv in items).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def baseline_scenario(name="baseline") -> Scenario:
    return _build_scenario(dict(BASELINE_VALUES), name)
