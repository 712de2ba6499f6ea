"""One Monte Carlo run at the baseline calibration, with the analytic
liquidation probability printed alongside the simulated frequency."""

import dataclasses

from ammhedge import get_preset, liquidation_probability, run_scenario

scn = get_preset("baseline")
scn = dataclasses.replace(scn, sim=dataclasses.replace(scn.sim, n_paths=10000))

stats = run_scenario(scn)
print("scenario %s  (h = %.2f, %d paths, seed %d)"
      % (scn.name, scn.position.h, scn.sim.n_paths, scn.sim.seed))
print("E[ROE] = %+.2f pp over the horizon" % stats.e_roe_pp)
print("Std    = %.2f pp" % stats.std_pp)
print("SR     = %.3f raw, %.3f with costs (annualized)" % (stats.sr_raw, stats.sr_tx))
print("P(loss) = %.1f%%   P(liq) = %.2f%%   5%% VaR = %+.2f pp"
      % (stats.p_loss * 100, stats.p_liq * 100, stats.var5_pp))
print("max LTV: mean %.1f%%, p95 %.1f%%, p99 %.1f%%"
      % (stats.mean_max_ltv * 100, stats.p95_max_ltv * 100, stats.p99_max_ltv * 100))

p_ana = liquidation_probability(scn.position.h, scn.market, scn.position)
print("\nanalytic first-passage P(liq) = %.2f%% (no claims);"
      " simulated %.2f%% includes 14d claims" % (p_ana * 100, stats.p_liq * 100))
