"""Liquidation risk vs hedge ratio: analytic first-passage probabilities,
the risk-budget cap h_bar, and the capped optimum h**."""

from ammhedge import get_preset, liquidation_fpt as fpt

scn = get_preset("baseline")
m, r, pos = scn.market, scn.rates, scn.position

print("sigma_tilde(%.0fd) = %.6f" % (pos.horizon_days, fpt.sigma_tilde(m, pos.horizon_years)))
print("\n   h    LTV_0     b      P(liq) over %d days" % round(pos.horizon_days))
for h in (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 1.0):
    inp = fpt.fpt_inputs(h, m, pos)
    p = fpt.liquidation_probability(h, m, pos)
    print("%5.2f  %5.2f  %6.3f   %7.3f%%" % (h, inp.ltv0, inp.barrier_log, p * 100.0))

print("\nrisk budget alpha -> max hedge h_bar -> capped optimum h**")
for alpha in (0.01, 0.02, 0.05, 0.10, 0.25):
    hb = fpt.h_bar(alpha, m, pos)
    hdd = fpt.h_double_star(alpha, m, r, pos)
    binding = "binding" if hdd < min(1.0, 0.999999) and abs(hdd - hb) < 1e-9 else "slack"
    print("  alpha = %4.2f   h_bar = %.4f   h** = %.4f  (%s)" % (alpha, hb, hdd, binding))
