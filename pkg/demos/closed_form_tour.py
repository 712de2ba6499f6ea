"""Walk through the closed-form layer: moments, optimal hedge, Sharpe curve.

Uses the quarter-year horizon so the printed constants match the worked
numbers in the docs.
"""

import numpy as np

from ammhedge import analytics, get_preset

scn = get_preset("sec46")
m, r, pos = scn.market, scn.rates, scn.position
t = pos.horizon_years

mom = analytics.variance_components(m, t)
dec = analytics.pnl_decomposition(m, r, pos)
print("horizon T = %.4f years" % t)
print("phi = %.6f   v_GG = %.6f   v_AA = %.6f   v_GA = %.6f"
      % (mom.phi, mom.v_gg, mom.v_aa, mom.v_ga))
print("mu0 = %.6f (expected P&L at h=0)   c = %.6f (hedge carry cost)" % (dec.mu0, dec.c))

h_mv = analytics.h_min_variance(m, pos)
h_opt = analytics.h_star(m, r, pos)
print("\nminimum-variance hedge h_mv = %.6f" % h_mv)
print("Sharpe-optimal hedge   h*   = %.6f" % h_opt)
print("SOC at h*: %s" % analytics.verify_soc(h_opt, m, r, pos))

print("\n   h      SR(h)")
for h in np.arange(0.0, 1.01, 0.1):
    print("%5.2f   %7.4f" % (h, analytics.sharpe(float(h), m, r, pos)))
print("%5.2f   %7.4f  <- h*" % (h_opt, analytics.sharpe(h_opt, m, r, pos)))

# as borrowing gets cheap the Sharpe optimum slides to the variance optimum
print("\ncost -> 0 limit:")
for scale in (1.0, 0.1, 0.01, 0.001):
    r_scaled = type(r)(r_a=r.r_a * scale, r_b=r.r_b * scale,
                       reward_rate=r.reward_rate, r_f=r.r_f)
    print("  rates x %-6g  h* = %.6f  (h_mv = %.6f)"
          % (scale, analytics.h_star(m, r_scaled, pos), h_mv))
