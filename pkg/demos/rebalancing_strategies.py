"""Compare static vs threshold vs periodic rebalancing on shared paths.

Smaller path count than the full experiment so it runs in a few seconds;
use `ammhedge rebalance` for the full table.
"""

import dataclasses

from ammhedge import get_preset, run_rebalancing_comparison
from ammhedge.experiments import render_table

scn = get_preset("baseline")
scn = dataclasses.replace(scn, sim=dataclasses.replace(scn.sim, n_paths=8000))

table = run_rebalancing_comparison(scn, h=0.60)
print(render_table(table))
print("Rebalancing converts hedge drift into realized P&L; the Sharpe ordering\n"
      "none < threshold(20) < threshold(15) < threshold(10) is the point.")
