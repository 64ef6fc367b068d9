"""
MIP export and the exhaustive oracle
====================================

For a handful of trips the joint problem (fewest buses and least time over
goal, traded off by two penalties) can be solved exactly by enumerating
every way to chain the trips. The same problem is exported as an LP-format
MIP for any external solver.
"""

# %%
from pathlib import Path

from busbalance import GeneratorParams, block, build_mip, exact_solve_small, export_lp, generate, rebalance
from busbalance.mip import objective_of
from busbalance.model import total_excess

# Eight trips spread over a few schools so that chaining is possible.
inst = generate(GeneratorParams(n_trips=8, n_schools=4, seed=3, goal=45))

# %%
# Exact optimum by depth-first enumeration.
res = exact_solve_small(inst)
print(f"oracle: {res.buses} buses, {res.excess_total:.2f} min over goal, "
      f"objective {res.objective:,.0f} ({'proven' if res.proven_optimal else 'not proven'})")

# %%
# The two-stage heuristic always matches the bus count; the excess may be
# a little worse because the stages are solved one after the other.
heur = rebalance(block(inst), inst)
obj = float(objective_of(len(heur), total_excess(heur, inst), inst))
print(f"heuristic: {len(heur)} buses, objective {obj:,.0f}, gap {obj - res.objective:,.0f}")

# %%
# Export the MIP. Bus and excess penalties come from the instance
# (defaults 60,000 per bus and 150 per excess minute).
model = build_mip(inst)
Path("demo_model.lp").write_text(export_lp(model))
print(f"wrote demo_model.lp: {model.n_vars} variables, {len(model.rows)} constraints")
print(model.counts())
