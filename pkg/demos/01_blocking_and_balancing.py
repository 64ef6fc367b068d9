"""
Blocking and balancing a toy afternoon
======================================

Four trips, two buses. Stage 1 finds the fewest buses (and, among those,
the least empty driving). Stage 2 strips the last trip off every tour and
re-deals those trips so that less time is spent over the 75-minute goal.
"""

# %%
# Build the instance by hand. Times are in seconds internally; ``minutes``
# converts. Trips 0 and 2 leave at 0:00, trips 1 and 3 later on.
import numpy as np

from busbalance import Instance, Schedule, Trip, block, compare, kpi, minutes, rebalance, render_table

trips = [
    Trip(0, minutes(0), minutes(40)),
    Trip(1, minutes(50), minutes(45)),
    Trip(2, minutes(0), minutes(30)),
    Trip(3, minutes(45), minutes(20)),
]
deadhead = np.full((4, 4), minutes(100))
np.fill_diagonal(deadhead, 0)
deadhead[0, 1] = deadhead[2, 3] = deadhead[0, 3] = minutes(5)
deadhead[2, 1] = minutes(10)
inst = Instance(trips, deadhead, goal=minutes(75))

# %%
# Stage 1. Both 2-chains are feasible, so two buses suffice. The blocking
# step prefers the pairing with the least deadhead.
stage1 = block(inst)
print("stage 1 tours:", stage1.tours)

# %%
# Suppose the depot handed us tours A=[0,1] (90 min) and B=[2,3] (55 min).
# Re-dealing the last trips gives A'=[0,3] (65 min) and B'=[2,1] (85 min):
# 15 minutes over goal becomes 10.
given = Schedule([[0, 1], [2, 3]])
balanced = rebalance(given, inst)
print("balanced tours:", balanced.tours)
print(render_table(compare(kpi(given, inst), kpi(balanced, inst))))
