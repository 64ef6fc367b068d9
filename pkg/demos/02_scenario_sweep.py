"""
Scenario sweep on synthetic HCPSS-like data
===========================================

Generates instances of 10 to 994 trips from the HCPSS-calibrated preset
(durations mean 25, SD 10, within [7, 84] minutes; 75-minute goal) plus the
54-trip California profile, runs both stages and prints old/new tour
statistics side by side. The data are synthetic, so read the trend rather
than the individual values.
"""

# %%
import time

from busbalance import block, generate, kpi, preset, rebalance

header = (
    f"{'scenario':>9} {'tours':>5} {'min old':>8} {'min new':>8} {'max old':>8} {'max new':>8} "
    f"{'SD old':>7} {'SD new':>7} {'exc old':>9} {'exc new':>9} {'bal s':>6}"
)
print(header)

# %%
scenarios = [("hcpss", n) for n in (10, 20, 30, 40, 50, 100, 200, 250, 300, 500, 994)]
scenarios.append(("california", 54))
for name, n in scenarios:
    inst = generate(preset(name, n_trips=n, seed=n))
    s1 = block(inst)
    t = time.perf_counter()
    s2 = rebalance(s1, inst)
    elapsed = time.perf_counter() - t
    a, b = kpi(s1, inst), kpi(s2, inst)
    label = f"{'C' if name == 'california' else 'N'}{n}"
    print(
        f"{label:>9} {a.n_tours:>5} {a.duration_min:>8.2f} {b.duration_min:>8.2f} "
        f"{a.duration_max:>8.2f} {b.duration_max:>8.2f} {a.duration_sd:>7.2f} {b.duration_sd:>7.2f} "
        f"{a.exceed_minutes:>9.2f} {b.exceed_minutes:>9.2f} {elapsed:>6.2f}"
    )

# %%
# Balancing never adds buses and never adds over-goal minutes; the minimum
# tour duration tends to rise and the SD to fall, while total deadhead can
# grow a little because re-dealt trips are not chosen for short deadheads.
