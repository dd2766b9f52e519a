"""
Threshold and volume studies
============================

Sweep the freshness threshold at a fixed query volume, then the volume at
each threshold, averaging ten seeded repetitions per cell.
"""

# %%
import numpy as np

from cclab.harness import load_spec, run_experiment

table1 = run_experiment(load_spec("table1.json"))
for row in table1.rows:
    r = row.report
    print(f"T={r.threshold_t:4.0f}  hits={r.hits:6.1f}  misses={r.misses:5.1f}  ratio={r.hit_miss_ratio_display}")

# %%
# Longer thresholds keep more entries usable, with shrinking returns.
ratios = np.array([row.report.hit_miss_ratio for row in table1.rows])
print("gains per +5 min:", np.round(np.diff(ratios), 2))

# %%
table2 = run_experiment(load_spec("table2.json"))
grid = {(r.report.threshold_t, r.report.num_queries): r.report.hit_rate for r in table2.rows}
volumes = sorted({q for _, q in grid})
print("T    " + "".join(f"{q:>8d}" for q in volumes))
for t in sorted({t for t, _ in grid}):
    print(f"{t:<5.0f}" + "".join(f"{grid[t, q]:8.3f}" for q in volumes))
