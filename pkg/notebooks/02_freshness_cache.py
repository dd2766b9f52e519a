"""
A freshness cache step by step
==============================

Feed a handful of observations and lookups through the cache and watch the
sliding window expire entries that stop receiving readings.
"""

# %%
from cclab import FreshnessCache, FreshnessConfig, Observation, rank_file
from cclab.workload import roadwork_judgments_path

ranking = rank_file(roadwork_judgments_path())
cache = FreshnessCache(FreshnessConfig(threshold_t=20, window_size=64, top_k=4), ranking)
print("admission set:", sorted(cache.admission))

# %%
# speed arrives every few minutes; roadblock_presence goes quiet after t=2.
stream = [
    ("roadblock_presence", True, 2.0),
    ("speed", 41.0, 3.0),
    ("speed", 38.5, 12.0),
    ("speed", 30.0, 21.0),
    ("speed", 33.0, 23.0),
]
for attribute, value, t in stream:
    for ev in cache.ingest(Observation(attribute, value, t), t):
        print(f"t={ev.t:5.1f}  {ev.op:6s} {ev.attribute:20s} {ev.outcome}")

# %%
# roadblock_presence was dropped as soon as its only reading aged past T, so
# the next lookup is a miss that fetches a fresh value.
print(cache.lookup("roadblock_presence", 24.0, value=False))
print(cache.lookup("speed", 25.0))
print("context fresh:", cache.context_is_fresh(25.0))
