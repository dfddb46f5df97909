"""
How much can a session carry at most?
=====================================

Three counting arguments cap the information per session: where each
molecule goes in time, how many molecules land per slot, and how many
release vectors exist at all. The exact capacity of small instances sits
underneath every one of them.
"""

import math

from molcomm import make_geometric
from molcomm.bounds import arrangements, upper_bound_reports
from molcomm.channel import all_patterns, capacity_small

dist = make_geometric(0.5, n_max=8)

print(f"{'t':>2} {'m':>2} {'capacity':>9}  safe upper bounds")
for t in (2, 3, 4):
    for m in (1, 2, 3):
        cap, _ = capacity_small(all_patterns(t, m), dist)
        safe = {r.name.value: r.value for r in upper_bound_reports(t, m) if r.name.value.endswith(("safe", "entropy"))}
        line = "  ".join(f"{k}={v:.3f}" for k, v in safe.items())
        print(f"{t:>2} {m:>2} {cap:9.4f}  {line}")

# The joint bound grows only linearly even though the pattern count explodes.
for t in (10, 100, 1000):
    n = arrangements(t, t)
    print(f"t=m={t}: {len(str(n))}-digit pattern count, log2 = {math.log2(n):.1f} <= 2t = {2 * t}")
