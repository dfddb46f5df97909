"""
The timing channel, one molecule at a time
==========================================

A transmitter drops molecules into a fluid in discrete slots. Each one
wanders until it first touches an absorbing receiver, which counts it and
removes it. We only ever see per-slot counts, never which molecule is which.
"""

import numpy as np

from molcomm import make_brownian1d, make_geometric
from molcomm.channel import (
    InputEnsemble,
    ReleasePattern,
    all_patterns,
    capacity_small,
    conditional_law,
    exact_mi,
    transmit_many,
)

# Two delay models: a geometric toy and a discretized 1-D diffusion.
geom = make_geometric(0.5, n_max=8)
brown = make_brownian1d(distance=1.0, diffusion=1.0, dt=0.5, n_max=12)
print("geometric pmf :", np.round(geom.pmf[:5], 4), "tail", geom.tail_mass)
print("diffusion pmf :", np.round(brown.pmf[:5], 4), "tail", round(brown.tail_mass, 4))

# Release two molecules in slot 1 and one in slot 2 of a three-slot session.
pattern = ReleasePattern.of([2, 1, 0])
law = conditional_law(pattern, geom)
print("\nexact law of (y, lost) given x = (2, 1, 0):")
for rec, p in sorted(law.items(), key=lambda kv: -kv[1])[:6]:
    print(f"  y={rec.y} lost={rec.lost}  p={p:.4f}")

# Simulation agrees with the enumeration.
rng = np.random.default_rng(1)
Y, lost = transmit_many(pattern, geom, 50_000, rng)
hit = np.mean((Y == (2, 1, 0)).all(axis=1) & (lost == 0))
print(f"\nsimulated P(y=(2,1,0), lost=0) = {hit:.4f}")

# Mutual information of a uniform input, and the best input law on a tiny alphabet.
patterns = all_patterns(3, 2)
print(f"\nuniform input over {len(patterns)} patterns: I = {exact_mi(InputEnsemble.uniform(patterns), geom):.4f} bits")
cap, probs = capacity_small(patterns, geom)
print(f"capacity over the same patterns: {cap:.4f} bits")
best = sorted(zip(probs, patterns), key=lambda pair: -pair[0])[:4]
print("heaviest inputs:", [(p.x, round(float(w), 3)) for w, p in best])
