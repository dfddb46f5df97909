"""
Signalling with the arrival time of one molecule
================================================

Split the session into about sqrt(t) intervals of sqrt(t) slots and release
in the first slot of the chosen interval. The receiver reports the interval
of the first arrival. The rate grows like half of log2 t.
"""

import math

import numpy as np

from molcomm import make_geometric
from molcomm.schemes import schemeA_bound, schemeA_error_probability, schemeA_exact_mi, schemeA_mc_error, \
    schemeA_params

dist = make_geometric(0.5, n_max=8)
rng = np.random.default_rng(3)

print(f"{'t':>6} {'ell':>4} {'lb':>7} {'exact MI':>9} {'formula Pe':>11} {'exact Pe':>9} {'simulated':>10}")
for t in (16, 64, 256, 1024, 4096):
    p = schemeA_params(t, 1)
    b = schemeA_bound(t, 1, dist)
    rate, _ = schemeA_mc_error(t, 1, dist, 20_000, rng)
    print(f"{t:6d} {p.ell:4d} {b.lb_paper:7.3f} {schemeA_exact_mi(t, 1, dist):9.3f} "
          f"{b.p_e:11.2e} {schemeA_error_probability(t, 1, dist):9.2e} {rate:10.2e}")

# A molecule released at the start of an interval stays inside it only if
# its delay is at most tau - 1 slots, so the true error uses the cdf one
# step earlier than the closed-form rate does.
tau = schemeA_params(16, 1).tau
print(f"\nt=16: 1 - F(tau) = {1 - dist.cdf(tau):.5f}, 1 - F(tau - 1) = {1 - dist.cdf(tau - 1):.5f}")
print(f"half of log2 t at t=4096: {0.5 * math.log2(4096):.2f} bits")
