"""Counts of a Poisson field run on a fractional clock, closed form against simulation.

The first axis runs on H(t) = S_a(L_b(t)); the pmf comes from its
alternating series and is compared with 200k simulated counts.
"""

import math

import numpy as np

from fracfields import fields as F
from fracfields import samplers as S

lam, alpha1, beta1 = 1.0, 0.5, 0.8
n_sim = 200_000

model = F.FieldModel(lam, S.TimeChangeSpec.composition(alpha1, beta1))
x = F.sample_field(model, 1.0, 1.0, S.make_rng(2024), n_sim)

print(f"{'n':>3} {'series':>10} {'simulated':>10} {'z':>6}")
for n in range(11):
    p = F.tc_prf_pmf(lam, alpha1, beta1, n, 1.0, 1.0)
    q = float(np.mean(x == n))
    z = (q - p) / math.sqrt(p * (1 - p) / n_sim)
    print(f"{n:3d} {p:10.6f} {q:10.6f} {z:6.2f}")

# the law has a power tail, so the first 200 terms still leave a few percent
tail = F.tc_prf_tail(lam, alpha1, beta1, 200, 1.0, 1.0)
print(f"\nP(N > 200) = {tail:.4f}   simulated {np.mean(x > 200):.4f}")
