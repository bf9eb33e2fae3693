"""The sharp Sobolev inequality on the sphere near its extremals.

Constants are extremal.  Along ``f = 1 + eps cos(k rho)`` the margin vanishes
to second order for ``k >= 2`` and to fourth order for ``k = 1``, since
``cos(rho)`` generates conformal motions that preserve equality.
"""

import numpy as np

from hypflow.sobolev import SphereFunction, beckner_margin, random_positive_function
from hypflow.shapes import make_rng

n, N = 5, 400
for k in (1, 2, 3):
    print(f"k = {k}")
    prev = None
    for eps in (1e-1, 3e-2, 1e-2):
        sf = SphereFunction.from_function(n, N, lambda rho: 1.0 + eps * np.cos(k * rho))
        m = beckner_margin(sf).margin
        rate = "" if prev is None else f"  local order {np.log(m / prev[1]) / np.log(eps / prev[0]):.2f}"
        print(f"  eps = {eps:7.0e}  margin = {m:.4e}{rate}")
        prev = (eps, m)

rng = make_rng(3)
margins = [beckner_margin(random_positive_function(rng, n, N)).margin for _ in range(50)]
print(f"50 random positive functions: smallest margin {min(margins):.4e}")
