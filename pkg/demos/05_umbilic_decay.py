"""How fast the surface becomes umbilic.

Fits ``log max|kappa_i - 1|`` against time over a late window.  The graph
gradient settles to a fixed profile while ``lambda`` grows like
``exp(t/(n-1))``, so the measured exponent is close to ``-2/(n-1)``.
"""

from hypflow.flow import FlowConfig, run, umbilic_decay_fit

for n in (4, 5):
    series = run(FlowConfig(n=n, N=120, t_max=10.0 * (n - 1), sample_interval=0.25))
    fit = umbilic_decay_fit(series, 3.0 * (n - 1), 10.0 * (n - 1))
    print(f"n = {n}: fitted exponent {fit.slope:+.5f}, -2/(n-1) = {-2 / (n - 1):+.5f}, "
          f"-1/(n-1) = {-1 / (n - 1):+.5f}  ({fit.samples} samples)")
