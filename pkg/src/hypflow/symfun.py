"""Elementary symmetric functions of principal curvatures.

A curvature tuple holds the ``n - 1`` principal curvatures of a hypersurface
in ``H^n``; ``n >= 3`` so tuples have at least two entries.  Besides the
scalar API used by the property suites, :func:`sigma_all` evaluates every
``sigma_m`` at once over arrays of tuples (last axis = curvatures), which is
what the geometry and flow modules call on whole grids.
"""

from typing import NamedTuple

import numpy as np

from .errors import DomainError


def as_curvatures(kappa):
    """Validate a curvature tuple and return it as a float array."""
    k = np.asarray(kappa, dtype=float)
    if k.ndim != 1 or k.size < 2:
        raise DomainError(f"curvature tuple must be 1-D with n - 1 >= 2 entries, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise DomainError("curvature tuple has non-finite entries")
    return k


def sigma_all(kappa):
    """All elementary symmetric functions ``sigma_0 .. sigma_d`` of the last axis.

    Built as the coefficients of ``prod_i (1 + kappa_i x)``, one factor at a
    time, so the cost is ``O(d^2)`` per tuple and no subsets are enumerated.

    Parameters
    ----------
    kappa : array_like, shape (..., d)

    Returns
    -------
    ndarray, shape (..., d + 1)
        ``out[..., m]`` is ``sigma_m``; ``out[..., 0] == 1``.
    """
    k = np.asarray(kappa, dtype=float)
    d = k.shape[-1]
    out = np.zeros(k.shape[:-1] + (d + 1,))
    out[..., 0] = 1.0
    for i in range(d):
        ki = k[..., i]
        # descending j so each factor is used once
        for j in range(i + 1, 0, -1):
            out[..., j] += ki * out[..., j - 1]
    return out


def elementary_symmetric(kappa, m):
    """``sigma_m`` of a curvature tuple (``sigma_0 = 1``).

    >>> elementary_symmetric([1.0, 2.0, 3.0], 2)
    11.0
    """
    k = as_curvatures(kappa)
    m = int(m)
    if not 0 <= m <= k.size:
        raise DomainError(f"m must lie in [0, {k.size}], got {m}")
    return float(sigma_all(k)[m])


def newton_tensor_diag(kappa, m):
    """Diagonal of the Newton tensor ``T_{m-1}`` in the principal frame.

    Entry ``i`` is ``sigma_{m-1}`` of the tuple with ``kappa_i`` removed,
    i.e. the partial derivative of ``sigma_m`` with respect to ``kappa_i``.
    """
    k = as_curvatures(kappa)
    m = int(m)
    if not 1 <= m <= k.size:
        raise DomainError(f"m must lie in [1, {k.size}], got {m}")
    return np.array([sigma_all(np.delete(k, i))[m - 1] for i in range(k.size)])


class TraceCheck(NamedTuple):
    passed: bool
    residuals: tuple


def _sigma_seq(values):
    # same recurrence as sigma_all on a plain list; exact for int input
    out = [1] + [0] * len(values)
    for i, x in enumerate(values):
        for j in range(i + 1, 0, -1):
            out[j] += x * out[j - 1]
    return out


def verify_trace_identities(kappa, m, tol=1e-10, exact=False):
    """Check the three Newton-tensor trace identities at a curvature tuple.

    With ``T`` the diagonal from :func:`newton_tensor_diag` and ``n`` the
    ambient dimension (tuple length plus one)::

        sum T_i k_i   = m sigma_m
        sum T_i       = (n - m) sigma_{m-1}
        sum T_i k_i^2 = sigma_1 sigma_m - (m + 1) sigma_{m+1}

    Returns the pass flag and the three signed residuals.

    Parameters
    ----------
    exact : bool
        Evaluate exactly, in integer arithmetic on the float entries scaled
        by a common power of two.  The residuals are then exactly zero for a correct
        implementation.  In double precision they sit at the rounding level
        of the largest term, which for ``n = 8`` and entries near 5 is about
        ``1e-10``.
    """
    k = as_curvatures(kappa)
    n = k.size + 1
    m = int(m)
    if not 1 <= m <= n - 2:
        raise DomainError(f"m must lie in [1, {n - 2}], got {m}")
    if exact:
        # floats are dyadic: scale to integers k_i = a_i / 2^E and work in int
        ratios = [x.as_integer_ratio() for x in k.tolist()]
        E = max(q.bit_length() - 1 for _, q in ratios)
        a = [p << (E - (q.bit_length() - 1)) for p, q in ratios]
        s = _sigma_seq(a)
        t = [_sigma_seq(a[:i] + a[i + 1:])[m - 1] for i in range(len(a))]
        res = (
            (sum(ti * ai for ti, ai in zip(t, a)) - m * s[m]) / 2 ** (m * E),
            (sum(t) - (n - m) * s[m - 1]) / 2 ** ((m - 1) * E),
            (sum(ti * ai * ai for ti, ai in zip(t, a)) - (s[1] * s[m] - (m + 1) * s[m + 1])) / 2 ** ((m + 1) * E),
        )
    else:
        s = sigma_all(k)
        t = newton_tensor_diag(k, m)
        res = (
            float(t @ k - m * s[m]),
            float(t.sum() - (n - m) * s[m - 1]),
            float(t @ k**2 - (s[1] * s[m] - (m + 1) * s[m + 1])),
        )
    return TraceCheck(all(abs(x) <= tol for x in res), res)


def in_garding_cone(kappa, m):
    """True iff ``sigma_i(kappa) > 0`` for ``i = 1..m`` (strict, no epsilon)."""
    k = as_curvatures(kappa)
    m = int(m)
    if not 1 <= m <= k.size:
        raise DomainError(f"m must lie in [1, {k.size}], got {m}")
    return bool(np.all(sigma_all(k)[1:m + 1] > 0))


class NewtonMaclaurin(NamedTuple):
    """Ratios and sharp bounds; expect ``ratio1 <= bound1`` and ``ratio2 >= bound2``."""
    ratio1: float
    bound1: float
    ratio2: float
    bound2: float


def newton_maclaurin_margins(kappa, m):
    """Newton-MacLaurin ratios at a tuple in the Garding cone of order ``m``.

    ``ratio1 = sigma_{m-1} sigma_{m+1} / sigma_m^2`` is bounded above by
    ``m (n-m-1) / ((m+1)(n-m))`` and ``ratio2 = sigma_1 sigma_{m-1} / sigma_m``
    is bounded below by ``m (n-1) / (n-m)``.  Both bounds are attained exactly
    when all curvatures coincide.  Cone membership is the caller's job.
    """
    k = as_curvatures(kappa)
    n = k.size + 1
    m = int(m)
    if not 1 <= m <= n - 2:
        raise DomainError(f"m must lie in [1, {n - 2}], got {m}")
    s = sigma_all(k)
    if s[m] == 0.0:
        raise ZeroDivisionError(f"sigma_{m} vanishes; tuple is outside the Garding cone")
    return NewtonMaclaurin(
        float(s[m - 1] * s[m + 1] / s[m] ** 2),
        m * (n - m - 1) / ((m + 1) * (n - m)),
        float(s[1] * s[m - 1] / s[m]),
        m * (n - 1) / (n - m),
    )


def random_cone_tuples(rng, n, count, m=2, low=-2.0, high=5.0):
    """Rejection-sample ``count`` tuples uniform in ``(low, high)^(n-1)`` restricted to the cone."""
    out = []
    while len(out) < count:
        batch = rng.uniform(low, high, size=(max(64, 2 * count), n - 1))
        s = sigma_all(batch)
        keep = np.all(s[:, 1:m + 1] > 0, axis=1)
        out.extend(batch[keep])
    return np.array(out[:count])
