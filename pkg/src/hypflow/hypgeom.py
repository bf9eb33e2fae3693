"""Star-shaped radial graphs in hyperbolic space.

A closed star-shaped hypersurface of ``H^n = (0, inf) x S^{n-1}`` (metric
``dr^2 + sinh(r)^2 g_sphere``) is stored as its radial function ``r`` on a
staggered grid over the unit sphere.  Two layouts exist:

* ``axisymmetric`` -- ``r`` depends on the polar angle only, sampled at
  ``rho_j = (j + 1/2) pi / N``; works for every ``3 <= n <= 8``.
* ``full-sphere`` -- ``n = 3`` only, a latitude-longitude grid
  ``(rho_j, psi_k)`` with ``psi_k = (k + 1/2) 2 pi / N_psi``.

Neither grid has a node on a pole.  Pole regularity enters only through the
ghost values used by the finite-difference stencils (even reflection for the
axisymmetric grid, reflection through the pole to the antipodal meridian for
the full grid).

Curvature is computed through ``phi = Phi(r)`` with ``Phi' = 1 / sinh``; only
derivatives of ``phi`` appear (``grad phi = grad r / lambda``), so ``Phi``
itself is never evaluated.  With ``v = sqrt(1 + |grad phi|^2)`` the induced
metric and second fundamental form are::

    g_ij = lambda^2 (sigma_ij + phi_i phi_j)
    h_ij = lambda' / (v lambda) g_ij - lambda / v phi_;ij

and the principal curvatures are the eigenvalues of ``g^-1 h``.
"""

import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from .errors import (
    DomainError,
    GeometryOverflowError,
    MeanConvexityError,
    TwoConvexityError,
)
from .symfun import sigma_all

AXISYMMETRIC = "axisymmetric"
FULL_SPHERE = "full-sphere"

N_MIN, N_MAX = 3, 8
# sinh(r)^(n-1) stays far from overflow for n <= 8
R_MAX = 25.0

PROFILE_SCHEMA = "hypflow.profile"
PROFILE_VERSION = 1


def sphere_area_constant(n):
    """Area ``omega_{n-1}`` of the unit sphere ``S^{n-1}`` in ``R^n``.

    Uses ``2 pi^(n/2) / Gamma(n/2)`` with the exact integer and half-integer
    Gamma values.  Valid for every ``n >= 1`` (``omega_0 = 2`` counts the two
    points of ``S^0``); the geometry itself needs ``n >= 3``.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n % 2 == 0:
        gamma = math.factorial(n // 2 - 1)
        return 2.0 * math.pi ** (n // 2) / gamma
    # Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!), k = (n - 1) / 2
    k = (n - 1) // 2
    gamma = math.factorial(2 * k) * math.sqrt(math.pi) / (4**k * math.factorial(k))
    return 2.0 * math.pi ** (n / 2) / gamma


def sharp_constant(n):
    """``(n-1)(n-2)/2 * omega_{n-1}^(2/(n-1))``, the limit value of ``Q`` on round spheres."""
    return 0.5 * (n - 1) * (n - 2) * sphere_area_constant(n) ** (2.0 / (n - 1))


def staggered_grid(N):
    """Polar angles ``(j + 1/2) pi / N`` for ``j = 0..N-1``."""
    return (np.arange(N) + 0.5) * (np.pi / N)


def _sine_power_cosine_moments(N, m):
    """``M_k = int_0^pi cos(k rho) sin(rho)^m d rho`` for ``k = 0..N-1``, exactly."""
    k = np.arange(N)

    def e_int(q):
        # int_0^pi exp(i q rho) d rho for integer q
        q = np.asarray(q)
        safe = np.where(q == 0, 1, q)
        val = ((-1.0) ** np.abs(q) - 1.0) / (1j * safe)
        return np.where(q == 0, np.pi + 0j, val)

    total = np.zeros(N, dtype=complex)
    for j in range(m + 1):
        p = m - 2 * j
        total += math.comb(m, j) * (-1) ** j * (e_int(p + k) + e_int(p - k))
    return ((2j) ** (-m) * total / 2).real


@lru_cache(maxsize=64)
def _polar_weights(N, m):
    """Weights for ``int_0^pi g(rho) sin(rho)^m d rho`` from samples on the staggered grid.

    Interpolatory in the cosine basis ``cos(k rho), k < N`` (the generalized
    Fejer rule): exact for any such ``g`` and spectrally accurate for smooth
    pole-regular data.  For ``m = 0`` this is the midpoint rule.
    """
    rho = staggered_grid(N)
    moments = _sine_power_cosine_moments(N, m)
    scale = np.full(N, 2.0 / N)
    scale[0] = 1.0 / N
    w = np.cos(np.outer(rho, np.arange(N))) @ (scale * moments)
    w.flags.writeable = False
    return w


@lru_cache(maxsize=64)
def sphere_weights(n, N):
    """Quadrature weights for ``int_{S^{n-1}} g`` with ``g`` axisymmetric on the staggered grid."""
    w = sphere_area_constant(n - 1) * _polar_weights(int(N), int(n) - 2)
    w.flags.writeable = False
    return w


def full_sphere_weights(n_rho, n_psi):
    """Weights for ``int_{S^2} g`` on the latitude-longitude grid, shape ``(n_rho, n_psi)``."""
    w_rho = _polar_weights(int(n_rho), 1)
    return np.outer(w_rho, np.full(n_psi, 2.0 * np.pi / n_psi))


# ---------------------------------------------------------------- stencils


def _d1(padded, h, axis=-1):
    """Fourth-order central first derivative; ``padded`` carries two ghosts per side."""
    a = padded if axis in (-1, padded.ndim - 1) else np.moveaxis(padded, axis, -1)
    d = (a[..., :-4] - 8.0 * a[..., 1:-3] + 8.0 * a[..., 3:-1] - a[..., 4:]) * (1.0 / (12.0 * h))
    return d if a is padded else np.moveaxis(d, -1, axis)


def _d2(padded, h, axis=-1):
    """Fourth-order central second derivative; ``padded`` carries two ghosts per side."""
    a = padded if axis in (-1, padded.ndim - 1) else np.moveaxis(padded, axis, -1)
    d = (
        16.0 * (a[..., 1:-3] + a[..., 3:-1]) - (a[..., :-4] + a[..., 4:]) - 30.0 * a[..., 2:-2]
    ) * (1.0 / (12.0 * h * h))
    return d if a is padded else np.moveaxis(d, -1, axis)


def pad_even(f):
    """Even reflection about both poles: ``f(-rho) = f(rho)``, ``f(pi + d) = f(pi - d)``."""
    return np.concatenate([f[1::-1], f, f[:-3:-1]])


def polar_derivatives(f, N=None):
    """First and second polar-angle derivatives of an axisymmetric grid function."""
    f = np.asarray(f, dtype=float)
    h = np.pi / (N or f.size)
    fp = pad_even(f)
    return _d1(fp, h), _d2(fp, h)


def _pad_pole(f):
    """Ghost rows across the poles of a latitude-longitude grid.

    The point at polar angle ``-rho`` on meridian ``psi`` is ``(rho, psi + pi)``.
    """
    half = f.shape[1] // 2
    top = np.roll(f[1::-1], half, axis=1)
    bottom = np.roll(f[:-3:-1], half, axis=1)
    return np.concatenate([top, f, bottom], axis=0)


def _pad_wrap(f):
    return np.concatenate([f[:, -2:], f, f[:, :2]], axis=1)


# ---------------------------------------------------------------- profiles


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial function of a star-shaped hypersurface sampled on a staggered grid.

    ``r`` has shape ``(N,)`` for the axisymmetric layout and ``(N_rho, N_psi)``
    for the full-sphere layout.  Values are hyperbolic distances to the
    origin and must be positive.
    """

    n: int
    r: np.ndarray
    representation: str = AXISYMMETRIC

    def __post_init__(self):
        n = int(self.n)
        if not N_MIN <= n <= N_MAX:
            raise DomainError(f"ambient dimension must lie in [{N_MIN}, {N_MAX}], got {n}")
        r = np.array(self.r, dtype=float)
        if self.representation == AXISYMMETRIC:
            if r.ndim != 1 or r.size < 8:
                raise DomainError(f"axisymmetric profile needs a 1-D array of >= 8 nodes, got {r.shape}")
        elif self.representation == FULL_SPHERE:
            if n != 3:
                raise DomainError("the full-sphere layout exists only for n = 3")
            if r.ndim != 2 or r.shape[0] < 8 or r.shape[1] < 8 or r.shape[1] % 2:
                raise DomainError(f"full-sphere grid needs shape (>=8, even >=8), got {r.shape}")
        else:
            raise DomainError(f"unknown representation {self.representation!r}")
        if not (np.isfinite(r).all() and r.min() > 0):
            bad = np.flatnonzero(~np.isfinite(r) | (r <= 0))
            raise DomainError(f"radial function must be finite and positive; bad nodes {bad[:20].tolist()}")
        r.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", r)

    @classmethod
    def from_function(cls, n, N, func):
        """Axisymmetric profile with ``r_j = func(rho_j)``."""
        rho = staggered_grid(int(N))
        return cls(n, np.broadcast_to(func(rho), rho.shape))

    @classmethod
    def full_sphere(cls, func, n_rho, n_psi):
        """``n = 3`` profile on a latitude-longitude grid with ``r = func(rho, psi)``."""
        rho = staggered_grid(int(n_rho))
        psi = (np.arange(int(n_psi)) + 0.5) * (2.0 * np.pi / n_psi)
        R, P = np.meshgrid(rho, psi, indexing="ij")
        return cls(3, np.broadcast_to(func(R, P), R.shape), FULL_SPHERE)

    @property
    def shape(self):
        return self.r.shape

    @property
    def N(self):
        """Number of polar nodes."""
        return self.r.shape[0]

    @property
    def rho(self):
        return staggered_grid(self.N)

    @property
    def psi(self):
        if self.representation != FULL_SPHERE:
            raise AttributeError("axisymmetric profiles have no longitude grid")
        m = self.r.shape[1]
        return (np.arange(m) + 0.5) * (2.0 * np.pi / m)

    def with_r(self, r):
        """Same grid and dimension, new radial values."""
        return RadialProfile(self.n, r, self.representation)

    def quadrature_weights(self):
        """Weights for ``int_{S^{n-1}}`` of a grid function, same shape as ``r``."""
        if self.representation == FULL_SPHERE:
            return full_sphere_weights(*self.r.shape)
        return sphere_weights(self.n, self.N)

    def to_dict(self):
        return {
            "schema": PROFILE_SCHEMA,
            "version": PROFILE_VERSION,
            "n": self.n,
            "representation": self.representation,
            "grid": list(self.r.shape),
            "r": self.r.tolist(),
        }

    @classmethod
    def from_dict(cls, doc):
        if doc.get("schema", PROFILE_SCHEMA) != PROFILE_SCHEMA:
            raise DomainError(f"not a profile document: schema {doc.get('schema')!r}")
        r = np.asarray(doc["r"], dtype=float)
        if list(r.shape) != list(doc["grid"]):
            raise DomainError(f"grid {doc['grid']} does not match r of shape {list(r.shape)}")
        return cls(doc["n"], r, doc.get("representation", AXISYMMETRIC))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, RadialProfile):
            return NotImplemented
        return (
            self.n == other.n
            and self.representation == other.representation
            and self.r.shape == other.r.shape
            and bool(np.array_equal(self.r, other.r))
        )

    __hash__ = None


# ---------------------------------------------------------------- curvature


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Pointwise geometry of a radial graph.

    ``kappa`` has the grid shape plus a trailing axis of length ``n - 1``.  In
    the axisymmetric layout column 0 is the meridian curvature and the other
    ``n - 2`` columns repeat the parallel curvature.  ``delta`` is
    ``kappa - 1`` computed without cancellation.  ``weight`` is the area
    element per unit sphere measure, ``lambda^(n-1) v``.
    """

    n: int
    representation: str
    lam: np.ndarray
    dlam: np.ndarray
    grad_phi: np.ndarray
    v: np.ndarray
    kappa: np.ndarray
    delta: np.ndarray
    weight: np.ndarray
    quad: np.ndarray = field(repr=False)

    @cached_property
    def sigma(self):
        """``sigma_0 .. sigma_{n-1}`` per node, trailing axis of length ``n``."""
        return sigma_all(self.kappa)

    @property
    def grad_lam(self):
        """``|grad lambda|`` on the unit sphere, equal to ``lambda lambda' |grad phi|``."""
        return self.lam * self.dlam * self.grad_phi

    def integrate(self, values):
        """``int_Sigma values d mu`` for a per-node field."""
        return float(np.sum(self.quad * self.weight * values))

    def total_sigma(self, m):
        if not 0 <= m <= self.n - 1:
            raise DomainError(f"m must lie in [0, {self.n - 1}], got {m}")
        return self.integrate(self.sigma[..., m])

    @cached_property
    def sigma2_excess(self):
        """``int (sigma_2 - (n-1)(n-2)/2) d mu`` from the deviations ``kappa - 1``.

        With ``d = n - 1``, ``sigma_2(1 + delta) = C(d, 2) + (d - 1) sigma_1(delta) + sigma_2(delta)``.
        """
        sd = sigma_all(self.delta)
        return self.integrate((self.n - 2) * sd[..., 1] + sd[..., 2])

    @cached_property
    def area(self):
        return float(np.sum(self.quad * self.weight))


def _check_overflow(r):
    if r.max() >= R_MAX:
        big = np.flatnonzero(r >= R_MAX)
        i = int(big[0])
        raise GeometryOverflowError(
            f"r = {r.flat[i]:.6g} at node {i} exceeds the cap {R_MAX}; warp factors would overflow"
        )


@lru_cache(maxsize=64)
def _cot_grid(N):
    c = 1.0 / np.tan(staggered_grid(N))
    c.flags.writeable = False
    return c


def _coth_minus_one(r):
    return 2.0 / np.expm1(2.0 * r)


def axisymmetric_core(r):
    """Warp factors, ``phi'``, ``v`` and the meridian/parallel curvatures of an axisymmetric graph.

    ``kappa_mer = lambda'/(lambda v) - phi''/(lambda v^3)`` and
    ``kappa_par = lambda'/(lambda v) - phi' cot(rho)/(lambda v)`` (multiplicity ``n - 2``),
    with ``phi' = r'/lambda``, ``phi'' = r''/lambda - lambda' r'^2/lambda^2``.
    The curvatures are returned as deviations ``kappa - 1``, evaluated without
    cancellation so they stay accurate when the surface is nearly umbilic and large.
    """
    N = r.size
    rp, rpp = polar_derivatives(r, N)
    lam = np.sinh(r)
    dlam = np.cosh(r)
    phi1 = rp / lam
    phi2 = (rpp - dlam * rp * phi1) / lam
    g2 = phi1 * phi1
    v = np.sqrt(1.0 + g2)
    lv = lam * v
    # lambda'/(lambda v) - 1 = (coth r - 1)/v + (1/v - 1)
    base = _coth_minus_one(r) / v - g2 / (v * (1.0 + v))
    d_mer = base - phi2 / (lv * v * v)
    d_par = base - phi1 * _cot_grid(N) / lv
    return lam, dlam, phi1, v, d_mer, d_par


def _axisymmetric_curvature(r, n):
    lam, dlam, phi1, v, d_mer, d_par = axisymmetric_core(r)
    delta = np.empty((r.size, n - 1))
    delta[:, 0] = d_mer
    delta[:, 1:] = d_par[:, None]
    kappa = 1.0 + delta
    return lam, dlam, np.abs(phi1), v, kappa, delta, _two_value_sigma(kappa[:, 0], kappa[:, 1], n - 2)


def _two_value_sigma(a, b, mult):
    """``sigma_m`` of the tuple ``(a, b, ..., b)`` with ``b`` repeated ``mult`` times.

    ``sigma_m = C(mult, m) b^m + a C(mult, m-1) b^(m-1)``.
    """
    rows = [np.ones_like(a)]
    bp = rows[0]
    for m in range(1, mult + 2):
        # bp holds b^(m-1) on entry
        row = math.comb(mult, m - 1) * a * bp
        bp = bp * b
        if m <= mult:
            row = row + math.comb(mult, m) * bp
        rows.append(row)
    return np.stack(rows, axis=-1)


def _full_sphere_curvature(r):
    n_rho, n_psi = r.shape
    h_rho = np.pi / n_rho
    h_psi = 2.0 * np.pi / n_psi
    rho = staggered_grid(n_rho)[:, None]
    s, c = np.sin(rho), np.cos(rho)

    pr = _pad_pole(r)
    r_t = _d1(pr, h_rho, axis=0)
    r_tt = _d2(pr, h_rho, axis=0)
    r_p = _d1(_pad_wrap(r), h_psi, axis=1)
    r_pp = _d2(_pad_wrap(r), h_psi, axis=1)
    r_tp = _d1(_pad_wrap(r_t), h_psi, axis=1)

    lam = np.sinh(r)
    dlam = np.cosh(r)
    # phi derivatives by the chain rule through Phi' = 1/lambda
    a_t, a_p = r_t / lam, r_p / lam
    q = dlam / (lam * lam)
    p_tt = r_tt / lam - q * r_t * r_t
    p_tp = r_tp / lam - q * r_t * r_p
    p_pp = r_pp / lam - q * r_p * r_p
    # covariant Hessian on the round S^2, metric diag(1, s^2)
    H_tt = p_tt
    H_tp = p_tp - (c / s) * a_p
    H_pp = p_pp + s * c * a_t

    grad2 = a_t * a_t + a_p * a_p / (s * s)
    v2 = 1.0 + grad2
    v = np.sqrt(v2)
    # g^-1 = lambda^-2 (sigma^-1 - sigma^-1 a a^T sigma^-1 / v^2)
    gi_tt = (1.0 - a_t * a_t / v2) / lam**2
    gi_tp = -(a_t * a_p / (s * s)) / v2 / lam**2
    gi_pp = (1.0 / (s * s) - (a_p / (s * s)) ** 2 / v2) / lam**2
    B_tt = gi_tt * H_tt + gi_tp * H_tp
    B_pp = gi_tp * H_tp + gi_pp * H_pp
    tr = B_tt + B_pp
    detB = (H_tt * H_pp - H_tp * H_tp) / (lam**4 * s * s * v2)
    disc = np.sqrt(np.maximum(0.25 * tr * tr - detB, 0.0))
    mu1 = 0.5 * tr + disc
    mu2 = 0.5 * tr - disc
    base = _coth_minus_one(r) / v - grad2 / (v * (1.0 + v))
    delta = np.stack([base - lam / v * mu1, base - lam / v * mu2], axis=-1)
    return lam, dlam, np.sqrt(grad2), v, 1.0 + delta, delta, None


def curvature_from_profile(p):
    """Warp factors, graph gradient factor and principal curvatures at every node.

    Raises
    ------
    GeometryOverflowError
        If ``r`` reaches the overflow cap or any curvature is non-finite.
    """
    _check_overflow(p.r)
    if p.representation == FULL_SPHERE:
        lam, dlam, gphi, v, kappa, delta, sigma = _full_sphere_curvature(p.r)
    else:
        lam, dlam, gphi, v, kappa, delta, sigma = _axisymmetric_curvature(p.r, p.n)
    if not np.isfinite(kappa).all():
        bad = np.flatnonzero(~np.all(np.isfinite(kappa), axis=-1))
        raise GeometryOverflowError(f"non-finite principal curvature at node {int(bad[0])}")
    cf = CurvatureField(
        n=p.n,
        representation=p.representation,
        lam=lam,
        dlam=dlam,
        grad_phi=gphi,
        v=v,
        kappa=kappa,
        delta=delta,
        weight=lam ** (p.n - 1) * v,
        quad=p.quadrature_weights(),
    )
    if sigma is not None:
        cf.__dict__["sigma"] = sigma
    return cf


def _field(p):
    return p if isinstance(p, CurvatureField) else curvature_from_profile(p)


# ---------------------------------------------------------------- functionals


def area(p):
    """Area ``|Sigma|`` of the hypersurface (profile or precomputed field)."""
    return _field(p).area


def total_sigma(p, m):
    """``int_Sigma sigma_m d mu``."""
    return _field(p).total_sigma(int(m))


def q_value(p):
    """Normalized deficit ``|S|^(-(n-3)/(n-1)) (int sigma_2 - (n-1)(n-2)/2 |S|)``."""
    cf = _field(p)
    return cf.area ** (-(cf.n - 3) / (cf.n - 1)) * cf.sigma2_excess


def two_convexity_violations(cf):
    """Flat indices of nodes where ``sigma_1 <= 0`` or ``sigma_2 <= 0``."""
    s = cf.sigma
    return np.flatnonzero(~((s[..., 1] > 0) & (s[..., 2] > 0)))


def main_inequality_margin(p):
    """Margin of the sharp ``sigma_2`` inequality for two-convex star-shaped surfaces.

    Returns ``int sigma_2 - (n-1)(n-2)/2 (omega^(2/(n-1)) |S|^((n-3)/(n-1)) + |S|)``,
    which is nonnegative with equality exactly on geodesic spheres.

    Raises
    ------
    TwoConvexityError
        Listing the nodes where the curvature leaves the cone.
    """
    cf = _field(p)
    bad = two_convexity_violations(cf)
    if bad.size:
        raise TwoConvexityError("profile is not two-convex", bad)
    n = cf.n
    return cf.sigma2_excess - sharp_constant(n) * cf.area ** ((n - 3) / (n - 1))


class AuxiliaryMargins(NamedTuple):
    support: float
    area_powers: float


def auxiliary_inequality_margins(p):
    """Margins of the two sharp mean-curvature inequalities for mean-convex graphs.

    ``support``:
        ``int (lambda' H - (n-1) <grad lambda', nu>) - (n-1) omega^(1/(n-1)) |S|^((n-2)/(n-1))``
    ``area_powers``:
        ``int lambda' H - (n-1) omega ((|S|/omega)^((n-2)/(n-1)) + (|S|/omega)^(n/(n-1)))``

    The ambient gradient of ``lambda' = cosh r`` is ``lambda d_r`` and
    ``<d_r, nu> = 1/v``, so ``<grad lambda', nu> = lambda / v``.
    """
    cf = _field(p)
    s1 = cf.sigma[..., 1]
    bad = np.flatnonzero(~(s1 > 0))
    if bad.size:
        raise MeanConvexityError("profile is not mean convex", bad)
    n = cf.n
    A = cf.area
    omega = sphere_area_constant(n)
    weighted_h = cf.integrate(cf.dlam * s1)
    support = cf.integrate(cf.lam / cf.v)
    m13 = weighted_h - (n - 1) * support - (n - 1) * omega ** (1.0 / (n - 1)) * A ** ((n - 2) / (n - 1))
    x = A / omega
    m14 = weighted_h - (n - 1) * omega * (x ** ((n - 2) / (n - 1)) + x ** (n / (n - 1)))
    return AuxiliaryMargins(m13, m14)
