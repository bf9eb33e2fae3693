"""Initial-data library: spheres, cosine bumps and seeded band-limited shapes.

Random shapes draw from ``numpy.random.Generator(PCG64(seed))``; the
algorithm name is recorded in run metadata so a shape can be rebuilt on any
platform from ``(kind, parameters, seed)``.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError
from .hypgeom import FULL_SPHERE, RadialProfile, curvature_from_profile, two_convexity_violations

PRNG_ALGORITHM = "PCG64"
KINDS = ("sphere", "cosine_bump", "random_bandlimited")


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class ShapeSpec:
    """Descriptor of an initial radial profile.

    ``sphere``:              ``r = r0``
    ``cosine_bump``:         ``r = r0 + epsilon cos(k rho)``
    ``random_bandlimited``:  ``r = r0 + epsilon * s`` with ``|s| <= 1`` a seeded
                             combination of modes up to ``max_mode``
    """

    kind: str = "cosine_bump"
    r0: float = 1.0
    epsilon: float = 0.1
    k: int = 2
    max_mode: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown shape kind {self.kind!r}; expected one of {KINDS}")
        if not self.r0 > 0:
            raise DomainError(f"r0 must be positive, got {self.r0}")
        if self.kind != "sphere" and not abs(self.epsilon) < self.r0:
            raise DomainError(f"|epsilon| = {abs(self.epsilon)} must be below r0 = {self.r0} to keep r > 0")
        if self.k < 0 or self.max_mode < 1:
            raise DomainError("mode numbers must be nonnegative (k) and >= 1 (max_mode)")

    def to_dict(self):
        d = asdict(self)
        if self.kind == "sphere":
            return {"kind": "sphere", "r0": self.r0}
        if self.kind == "cosine_bump":
            return {key: d[key] for key in ("kind", "r0", "epsilon", "k")}
        return {key: d[key] for key in ("kind", "r0", "epsilon", "max_mode", "seed")}

    @classmethod
    def from_dict(cls, doc):
        known = {"kind", "r0", "epsilon", "k", "max_mode", "seed"}
        extra = set(doc) - known
        if extra:
            raise DomainError(f"unknown shape fields {sorted(extra)}")
        return cls(**doc)


def _bandlimited_axisymmetric(rho, max_mode, rng):
    a = rng.uniform(-1.0, 1.0, size=max_mode)
    a /= np.abs(a).sum()
    return np.cos(np.outer(rho, np.arange(1, max_mode + 1))) @ a


def _bandlimited_full(rho, psi, max_mode, rng):
    # polynomial in the Cartesian coordinates of the unit sphere, |s| <= 1
    x = np.sin(rho) * np.cos(psi)
    y = np.sin(rho) * np.sin(psi)
    z = np.cos(rho)
    terms = [
        x**i * y**j * z**k
        for i in range(max_mode + 1)
        for j in range(max_mode + 1 - i)
        for k in range(max_mode + 1 - i - j)
        if i + j + k > 0
    ]
    a = rng.uniform(-1.0, 1.0, size=len(terms))
    a /= np.abs(a).sum()
    return sum(c * t for c, t in zip(a, terms))


def build_profile(spec, n, N, representation="axisymmetric", n_psi=None):
    """Sample ``spec`` on a staggered grid; ``N`` polar nodes (``n_psi = 2N`` longitudes if full)."""
    if representation == FULL_SPHERE:
        n_psi = n_psi or 2 * N
        rng = make_rng(spec.seed)

        def func(rho, psi):
            if spec.kind == "sphere":
                return spec.r0 + 0.0 * rho
            if spec.kind == "cosine_bump":
                return spec.r0 + spec.epsilon * np.cos(spec.k * rho)
            return spec.r0 + spec.epsilon * _bandlimited_full(rho, psi, spec.max_mode, rng)

        if n != 3:
            raise DomainError("the full-sphere layout exists only for n = 3")
        return RadialProfile.full_sphere(func, N, n_psi)

    if spec.kind == "sphere":
        return RadialProfile.from_function(n, N, lambda rho: spec.r0 + 0.0 * rho)
    if spec.kind == "cosine_bump":
        return RadialProfile.from_function(n, N, lambda rho: spec.r0 + spec.epsilon * np.cos(spec.k * rho))
    rng = make_rng(spec.seed)
    return RadialProfile.from_function(
        n, N, lambda rho: spec.r0 + spec.epsilon * _bandlimited_axisymmetric(rho, spec.max_mode, rng)
    )


def is_two_convex(profile):
    return two_convexity_violations(curvature_from_profile(profile)).size == 0


def random_shape_specs(seed, count, r0_range=(0.5, 2.0), eps_range=(0.02, 0.4), max_mode=6):
    """Deterministic stream of ``random_bandlimited`` specs (not yet filtered for convexity)."""
    rng = make_rng(seed)
    out = []
    for _ in range(count):
        r0 = float(rng.uniform(*r0_range))
        eps = float(rng.uniform(*eps_range)) * min(1.0, r0)
        mode = int(rng.integers(1, max_mode + 1))
        out.append(ShapeSpec("random_bandlimited", r0, eps, max_mode=mode, seed=int(rng.integers(2**31))))
    return out


def two_convex_library(n, count, seed=0, N=400, max_tries=None):
    """``count`` seeded random axisymmetric shapes that pass two-convexity, as ``(spec, profile)``."""
    max_tries = max_tries or 50 * count
    found = []
    for spec in random_shape_specs(seed, max_tries):
        p = build_profile(spec, n, N)
        if is_two_convex(p):
            found.append((spec, p))
            if len(found) == count:
                return found
    raise DomainError(f"only {len(found)} of {count} two-convex shapes found in {max_tries} draws")

