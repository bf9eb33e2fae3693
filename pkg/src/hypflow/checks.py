"""Static check suites: symmetric-function identities, the Sobolev inequality,
the curvature inequalities on a shape library and the n = 3 Gauss-Bonnet oracle.

Each suite returns a list of :class:`CheckResult`; :func:`run_suites` runs a
selection and :func:`coverage_table` formats the results.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MeanConvexityError
from .hypgeom import (
    FULL_SPHERE,
    auxiliary_inequality_margins,
    curvature_from_profile,
    main_inequality_margin,
)
from .shapes import ShapeSpec, build_profile, is_two_convex, make_rng, random_shape_specs
from .sobolev import SphereFunction, beckner_margin, beckner_w_margin, random_positive_function
from .symfun import newton_maclaurin_margins, random_cone_tuples, verify_trace_identities

SUITES = ("newton-maclaurin", "beckner", "inequalities", "gauss-bonnet")
DEFAULT_DIMENSIONS = {
    "newton-maclaurin": (4, 5, 6, 7, 8),
    "beckner": (4, 5, 6, 7, 8),
    "inequalities": (4, 5, 6),
    "gauss-bonnet": (3,),
}
SHAPE_KINDS = ("random_bandlimited", "cosine_bump", "sphere")
SPHERE_RADII = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    claim: str
    measured: float
    tolerance: float
    passed: bool
    count: int = 1

    @property
    def status(self):
        return "pass" if self.passed else "FAIL"


# ---------------------------------------------------------------- symmetric functions
def newton_maclaurin_suite(dims=DEFAULT_DIMENSIONS["newton-maclaurin"], seed=0, count=1000, tol=1e-10,
                           equality_tol=1e-12):
    """Trace identities and both Newton-MacLaurin inequalities on random cone tuples.

    ``measured`` is the worst residual for identities and the smallest signed
    gap for inequalities.  Equality must occur on constant tuples and only there.
    """
    rng = make_rng(seed)
    out = []
    for n in dims:
        if n < 3:
            raise DomainError(f"n must be >= 3, got {n}")
        tuples = random_cone_tuples(rng, n, count, m=2)
        worst = max(
            max(abs(x) for x in verify_trace_identities(k, m, tol, exact=True).residuals)
            for k in tuples
            for m in range(1, n - 1)
        )
        out.append(CheckResult("newton-maclaurin", f"trace identities n={n}",
                               "Newton tensor trace identities (exact arithmetic)", worst, tol, worst < tol, count))
        for m in range(1, min(2, n - 2) + 1):
            gaps = np.array([_nm_gaps(k, m) for k in tuples])
            low = float(gaps.min())
            out.append(CheckResult("newton-maclaurin", f"NM m={m} n={n}",
                                   "Newton-MacLaurin inequalities, strict off umbilics",
                                   low, equality_tol, low > equality_tol, count))
            const = [newton_maclaurin_margins(np.full(n - 1, c), m) for c in rng.uniform(0.1, 5.0, 20)]
            dev = max(max(abs(b1 - r1), abs(r2 - b2)) for r1, b1, r2, b2 in const)
            out.append(CheckResult("newton-maclaurin", f"NM equality m={m} n={n}",
                                   "equality on constant tuples", dev, equality_tol, dev < equality_tol, 20))
    return out


def _nm_gaps(kappa, m):
    r1, b1, r2, b2 = newton_maclaurin_margins(kappa, m)
    # at m = 1 the second ratio is identically its bound
    return b1 - r1 if m == 1 else min(b1 - r1, r2 - b2)


# ---------------------------------------------------------------- sobolev
def beckner_suite(dims=DEFAULT_DIMENSIONS["beckner"], seed=0, count=200, N=400, tol=1e-8, N_w=1600):
    """Margins on random positive functions, constants, the ``eps^2`` scaling and the ``w``-form.

    The ``f``/``w`` comparison measures fourth-order differentiation error,
    about ``1e-7`` at ``N = 400`` for ``n = 6``, so it runs on the finer ``N_w`` grid.
    """
    rng = make_rng(seed)
    out = []
    for n in dims:
        if n == 3:
            sf = random_positive_function(rng, 3, N)
            lhs, rhs, _ = beckner_margin(sf)
            dev = abs(lhs - rhs)
            out.append(CheckResult("beckner", "n=3 identity", "both sides equal omega_2 at n = 3",
                                   dev, 1e-10, dev < 1e-10))
            continue
        margins = np.array([
            beckner_margin(random_positive_function(rng, n, N, amplitude=rng.uniform(0.05, 1.5))).margin
            for _ in range(count)
        ])
        low = float(margins.min())
        out.append(CheckResult("beckner", f"random f n={n}", "sharp Sobolev inequality on the sphere",
                               low, tol, low >= -tol, count))
        dev = max(abs(beckner_margin(SphereFunction(n, np.full(N, c))).margin) for c in (0.3, 1.0, 2.5))
        out.append(CheckResult("beckner", f"constants n={n}", "equality for constants", dev, 1e-10, dev < 1e-10, 3))
        slope = beckner_slope(n, N=N)
        out.append(CheckResult("beckner", f"eps^2 scaling n={n}", "margin ~ eps^2 near constants (cos 2 rho)",
                               slope, 0.1, abs(slope - 2.0) <= 0.1))
        sf = random_positive_function(rng, n, N_w, amplitude=0.5)
        gap = abs(beckner_margin(sf).margin - beckner_w_margin(sf).margin)
        out.append(CheckResult("beckner", f"w-form n={n}", "f-form and w-form margins agree", gap, tol, gap < tol))
    return out


def beckner_slope(n, k=2, eps=(1e-1, 1e-2, 1e-3), N=400):
    """Log-log slope of the margin of ``1 + eps cos(k rho)`` against ``eps``."""
    margins = [
        beckner_margin(SphereFunction.from_function(n, N, lambda rho, e=e: 1.0 + e * np.cos(k * rho))).margin
        for e in eps
    ]
    return float(np.polyfit(np.log(eps), np.log(margins), 1)[0])


# ---------------------------------------------------------------- curvature inequalities
def shape_library(dims, count, seed=0, kind="random_bandlimited", N=400):
    """Seeded two-convex shapes spread over ``dims``, as ``(n, spec, profile)``."""
    if kind not in SHAPE_KINDS:
        raise DomainError(f"unknown shape kind {kind!r}")
    if kind == "sphere":
        return [(n, s, build_profile(s, n, N)) for n in dims for s in (ShapeSpec("sphere", r) for r in SPHERE_RADII)]
    rng = make_rng(seed)
    found = []
    specs = iter(random_shape_specs(seed, 100 * count))
    while len(found) < count:
        n = dims[len(found) % len(dims)]
        if kind == "cosine_bump":
            r0 = float(rng.uniform(0.5, 2.0))
            spec = ShapeSpec("cosine_bump", r0, float(rng.uniform(0.02, 0.4)) * min(1.0, r0), k=int(rng.integers(1, 7)))
        else:
            try:
                spec = next(specs)
            except StopIteration:
                raise DomainError(f"only {len(found)} of {count} two-convex shapes found") from None
        p = build_profile(spec, n, N)
        if is_two_convex(p):
            found.append((n, spec, p))
    return found


def inequality_suite(dims=DEFAULT_DIMENSIONS["inequalities"], seed=0, count=50, kind="random_bandlimited",
                     N=400, tol=1e-6):
    """Main and auxiliary margins on a shape library (non-negative) and on spheres (zero)."""
    dims = tuple(d for d in dims if d >= 4)
    if not dims:
        return []
    out = []
    if kind != "sphere":
        lib = shape_library(dims, count, seed, kind, N)
        main = min(main_inequality_margin(p) for _, _, p in lib)
        out.append(CheckResult("inequalities", f"main {kind}", "sharp sigma_2 inequality",
                               main, tol, main >= -tol, len(lib)))
        aux = []
        for _, _, p in lib:
            try:
                aux.append(auxiliary_inequality_margins(p))
            except MeanConvexityError:
                pass
        if aux:
            low = min(min(a) for a in aux)
            out.append(CheckResult("inequalities", f"auxiliary {kind}", "mean-convex support and area inequalities",
                                   low, tol, low >= -tol, len(aux)))
    spheres = shape_library(dims, 0, kind="sphere", N=N)
    dev = max(abs(main_inequality_margin(p)) for _, _, p in spheres)
    out.append(CheckResult("inequalities", "main spheres", "equality on geodesic spheres",
                           dev, tol, dev < tol, len(spheres)))
    dev = max(max(abs(x) for x in auxiliary_inequality_margins(p)) for _, _, p in spheres)
    out.append(CheckResult("inequalities", "auxiliary spheres", "equality on geodesic spheres",
                           dev, tol, dev < tol, len(spheres)))
    return out


# ---------------------------------------------------------------- gauss-bonnet
def gauss_bonnet_suite(seed=0, count=20, kind="random_bandlimited", N=400, full_grid=(200, 400), tol=1e-4):
    """``|int sigma_2 - |S| - 4 pi|`` on star-shaped surfaces in H^3, axisymmetric and on the full sphere."""
    if kind == "sphere":
        specs = [ShapeSpec("sphere", r) for r in SPHERE_RADII]
    elif kind == "cosine_bump":
        rng = make_rng(seed)
        specs = []
        for _ in range(count):
            r0 = float(rng.uniform(0.5, 2.0))
            specs.append(ShapeSpec("cosine_bump", r0, float(rng.uniform(0.02, 0.4)) * min(1.0, r0),
                                   k=int(rng.integers(1, 7))))
    else:
        specs = random_shape_specs(seed, count)
    out = []
    for label, build in (
        (f"axisymmetric N={N}", lambda s: build_profile(s, 3, N)),
        (f"full sphere {full_grid[0]}x{full_grid[1]}", lambda s: build_profile(s, 3, full_grid[0], FULL_SPHERE,
                                                                                  full_grid[1])),
    ):
        dev = max(abs(curvature_from_profile(build(s)).sigma2_excess - 4 * np.pi) for s in specs)
        out.append(CheckResult("gauss-bonnet", label, "int sigma_2 - |S| = 4 pi in H^3", dev, tol, dev < tol,
                               len(specs)))
    return out


# ---------------------------------------------------------------- driver
def run_suites(only=None, n=None, shape="random_bandlimited", seed=0):
    """Run the selected suites (all by default); ``n`` restricts every suite to that dimension."""
    names = SUITES if only is None else (only,)
    results = []
    for name in names:
        if name not in SUITES:
            raise DomainError(f"unknown suite {name!r}; expected one of {SUITES}")
        dims = DEFAULT_DIMENSIONS[name] if n is None else (n,)
        if name == "newton-maclaurin":
            results += newton_maclaurin_suite(dims, seed)
        elif name == "beckner":
            results += beckner_suite(dims, seed)
        elif name == "inequalities":
            results += inequality_suite(dims, seed, kind=shape)
        elif 3 in dims:
            results += gauss_bonnet_suite(seed, kind=shape)
    return results


def coverage_table(results):
    head = f"{'suite':<17} {'check':<30} {'count':>5} {'measured':>13} {'tolerance':>10} {'status':<6} claim"
    lines = [head, "-" * len(head)]
    for r in results:
        lines.append(f"{r.suite:<17} {r.name:<30} {r.count:>5} {r.measured:>13.4e} {r.tolerance:>10.1e} "
                     f"{r.status:<6} {r.claim}")
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed} passed, {failed} failed")
    return "\n".join(lines) + "\n"
