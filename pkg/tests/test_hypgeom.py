import math

import numpy as np
import pytest
import scipy.linalg
import sympy as sp

from hypflow.errors import DomainError, GeometryOverflowError, MeanConvexityError, TwoConvexityError
from hypflow.hypgeom import (
    FULL_SPHERE,
    R_MAX,
    RadialProfile,
    area,
    auxiliary_inequality_margins,
    curvature_from_profile,
    main_inequality_margin,
    polar_derivatives,
    q_value,
    sharp_constant,
    sphere_area_constant,
    sphere_weights,
    staggered_grid,
    total_sigma,
    two_convexity_violations,
)
from hypflow.shapes import ShapeSpec, build_profile, is_two_convex


def bump(n, N, r0=1.0, eps=0.1, k=2):
    return RadialProfile.from_function(n, N, lambda rho: r0 + eps * np.cos(k * rho))


# ---------------------------------------------------------------- constants and quadrature
def test_sphere_area_constant():
    assert sphere_area_constant(3) == pytest.approx(4 * math.pi, rel=1e-15)
    assert sphere_area_constant(5) == pytest.approx(8 * math.pi**2 / 3, rel=1e-15)
    assert sphere_area_constant(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_area_constant(1) == 2.0
    for n in range(3, 9):
        gamma = math.gamma(n / 2)
        assert sphere_area_constant(n) == pytest.approx(2 * math.pi ** (n / 2) / gamma, rel=1e-14)


def test_sharp_constant_n5():
    assert sharp_constant(5) == pytest.approx(6 * math.sqrt(8 * math.pi**2 / 3), rel=1e-15)
    assert sharp_constant(3) == pytest.approx(4 * math.pi, rel=1e-15)


@pytest.mark.parametrize("n", range(3, 9))
def test_weights_sum_to_sphere_area(n):
    assert sphere_weights(n, 37).sum() == pytest.approx(sphere_area_constant(n), rel=1e-14)


def test_quadrature_is_spectral():
    # int_{S^2} exp(cos rho) = 2 pi (e - 1/e)
    exact = 2 * math.pi * (math.e - 1 / math.e)
    for N in (24, 48):
        rho = staggered_grid(N)
        assert sphere_weights(3, N) @ np.exp(np.cos(rho)) == pytest.approx(exact, rel=1e-14)


def test_quadrature_exact_on_cosine_polynomials():
    # int_{S^4} cos^4 rho = omega_3 * int_0^pi cos^4 sin^3 = 2 pi^2 * 4/35
    rho = staggered_grid(16)
    assert sphere_weights(5, 16) @ np.cos(rho) ** 4 == pytest.approx(2 * math.pi**2 * 4 / 35, rel=1e-14)


def test_polar_derivatives_fourth_order():
    errs = []
    for N in (100, 200):
        rho = staggered_grid(N)
        d1, d2 = polar_derivatives(np.cos(3 * rho) + 0.5 * np.cos(rho))
        errs.append(max(np.abs(d1 + 3 * np.sin(3 * rho) + 0.5 * np.sin(rho)).max(),
                        np.abs(d2 + 9 * np.cos(3 * rho) + 0.5 * np.cos(rho)).max()))
    assert 14 < errs[0] / errs[1] < 18


# ---------------------------------------------------------------- profiles
def test_profile_validation():
    with pytest.raises(DomainError):
        RadialProfile(4, np.r_[np.ones(10), -1.0])
    with pytest.raises(DomainError):
        RadialProfile(9, np.ones(20))
    with pytest.raises(DomainError):
        RadialProfile(4, np.ones((10, 10)), FULL_SPHERE)
    with pytest.raises(DomainError):
        RadialProfile(3, np.ones((10, 9)), FULL_SPHERE)
    p = bump(4, 50)
    with pytest.raises(ValueError):
        p.r[0] = 2.0


def test_profile_json_round_trip():
    for p in (bump(6, 64), RadialProfile.full_sphere(lambda r, s: 1 + 0.1 * np.sin(r) * np.cos(s), 16, 32)):
        q = RadialProfile.from_json(p.to_json())
        assert q == p and q.r.dtype == float
    with pytest.raises(DomainError):
        RadialProfile.from_dict({"schema": "other", "n": 4, "grid": [3], "r": [1, 1, 1]})


def test_overflow_error():
    with pytest.raises(GeometryOverflowError):
        curvature_from_profile(RadialProfile(4, np.full(64, R_MAX + 1.0)))


# ---------------------------------------------------------------- spheres
@pytest.mark.parametrize("n", range(3, 9))
@pytest.mark.parametrize("r0", [0.5, 1.0, 2.0])
def test_geodesic_sphere_closed_forms(n, r0):
    p = RadialProfile(n, np.full(40, r0))
    cf = curvature_from_profile(p)
    np.testing.assert_allclose(cf.kappa, 1 / math.tanh(r0), rtol=1e-14)
    assert area(p) == pytest.approx(sphere_area_constant(n) * math.sinh(r0) ** (n - 1), rel=1e-13)
    assert total_sigma(p, 2) == pytest.approx(
        math.comb(n - 1, 2) / math.tanh(r0) ** 2 * area(p), rel=1e-13)
    assert q_value(p) == pytest.approx(sharp_constant(n), rel=1e-12)
    assert abs(main_inequality_margin(p)) < 1e-9 * max(1.0, area(p))
    assert max(abs(x) for x in auxiliary_inequality_margins(p)) < 1e-9 * max(1.0, area(p))


# ---------------------------------------------------------------- curvature oracles
def matrix_oracle(p):
    """Eigenvalues of g^-1 h from the graph metric and second fundamental form.

    g = lambda^2 (sigma + dphi dphi),  h = lambda'/(v lambda) g - lambda/v Hess phi,
    in coordinates (rho, angles) at a point where the S^{n-2} metric is the
    identity, so sigma = diag(1, sin^2, ..., sin^2).
    """
    n, r = p.n, p.r
    rp, rpp = polar_derivatives(r)
    lam, dlam = np.sinh(r), np.cosh(r)
    p1 = rp / lam
    p2 = rpp / lam - dlam * rp**2 / lam**2
    out = []
    for j, rho in enumerate(p.rho):
        s, c = math.sin(rho), math.cos(rho)
        sig = np.diag([1.0] + [s * s] * (n - 2))
        dphi = np.zeros(n - 1)
        dphi[0] = p1[j]
        hess = np.diag([p2[j]] + [s * c * p1[j]] * (n - 2))
        v = math.sqrt(1 + p1[j] ** 2)
        g = lam[j] ** 2 * (sig + np.outer(dphi, dphi))
        h = dlam[j] / (v * lam[j]) * g - lam[j] / v * hess
        out.append(scipy.linalg.eigh(h, g, eigvals_only=True))
    return np.array(out)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_curvatures_match_matrix_oracle(n):
    p = bump(n, 120, r0=0.8, eps=0.15, k=3)
    cf = curvature_from_profile(p)
    np.testing.assert_allclose(np.sort(cf.kappa, axis=1), matrix_oracle(p), rtol=0, atol=1e-10)


def hyperboloid_oracle(r_expr, rho_sym, rho_values, psi=0.3):
    """Principal curvatures of a surface of revolution in H^3 in the hyperboloid model.

    X = (cosh r, sinh r sin rho cos psi, sinh r sin rho sin psi, sinh r cos rho)
    with the Minkowski form diag(-1, 1, 1, 1); h_ij = -<X_ij, nu>.
    """
    ps = sp.Symbol("psi")
    r = r_expr
    X = sp.Matrix([sp.cosh(r), sp.sinh(r) * sp.sin(rho_sym) * sp.cos(ps),
                   sp.sinh(r) * sp.sin(rho_sym) * sp.sin(ps), sp.sinh(r) * sp.cos(rho_sym)])
    coords = (rho_sym, ps)
    first = [X.diff(c) for c in coords]
    second = [[X.diff(a).diff(b) for b in coords] for a in coords]
    radial = sp.Matrix([sp.sinh(r), sp.cosh(r) * sp.sin(rho_sym) * sp.cos(ps),
                        sp.cosh(r) * sp.sin(rho_sym) * sp.sin(ps), sp.cosh(r) * sp.cos(rho_sym)])
    f = sp.lambdify((rho_sym, ps), [X, first, second, radial], "numpy")
    eta = np.diag([-1.0, 1.0, 1.0, 1.0])
    out = []
    for rho in rho_values:
        Xv, d1, d2, radial = f(rho, psi)
        Xv = np.asarray(Xv, float).ravel()
        d1 = [np.asarray(a, float).ravel() for a in d1]
        d2 = [[np.asarray(a, float).ravel() for a in row] for row in d2]
        radial = np.asarray(radial, float).ravel()
        nu = scipy.linalg.null_space(np.array([Xv, d1[0], d1[1]]) @ eta)[:, 0]
        nu /= math.sqrt(nu @ eta @ nu)
        if nu @ eta @ radial < 0:
            nu = -nu
        g = np.array([[a @ eta @ b for b in d1] for a in d1])
        h = np.array([[-(d2[i][j] @ eta @ nu) for j in range(2)] for i in range(2)])
        out.append(scipy.linalg.eigh(h, g, eigvals_only=True))
    return np.array(out)


def test_curvatures_match_hyperboloid_model():
    rho = sp.Symbol("rho")
    N = 400
    p = RadialProfile.from_function(3, N, lambda x: 1.0 + 0.2 * np.cos(2 * x) + 0.05 * np.cos(3 * x))
    idx = np.arange(5, N - 5, 37)
    expected = hyperboloid_oracle(1 + sp.Rational(1, 5) * sp.cos(2 * rho) + sp.Rational(1, 20) * sp.cos(3 * rho),
                                  rho, p.rho[idx])
    got = np.sort(curvature_from_profile(p).kappa[idx], axis=1)
    np.testing.assert_allclose(got, expected, rtol=0, atol=1e-8)


def test_full_sphere_matches_axisymmetric():
    func = lambda rho: 1.0 + 0.15 * np.cos(2 * rho)  # noqa: E731
    axi = RadialProfile.from_function(3, 200, func)
    full = RadialProfile.full_sphere(lambda rho, psi: func(rho), 200, 64)
    ca, cf = curvature_from_profile(axi), curvature_from_profile(full)
    np.testing.assert_allclose(np.sort(cf.kappa[:, 7], axis=1), np.sort(ca.kappa, axis=1), atol=1e-9)
    for m in (0, 1, 2):
        assert cf.total_sigma(m) == pytest.approx(ca.total_sigma(m), rel=1e-10)


def test_full_sphere_tilted_bump_gauss_bonnet():
    # an off-axis bump is not axisymmetric in these coordinates
    def func(rho, psi):
        x = np.sin(rho) * np.cos(psi)
        return 1.0 + 0.2 * x + 0.1 * x * np.cos(rho)

    cf = curvature_from_profile(RadialProfile.full_sphere(func, 100, 200))
    assert cf.sigma2_excess == pytest.approx(4 * math.pi, abs=1e-5)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_sigma2_excess_consistent_with_sigma(n):
    cf = curvature_from_profile(bump(n, 200, eps=0.2))
    direct = cf.total_sigma(2) - math.comb(n - 1, 2) * cf.area
    assert cf.sigma2_excess == pytest.approx(direct, rel=1e-10)


def test_gauss_bonnet_n3():
    for eps, k in [(0.1, 2), (0.3, 1), (0.2, 5)]:
        cf = curvature_from_profile(bump(3, 400, eps=eps, k=k))
        assert abs(cf.sigma2_excess - 4 * math.pi) < 1e-6


# ---------------------------------------------------------------- inequalities and preconditions
def test_default_shape_is_two_convex():
    assert is_two_convex(build_profile(ShapeSpec(), 5, 400))


def test_main_inequality_positive_off_spheres():
    for n in (4, 5, 6):
        assert main_inequality_margin(bump(n, 200)) > 1e-6


def test_two_convexity_error_lists_nodes():
    p = bump(5, 100, eps=0.9, k=6)
    bad = two_convexity_violations(curvature_from_profile(p))
    assert bad.size > 0
    with pytest.raises(TwoConvexityError) as err:
        main_inequality_margin(p)
    assert list(err.value.nodes) == bad.tolist()
    assert str(bad[0]) in str(err.value)


def test_mean_convexity_error():
    p = bump(5, 100, eps=0.9, k=8)
    with pytest.raises(MeanConvexityError):
        auxiliary_inequality_margins(p)
