"""Inverse curvature flow ``d_t X = F nu`` with ``F = (n-2)/(2(n-1)) sigma_1/sigma_2``.

In graph form the radial function obeys ``d_t r = F v``.  The right-hand side
is evaluated through :func:`hypflow.hypgeom.curvature_from_profile` and
advanced with classical RK4.  The flow is parabolic in ``r``; its diffusivity
is ``-sum_i dF/dkappa_i / lambda^2``, which decays like ``e^(-2t/(n-1))`` as
the surface expands, so the step limit

    dt = c_cfl * h^2 / D,   D = max_nodes c ((n-2) s1^2 - (n-1) s2) / (s2^2 lambda^2)

(``h`` the smallest grid spacing on the unit sphere) grows along a run.
Rejected steps (lost two-convexity, non-positive or non-finite ``r``) are
retried at half size.
"""

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DomainError,
    FitUnreliable,
    FlowBreakdown,
    GeometryOverflowError,
    PreconditionError,
    StepRejected,
    TwoConvexityError,
)
from .hypgeom import (
    AXISYMMETRIC,
    FULL_SPHERE,
    R_MAX,
    RadialProfile,
    axisymmetric_core,
    auxiliary_inequality_margins,
    curvature_from_profile,
    main_inequality_margin,
    q_value,
    staggered_grid,
    two_convexity_violations,
)
from .report import MonitorSeries
from .shapes import PRNG_ALGORITHM, ShapeSpec, build_profile

CONFIG_SCHEMA_VERSION = 1
CHECKPOINT_SCHEMA = "hypflow.checkpoint"


def speed_prefactor(n):
    return (n - 2) / (2.0 * (n - 1))


# ---------------------------------------------------------------- state / config


@dataclass(frozen=True)
class FlowState:
    t: float
    profile: RadialProfile

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0):
            raise DomainError(f"flow time must be finite and >= 0, got {self.t}")

    def to_dict(self):
        return {"schema": CHECKPOINT_SCHEMA, "version": 1, "t": self.t, "profile": self.profile.to_dict()}

    @classmethod
    def from_dict(cls, doc):
        if doc.get("schema") != CHECKPOINT_SCHEMA:
            raise DomainError(f"not a checkpoint document: {doc.get('schema')!r}")
        return cls(float(doc["t"]), RadialProfile.from_dict(doc["profile"]))


def save_checkpoint(state, path):
    with open(path, "w") as fh:
        json.dump(state.to_dict(), fh)


def load_checkpoint(path):
    with open(path) as fh:
        return FlowState.from_dict(json.load(fh))


@dataclass(frozen=True)
class FlowConfig:
    """Run parameters.  ``umbilic_tol = 0`` disables the umbilicity stop."""

    n: int = 5
    N: int = 400
    c_cfl: float = 0.1
    t_max: float = 10.0
    sample_interval: float = 0.01
    umbilic_tol: float = 0.0
    sigma2_floor: float = 1e-12
    shape: ShapeSpec = field(default_factory=ShapeSpec)
    max_halvings: int = 10
    representation: str = AXISYMMETRIC

    def __post_init__(self):
        if not 0 < self.c_cfl <= 0.5:
            raise DomainError(f"c_cfl must lie in (0, 0.5], got {self.c_cfl}")
        if not self.t_max > 0:
            raise DomainError(f"t_max must be positive, got {self.t_max}")
        if self.N < 50:
            raise DomainError(f"N must be >= 50, got {self.N}")
        if not self.sample_interval > 0:
            raise DomainError(f"sample_interval must be positive, got {self.sample_interval}")
        if self.umbilic_tol < 0 or self.sigma2_floor < 0 or self.max_halvings < 0:
            raise DomainError("umbilic_tol, sigma2_floor and max_halvings must be nonnegative")
        if self.representation not in (AXISYMMETRIC, FULL_SPHERE):
            raise DomainError(f"unknown representation {self.representation!r}")

    def to_dict(self):
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "n": self.n,
            "N": self.N,
            "c_cfl": self.c_cfl,
            "t_max": self.t_max,
            "sample_interval": self.sample_interval,
            "umbilic_tol": self.umbilic_tol,
            "sigma2_floor": self.sigma2_floor,
            "max_halvings": self.max_halvings,
            "representation": self.representation,
            "shape": self.shape.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc):
        doc = dict(doc)
        version = doc.pop("schema_version", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            raise DomainError(f"unsupported config schema_version {version}")
        shape = ShapeSpec.from_dict(doc.pop("shape", {}))
        allowed = {f for f in cls.__dataclass_fields__ if f != "shape"}
        extra = set(doc) - allowed
        if extra:
            raise DomainError(f"unknown config fields {sorted(extra)}")
        return cls(shape=shape, **doc)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def initial_state(self):
        return FlowState(0.0, build_profile(self.shape, self.n, self.N, self.representation))


# ---------------------------------------------------------------- stepping


def speed(cf, sigma2_floor=1e-12):
    """Normal speed ``(n-2)/(2(n-1)) sigma_1 / sigma_2`` at every node.

    Raises
    ------
    TwoConvexityError
        Where ``sigma_2 <= sigma2_floor`` or ``sigma_1 <= 0``.
    """
    s = cf.sigma
    _check_cone(s[..., 1], s[..., 2], sigma2_floor)
    return speed_prefactor(cf.n) * s[..., 1] / s[..., 2]


def diffusivity(cf):
    """Largest parabolic coefficient of ``d_t r = F v`` over the grid."""
    s = cf.sigma
    s1, s2 = s[..., 1], s[..., 2]
    n = cf.n
    d = speed_prefactor(n) * ((n - 2) * s1 * s1 - (n - 1) * s2) / (s2 * s2 * cf.lam * cf.lam)
    return float(np.max(d))


def grid_spacing(profile):
    h = np.pi / profile.N
    if profile.representation == FULL_SPHERE:
        h_psi = 2.0 * np.pi / profile.r.shape[1]
        return min(h, math.sin(staggered_grid(profile.N)[0]) * h_psi)
    return h


def stable_step(cf, profile, c_cfl):
    """Parabolic step limit ``c_cfl h^2 / D``."""
    return c_cfl * grid_spacing(profile) ** 2 / diffusivity(cf)


def _check_cone(s1, s2, floor):
    if not (s2.min() > floor and s1.min() > 0):
        bad = np.flatnonzero(~((s2 > floor) & (s1 > 0)))
        raise TwoConvexityError("two-convexity lost", bad)


def _velocity(r, n, floor):
    """``F v`` for an axisymmetric radial array, skipping the full curvature field."""
    if not (r.min() > 0 and r.max() < R_MAX):
        raise DomainError(f"radial values left (0, {R_MAX}): min {r.min():.3g}, max {r.max():.3g}")
    _, _, _, v, d_mer, d_par = axisymmetric_core(r)
    k_mer, k_par = 1.0 + d_mer, 1.0 + d_par
    m = n - 2
    s1 = k_mer + m * k_par
    s2 = k_par * (m * k_mer + 0.5 * m * (m - 1) * k_par)
    _check_cone(s1, s2, floor)
    return speed_prefactor(n) * s1 / s2 * v


def _rk4(state, dt, floor):
    p = state.profile
    r = p.r
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            if p.representation == AXISYMMETRIC:
                def vel(x):
                    return _velocity(x, p.n, floor)
            else:
                def vel(x):
                    cf = curvature_from_profile(p.with_r(x))
                    return speed(cf, floor) * cf.v
            k1 = vel(r)
            k2 = vel(r + 0.5 * dt * k1)
            k3 = vel(r + 0.5 * dt * k2)
            k4 = vel(r + dt * k3)
            new = p.with_r(r + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
            cf = curvature_from_profile(new)
            speed(cf, floor)
    except (DomainError, PreconditionError, GeometryOverflowError, FloatingPointError) as exc:
        raise StepRejected(f"step t={state.t:.6g}, dt={dt:.3g} rejected: {exc}") from exc
    return FlowState(state.t + dt, new), cf


def step(state, dt, sigma2_floor=1e-12):
    """One classical RK4 step of ``d_t r = F v``.

    Raises
    ------
    StepRejected
        If any stage or the result leaves the admissible set.
    """
    if dt < 0 or not math.isfinite(dt):
        raise DomainError(f"dt must be finite and >= 0, got {dt}")
    if dt == 0:
        return state
    return _rk4(state, dt, sigma2_floor)[0]


# ---------------------------------------------------------------- monitors


def monitor_sample(state, cf, F):
    """All monitored quantities of one state, keyed by report column."""
    n = cf.n
    s = cf.sigma
    A = cf.area
    row = {"t": state.t, "area": A}
    for m in (1, 2, 3):
        row[f"int_sigma{m}"] = cf.integrate(s[..., m]) if m <= n - 1 else 0.0
    for m in (0, 1, 2, 3):
        row[f"int_F_sigma{m}"] = cf.integrate(F * s[..., m]) if m <= n - 1 else 0.0
    row["Q"] = q_value(cf)
    row["umbilic_deviation"] = float(np.max(np.abs(cf.delta)))
    row["main_margin"] = main_inequality_margin(cf)
    aux = auxiliary_inequality_margins(cf)
    row["aux_margin_support"] = aux.support
    row["aux_margin_area_powers"] = aux.area_powers
    row["r_min"] = float(state.profile.r.min())
    row["r_max"] = float(state.profile.r.max())
    return row


def _metadata(config, state):
    meta = {
        "config_hash": config.config_hash(),
        "n": config.n,
        "N": config.N,
        "t0": state.t,
        "integrator": "rk4",
        "prng": PRNG_ALGORITHM,
        "config": config.to_dict(),
    }
    if config.shape.kind == "sphere" and state.t == 0.0:
        meta["sphere_r0"] = config.shape.r0
    return meta


def run(config, state=None, callback=None):
    """Integrate the flow from the configured shape (or ``state``) to ``t_max``.

    Monitors are recorded at ``t0 + k * sample_interval`` and at ``t_max``;
    steps are shortened to land on those times.  ``callback(state, cf)`` is
    called at every sample.  The final state is attached to the returned
    series as ``final_state``.

    Raises
    ------
    TwoConvexityError
        If the initial surface is not two-convex.
    FlowBreakdown
        After ``max_halvings`` consecutive rejections; carries ``last_state``.
    """
    state = state or config.initial_state()
    if state.profile.n != config.n:
        raise DomainError(f"state has n = {state.profile.n}, config has n = {config.n}")
    cf = curvature_from_profile(state.profile)
    bad = two_convexity_violations(cf)
    if bad.size:
        raise TwoConvexityError("initial surface is not two-convex", bad)
    F = speed(cf, config.sigma2_floor)

    series = MonitorSeries(_metadata(config, state))
    t0, t_end, interval = state.t, config.t_max, config.sample_interval
    if not t_end > t0:
        raise DomainError(f"t_max = {t_end} does not exceed the start time {t0}")
    eps = 1e-12 * max(1.0, t_end)

    def record():
        series.append(**monitor_sample(state, cf, F))
        if callback is not None:
            callback(state, cf)

    record()
    k = 1
    target = min(t0 + k * interval, t_end)
    while state.t < t_end - eps:
        dt = min(stable_step(cf, state.profile, config.c_cfl), target - state.t)
        for _ in range(config.max_halvings + 1):
            try:
                new, new_cf = _rk4(state, dt, config.sigma2_floor)
                break
            except StepRejected:
                dt *= 0.5
        else:
            raise FlowBreakdown(
                f"{config.max_halvings} consecutive step halvings failed at t = {state.t:.6g}", last_state=state
            )
        if abs(new.t - target) <= eps:
            new = FlowState(target, new.profile)
        state, cf = new, new_cf
        F = speed(cf, config.sigma2_floor)
        if state.t == target:
            record()
            k += 1
            target = min(t0 + k * interval, t_end)
            if config.umbilic_tol > 0 and series["umbilic_deviation"][-1] < config.umbilic_tol:
                break
    series.final_state = state
    return series


def run_many(configs, max_workers=None):
    """Run independent configurations in worker processes; results keep input order."""
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run, configs))


# ---------------------------------------------------------------- diagnostics


class EvolutionResidual(NamedTuple):
    t: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    absolute: np.ndarray
    relative: np.ndarray


_SIGMA_COLUMN = {0: "area", 1: "int_sigma1", 2: "int_sigma2", 3: "int_sigma3"}


def evolution_identity_residual(series, m):
    """Residual of ``d/dt int sigma_m = (m+1) int F sigma_{m+1} + (n-m) int F sigma_{m-1}``.

    The left side is the second-order finite difference of the recorded
    ``int sigma_m`` at interior samples; the right side uses the
    speed-weighted integrals recorded at the same samples.  ``sigma_{-1}``
    and ``sigma_k`` for ``k >= n`` vanish.
    """
    n = series.n
    m = int(m)
    if not 0 <= m <= n - 1:
        raise DomainError(f"m must lie in [0, {n - 1}], got {m}")
    if m > 3 or (m + 1 <= n - 1 and m + 1 > 3):
        raise DomainError(f"series does not record the integrals needed for m = {m}")
    if len(series) < 3:
        raise DomainError("need at least three samples for a central difference")
    t = series.t
    lhs = np.gradient(series[_SIGMA_COLUMN[m]], t)[1:-1]
    rhs = np.zeros(len(series))
    if m + 1 <= n - 1:
        rhs += (m + 1) * series[f"int_F_sigma{m + 1}"]
    if m >= 1:
        rhs += (n - m) * series[f"int_F_sigma{m - 1}"]
    rhs = rhs[1:-1]
    diff = lhs - rhs
    return EvolutionResidual(t[1:-1], lhs, rhs, np.abs(diff), np.abs(diff) / np.abs(rhs))


class DecayFit(NamedTuple):
    slope: float
    intercept: float
    t_min: float
    t_max: float
    samples: int


def umbilic_decay_fit(series, t_min=None, t_max=None, noise_floor=1e-13):
    """Least-squares slope of ``log max|kappa_i - 1|`` against ``t``.

    The default window is the last half of the series.

    Raises
    ------
    DomainError
        If the series spans less than ``3 (n - 1)`` in time or the window holds
        fewer than three samples.
    FitUnreliable
        If a deviation in the window is at or below ``noise_floor``.
    """
    n = series.n
    t = series.t
    if t[-1] - t[0] < 3 * (n - 1):
        raise DomainError(f"series spans {t[-1] - t[0]:.3g} < 3(n-1) = {3 * (n - 1)}")
    lo = t[0] + 0.5 * (t[-1] - t[0]) if t_min is None else t_min
    hi = t[-1] if t_max is None else t_max
    sel = (t >= lo - 1e-12) & (t <= hi + 1e-12)
    if sel.sum() < 3:
        raise DomainError("fewer than three samples in the fit window")
    dev = series["umbilic_deviation"][sel]
    if np.any(dev <= noise_floor):
        raise FitUnreliable(f"umbilic deviation reaches {dev.min():.3g}, at or below noise")
    slope, intercept = np.polyfit(t[sel], np.log(dev), 1)
    return DecayFit(float(slope), float(intercept), float(t[sel][0]), float(t[sel][-1]), int(sel.sum()))


def sphere_radius_closed_form(r0, n, t):
    """Radius of a geodesic sphere under the flow: ``sinh r(t) = sinh(r0) e^(t/(n-1))``."""
    return np.arcsinh(np.sinh(r0) * np.exp(np.asarray(t, dtype=float) / (n - 1)))


def sphere_ode_oracle(r0, n, t):
    """Integrate ``r' = tanh(r) / (n-1)`` from ``r(0) = r0`` with DOP853 at tolerance 1e-12.

    ``t`` may be a scalar or an increasing array of nonnegative times.
    """
    if not r0 > 0:
        raise DomainError(f"r0 must be positive, got {r0}")
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.all(ts == 0):
        out = np.full(ts.shape, float(r0))
    else:
        sol = solve_ivp(
            lambda _, r: np.tanh(r) / (n - 1),
            (0.0, float(ts.max())),
            [float(r0)],
            method="DOP853",
            t_eval=ts,
            rtol=1e-12,
            atol=1e-12,
        )
        out = sol.y[0]
    return float(out[0]) if np.ndim(t) == 0 else out


__all__ = [
    "FlowConfig",
    "FlowState",
    "run",
    "run_many",
    "step",
    "speed",
    "evolution_identity_residual",
    "umbilic_decay_fit",
    "sphere_ode_oracle",
    "sphere_radius_closed_form",
]
