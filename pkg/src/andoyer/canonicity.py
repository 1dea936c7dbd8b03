"""Numerical verification that the Andoyer chart is canonical.

Four checks, all driven by central finite differences:

* ``coefficients`` -- virtual rotations of the body about the five frame
  axes give ``sum m_i v_i . dr_i = (L, G, Theta, 0, 0)`` against
  ``(dl, dg, dtheta, dchi, drho)``;
* ``oneform`` -- ``p . dq == L dl + G dg + Theta dtheta`` along random
  phase-space tangents of the Euler chart;
* ``symplectic`` -- the Jacobian ``J`` of ``(q, p) -> Andoyer`` satisfies
  ``J Omega J^T == Omega``;
* ``lagrange`` -- ``d r_i / d q_j == d rdot_i / d qdot_j`` for the Euler chart.

Every finite difference is repeated at ``h/2``; if the two estimates
disagree by more than the check tolerance the result is noise or
truncation dominated and :class:`StepTooSmall` is raised instead of a
verdict.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .body import angular_momentum, euler_momenta, omega_abs_from_euler, positions_abs, random_body, velocities
from .charts import (
    ANGLE_NAMES,
    AndoyerState,
    EulerChartState,
    andoyer_from_euler,
    attitude_from_angles,
    euler_attitude,
    frame_vectors,
    virtual_rotation_axis,
)
from .errors import ChartSingular, FixtureError, StepTooSmall

logger = logging.getLogger(__name__)

CHECK_NAMES = ("coefficients", "oneform", "symplectic", "lagrange")
DEFAULT_TOLERANCES = {"coefficients": 1e-6, "oneform": 1e-6, "symplectic": 1e-4, "lagrange": 1e-6}
DEFAULT_STEPS = {"coefficients": 1e-5, "oneform": 1e-5, "symplectic": 1e-6, "lagrange": 1e-5}
SINGULAR_MARGIN = 0.999
MAX_DRAWS_PER_TRIAL = 1000


def _wrap_diff(d):
    """Map angle differences into (-pi, pi]."""
    return d - 2.0 * math.pi * np.round(d / (2.0 * math.pi))


@dataclass(frozen=True)
class PhasePoint:
    """A phase-space point of the Euler chart with derived physical quantities."""

    euler: EulerChartState
    attitude: np.ndarray
    omega_abs: np.ndarray
    momentum: np.ndarray
    andoyer: AndoyerState

    @property
    def x(self):
        return np.concatenate([self.euler.angles, self.euler.momenta])


def make_phase_point(body, q):
    """Build a :class:`PhasePoint` from a velocity-form Euler state.

    Going through velocities keeps degenerate (e.g. collinear) bodies usable.
    """
    pq = euler_momenta(body, q)
    A = euler_attitude(q.angles)
    omega = omega_abs_from_euler(q.angles, q.rates)
    Gvec = angular_momentum(body, A, omega)
    return PhasePoint(pq, A, omega, Gvec, andoyer_from_euler(pq.angles, pq.momenta))


@dataclass(frozen=True)
class CoefficientSet:
    k_l: float
    k_g: float
    k_theta: float
    k_chi: float
    k_rho: float

    def as_array(self):
        return np.array([self.k_l, self.k_g, self.k_theta, self.k_chi, self.k_rho])


@dataclass
class CheckReport:
    check_name: str
    max_residual: float
    tolerance: float
    trials: int
    seed: int
    passed: bool
    details: list = field(default_factory=list)

    def to_dict(self):
        return {
            "check_name": self.check_name,
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "trials": int(self.trials),
            "seed": int(self.seed),
            "passed": bool(self.passed),
        }


def _report(name, residuals, tolerance, seed):
    residuals = [float(r) for r in residuals]
    worst = max(residuals) if residuals else 0.0
    return CheckReport(name, worst, float(tolerance), len(residuals), int(seed), bool(worst <= tolerance), residuals)


def _guard(name, estimate_h, estimate_h2, scale, tolerance):
    spread = float(np.max(np.abs(np.asarray(estimate_h) - np.asarray(estimate_h2)))) / scale
    if not math.isfinite(spread) or spread > tolerance:
        raise StepTooSmall(
            f"{name}: finite differences at h and h/2 disagree by {spread:.3e} (> {tolerance:.1e}); "
            "estimate is noise or truncation dominated",
            spread,
        )


def expected_coefficients(a):
    return np.array([a.L, a.G, a.Theta, 0.0, 0.0])


def _virtual_fd(body, angles, vdot, h):
    k = []
    for name in ANGLE_NAMES:
        plus = dict(angles)
        minus = dict(angles)
        plus[name] += h
        minus[name] -= h
        dr = (positions_abs(body, attitude_from_angles(**plus)) - positions_abs(body, attitude_from_angles(**minus))) / (2.0 * h)
        k.append(float(np.einsum("i,ij,ij->", body.masses, vdot, dr)))
    return np.array(k)


def virtual_coefficients_fd(body, point, h=1e-5, guard_tol=1e-6):
    """Coefficients of ``sum m_i v_i . dr_i`` in the five Andoyer angles.

    Positions are differentiated along each angle with the other four held
    fixed; the velocities stay at their physical values at ``point``.
    """
    if not 1e-8 <= h <= 1e-3:
        raise ValueError("h must lie in [1e-8, 1e-3]")
    a = point.andoyer
    frame_vectors(a)  # raises ChartSingular at node degeneracy
    angles = {"l": a.l, "chi": a.chi, "g": a.g, "rho": a.rho, "theta": a.theta}
    vdot = velocities(body, point.attitude, point.omega_abs)
    k_h = _virtual_fd(body, angles, vdot, h)
    k_h2 = _virtual_fd(body, angles, vdot, 0.5 * h)
    _guard("coefficients", k_h, k_h2, a.G, guard_tol)
    return CoefficientSet(*k_h)


def virtual_coefficients_analytic(body, point):
    """``k_v = G . axis(v)``: the closed form of each virtual-rotation coefficient."""
    a = point.andoyer
    return CoefficientSet(*(float(np.dot(point.momentum, virtual_rotation_axis(a, v))) for v in ANGLE_NAMES))


def coefficient_residual(body, point, h=1e-5, guard_tol=1e-6):
    """``max |k - (L, G, Theta, 0, 0)| / G`` for the finite-difference coefficients."""
    k = virtual_coefficients_fd(body, point, h, guard_tol).as_array()
    a = point.andoyer
    return float(np.max(np.abs(k - expected_coefficients(a)))) / a.G


def _chart_vector(chart, x):
    return chart(x[:3], x[3:]).as_array()


def _angle_rates(chart, x, d, h):
    lo = chart(x[:3] - h * d[:3], x[3:] - h * d[3:]).as_array()[:3]
    hi = chart(x[:3] + h * d[:3], x[3:] + h * d[3:]).as_array()[:3]
    return _wrap_diff(hi - lo) / (2.0 * h)


def oneform_residual(x, d, h=1e-5, chart=andoyer_from_euler, guard_tol=1e-6):
    """Residual of the one-form identity along the tangent ``d`` at ``x = (q, p)``.

    Returns ``(residual, lhs, angle_rates)`` where ``lhs = p . dq`` and
    ``angle_rates`` are the derivatives of ``(l, g, theta)`` along ``d``.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    a = chart(x[:3], x[3:])
    momenta = np.array([a.L, a.G, a.Theta])
    lhs = float(x[3:] @ d[:3])
    rates = _angle_rates(chart, x, d, h)
    rhs_h = float(momenta @ rates)
    rhs_h2 = float(momenta @ _angle_rates(chart, x, d, 0.5 * h))
    scale = 1.0 + abs(lhs)
    _guard("oneform", rhs_h, rhs_h2, scale, guard_tol)
    return abs(lhs - rhs_h) / scale, lhs, rates


def oneform_check(body, point, directions=100, h=1e-5, seed=0, tolerance=1e-6, chart=andoyer_from_euler):
    """Compare ``p . dq`` with ``L dl + G dg + Theta dtheta`` along random tangents.

    The residual per tangent is ``|lhs - rhs| / (1 + |lhs|)``. Momentum
    components of the tangents are scaled by ``|p|`` so both halves of the
    phase point are perturbed comparably.
    """
    rng = np.random.default_rng(seed)
    x = point.x
    pscale = max(1.0, float(np.linalg.norm(x[3:]))) / math.sqrt(3.0)
    residuals = []
    for _ in range(directions):
        d = rng.normal(size=6)
        d[3:] *= pscale
        residuals.append(oneform_residual(x, d, h, chart, tolerance)[0])
    return _report("oneform", residuals, tolerance, seed)


SYMPLECTIC_FORM = np.block([[np.zeros((3, 3)), np.eye(3)], [-np.eye(3), np.zeros((3, 3))]])


def fd_jacobian(func, x, h, angle_slots=(0, 1, 2)):
    """Central-difference Jacobian of ``func: R^n -> R^m``; listed output slots are angles."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[k] += h
        xm[k] -= h
        diff = np.asarray(func(xp)) - np.asarray(func(xm))
        for s in angle_slots:
            diff[s] = _wrap_diff(diff[s])
        # divide by the step actually taken, not the nominal 2h
        cols.append(diff / (xp[k] - xm[k]))
    return np.column_stack(cols)


def symplectic_defect(func, x, h, angle_slots=(0, 1, 2)):
    """``J Omega J^T - Omega`` for the finite-difference Jacobian of ``func`` at ``x``."""
    J = fd_jacobian(func, x, h, angle_slots)
    return J @ SYMPLECTIC_FORM @ J.T - SYMPLECTIC_FORM


def symplectic_jacobian_check(body, point, h=1e-6, seed=0, tolerance=1e-4, chart=andoyer_from_euler):
    """Max entry of ``|J Omega J^T - Omega|`` for ``(q, p) -> (l, g, theta, L, G, Theta)``."""
    def func(y):
        return _chart_vector(chart, y)

    x = point.x
    defect_h = symplectic_defect(func, x, h)
    defect_h2 = symplectic_defect(func, x, 0.5 * h)
    _guard("symplectic", defect_h, defect_h2, 1.0, tolerance)
    return _report("symplectic", [float(np.max(np.abs(defect_h)))], tolerance, seed)


def _lagrange_sides(body, q, h):
    angles, rates = q.angles, q.rates
    A = euler_attitude(angles)
    left, right = [], []
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        left.append((positions_abs(body, euler_attitude(angles + e)) - positions_abs(body, euler_attitude(angles - e))) / (2.0 * h))
        v_hi = velocities(body, A, omega_abs_from_euler(angles, rates + e))
        v_lo = velocities(body, A, omega_abs_from_euler(angles, rates - e))
        right.append((v_hi - v_lo) / (2.0 * h))
    return np.array(left), np.array(right)


def lagrange_relation_check(body, q, h=1e-5, seed=0, tolerance=1e-6):
    """Check ``d r_i/d q_j == d rdot_i/d qdot_j`` point mass by point mass."""
    left, right = _lagrange_sides(body, q, h)
    left2, _ = _lagrange_sides(body, q, 0.5 * h)
    _guard("lagrange", left, left2, 1.0 + float(np.max(np.abs(left))), tolerance)
    err = np.linalg.norm(left - right, axis=2) / (1.0 + np.linalg.norm(left, axis=2))
    return _report("lagrange", [float(np.max(err))], tolerance, seed)


def is_near_singular(a, margin=None):
    margin = SINGULAR_MARGIN if margin is None else margin
    return abs(a.L) > margin * a.G or abs(a.Theta) > margin * a.G


def draw_point(body, rng, margin=None, max_draws=MAX_DRAWS_PER_TRIAL):
    """Random velocity-form Euler state away from both chart singularities.

    Returns ``(q, point, rejected)``.
    """
    for rejected in range(max_draws):
        angles = np.array([rng.uniform(0.0, 2.0 * math.pi), rng.uniform(0.3, math.pi - 0.3), rng.uniform(0.0, 2.0 * math.pi)])
        q = EulerChartState(angles, rates=rng.normal(size=3))
        try:
            point = make_phase_point(body, q)
        except ChartSingular:
            continue
        if not is_near_singular(point.andoyer, margin):
            return q, point, rejected
    raise FixtureError(f"no nonsingular phase point in {max_draws} draws")


def _run_trial(args):
    seed, index, body, n_masses, scale, tolerances, directions, chart, checks = args
    rng = np.random.default_rng([seed, index])
    body_seed = int(rng.integers(2**32))
    if body is None:
        body = random_body(body_seed, n_masses, scale)
    q, point, rejected = draw_point(body, rng)
    sub_seed = int(rng.integers(2**32))
    out = {"rejected": rejected}
    runners = {
        "coefficients": lambda: coefficient_residual(body, point, DEFAULT_STEPS["coefficients"], tolerances["coefficients"]),
        "oneform": lambda: oneform_check(body, point, directions, DEFAULT_STEPS["oneform"], sub_seed,
                                         tolerances["oneform"], chart).max_residual,
        "symplectic": lambda: symplectic_jacobian_check(body, point, DEFAULT_STEPS["symplectic"], sub_seed,
                                                        tolerances["symplectic"], chart).max_residual,
        "lagrange": lambda: lagrange_relation_check(body, q, DEFAULT_STEPS["lagrange"], sub_seed,
                                                    tolerances["lagrange"]).max_residual,
    }
    for name in checks:
        try:
            out[name] = runners[name]()
        except StepTooSmall as exc:
            # the residual cannot be certified below the h vs h/2 spread
            logger.warning("trial %d: %s", index, exc)
            out[name] = exc.spread
    return out


def run_suite(seed=0, trials=100, tolerances=None, n_masses=5, scale=1.0, body=None, directions=100,
              workers=1, chart=andoyer_from_euler, checks=CHECK_NAMES):
    """Run the four checks over ``trials`` random fixtures; one report per check.

    Each trial draws from its own stream ``default_rng([seed, trial])``, so
    the reports do not depend on ``workers``. A fixed ``body`` replaces the
    random bodies. ``chart`` must be picklable when ``workers > 1``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ValueError(f"unknown tolerance names: {sorted(unknown)}")
        tol.update(tolerances)
    unknown = set(checks) - set(CHECK_NAMES)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    checks = tuple(c for c in CHECK_NAMES if c in checks)
    jobs = [(seed, i, body, n_masses, scale, tol, directions, chart, checks) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial, jobs))
    else:
        results = [_run_trial(job) for job in jobs]

    rejected = sum(r["rejected"] for r in results)
    logger.info("run_suite: %d singular draws resampled over %d trials", rejected, trials)
    if rejected > 9 * trials:
        raise FixtureError(f"{rejected} of {rejected + trials} draws were singular; chart convention is suspect")
    return [_report(name, [r[name] for r in results], tol[name], seed) for name in checks]
