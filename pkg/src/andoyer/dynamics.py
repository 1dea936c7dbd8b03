"""Torque-free rigid-body rotation in Andoyer variables.

The inertia tensor is a general symmetric positive-definite matrix in the
body frame; it need not be diagonal. The Hamiltonian is

    H = 1/2 M . I^-1 M,   M = (S sin l, S cos l, L),   S = sqrt(G^2 - L^2),

which depends on ``l, L, G`` only, so ``g`` is the only other moving
variable and ``G, Theta, theta`` are constants of motion.
"""
import math
from dataclasses import dataclass

import numpy as np

from .body import InertiaTensor
from .charts import AndoyerState, momentum_vector_body
from .errors import SingularBandReached, SingularInertia

MAX_CONDITION = 1e12
BAND = 0.999


@dataclass(frozen=True)
class HamiltonianSpec:
    inertia: InertiaTensor

    def __post_init__(self):
        I = self.inertia.matrix if isinstance(self.inertia, InertiaTensor) else InertiaTensor(self.inertia).matrix
        lam = np.linalg.eigvalsh(I)
        if lam[0] <= 0.0 or lam[-1] / lam[0] > MAX_CONDITION:
            raise SingularInertia(f"inertia tensor is singular or ill-conditioned (eigenvalues {lam})")
        if not isinstance(self.inertia, InertiaTensor):
            object.__setattr__(self, "inertia", InertiaTensor(I))
        inv = np.linalg.inv(I)
        inv = 0.5 * (inv + inv.T)
        inv.setflags(write=False)
        object.__setattr__(self, "inverse", inv)

    @classmethod
    def from_matrix(cls, matrix):
        return cls(InertiaTensor(matrix))


@dataclass
class AndoyerTrajectory:
    """Samples of a trajectory; row ``k`` of every array belongs to time ``t[k]``.

    ``states`` columns are ``l, g, theta, L, G, Theta``.
    """

    t: np.ndarray
    states: np.ndarray
    M_body: np.ndarray
    H: np.ndarray

    def __len__(self):
        return self.t.size

    def state(self, k):
        return AndoyerState.from_array(self.states[k])


def _omega(spec, M):
    return spec.inverse @ M


def hamiltonian(spec, a):
    M = momentum_vector_body(a)
    return 0.5 * float(M @ spec.inverse @ M)


def _partials(spec, l, L, G):
    """``dH/dl, dH/dL, dH/dG`` in closed form."""
    S = math.sqrt(G * G - L * L)
    sl, cl = math.sin(l), math.cos(l)
    w = spec.inverse @ np.array([S * sl, S * cl, L])
    dH_dl = S * (w[0] * cl - w[1] * sl)
    dH_dL = -(L / S) * (w[0] * sl + w[1] * cl) + w[2]
    dH_dG = (G / S) * (w[0] * sl + w[1] * cl)
    return dH_dl, dH_dL, dH_dG


def hamilton_rhs(spec, a):
    """Rates ``(ldot, gdot, thetadot, Ldot, Gdot, Thetadot)`` from Hamilton's equations."""
    dH_dl, dH_dL, dH_dG = _partials(spec, a.l, a.L, a.G)
    return np.array([dH_dL, dH_dG, 0.0, -dH_dl, 0.0, 0.0])


def _reduced_rhs(spec, y, G):
    l, _, L = y
    dH_dl, dH_dL, dH_dG = _partials(spec, l, L, G)
    return np.array([dH_dL, dH_dG, -dH_dl])


def _rk4_step(spec, y, G, dt):
    k1 = _reduced_rhs(spec, y, G)
    k2 = _reduced_rhs(spec, y + 0.5 * dt * k1, G)
    k3 = _reduced_rhs(spec, y + 0.5 * dt * k2, G)
    k4 = _reduced_rhs(spec, y + dt * k3, G)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _midpoint_step(spec, y, G, dt, tol=1e-14, max_iter=100):
    z = y + dt * _reduced_rhs(spec, y, G)
    for _ in range(max_iter):
        z_new = y + dt * _reduced_rhs(spec, 0.5 * (y + z), G)
        if np.max(np.abs(z_new - z)) <= tol * (1.0 + np.max(np.abs(z_new))):
            return z_new
        z = z_new
    return z


_STEPPERS = {"rk4": _rk4_step, "midpoint": _midpoint_step}


def integrate(spec, a0, t_end, dt, method="rk4"):
    """Fixed-step integration of the Andoyer flow with a sample at every step.

    ``G``, ``Theta`` and ``theta`` are copied from ``a0`` unchanged. Raises
    :class:`SingularBandReached` (partial trajectory attached) if ``|L|``
    exceeds ``0.999 G``.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    if t_end < 0.0:
        raise ValueError("t_end must be non-negative")
    try:
        step = _STEPPERS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(_STEPPERS)}") from None
    if abs(a0.L) > BAND * a0.G or abs(a0.Theta) >= a0.G:
        raise SingularBandReached("initial state is inside the singular band", None)

    G, Theta, theta = a0.G, a0.Theta, a0.theta
    n = int(round(t_end / dt))
    t = np.arange(n + 1) * dt
    states = np.empty((n + 1, 6))
    M = np.empty((n + 1, 3))
    H = np.empty(n + 1)
    y = np.array([a0.l, a0.g, a0.L])

    def record(k):
        states[k] = (y[0], y[1], theta, y[2], G, Theta)
        a = AndoyerState(y[0], y[1], theta, y[2], G, Theta)
        M[k] = momentum_vector_body(a)
        H[k] = 0.5 * float(M[k] @ spec.inverse @ M[k])

    record(0)
    for k in range(1, n + 1):
        y = step(spec, y, G, dt)
        if abs(y[2]) > BAND * G:
            partial = AndoyerTrajectory(t[:k], states[:k], M[:k], H[:k])
            raise SingularBandReached(f"|L| entered the singular band at t={t[k]!r}", partial)
        record(k)
    return AndoyerTrajectory(t, states, M, H)


def euler_oracle(spec, M0, t_end, dt):
    """RK4 solution of ``dM/dt = M x I^-1 M`` in the body frame.

    Returns ``(t, M)`` arrays. Independent of the Andoyer chart.
    """
    M0 = np.asarray(M0, dtype=float)
    if not np.linalg.norm(M0) > 0.0:
        raise ValueError("initial angular momentum must be nonzero")
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    K = spec.inverse

    def f(M):
        return np.cross(M, K @ M)

    n = int(round(t_end / dt))
    out = np.empty((n + 1, 3))
    out[0] = M = M0
    for k in range(1, n + 1):
        k1 = f(M)
        k2 = f(M + 0.5 * dt * k1)
        k3 = f(M + 0.5 * dt * k2)
        k4 = f(M + dt * k3)
        M = M + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k] = M
    return np.arange(n + 1) * dt, out
