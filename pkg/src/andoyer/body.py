"""Rigid body as a finite set of point masses.

Angular momentum and kinetic energy are evaluated as explicit sums over
the points, never through an inertia tensor; the tensor is provided
separately for the dynamics layer and for cross-checks.
"""
import json
import math
from dataclasses import dataclass

import numpy as np

from .charts import euler_attitude, euler_kinematic_matrix, EulerChartState
from .errors import FixtureError


@dataclass(frozen=True)
class PointMassBody:
    """Masses ``m_i > 0`` at body-frame positions ``b_i``."""

    masses: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        m = np.array(self.masses, dtype=float).reshape(-1)
        b = np.array(self.positions, dtype=float)
        if m.size == 0:
            raise ValueError("a body needs at least one point mass")
        if b.shape != (m.size, 3):
            raise ValueError(f"positions must have shape ({m.size}, 3), got {b.shape}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(b))):
            raise ValueError("masses and positions must be finite")
        if np.any(m <= 0.0):
            raise ValueError("masses must be strictly positive")
        m.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "positions", b)

    def __len__(self):
        return self.masses.size

    @property
    def nondegenerate(self):
        """True when the inertia tensor is positive definite."""
        lam = np.linalg.eigvalsh(inertia_tensor(self))
        return bool(lam[0] > 1e-12 * max(1.0, lam[-1]))

    def scaled(self, s):
        """Same geometry with every mass multiplied by ``s``."""
        return PointMassBody(self.masses * s, self.positions)

    def rotated(self, R):
        """Body whose mass distribution is turned by the active rotation ``R``."""
        return PointMassBody(self.masses, self.positions @ np.asarray(R).T)

    @classmethod
    def from_inertia(cls, inertia, mass=1.0):
        """Six point masses (three symmetric pairs) realizing ``inertia`` exactly."""
        I = np.asarray(inertia, dtype=float)
        lam, V = np.linalg.eigh(0.5 * (I + I.T))
        # pair of masses m at +-a_k v_k contributes 2 m a_k^2 to the other two moments
        s = 0.5 * (lam.sum() - 2.0 * lam)
        if np.any(s < -1e-9 * lam.sum()):
            raise ValueError("principal moments violate the triangle inequality")
        a = np.sqrt(np.clip(s, 0.0, None) / (2.0 * mass))
        pts = []
        for k in range(3):
            pts.append(a[k] * V[:, k])
            pts.append(-a[k] * V[:, k])
        return cls(np.full(6, mass), np.array(pts))


@dataclass(frozen=True)
class InertiaTensor:
    """Symmetric body-frame inertia matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        I = np.array(self.matrix, dtype=float)
        if I.shape != (3, 3):
            raise ValueError("inertia tensor must be 3x3")
        if np.max(np.abs(I - I.T)) > 1e-12 * max(1.0, np.max(np.abs(I))):
            raise ValueError("inertia tensor must be symmetric")
        lam = np.linalg.eigvalsh(I)
        tol = 1e-9 * max(1.0, float(np.sum(np.abs(lam))))
        for k in range(3):
            if lam[k] > lam[(k + 1) % 3] + lam[(k + 2) % 3] + tol:
                raise ValueError("principal moments violate the triangle inequality")
        I.setflags(write=False)
        object.__setattr__(self, "matrix", I)

    @property
    def principal_moments(self):
        return np.linalg.eigvalsh(self.matrix)


def positions_abs(body, A):
    """Absolute positions ``r_i = A^T b_i``."""
    return body.positions @ np.asarray(A)


def velocities(body, A, omega_abs):
    """Point velocities ``omega x r_i`` of the rigid motion."""
    return np.cross(np.asarray(omega_abs, dtype=float), positions_abs(body, A))


def angular_momentum(body, A, omega_abs):
    r = positions_abs(body, A)
    v = np.cross(np.asarray(omega_abs, dtype=float), r)
    return np.einsum("i,ij->j", body.masses, np.cross(r, v))


def kinetic_energy(body, A, omega_abs):
    v = velocities(body, A, omega_abs)
    return 0.5 * float(np.einsum("i,ij,ij->", body.masses, v, v))


def inertia_tensor(body):
    """``sum m_i (|b_i|^2 Id - b_i b_i^T)`` in the body frame."""
    b = body.positions
    m = body.masses
    r2 = np.einsum("ij,ij->i", b, b)
    return np.eye(3) * float(m @ r2) - np.einsum("i,ij,ik->jk", m, b, b)


def euler_mass_matrix(body, angles):
    """``B^T I B`` so that kinetic energy is ``qdot^T M qdot / 2``."""
    B = euler_kinematic_matrix(angles)
    return B.T @ inertia_tensor(body) @ B


def euler_momenta(body, q):
    """Momenta conjugate to the Euler angles, ``p = dT/dqdot``."""
    if q.form != "velocity":
        raise ValueError("euler_momenta needs the velocity form")
    p = euler_mass_matrix(body, q.angles) @ q.rates
    return EulerChartState(q.angles, momenta=p)


def euler_velocities(body, q):
    """Inverse of :func:`euler_momenta`; needs a nondegenerate body and sin(theta) != 0."""
    if q.form != "momentum":
        raise ValueError("euler_velocities needs the momentum form")
    rates = np.linalg.solve(euler_mass_matrix(body, q.angles), q.momenta)
    return EulerChartState(q.angles, rates=rates)


def omega_abs_from_euler(angles, rates):
    A = euler_attitude(angles)
    return A.T @ (euler_kinematic_matrix(angles) @ np.asarray(rates, dtype=float))


def random_body(seed, N=5, scale=1.0):
    """Deterministic random body with a well-conditioned inertia tensor.

    Masses are uniform in [0.5, 2]; positions uniform in the ball of radius
    ``scale``. Draws are repeated until the smallest principal moment is at
    least 5% of the largest.
    """
    if N < 4:
        raise ValueError("random_body needs N >= 4")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        m = rng.uniform(0.5, 2.0, size=N)
        d = rng.normal(size=(N, 3))
        d /= np.linalg.norm(d, axis=1)[:, None]
        r = scale * rng.uniform(0.0, 1.0, size=N) ** (1.0 / 3.0)
        body = PointMassBody(m, d * r[:, None])
        lam = np.linalg.eigvalsh(inertia_tensor(body))
        if lam[0] >= 0.05 * lam[-1]:
            return body
    raise FixtureError(f"no well-conditioned body after 100 draws (seed={seed})")


def load_body(path):
    """Read ``{"masses": [...], "positions": [[x, y, z], ...]}`` from a JSON file."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or set(data) != {"masses", "positions"}:
        raise ValueError("body file must hold exactly the keys 'masses' and 'positions'")
    return PointMassBody(data["masses"], data["positions"])


def dump_body(body, path):
    with open(path, "w") as fh:
        json.dump({"masses": body.masses.tolist(), "positions": body.positions.tolist()}, fh, indent=2)
        fh.write("\n")


def tetrahedron_body(c=1.0):
    """Four unit masses at regular-tetrahedron vertices with inertia ``c * Id``."""
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    # each vertex has |v|^2 = 3; inertia of the unit set is (4*3 - 4) Id = 8 Id
    return PointMassBody(np.ones(4), v * math.sqrt(c / 8.0))
