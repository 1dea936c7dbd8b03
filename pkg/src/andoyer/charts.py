"""Andoyer and 3-1-3 Euler-angle charts on rigid-body phase space.

Attitudes are passive matrices ``A`` with ``v_body = A @ v_abs``. The
Andoyer attitude is the chain

    A = R3(l) R1(chi) R3(g) R1(rho) R3(theta)

where ``L = G cos(chi)`` and ``Theta = G cos(rho)``. Reading the chain from
the right: the first node ``n1`` (x-axis after R3(theta)) lies in the
absolute XY plane and the invariable plane, the z-axis after R1(rho) is the
angular momentum direction ``e3``, the second node ``n2`` (x-axis after
R3(g)) lies in the invariable plane and the body xy plane, and R1(chi)
tilts onto the body z-axis.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartSingular, ZeroMomentum
from .geometry import E3, as_vector, elem_rot, norm

TWO_PI = 2.0 * math.pi
SINGULAR_TOL = 1e-9
ANGLE_NAMES = ("l", "g", "theta", "chi", "rho")


def wrap_angle(a):
    """Reduce an angle to [0, 2pi)."""
    r = math.fmod(a, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2pi
    return 0.0 if r >= TWO_PI else r


def _ratio_angle(x, G):
    return math.acos(min(1.0, max(-1.0, x / G)))


@dataclass(frozen=True)
class AndoyerState:
    """Andoyer variables: angles ``l, g, theta`` and momenta ``L, G, Theta``.

    ``theta``/``Theta`` stand for the nodal angle and the projection of the
    angular momentum on the absolute Z axis.
    """

    l: float
    g: float
    theta: float
    L: float
    G: float
    Theta: float

    def __post_init__(self):
        values = (self.l, self.g, self.theta, self.L, self.G, self.Theta)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("Andoyer variables must be finite")
        if self.G <= 0.0:
            raise ValueError("G must be positive")
        slack = 1e-12 * self.G
        if abs(self.L) > self.G + slack or abs(self.Theta) > self.G + slack:
            raise ValueError("require |L| <= G and |Theta| <= G")

    @property
    def chi(self):
        return _ratio_angle(self.L, self.G)

    @property
    def rho(self):
        return _ratio_angle(self.Theta, self.G)

    def as_array(self):
        return np.array([self.l, self.g, self.theta, self.L, self.G, self.Theta])

    @classmethod
    def from_array(cls, x):
        return cls(*(float(v) for v in x))

    @classmethod
    def from_angles(cls, l, g, theta, chi, rho, G):
        return cls(l, g, theta, G * math.cos(chi), G, G * math.cos(rho))

    def is_singular(self, tol=SINGULAR_TOL):
        return abs(self.L) >= (1.0 - tol) * self.G or abs(self.Theta) >= (1.0 - tol) * self.G


@dataclass(frozen=True)
class FrameBasis:
    """Unit vectors in absolute coordinates used by the virtual rotations."""

    e_Z: np.ndarray
    e_3: np.ndarray
    e_z: np.ndarray
    n1: np.ndarray
    n2: np.ndarray


@dataclass(frozen=True)
class EulerChartState:
    """3-1-3 Euler angles ``(phi, theta, psi)`` with either rates or momenta.

    Exactly one of ``rates`` and ``momenta`` is set.
    """

    angles: np.ndarray
    rates: np.ndarray = None
    momenta: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "angles", as_vector(self.angles))
        if (self.rates is None) == (self.momenta is None):
            raise ValueError("EulerChartState needs exactly one of rates or momenta")
        if self.rates is not None:
            object.__setattr__(self, "rates", as_vector(self.rates))
        else:
            object.__setattr__(self, "momenta", as_vector(self.momenta))

    @property
    def form(self):
        return "velocity" if self.rates is not None else "momentum"


def attitude_from_angles(l, chi, g, rho, theta):
    """The five-factor passive chain with the tilt angles given directly."""
    return elem_rot(3, l) @ elem_rot(1, chi) @ elem_rot(3, g) @ elem_rot(1, rho) @ elem_rot(3, theta)


def body_attitude(a):
    """Passive attitude of the body frame for Andoyer state ``a``."""
    return attitude_from_angles(a.l, a.chi, a.g, a.rho, a.theta)


def _check_nodes(a):
    tol = SINGULAR_TOL * a.G
    if a.G - abs(a.L) <= tol:
        raise ChartSingular("|L| = G: body z-axis aligned with the angular momentum, node n2 undefined")
    if a.G - abs(a.Theta) <= tol:
        raise ChartSingular("|Theta| = G: absolute Z-axis aligned with the angular momentum, node n1 undefined")


def frame_vectors(a):
    """Absolute-frame unit vectors ``e_Z, e_3, e_z, n1, n2`` for state ``a``."""
    _check_nodes(a)
    p1 = elem_rot(3, a.theta)
    p2 = elem_rot(1, a.rho) @ p1
    p3 = elem_rot(3, a.g) @ p2
    full = elem_rot(3, a.l) @ elem_rot(1, a.chi) @ p3
    return FrameBasis(e_Z=E3.copy(), e_3=p2[2].copy(), e_z=full[2].copy(), n1=p1[0].copy(), n2=p3[0].copy())


def virtual_rotation_axis(a, which):
    """Axis about which the body turns when angle ``which`` advances at unit rate."""
    if which == "theta":
        return E3.copy()
    if which not in ANGLE_NAMES:
        raise ValueError(f"unknown angle {which!r}; expected one of {ANGLE_NAMES}")
    if which == "g":
        return momentum_vector_abs(a) / a.G
    f = frame_vectors(a)
    return {"l": f.e_z, "chi": f.n2, "rho": f.n1}[which]


def momentum_vector_abs(a):
    """Angular momentum vector in absolute coordinates."""
    s = math.sin(a.rho)
    return a.G * np.array([s * math.sin(a.theta), -s * math.cos(a.theta), math.cos(a.rho)])


def momentum_vector_body(a):
    """Angular momentum in body coordinates, ``(S sin l, S cos l, L)`` with ``S = sqrt(G^2 - L^2)``."""
    s = math.sqrt(max(0.0, a.G * a.G - a.L * a.L))
    return np.array([s * math.sin(a.l), s * math.cos(a.l), a.L])


def andoyer_from_state(A, Gvec):
    """Recover Andoyer variables from a passive attitude and the absolute momentum vector.

    Angles are returned in [0, 2pi). Raises :class:`ChartSingular` when the
    body z-axis or absolute Z-axis is within ``1e-9 G`` of alignment.
    """
    A = np.asarray(A, dtype=float)
    Gvec = as_vector(Gvec)
    G = norm(Gvec)
    if G == 0.0:
        raise ZeroMomentum("angular momentum is zero; Andoyer variables undefined")
    Theta = float(Gvec[2])
    M = A @ Gvec
    L = float(M[2])
    tol = SINGULAR_TOL * G
    if G - abs(L) <= tol:
        raise ChartSingular(f"|L| = G (L={L!r}, G={G!r}): angles l and g are not separately defined")
    if G - abs(Theta) <= tol:
        raise ChartSingular(f"|Theta| = G (Theta={Theta!r}, G={G!r}): angles g and theta are not separately defined")
    theta = math.atan2(Gvec[0], -Gvec[1])
    l = math.atan2(M[0], M[1])
    rho = _ratio_angle(Theta, G)
    # remaining chain R3(l) R1(chi) R3(g); its third row is (s sin g, -s cos g, c)
    C = A @ (elem_rot(1, rho) @ elem_rot(3, theta)).T
    g = math.atan2(C[2, 0], -C[2, 1])
    return AndoyerState(wrap_angle(l), wrap_angle(g), wrap_angle(theta), L, G, Theta)


def rates_to_omega(a, rates):
    """Absolute angular velocity for angle rates ``(l, g, theta, chi, rho)``."""
    dl, dg, dth, dchi, drho = rates
    f = frame_vectors(a)
    return dl * f.e_z + dchi * f.n2 + dg * f.e_3 + drho * f.n1 + dth * f.e_Z


# --- 3-1-3 Euler chart -----------------------------------------------------

def euler_attitude(q):
    """Passive attitude ``R3(psi) R1(theta) R3(phi)`` for angles ``q = (phi, theta, psi)``."""
    angles = q.angles if isinstance(q, EulerChartState) else q
    phi, theta, psi = angles
    return elem_rot(3, psi) @ elem_rot(1, theta) @ elem_rot(3, phi)


def euler_kinematic_matrix(angles):
    """Matrix ``B`` with ``omega_body = B @ qdot``.

    Columns are the body-frame coordinates of the absolute Z axis, the line
    of nodes and the body z axis.
    """
    _, theta, psi = angles
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(psi), math.cos(psi)
    return np.array([
        [st * sp, cp, 0.0],
        [st * cp, -sp, 0.0],
        [ct, 0.0, 1.0],
    ])


def euler_kinematics(q, qdot=None):
    """Body angular velocity for Euler angles and rates."""
    if isinstance(q, EulerChartState):
        if q.form != "velocity":
            raise ValueError("euler_kinematics needs the velocity form")
        q, qdot = q.angles, q.rates
    return euler_kinematic_matrix(q) @ np.asarray(qdot, dtype=float)


def euler_angles_from_attitude(A):
    """Invert :func:`euler_attitude`; raises :class:`ChartSingular` when sin(theta) = 0."""
    A = np.asarray(A, dtype=float)
    st = math.hypot(A[2, 0], A[2, 1])
    if st <= SINGULAR_TOL:
        raise ChartSingular("sin(theta) = 0: Euler angles phi and psi are not separately defined")
    phi = math.atan2(A[2, 0], -A[2, 1])
    theta = math.atan2(st, A[2, 2])
    psi = math.atan2(A[0, 2], A[1, 2])
    return np.array([wrap_angle(phi), theta, wrap_angle(psi)])


def momentum_body_from_euler(angles, momenta):
    """Body angular momentum from Euler angles and conjugate momenta (``p = B^T M``)."""
    B = euler_kinematic_matrix(angles)
    if abs(math.sin(angles[1])) <= SINGULAR_TOL:
        raise ChartSingular("sin(theta) = 0: Euler momenta do not determine the angular momentum")
    return np.linalg.solve(B.T, np.asarray(momenta, dtype=float))


def andoyer_from_euler(angles, momenta):
    """Canonical map from the Euler chart ``(q, p)`` to Andoyer variables."""
    A = euler_attitude(angles)
    M = momentum_body_from_euler(angles, momenta)
    return andoyer_from_state(A, A.T @ M)


def euler_from_andoyer(a):
    """Inverse of :func:`andoyer_from_euler`: returns ``(angles, momenta)``."""
    A = body_attitude(a)
    angles = euler_angles_from_attitude(A)
    momenta = euler_kinematic_matrix(angles).T @ momentum_vector_body(a)
    return angles, momenta

