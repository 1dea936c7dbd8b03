"""Small 3x3 linear algebra: vector products and rotation matrices.

Vectors are plain ``numpy`` arrays of shape (3,). Rotations are (3, 3)
arrays; :func:`as_rotation` validates one against the proper-orthogonal
contract. Elementary rotations are *passive* (they re-express a fixed
vector in a rotated frame), while :func:`rot_about_axis` is *active*.
"""
import math

import numpy as np

ORTHO_TOL = 1e-12
UNIT_TOL = 1e-9

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def as_vector(v):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


def as_rotation(m, tol=ORTHO_TOL):
    """Validate ``m`` as a proper rotation and return it as a float array.

    Raises ``ValueError`` if ``m`` is not 3x3, not orthogonal within
    ``tol`` (infinity norm of ``m.T @ m - I``) or has determinant other
    than +1 within ``tol``.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("rotation entries must be finite")
    if np.max(np.abs(m.T @ m - np.eye(3))) > tol:
        raise ValueError("matrix is not orthogonal")
    if abs(np.linalg.det(m) - 1.0) > tol:
        raise ValueError("matrix is not a proper rotation (det != 1)")
    return m


def dot(a, b):
    return float(a[0] * b[0] + a[1] * b[1] + a[2] * b[2])


def cross(a, b):
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def mixed(a, b, c):
    """Scalar triple product ``a . (b x c)``."""
    return dot(a, cross(b, c))


def norm(v):
    return math.sqrt(dot(v, v))


def unit(v):
    n = norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return np.asarray(v, dtype=float) / n


def skew(v):
    """Matrix ``S`` with ``S @ w == cross(v, w)``."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def unskew(s):
    """Axial vector of the skew-symmetric part of ``s``."""
    return 0.5 * np.array([s[2, 1] - s[1, 2], s[0, 2] - s[2, 0], s[1, 0] - s[0, 1]])


def elem_rot(axis_index, angle):
    """Passive elementary rotation about coordinate axis 1, 2 or 3.

    The frame turns counterclockwise by ``angle``, so coordinates turn
    clockwise: ``elem_rot(3, a)`` has first row ``(cos a, sin a, 0)``.
    """
    c = math.cos(angle)
    s = math.sin(angle)
    if axis_index == 1:
        return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])
    if axis_index == 2:
        return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])
    if axis_index == 3:
        return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
    raise ValueError(f"axis_index must be 1, 2 or 3, got {axis_index!r}")


def rot_about_axis(axis, angle):
    """Active rotation by ``angle`` (counterclockwise) about the unit vector ``axis``.

    Rodrigues formula. ``rot_about_axis(e_k, a) == elem_rot(k, a).T``.
    """
    axis = as_vector(axis)
    if abs(norm(axis) - 1.0) > UNIT_TOL:
        raise ValueError("rotation axis must be a unit vector")
    c = math.cos(angle)
    s = math.sin(angle)
    return c * np.eye(3) + s * skew(axis) + (1.0 - c) * np.outer(axis, axis)
