import numpy as np
import pytest

from andoyer.charts import AndoyerState


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def random_state(rng, margin=0.95):
    G = rng.uniform(0.5, 3.0)
    l, g, theta = rng.uniform(0.0, 2 * np.pi, 3)
    return AndoyerState(l, g, theta, G * rng.uniform(-margin, margin), G, G * rng.uniform(-margin, margin))


def angle_diff(a, b):
    d = np.asarray(a) - np.asarray(b)
    return np.abs(np.angle(np.exp(1j * d)))


def principal_axis_body():
    """Three symmetric mass pairs on the coordinate axes: diagonal inertia, distinct moments."""
    from andoyer.body import PointMassBody

    pos = []
    for k, r in enumerate((1.0, 0.8, 0.6)):
        e = np.zeros(3)
        e[k] = r
        pos += [e, -e]
    return PointMassBody([1.0, 1.0, 1.5, 1.5, 2.0, 2.0], pos)


def rotated_counterpart(body):
    """Same body with its mass distribution turned so the inertia tensor is non-diagonal."""
    from andoyer.geometry import rot_about_axis, unit

    return body.rotated(rot_about_axis(unit(np.array([1.0, -2.0, 0.5])), 0.9))
