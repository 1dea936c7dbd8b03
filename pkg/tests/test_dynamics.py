import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from andoyer.body import PointMassBody, kinetic_energy
from andoyer.charts import AndoyerState, body_attitude, momentum_vector_body
from andoyer.dynamics import HamiltonianSpec, euler_oracle, hamilton_rhs, hamiltonian, integrate
from andoyer.errors import SingularBandReached, SingularInertia
from andoyer.geometry import rot_about_axis, unit

from conftest import random_state


def general_spec(moments=(1.0, 2.0, 3.0), axis=(1.0, 2.0, 3.0), angle=0.7):
    R = rot_about_axis(unit(np.array(axis)), angle)
    return HamiltonianSpec.from_matrix(R.T @ np.diag(moments) @ R)


def test_spec_rejects_singular():
    with pytest.raises(SingularInertia):
        HamiltonianSpec.from_matrix(np.diag([1.0, 1.0, 0.0]))
    with pytest.raises(SingularInertia):
        HamiltonianSpec.from_matrix(np.diag([1.0, 1.0, 1e-13]))


def test_spherical_energy(rng):
    spec = HamiltonianSpec.from_matrix(2.0 * np.eye(3))
    for _ in range(20):
        a = random_state(rng)
        assert hamiltonian(spec, a) == pytest.approx(a.G**2 / 4.0)


def test_diagonal_energy_formula(rng):
    I1, I2, I3 = 1.3, 2.1, 2.9
    spec = HamiltonianSpec.from_matrix(np.diag([I1, I2, I3]))
    for _ in range(20):
        a = random_state(rng)
        expected = (math.sin(a.l) ** 2 / (2 * I1) + math.cos(a.l) ** 2 / (2 * I2)) * (a.G**2 - a.L**2) + a.L**2 / (2 * I3)
        assert hamiltonian(spec, a) == pytest.approx(expected, rel=1e-13)


def test_energy_matches_point_masses(rng):
    spec = general_spec()
    body = PointMassBody.from_inertia(spec.inertia.matrix)
    for _ in range(20):
        a = random_state(rng)
        A = body_attitude(a)
        w_abs = A.T @ (spec.inverse @ momentum_vector_body(a))
        assert hamiltonian(spec, a) == pytest.approx(kinetic_energy(body, A, w_abs), rel=1e-9)


def test_energy_independent_of_g_theta_Theta(rng):
    spec = general_spec()
    a = random_state(rng)
    b = AndoyerState(a.l, a.g + 1.0, a.theta - 2.0, a.L, a.G, -a.Theta)
    assert hamiltonian(spec, a) == pytest.approx(hamiltonian(spec, b), rel=1e-14)


def test_rhs_spherical(rng):
    spec = HamiltonianSpec.from_matrix(2.0 * np.eye(3))
    a = random_state(rng)
    assert_allclose(hamilton_rhs(spec, a), [0, a.G / 2.0, 0, 0, 0, 0], atol=1e-14)


def test_rhs_symmetric(rng):
    I1, I3 = 1.5, 2.5
    spec = HamiltonianSpec.from_matrix(np.diag([I1, I1, I3]))
    a = random_state(rng)
    r = hamilton_rhs(spec, a)
    assert r[0] == pytest.approx(a.L * (1 / I3 - 1 / I1))
    assert r[1] == pytest.approx(a.G / I1)
    assert r[3] == pytest.approx(0.0, abs=1e-14)


def test_rhs_matches_fd_gradient(rng):
    h = 1e-6
    spec = general_spec()
    for _ in range(50):
        a = random_state(rng)
        x = a.as_array()

        def H(k, s):
            y = x.copy()
            y[k] += s
            return hamiltonian(spec, AndoyerState.from_array(y))

        grad = np.array([(H(k, h) - H(k, -h)) / (2 * h) for k in range(6)])
        expected = np.array([grad[3], grad[4], grad[5], -grad[0], -grad[1], -grad[2]])
        assert_allclose(hamilton_rhs(spec, a), expected, rtol=1e-7, atol=1e-7 * (1 + np.max(np.abs(grad))))


def test_integrate_spherical():
    c = 2.0
    spec = HamiltonianSpec.from_matrix(c * np.eye(3))
    a0 = AndoyerState(0.3, 0.2, 1.0, 0.4, 1.5, -0.2)
    tr = integrate(spec, a0, 1.0, 1e-2)
    assert np.all(tr.states[:, 0] == 0.3)
    assert np.all(tr.states[:, 3] == 0.4)
    assert_allclose(tr.states[:, 1], 0.2 + tr.t * 1.5 / c, atol=1e-12)


def test_integrate_symmetric():
    I1, I3 = 1.5, 2.5
    spec = HamiltonianSpec.from_matrix(np.diag([I1, I1, I3]))
    a0 = AndoyerState(0.3, 0.2, 1.0, 0.4, 1.5, -0.2)
    tr = integrate(spec, a0, 2.0, 1e-3)
    assert_allclose(tr.states[:, 0], 0.3 + tr.t * 0.4 * (1 / I3 - 1 / I1), atol=1e-12)
    assert_allclose(tr.states[:, 1], 0.2 + tr.t * 1.5 / I1, atol=1e-12)


def test_integrate_matches_oracle():
    spec = general_spec()
    a0 = AndoyerState(0.3, 0.1, 0.5, 0.2, 1.0, 0.4)
    tr = integrate(spec, a0, 2.0, 1e-3)
    t, M = euler_oracle(spec, momentum_vector_body(a0), 2.0, 1e-3)
    assert_allclose(t, tr.t)
    assert np.max(np.linalg.norm(tr.M_body - M, axis=1)) <= 1e-6 * a0.G
    assert_allclose(np.linalg.norm(tr.M_body, axis=1), a0.G, rtol=1e-9)


def test_midpoint_conserves_energy():
    spec = general_spec()
    a0 = AndoyerState(0.3, 0.1, 0.5, 0.2, 1.0, 0.4)
    tr = integrate(spec, a0, 2.0, 1e-2, method="midpoint")
    assert np.max(np.abs(tr.H - tr.H[0])) <= 1e-6 * tr.H[0]


def test_integrate_rejects():
    spec = general_spec()
    a0 = AndoyerState(0.3, 0.1, 0.5, 0.2, 1.0, 0.4)
    with pytest.raises(ValueError):
        integrate(spec, a0, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(spec, a0, 1.0, 1e-3, method="euler")
    with pytest.raises(SingularBandReached):
        integrate(spec, AndoyerState(0, 0, 0, 0.9995, 1.0, 0.1), 1.0, 1e-3)


def test_band_abort_keeps_partial():
    # energy conservation takes L from 0.995 at l = 0 to about 0.99917 at l = pi/2
    spec = HamiltonianSpec.from_matrix(np.diag([1.0, 2.0, 2.5]))
    a0 = AndoyerState(0.0, 0.0, 0.0, 0.995, 1.0, 0.3)
    with pytest.raises(SingularBandReached) as info:
        integrate(spec, a0, 20.0, 1e-3)
    partial = info.value.trajectory
    assert partial is not None and len(partial) > 1
    assert np.all(np.abs(partial.states[:, 3]) <= 0.999)


def test_oracle_stationary():
    spec = general_spec()
    lam, V = np.linalg.eigh(spec.inertia.matrix)
    M0 = 1.3 * V[:, 0]
    _, M = euler_oracle(spec, M0, 1.0, 1e-3)
    assert np.max(np.linalg.norm(M - M0, axis=1)) <= 1e-10 * 1.3
    iso = HamiltonianSpec.from_matrix(3.0 * np.eye(3))
    _, M = euler_oracle(iso, np.array([0.3, -0.2, 0.5]), 1.0, 1e-3)
    assert_allclose(M, np.tile([0.3, -0.2, 0.5], (len(M), 1)), atol=1e-14)


def test_oracle_conserves_energy():
    spec = general_spec()
    _, M = euler_oracle(spec, np.array([0.4, 0.8, -0.3]), 10.0, 1e-3)
    E = 0.5 * np.einsum("ij,jk,ik->i", M, spec.inverse, M)
    assert np.max(np.abs(E - E[0])) <= 1e-9 * E[0]
    n = np.linalg.norm(M, axis=1)
    assert np.max(np.abs(n - n[0])) <= 1e-9 * n[0]
