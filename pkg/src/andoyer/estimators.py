"""scikit-learn compatible wrappers around the chart maps and the free-rotation flow."""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .charts import AndoyerState, andoyer_from_euler, euler_from_andoyer
from .dynamics import HamiltonianSpec, integrate


class EulerToAndoyer(TransformerMixin, BaseEstimator):
    """Map rows ``(phi, theta, psi, p_phi, p_theta, p_psi)`` to ``(l, g, theta, L, G, Theta)``.

    The map is canonical and needs no mass data, so ``fit`` only validates
    the input width. ``inverse_transform`` maps Andoyer rows back.
    """

    def fit(self, X, y=None):
        validate_data(self, X, reset=True)
        if self.n_features_in_ != 6:
            raise ValueError(f"expected 6 columns (q, p), got {self.n_features_in_}")
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = validate_data(self, X, reset=False)
        return np.array([andoyer_from_euler(row[:3], row[3:]).as_array() for row in X])

    def inverse_transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = validate_data(self, X, reset=False)
        out = []
        for row in X:
            angles, momenta = euler_from_andoyer(AndoyerState.from_array(row))
            out.append(np.concatenate([angles, momenta]))
        return np.array(out)


class FreeRotation(BaseEstimator):
    """Propagate Andoyer states of a torque-free body over a fixed horizon.

    Parameters
    ----------
    inertia : array-like of shape (3, 3)
        Body-frame inertia tensor; any symmetric positive-definite matrix.
    horizon : float
        Time advanced by :meth:`predict`.
    dt : float
        Integrator step.
    method : {"rk4", "midpoint"}
    """

    def __init__(self, inertia=None, horizon=1.0, dt=1e-3, method="rk4"):
        self.inertia = inertia
        self.horizon = horizon
        self.dt = dt
        self.method = method

    def fit(self, X=None, y=None):
        if self.inertia is None:
            raise ValueError("FreeRotation needs an inertia tensor")
        self.spec_ = HamiltonianSpec.from_matrix(np.asarray(self.inertia, dtype=float))
        self.n_features_in_ = 6
        return self

    def predict(self, X):
        """Andoyer rows after ``horizon`` time units."""
        check_is_fitted(self, "spec_")
        X = validate_data(self, X, reset=False)
        out = []
        for row in X:
            traj = integrate(self.spec_, AndoyerState.from_array(row), self.horizon, self.dt, self.method)
            out.append(traj.states[-1])
        return np.array(out)
