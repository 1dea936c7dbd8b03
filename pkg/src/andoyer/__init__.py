"""Andoyer variables for rigid-body rotation: charts, canonicity checks and free-rotation dynamics."""
from .body import InertiaTensor, PointMassBody, angular_momentum, inertia_tensor, kinetic_energy, random_body
from .canonicity import CheckReport, PhasePoint, make_phase_point, run_suite
from .charts import (
    AndoyerState,
    EulerChartState,
    andoyer_from_euler,
    andoyer_from_state,
    body_attitude,
    euler_from_andoyer,
    momentum_vector_abs,
    momentum_vector_body,
)
from .dynamics import HamiltonianSpec, euler_oracle, hamiltonian, integrate
from .errors import (
    AndoyerError,
    ChartSingular,
    FixtureError,
    SingularBandReached,
    SingularInertia,
    StepTooSmall,
    ZeroMomentum,
)

__version__ = "0.1.0"
