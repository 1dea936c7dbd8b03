"""Negative-control hooks for the test suite. Not used by release code paths."""
from .charts import AndoyerState, andoyer_from_euler


def corrupted_chart(angles, momenta, offset=0.1):
    """Andoyer chart with ``l`` shifted by ``offset * g``.

    A constant shift of ``l`` would still be canonical; coupling it to ``g``
    breaks ``L dl + G dg + Theta dtheta``.
    """
    a = andoyer_from_euler(angles, momenta)
    return AndoyerState(a.l + offset * a.g, a.g, a.theta, a.L, a.G, a.Theta)
