"""Independent reference implementations used to validate the fast engines.

``density`` re-derives everything by brute-force density-matrix simulation of
the actual circuits (up to 12 qubits); ``trajectories`` re-derives rates by
seeded Monte-Carlo sampling of discrete error events.  Neither imports the
transfer-operator machinery under test beyond basis bookkeeping.
"""

from . import density, trajectories

__all__ = ["density", "trajectories"]
