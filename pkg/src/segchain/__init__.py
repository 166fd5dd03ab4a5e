"""Performance analysis of error-detected quantum repeater chains.

The package computes end-to-end error rates, secret key rates, reachable
distances and resource costs for repeater chains built on single-photon
entanglement generation with a three-qubit repetition code, plus the
reference schemes used for comparison.  ``engine`` holds the GHZ-diagonal
transfer-operator calculus; ``oracle`` holds two independent checks (a
brute-force density-matrix simulation and a Monte-Carlo trajectory
sampler); ``cli`` exposes the command-line entry point.
"""

from .metrics import PerformanceReport, build_report, plob_bound, secret_key_rate
from .params import STAGES, HardwareParams, SchemeId, load_stage

__all__ = [
    "HardwareParams",
    "PerformanceReport",
    "SchemeId",
    "STAGES",
    "build_report",
    "load_stage",
    "plob_bound",
    "secret_key_rate",
]
