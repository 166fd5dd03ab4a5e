"""Noise primitives shared by every scheme.

All imperfections reduce to four knobs: initial pair fidelity F0 (isotropic /
Werner pairs), two-qubit gate depolarization beta, measurement flip rate
delta, and a memory coherence time Tcoh governing exponential dephasing-free
depolarization while qubits wait.  Single-qubit gates are taken noiseless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ghz import (
    GHZ,
    BasisLabel,
    DiagonalState,
    TransferOperator,
    basis,
    depol_op,
    identity_op,
    mix_with_identity,
    pauli_x_op,
    pauli_z_op,
)


@dataclass(frozen=True)
class NoiseParams:
    """Device noise knobs: pair fidelity, gate, measurement, memory."""

    f0: float
    beta: float
    delta: float
    tcoh_s: float

    def __post_init__(self) -> None:
        if not 0.25 <= self.f0 <= 1.0:
            raise ValueError("f0 outside [1/4, 1]")
        for name in ("beta", "delta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} outside [0, 1]")
        if self.tcoh_s <= 0.0:
            raise ValueError("tcoh_s must be positive")


def werner_vector(f: float) -> DiagonalState:
    """Bell-diagonal weights of an isotropic pair of fidelity ``f``."""
    if not 0.0 <= f <= 1.0:
        raise ValueError("fidelity outside [0, 1]")
    rest = (1.0 - f) / 3.0
    return DiagonalState(basis(GHZ(2)), np.array([f, rest, rest, rest]))


def decoherence_prob(tau: float, tcoh: float) -> float:
    """Probability that a stored qubit depolarized after waiting ``tau``.

    >>> round(decoherence_prob(0.25, 1.0), 4)
    0.2212
    """
    if tau < 0.0:
        raise ValueError("negative waiting time")
    if tcoh <= 0.0:
        raise ValueError("coherence time must be positive")
    return float(-math.expm1(-tau / tcoh))


def flip_channel_op(kind: str, p: float, b: BasisLabel, qubit: int) -> TransferOperator:
    """Bit- or phase-flip channel ``(1 - p) I + p P`` on one qubit.

    ``kind="bit"`` applies X (models a Z-basis readout error of rate ``p``),
    ``kind="phase"`` applies Z (models an X-basis readout error).
    """
    if kind == "bit":
        pauli = pauli_x_op(b, qubit)
    elif kind == "phase":
        pauli = pauli_z_op(b, qubit)
    else:
        raise ValueError(f"unknown flip kind {kind!r}")
    return mix_with_identity(pauli, p)


def multi_depol_op(p: float, b: BasisLabel, qubits: tuple[int, ...]) -> TransferOperator:
    """``(1 - p) I + p * prod_q D_q``: joint erasure of a qubit set to I/2^k."""
    if not qubits:
        return identity_op(b)
    joint = depol_op(b, qubits[0])
    for q in qubits[1:]:
        joint = depol_op(b, q) @ joint
    return mix_with_identity(joint, p)


def noisy_cnot_contract() -> str:
    """State the CNOT noise model used everywhere (not a runtime operation).

    A noisy CNOT of infidelity beta is the mixture
    ``(1 - beta) * ideal + beta * complete mixing of the gate pair``.
    Because complete pair mixing absorbs any unitary on the pair, this equals
    the ideal gate preceded — or, identically, followed — by
    ``multi_depol_op(beta, ..., (control, target))``.  Engines apply the
    depolarization factor and the ideal gate's basis relabeling separately.
    """
    return (
        "noisy_cnot(beta) == (1-beta)*ideal + beta*pair_mixing "
        "== depol_pair(beta) then ideal == ideal then depol_pair(beta)"
    )
