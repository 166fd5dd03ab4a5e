"""Comparison schemes: unencoded deterministic, probabilistic, and parallel.

* SEG-noED — plain Bell pairs, gate-based swaps, no error detection.  The
  whole chain stays Bell-diagonal, so one 4-dim recursion suffices.
* SEG-prob — linear-optics swaps: noiseless but succeed with probability
  eta_D^2/2, so the Werner parameter simply multiplies along the chain.
* PEG-ED — the encoded pipeline with all links generated in parallel, i.e.
  storage decoherence switched off; an upper-bound companion to SEG-ED.
"""

from __future__ import annotations

import math

import numpy as np

from .engine import BELL_SYNDROME, ChainResult, chain_scan, run_chain
from .ghz import (
    GHZ,
    DiagonalState,
    apply,
    basis,
    depol_op,
    mix_with_identity,
    pauli_x_op,
    pauli_z_op,
    relabel_op,
)
from .noise import NoiseParams, decoherence_prob, werner_vector
from .params import HardwareParams, SchemeId, ncode_for
from .timing import TimingProfile, timing_profile

B_BELL = basis(GHZ(2))
B_BELL2 = basis(GHZ(2), GHZ(2))


def qkd_error_vectors(delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-Bell-label readout error weights (Z comparison, X comparison)."""
    agree = 2.0 * delta * (1.0 - delta)
    disagree = (1.0 - delta) ** 2 + delta**2
    v_z = np.array([agree, disagree, disagree, agree])
    v_x = np.array([agree, agree, disagree, disagree])
    return v_z, v_x


def _bell_swap_op(noise: NoiseParams):
    """Transfer matrix of one unencoded gate-based swap (fresh label second)."""
    syn_to_label = {syn: w for w, syn in enumerate(BELL_SYNDROME)}
    table = np.empty(16, dtype=np.int64)
    for u in range(4):
        for v in range(4):
            xs = BELL_SYNDROME[u][0] ^ BELL_SYNDROME[v][0]
            zs = BELL_SYNDROME[u][1] ^ BELL_SYNDROME[v][1]
            table[4 * u + v] = syn_to_label[(xs, zs)]
    gate = relabel_op(B_BELL2, B_BELL, table)
    gate = mix_with_identity(pauli_x_op(B_BELL, 1), noise.delta) @ gate
    gate = mix_with_identity(pauli_z_op(B_BELL, 1), noise.delta) @ gate
    gate = mix_with_identity(depol_op(B_BELL, 0) @ depol_op(B_BELL, 1), noise.beta) @ gate
    return gate


def run_seg_noed(nr: int, timing: TimingProfile, noise: NoiseParams) -> ChainResult:
    swap = _bell_swap_op(noise)
    mem = mix_with_identity(
        depol_op(B_BELL, 1), decoherence_prob(timing.tau_hop, noise.tcoh_s)
    )
    lam0 = werner_vector(timing.pair_fidelities[0])
    lam = lam0
    for _ in range(nr):
        held = apply(mem, lam)
        joint = DiagonalState(B_BELL2, np.kron(held.weights, lam0.weights))
        lam = apply(swap, joint)
    v_z, v_x = qkd_error_vectors(noise.delta)
    return ChainResult(
        lambda_end=lam,
        p_refs=(),
        accept_probs=(1.0,) * nr,
        p_end=1.0,
        e_z=float(v_z @ lam.weights),
        e_x=float(v_x @ lam.weights),
    )


def seg_prob_werner(nr: int, timing: TimingProfile, noise: NoiseParams) -> tuple[float, float]:
    """Chain Werner parameter: (recursion-derived value, naive closed form).

    The recursion multiplies one pair parameter per link (nr + 1 links) and
    one storage survival factor per swap; the second value drops a link and
    is reported only for comparison.
    """
    w0 = (4.0 * noise.f0 - 1.0) / 3.0
    survival = math.exp(-timing.tau_hop / noise.tcoh_s)
    return w0 ** (nr + 1) * survival**nr, (w0 * survival) ** nr


def run_seg_prob(
    nr: int, timing: TimingProfile, noise: NoiseParams, eta_d: float
) -> ChainResult:
    w_end, _ = seg_prob_werner(nr, timing, noise)
    lam = werner_vector((1.0 + 3.0 * w_end) / 4.0)
    p_swap = eta_d**2 / 2.0
    v_z, v_x = qkd_error_vectors(noise.delta)
    return ChainResult(
        lambda_end=lam,
        p_refs=(),
        accept_probs=(p_swap,) * nr,
        p_end=p_swap**nr,
        e_z=float(v_z @ lam.weights),
        e_x=float(v_x @ lam.weights),
    )


def run_peg_ed(nr: int, timing: TimingProfile, noise: NoiseParams) -> ChainResult:
    return run_chain(nr, timing, noise, memory=False)


def scheme_timing(scheme: SchemeId, hw: HardwareParams, l0_km: float, nmux: int) -> TimingProfile:
    link = hw.link(l0_km, ncode_for(scheme), nmux)
    return timing_profile(link, hw.noise())


def run_scheme(
    scheme: SchemeId | str, hw: HardwareParams, l0_km: float, nr: int, nmux: int
) -> tuple[ChainResult, TimingProfile]:
    scheme = SchemeId(scheme)
    timing = scheme_timing(scheme, hw, l0_km, nmux)
    noise = hw.noise()
    if scheme is SchemeId.SEG_ED:
        return run_chain(nr, timing, noise), timing
    if scheme is SchemeId.PEG_ED:
        return run_peg_ed(nr, timing, noise), timing
    if scheme is SchemeId.SEG_NOED:
        return run_seg_noed(nr, timing, noise), timing
    if scheme is SchemeId.SEG_PROB:
        return run_seg_prob(nr, timing, noise, hw.eta_d), timing
    raise ValueError(f"unknown scheme {scheme}")


def scan_scheme(
    scheme: SchemeId | str, hw: HardwareParams, l0_km: float, nr_max: int, nmux: int
):
    """Yield (nr, ChainResult) for nr = 1..nr_max, sharing one chain walk."""
    scheme = SchemeId(scheme)
    timing = scheme_timing(scheme, hw, l0_km, nmux)
    noise = hw.noise()
    if scheme in (SchemeId.SEG_ED, SchemeId.PEG_ED):
        memory = scheme is SchemeId.SEG_ED
        for nr, res in enumerate(chain_scan(nr_max, timing, noise, memory=memory)):
            if nr >= 1:
                yield nr, res, timing
        return
    for nr in range(1, nr_max + 1):
        if scheme is SchemeId.SEG_NOED:
            yield nr, run_seg_noed(nr, timing, noise), timing
        else:
            yield nr, run_seg_prob(nr, timing, noise, hw.eta_d), timing
