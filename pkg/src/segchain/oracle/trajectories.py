"""Seeded Monte-Carlo trajectory oracle.

Samples discrete error events — Pauli draws for every depolarizing channel,
readout flips, swap branch selection, accept/reject — one trajectory at a
time (vectorized in batches), entirely at the level of basis labels.  All
label arithmetic is rebuilt here from the circuit picture: every Pauli acts
on a GHZ-class label as an XOR mask, so error accumulation is a chain of
XORs.  Branch tables for the swap are recomputed locally from the closed
form.

By default waiting times enter through their means (the same approximation
the analytic pipeline makes), so statistical agreement is an apples-to-apples
check; ``sampled_times=True`` instead draws attempt counts per hop, which
quantifies — not corrects — the mean-time approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..noise import decoherence_prob
from ..params import HardwareParams, SchemeId, ncode_for
from ..timing import expected_attempts, p_gen, timing_profile

# XOR masks implementing Pauli conjugation on 6-qubit GHZ-class labels.
# X on the leading qubit flips every bit but the first; any Z complements.
X_MASKS_6 = (31, 16, 8, 4, 2, 1)
Z_MASK_6 = 63
X_MASKS_3 = (3, 2, 1)


@dataclass(frozen=True)
class TrajectoryConfig:
    hw: HardwareParams
    l0_km: float
    nr: int
    nmux: int = 12
    sampled_times: bool = False


@dataclass(frozen=True)
class TrajectoryStats:
    scheme: SchemeId
    n_samples: int
    seed: int
    p_end: float
    p_end_se: float
    e_z: float
    e_z_se: float
    e_x: float
    e_x_se: float
    r_bit_hz: float
    r_bit_se: float


def _swap_tables() -> tuple[np.ndarray, np.ndarray]:
    s = np.arange(4096)
    a, b, c, d = s >> 9, (s >> 6) & 7, (s >> 3) & 7, s & 7
    same_ac = (a >= 4) == (c >= 4)
    same_ab = (a >= 4) == (b >= 4)
    n1 = np.where(same_ac, 8 * a + d, 63 - 8 * a - d)
    n2 = np.where(same_ac, 8 * a + 7 - d, 56 - 8 * a + d)
    m1 = np.where(same_ab, 8 * b + c, 63 - 8 * b - c)
    m2 = np.where(same_ab, 8 * b + 7 - c, 56 - 8 * b + c)
    return (
        np.stack([n1, n2, 63 - n2, 63 - n1]).astype(np.int64),
        np.stack([m1, m2, 63 - m2, 63 - m1]).astype(np.int64),
    )


_N_TABLE, _M_TABLE = _swap_tables()


def _pauli_pair_draw(rng: np.random.Generator, hit: np.ndarray) -> tuple[np.ndarray, ...]:
    """Uniform two-qubit Pauli components (x1, z1, x2, z2) where ``hit``."""
    draw = rng.integers(0, 16, size=hit.shape[0])
    draw = np.where(hit, draw, 0)
    return draw & 1, (draw >> 1) & 1, (draw >> 2) & 1, (draw >> 3) & 1


def _sample_categorical(rng, weights: np.ndarray, size: int) -> np.ndarray:
    cdf = np.cumsum(weights)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(size)).astype(np.int64)


def _bernoulli(rng, p: float, size: int) -> np.ndarray:
    if p <= 0.0:
        return np.zeros(size, dtype=np.int64)
    return (rng.random(size) < p).astype(np.int64)


def _parity_of_flips(rng, p: float, size: int, count: int) -> np.ndarray:
    out = np.zeros(size, dtype=np.int64)
    for _ in range(count):
        out ^= _bernoulli(rng, p, size)
    return out


def _sample_plus_logical(rng, beta: float, size: int) -> np.ndarray:
    """Labels of the noisy |+_L> prep: two noisy CNOTs in the Pauli frame."""
    label = np.zeros(size, dtype=np.int64)
    # first CNOT touches qubits (0, 1); its errors then cross the second CNOT
    hit1 = rng.random(size) < beta
    x0, z0, x1, z1 = _pauli_pair_draw(rng, hit1)
    x2 = x0.copy()  # X on the control copies onto the later target
    # second CNOT touches (0, 2); errors stay put
    hit2 = rng.random(size) < beta
    xa, za, xb, zb = _pauli_pair_draw(rng, hit2)
    x0 ^= xa
    z0 ^= za
    x2 ^= xb
    zpar = (z0 ^ z1 ^ zb) & 1
    for q, xq in enumerate((x0, x1, x2)):
        label ^= xq * X_MASKS_3[q]
    label ^= zpar * 7
    return label


def _sample_encoded_link(rng, fidelities, beta: float, delta: float, size: int) -> np.ndarray:
    """Labels of one encoded link: prep, three teleported CNOT rows."""
    a = _sample_plus_logical(rng, beta, size)
    label = (a << 3) | a  # ideal remote CNOTs onto |000>
    comp = np.zeros(size, dtype=np.int64)
    for j, f in enumerate(fidelities):
        rest = (1.0 - f) / 3.0
        w = _sample_categorical(rng, np.array([f, rest, rest, rest]), size)
        # pair label -> (x, z) error on the far half, teleported onto (B_j, A_j)
        ex = ((w == 1) | (w == 2)).astype(np.int64)
        ez = ((w == 2) | (w == 3)).astype(np.int64)
        label ^= ex * X_MASKS_6[3 + j]
        comp ^= ez
        # gate depol after CNOT(A_j -> a_j): data part sticks, comm part
        # flips the Z readout of a_j, i.e. the X correction on B_j
        hit = rng.random(size) < beta
        x_data, z_data, x_comm, _ = _pauli_pair_draw(rng, hit)
        label ^= x_data * X_MASKS_6[j]
        comp ^= z_data
        label ^= x_comm * X_MASKS_6[3 + j]
        # gate depol after CNOT(b_j -> B_j): comm Z part flips the X readout
        hit = rng.random(size) < beta
        x_data, z_data, _, z_comm = _pauli_pair_draw(rng, hit)
        label ^= x_data * X_MASKS_6[3 + j]
        comp ^= z_data ^ z_comm
        # readout flips of the two communication qubits
        label ^= _bernoulli(rng, delta, size) * X_MASKS_6[3 + j]
        comp ^= _bernoulli(rng, delta, size)
    return label ^ ((comp & 1) * Z_MASK_6)


def _depolarize_labels(rng, label, masks, gamma: float):
    """Independent single-qubit depolarization: uniform {I, X, Z, XZ} draws."""
    size = label.shape[0]
    for mask in masks:
        hit = rng.random(size) < gamma
        pick = rng.integers(0, 4, size=size)
        pick = np.where(hit, pick, 0)
        label = label ^ (pick & 1) * mask
        label = label ^ ((pick >> 1) & 1) * Z_MASK_6
    return label


def _encoded_swap_step(rng, held, fresh, alive, beta: float, delta: float):
    """One error-detected swap; returns (new labels, updated alive mask)."""
    size = held.shape[0]
    for l in range(3):
        hit = rng.random(size) < beta
        xb, zb, xc, zc = _pauli_pair_draw(rng, hit)
        held = held ^ xb * X_MASKS_6[3 + l] ^ zb * Z_MASK_6
        fresh = fresh ^ xc * X_MASKS_6[l] ^ zc * Z_MASK_6
    joint = (held << 6) | fresh
    k = rng.integers(0, 4, size=size)
    n = _N_TABLE[k, joint]
    m = _M_TABLE[k, joint]
    a_mid = m >> 3
    t = a_mid ^ (m & 7)
    t_act = t ^ (
        _bernoulli(rng, delta, size)
        | (_bernoulli(rng, delta, size) << 1)
        | (_bernoulli(rng, delta, size) << 2)
    )
    u_parity = (a_mid >> 2) ^ _parity_of_flips(rng, delta, size, 3)
    alive = alive & ((t_act == 0) | (t_act == 7))
    n = n ^ np.where(t_act == 7, 7, 0)
    n = n ^ np.where(u_parity == 1, Z_MASK_6, 0)
    return n, alive


def _readout_indicators(rng, label, delta: float):
    """(Z-majority mismatch, X-parity mismatch) per trajectory."""
    size = label.shape[0]
    a_bits = label >> 3
    b_bits = label & 7
    fa = fb = 0
    for bit in (4, 2, 1):
        fa = fa | (_bernoulli(rng, delta, size) * bit)
        fb = fb | (_bernoulli(rng, delta, size) * bit)
    popcount = np.array([bin(v).count("1") for v in range(8)])
    maj_a = popcount[a_bits ^ fa] >= 2
    maj_b = popcount[b_bits ^ fb] >= 2
    ez_ind = (maj_a != maj_b).astype(np.int64)
    ex_ind = (label >> 5) ^ _parity_of_flips(rng, delta, size, 6)
    return ez_ind, ex_ind


def _bell_readout_indicators(rng, label, delta: float):
    size = label.shape[0]
    x_syn = ((label == 1) | (label == 2)).astype(np.int64)
    z_syn = ((label == 2) | (label == 3)).astype(np.int64)
    ez_ind = x_syn ^ _parity_of_flips(rng, delta, size, 2)
    ex_ind = z_syn ^ _parity_of_flips(rng, delta, size, 2)
    return ez_ind, ex_ind


_BELL_XOR = np.zeros((4, 4), dtype=np.int64)
for _u in range(4):
    for _v in range(4):
        _syn = ((0, 0), (1, 0), (1, 1), (0, 1))
        _x = _syn[_u][0] ^ _syn[_v][0]
        _z = _syn[_u][1] ^ _syn[_v][1]
        _BELL_XOR[_u, _v] = {(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}[(_x, _z)]


def _sampled_fidelities(rng, cfg: TrajectoryConfig, size: int) -> np.ndarray:
    """Per-trajectory pair fidelities from sampled attempt counts (ncode=3)."""
    hw, link = cfg.hw, cfg.hw.link(cfg.l0_km, 3, cfg.nmux)
    rounds = rng.geometric(p_gen(link), size=(size, cfg.nmux))
    rounds.sort(axis=1)
    g = (2.0 * rounds[:, :3] + 1.0) * cfg.l0_km / link.c_km_s
    wait = g[:, 2:3] - g
    keep = np.exp(-wait / hw.tcoh_s) ** 2
    return keep * hw.f0 + (1.0 - keep) / 4.0


def _run_batch_encoded(rng, cfg: TrajectoryConfig, size: int, with_memory: bool):
    hw = cfg.hw
    link = hw.link(cfg.l0_km, ncode_for(SchemeId.SEG_ED), cfg.nmux)
    timing = timing_profile(link, hw.noise())
    gamma = decoherence_prob(timing.tau_hop, hw.tcoh_s) if with_memory else 0.0

    def fresh_labels():
        if cfg.sampled_times:
            fids = _sampled_fidelities(rng, cfg, size)
            labels = _sample_plus_logical(rng, hw.beta, size)
            # re-run the per-row loop with per-trajectory fidelities
            label = (labels << 3) | labels
            comp = np.zeros(size, dtype=np.int64)
            for j in range(3):
                u = rng.random(size)
                f = fids[:, j]
                rest = (1.0 - f) / 3.0
                w = (u >= f).astype(np.int64) + (u >= f + rest) + (u >= f + 2 * rest)
                ex = ((w == 1) | (w == 2)).astype(np.int64)
                ez = ((w == 2) | (w == 3)).astype(np.int64)
                label ^= ex * X_MASKS_6[3 + j]
                comp ^= ez
                hit = rng.random(size) < hw.beta
                xd, zd, xc, _ = _pauli_pair_draw(rng, hit)
                label ^= xd * X_MASKS_6[j] ^ xc * X_MASKS_6[3 + j]
                comp ^= zd
                hit = rng.random(size) < hw.beta
                xd, zd, _, zc = _pauli_pair_draw(rng, hit)
                label ^= xd * X_MASKS_6[3 + j]
                comp ^= zd ^ zc
                label ^= _bernoulli(rng, hw.delta, size) * X_MASKS_6[3 + j]
                comp ^= _bernoulli(rng, hw.delta, size)
            return label ^ ((comp & 1) * Z_MASK_6)
        return _sample_encoded_link(rng, timing.pair_fidelities, hw.beta, hw.delta, size)

    label = fresh_labels()
    alive = np.ones(size, dtype=bool)
    for _ in range(cfg.nr):
        label = _depolarize_labels(rng, label, X_MASKS_6[3:], gamma)
        label, alive = _encoded_swap_step(rng, label, fresh_labels(), alive, hw.beta, hw.delta)
    ez_ind, ex_ind = _readout_indicators(rng, label, hw.delta)
    return alive, ez_ind, ex_ind, timing.tau_hop


def _run_batch_bell(rng, cfg: TrajectoryConfig, size: int, scheme: SchemeId):
    hw = cfg.hw
    link = hw.link(cfg.l0_km, 1, cfg.nmux)
    timing = timing_profile(link, hw.noise())
    gamma = decoherence_prob(timing.tau_hop, hw.tcoh_s)

    def fresh():
        rest = (1.0 - hw.f0) / 3.0
        return _sample_categorical(rng, np.array([hw.f0, rest, rest, rest]), size)

    label = fresh()
    alive = np.ones(size, dtype=bool)
    for _ in range(cfg.nr):
        # storage depolarization of the held pair's waiting qubit
        hit = rng.random(size) < gamma
        pick = np.where(hit, rng.integers(0, 4, size=size), 0)
        label = label ^ (pick & 1) ^ ((pick >> 1) & 1) * 3
        incoming = fresh()
        if scheme is SchemeId.SEG_NOED:
            mixed = rng.random(size) < hw.beta
            swapped = _BELL_XOR[label, incoming]
            swapped ^= _bernoulli(rng, hw.delta, size)  # Z-readout flip -> X on D
            swapped ^= _bernoulli(rng, hw.delta, size) * 3  # X-readout flip -> Z on D
            label = np.where(mixed, rng.integers(0, 4, size=size), swapped)
        else:
            alive = alive & (rng.random(size) < hw.eta_d**2 / 2.0)
            label = _BELL_XOR[label, incoming]
    ez_ind, ex_ind = _bell_readout_indicators(rng, label, hw.delta)
    return alive, ez_ind, ex_ind, timing.tau_hop


def run_trajectories(
    scheme: SchemeId | str,
    config: TrajectoryConfig,
    n_samples: int,
    seed: int,
    batch_size: int = 200_000,
) -> TrajectoryStats:
    """Empirical p_end / e_Z / e_X / R_bit with standard errors."""
    scheme = SchemeId(scheme)
    if n_samples < 1:
        raise ValueError("need at least one sample")
    seq = np.random.SeedSequence(seed)
    remaining = n_samples
    n_alive = 0
    ez_sum = ex_sum = 0
    tau_hop = None
    children = seq.spawn(math.ceil(n_samples / batch_size))
    for child in children:
        rng = np.random.Generator(np.random.Philox(child))
        size = min(batch_size, remaining)
        remaining -= size
        if scheme in (SchemeId.SEG_ED, SchemeId.PEG_ED):
            alive, ez_ind, ex_ind, tau_hop = _run_batch_encoded(
                rng, config, size, with_memory=scheme is SchemeId.SEG_ED
            )
        else:
            alive, ez_ind, ex_ind, tau_hop = _run_batch_bell(rng, config, size, scheme)
        n_alive += int(alive.sum())
        ez_sum += int(ez_ind[alive].sum())
        ex_sum += int(ex_ind[alive].sum())
    p_end = n_alive / n_samples
    p_se = math.sqrt(max(p_end * (1.0 - p_end), 1e-30) / n_samples)
    if n_alive:
        e_z = ez_sum / n_alive
        e_x = ex_sum / n_alive
        ez_se = math.sqrt(max(e_z * (1.0 - e_z), 1e-30) / n_alive)
        ex_se = math.sqrt(max(e_x * (1.0 - e_x), 1e-30) / n_alive)
    else:
        e_z = e_x = ez_se = ex_se = float("nan")
    return TrajectoryStats(
        scheme=scheme,
        n_samples=n_samples,
        seed=seed,
        p_end=p_end,
        p_end_se=p_se,
        e_z=e_z,
        e_z_se=ez_se,
        e_x=e_x,
        e_x_se=ex_se,
        r_bit_hz=p_end / tau_hop,
        r_bit_se=p_se / tau_hop,
    )


def expected_tau_hop(hw: HardwareParams, l0_km: float, ncode: int, nmux: int) -> float:
    """Mean hop period implied by the attempt statistics (for cross-checks)."""
    link = hw.link(l0_km, ncode, nmux)
    return (2.0 * expected_attempts(ncode, nmux, p_gen(link)) + 1.0) * l0_km / link.c_km_s
