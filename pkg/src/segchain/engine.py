"""Encoded repeater chain: encoding, error-detecting swaps, decoding.

The pipeline stays diagonal in GHZ-class product bases throughout, so every
step is a transfer matrix on weight vectors:

1. encode: a 12-qubit circuit (noisy logical |+> prep, three isotropic pairs,
   remote CNOTs, faulty pair readout) collapses to operators
   E_enc . G_enc . F_enc on an 8*8*4^3 = 4096-dim product basis, producing the
   64-dim weight vector of an encoded link over GHZ(6).
2. swap: the joint 64*64 basis of (held, fresh) states regroups into four
   branches (held far + fresh far) x (measured middle), indexed by closed-form
   tables; a faulty logical Bell measurement on the middle produces, per input
   label s, the acceptance weights q_{s|k} and relabelings n_k(s).  Everything
   is conditioned on a single reference outcome; the 16 accepted readout
   patterns contribute symmetrically, giving acceptance 16 * p_ref.
3. decode: both ends read all qubits out (Z for the key bit via majority
   vote, X for the phase check via parity), each readout flipped at rate
   delta.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .ghz import (
    COMP,
    GHZ,
    BasisLabel,
    DiagonalState,
    TransferOperator,
    apply,
    basis,
    depol_op,
    identity_op,
    kron,
    mix_with_identity,
    pauli_x_op,
    pauli_z_op,
    permutation_op,
    relabel_op,
)
from .noise import NoiseParams, decoherence_prob, werner_vector
from .timing import TimingProfile

B_PAIR = basis(GHZ(6))
B_JOINT = basis(GHZ(6), GHZ(6))
B_LBSM = basis(GHZ(3), COMP(3))
B_ENC = basis(GHZ(3), COMP(3), GHZ(2), GHZ(2), GHZ(2))

# Bell label -> (x, z) error syndrome relative to G_0
BELL_SYNDROME = ((0, 0), (1, 0), (1, 1), (0, 1))


@dataclass(frozen=True)
class EncodedLinkState:
    """Weight vector of one freshly encoded link over GHZ(6)."""

    lambda0: DiagonalState


@dataclass(frozen=True)
class SwapMachinery:
    """Precomputed swap data for one noise setting.

    ``q_vectors[k, s]`` is the joint probability that branch ``k`` of joint
    label ``s`` yields the reference readout; ``n_maps[k]`` relabels the
    surviving pair for that branch.  ``tensor[n, i, j]`` aggregates both over
    branches for the fast (held, fresh) -> out contraction, and ``w_matrix``
    is its branch/out sum (so p_ref = held @ w_matrix @ fresh).
    """

    q_vectors: np.ndarray
    n_maps: tuple[TransferOperator, ...]
    accept_multiplicity: int
    tensor: np.ndarray
    w_matrix: np.ndarray


@dataclass(frozen=True)
class ChainResult:
    lambda_end: DiagonalState
    p_refs: tuple[float, ...]
    accept_probs: tuple[float, ...]
    p_end: float
    e_z: float
    e_x: float


def plus_logical_vector(beta: float) -> DiagonalState:
    """GHZ(3) weights of the noisy logical |+> preparation (two noisy CNOTs)."""
    w = np.full(8, beta / 8.0)
    w[[0, 2, 5, 7]] *= 3.0 - 2.0 * beta
    w[0] += (1.0 - beta) ** 2
    return DiagonalState(basis(GHZ(3)), w)


def _pair_depol(b: BasisLabel, q1: int, q2: int, p: float) -> TransferOperator:
    return mix_with_identity(depol_op(b, q1) @ depol_op(b, q2), p)


@lru_cache(maxsize=None)
def _encode_g_map() -> np.ndarray:
    """Ideal remote-CNOT + corrected readout as an index map 4096 -> 64."""
    idx = np.arange(B_ENC.dim)
    x = idx >> 9
    z = (idx >> 6) & 7
    out = (x << 3) | (x ^ z)
    for j in range(3):
        w = (idx >> (4 - 2 * j)) & 3
        xe = np.array([s[0] for s in BELL_SYNDROME])[w]
        ze = np.array([s[1] for s in BELL_SYNDROME])[w]
        out ^= xe << (2 - j)  # pair X error -> X on the near qubit of row j
        out ^= ze * 63  # pair Z error -> Z on the far qubit: complement
    return out


def encode_link(timing: TimingProfile, noise: NoiseParams) -> EncodedLinkState:
    state = kron(
        plus_logical_vector(noise.beta),
        DiagonalState(basis(COMP(3)), np.eye(8)[0]),
        *[werner_vector(f) for f in timing.pair_fidelities],
    )
    for j in range(3):
        a_j, b_j = 6 + 2 * j, 7 + 2 * j
        state = apply(_pair_depol(B_ENC, j, a_j, noise.beta), state)
        state = apply(_pair_depol(B_ENC, 3 + j, b_j, noise.beta), state)
    state = apply(relabel_op(B_ENC, B_PAIR, _encode_g_map()), state)
    for j in range(3):
        state = apply(mix_with_identity(pauli_x_op(B_PAIR, 3 + j), noise.delta), state)
        state = apply(mix_with_identity(pauli_z_op(B_PAIR, j), noise.delta), state)
    return EncodedLinkState(lambda0=state)


def swap_indices(s: int) -> tuple[tuple[int, int, int, int], tuple[int, int, int, int]]:
    """Branch tables (n_1..n_4, m_1..m_4) of one joint label; see the tables below."""
    ns, ms = _swap_index_tables()
    return tuple(int(v) for v in ns[:, s]), tuple(int(v) for v in ms[:, s])


@lru_cache(maxsize=None)
def _swap_index_tables() -> tuple[np.ndarray, np.ndarray]:
    """Regrouping of |G_(8a+b)> x |G_(8c+d)> into (far, middle) branches.

    The joint label s = 512a + 64b + 8c + d splits into four branches k with
    far label n_k(s) and middle label m_k(s); which closed form applies
    depends on whether the upper-branch halves agree in their leading bits.
    """
    s = np.arange(4096)
    a, b, c, d = s >> 9, (s >> 6) & 7, (s >> 3) & 7, s & 7
    same_ac = (a >= 4) == (c >= 4)
    same_ab = (a >= 4) == (b >= 4)
    n1 = np.where(same_ac, 8 * a + d, 63 - 8 * a - d)
    n2 = np.where(same_ac, 8 * a + 7 - d, 56 - 8 * a + d)
    m1 = np.where(same_ab, 8 * b + c, 63 - 8 * b - c)
    m2 = np.where(same_ab, 8 * b + 7 - c, 56 - 8 * b + c)
    ns = np.stack([n1, n2, 63 - n2, 63 - n1])
    ms = np.stack([m1, m2, 63 - m2, 63 - m1])
    return ns, ms


def _lbsm_split_perm() -> np.ndarray:
    """CNOT layer on the middle pair: |G^6_(8a+c)> -> |G^3_a> x |a XOR c>."""
    m = np.arange(64)
    return ((m >> 3) << 3) | ((m >> 3) ^ (m & 7))


def _reference_povm() -> np.ndarray:
    """Diagonal of the reference readout (one even-parity X pattern, zeros in Z)."""
    diag = np.zeros(64)
    for a in range(4):
        diag[a << 3] = 0.25
    return diag


def build_swap_machinery(noise: NoiseParams) -> SwapMachinery:
    gate = identity_op(B_PAIR)
    for l in range(3):
        gate = _pair_depol(B_PAIR, l, 3 + l, noise.beta) @ gate
    gate = permutation_op(B_PAIR, _lbsm_split_perm(), out_basis=B_LBSM) @ gate
    for l in range(3):
        gate = mix_with_identity(pauli_z_op(B_LBSM, l), noise.delta) @ gate
        gate = mix_with_identity(pauli_x_op(B_LBSM, 3 + l), noise.delta) @ gate
    c = gate.matrix.T @ _reference_povm()

    ns, ms = _swap_index_tables()
    q_vectors = 0.25 * c[ms]
    if q_vectors.min() < 0.0 or q_vectors.max() > 0.25 + 1e-12:
        raise AssertionError("swap branch weights outside [0, 1/4]")
    n_maps = tuple(relabel_op(B_JOINT, B_PAIR, ns[k]) for k in range(4))

    tensor = np.zeros((64, 64, 64))
    held, fresh = np.arange(4096) >> 6, np.arange(4096) & 63
    for k in range(4):
        np.add.at(tensor, (ns[k], held, fresh), q_vectors[k])
    return SwapMachinery(
        q_vectors=q_vectors,
        n_maps=n_maps,
        accept_multiplicity=16,
        tensor=tensor,
        w_matrix=tensor.sum(axis=0),
    )


def apply_swap(
    mach: SwapMachinery, held: DiagonalState, fresh: DiagonalState
) -> tuple[DiagonalState, float]:
    """Swap conditioned on the reference readout; returns (state, p_ref)."""
    p_ref = float(held.weights @ mach.w_matrix @ fresh.weights)
    if p_ref <= 0.0:
        raise ValueError("reference outcome has zero probability")
    out = np.einsum("nij,i,j->n", mach.tensor, held.weights, fresh.weights)
    return DiagonalState(B_PAIR, out / p_ref), p_ref


def apply_swap_direct(
    mach: SwapMachinery, held: DiagonalState, fresh: DiagonalState
) -> tuple[DiagonalState, float]:
    """Same map evaluated on the full joint basis (slow; for cross-checking)."""
    joint = np.kron(held.weights, fresh.weights)
    p_ref = 0.0
    out = np.zeros(64)
    for k in range(4):
        weighted = mach.q_vectors[k] * joint
        p_ref += weighted.sum()
        out += mach.n_maps[k].matrix @ weighted
    return DiagonalState(B_PAIR, out / p_ref), float(p_ref)


def accept_probability(p_ref: float) -> float:
    return 16.0 * p_ref


def memory_op(gamma: float) -> TransferOperator:
    """Storage noise on the near (held) triple while the next link completes."""
    op = identity_op(B_PAIR)
    for q in (3, 4, 5):
        op = mix_with_identity(depol_op(B_PAIR, q), gamma) @ op
    return op


@lru_cache(maxsize=None)
def _decoder_rows(delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Row vectors r such that the error rate is r @ lambda_end."""
    patterns = np.arange(64)
    popcount = np.array([bin(v).count("1") for v in range(64)])

    flips_z = identity_op(B_PAIR)
    flips_x = identity_op(B_PAIR)
    for q in range(6):
        flips_z = mix_with_identity(pauli_x_op(B_PAIR, q), delta) @ flips_z
        flips_x = mix_with_identity(pauli_z_op(B_PAIR, q), delta) @ flips_x

    # Z readout: labels collapse to their branch pattern or its complement
    g_z = sp.csr_array(
        (
            np.full(128, 0.5),
            (
                np.concatenate([patterns, patterns ^ 63]),
                np.concatenate([patterns, patterns]),
            ),
        ),
        shape=(64, 64),
    )
    eps_z = ((popcount[patterns >> 3] >= 2) != (popcount[patterns & 7] >= 2)).astype(float)
    row_z = flips_z.matrix.T @ (g_z.T @ eps_z)

    # X readout: outcomes are uniform within the parity class fixed by the MSB
    parity = popcount & 1
    g_x = np.equal.outer(parity, patterns >> 5).astype(float) / 32.0
    eps_x = parity.astype(float)
    row_x = flips_x.matrix.T @ (g_x.T @ eps_x)
    return row_z, row_x


def decoder_error_rates(lambda_end: DiagonalState, delta: float) -> tuple[float, float]:
    """Key-bit and phase-check error rates of the delivered pair."""
    row_z, row_x = _decoder_rows(delta)
    w = lambda_end.weights
    return float(row_z @ w), float(row_x @ w)


def run_chain(
    nr: int, timing: TimingProfile, noise: NoiseParams, memory: bool = True
) -> ChainResult:
    for result in chain_scan(nr, timing, noise, memory=memory):
        pass
    return result


def chain_scan(
    nr_max: int, timing: TimingProfile, noise: NoiseParams, memory: bool = True
):
    """Yield the chain state after 0, 1, ..., nr_max swaps (one shared walk)."""
    if nr_max < 0:
        raise ValueError("need nr_max >= 0")
    lam0 = encode_link(timing, noise).lambda0
    mach = build_swap_machinery(noise)
    gamma = decoherence_prob(timing.tau_hop, noise.tcoh_s) if memory else 0.0
    mem_matrix = memory_op(gamma).matrix
    lam = lam0
    p_refs: list[float] = []
    accepts: list[float] = []
    p_end = 1.0
    for step in range(nr_max + 1):
        if step > 0:
            held = DiagonalState(B_PAIR, mem_matrix @ lam.weights)
            lam, p_ref = apply_swap(mach, held, lam0)
            p_refs.append(p_ref)
            accepts.append(accept_probability(p_ref))
            p_end *= accepts[-1]
        e_z, e_x = decoder_error_rates(lam, noise.delta)
        yield ChainResult(
            lambda_end=lam,
            p_refs=tuple(p_refs),
            accept_probs=tuple(accepts),
            p_end=p_end,
            e_z=e_z,
            e_x=e_x,
        )
