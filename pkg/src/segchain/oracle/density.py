"""Brute-force density-matrix oracle.

Simulates the literal circuits — noisy preparation, remote CNOTs with
communication qubits, swap CNOTs, flip-corrupted measurements — on full
2^n x 2^n density matrices (n <= 12) and only at the very end projects onto
the GHZ-class diagonal.  Everything here is written directly against the
circuit description, independently of the transfer-operator engines, so that
agreement between the two routes is meaningful evidence.

States are plain complex ndarrays.  Qubits are numbered 0..n-1 with qubit 0
the most significant index bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from ..ghz import GHZ, BasisLabel, DiagonalState, basis, ghz_amplitudes
from ..noise import NoiseParams, decoherence_prob
from ..timing import TimingProfile

# ---------------------------------------------------------------- primitives


def _nqubits(rho: np.ndarray) -> int:
    n = int(rho.shape[0]).bit_length() - 1
    if rho.shape != (1 << n, 1 << n):
        raise ValueError("not a square power-of-two matrix")
    return n


def _bit_values(n: int, qubit: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return (idx >> (n - 1 - qubit)) & 1


def permute_qubits(rho: np.ndarray, source: list[int]) -> np.ndarray:
    """Reorder qubits so that new qubit ``i`` is old qubit ``source[i]``."""
    n = _nqubits(rho)
    axes = list(source) + [n + q for q in source]
    return (
        rho.reshape((2,) * (2 * n)).transpose(axes).reshape(rho.shape)
    )


def ptrace(rho: np.ndarray, traced: list[int]) -> np.ndarray:
    """Trace out the listed qubits."""
    n = _nqubits(rho)
    traced_set = set(traced)
    keep = [q for q in range(n) if q not in traced_set]
    t = rho.reshape((2,) * (2 * n))
    row = list(range(n))
    col = [q if q in traced_set else n + q for q in range(n)]
    out = [q for q in keep] + [n + q for q in keep]
    k = len(keep)
    return np.einsum(t, row + col, out).reshape(1 << k, 1 << k)


def depolarize(rho: np.ndarray, qubits: list[int], p: float) -> np.ndarray:
    """(1 - p) rho + p * (replace the listed qubits by I/2^k)."""
    if p == 0.0 or not qubits:
        return rho
    n = _nqubits(rho)
    reduced = ptrace(rho, qubits)
    k = len(qubits)
    mixed = np.kron(reduced, np.eye(1 << k) / (1 << k))
    # mixed currently orders (kept..., traced...); map back to 0..n-1
    keep = [q for q in range(n) if q not in set(qubits)]
    order = keep + list(qubits)  # new position -> old qubit
    inverse = [0] * n
    for new_pos, old_q in enumerate(order):
        inverse[old_q] = new_pos
    mixed = permute_qubits(mixed, inverse)
    return (1.0 - p) * rho + p * mixed


def x_gate(rho: np.ndarray, qubit: int) -> np.ndarray:
    n = _nqubits(rho)
    perm = np.arange(1 << n) ^ (1 << (n - 1 - qubit))
    return rho[np.ix_(perm, perm)]


def z_gate(rho: np.ndarray, qubit: int) -> np.ndarray:
    n = _nqubits(rho)
    sign = 1.0 - 2.0 * _bit_values(n, qubit)
    return sign[:, None] * rho * sign[None, :]


def cnot_gate(rho: np.ndarray, control: int, target: int) -> np.ndarray:
    n = _nqubits(rho)
    perm = np.arange(1 << n) ^ (_bit_values(n, control) << (n - 1 - target))
    return rho[np.ix_(perm, perm)]


def cz_gate(rho: np.ndarray, q1: int, q2: int) -> np.ndarray:
    n = _nqubits(rho)
    sign = 1.0 - 2.0 * (_bit_values(n, q1) & _bit_values(n, q2))
    return sign[:, None] * rho * sign[None, :]


def h_gate(rho: np.ndarray, qubit: int) -> np.ndarray:
    n = _nqubits(rho)
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    left = 1 << qubit
    right = 1 << (n - 1 - qubit)
    t = rho.reshape(left, 2, right, left, 2, right)
    t = np.einsum("ab,LbRMcS->LaRMcS", h, t)
    t = np.einsum("LaRMcS,dc->LaRMdS", t, h)
    return t.reshape(rho.shape)


def flip_channel(rho: np.ndarray, qubit: int, kind: str, p: float) -> np.ndarray:
    if kind == "bit":
        flipped = x_gate(rho, qubit)
    elif kind == "phase":
        flipped = z_gate(rho, qubit)
    else:
        raise ValueError(f"unknown flip kind {kind!r}")
    return (1.0 - p) * rho + p * flipped


def noisy_cnot(
    rho: np.ndarray, control: int, target: int, beta: float, form: str = "post"
) -> np.ndarray:
    """Noisy CNOT in any of its three equivalent forms (they agree exactly)."""
    pair = [control, target]
    if form == "post":
        return depolarize(cnot_gate(rho, control, target), pair, beta)
    if form == "pre":
        return cnot_gate(depolarize(rho, pair, beta), control, target)
    if form == "mixture":
        ideal = cnot_gate(rho, control, target)
        return (1.0 - beta) * ideal + beta * depolarize(ideal, pair, 1.0)
    raise ValueError(f"unknown form {form!r}")


def measure_and_remove(
    rho: np.ndarray, qubit: int, meas_basis: str, outcome: int, flip_p: float
) -> tuple[np.ndarray, float]:
    """Faulty single-qubit readout: POVM (1-p)|o><o| + p|1-o><1-o|, then discard.

    Returns the unnormalized reduced state and the outcome probability.
    """
    if meas_basis == "x":
        rho = h_gate(rho, qubit)
    elif meas_basis != "z":
        raise ValueError(f"unknown measurement basis {meas_basis!r}")
    n = _nqubits(rho)
    left = 1 << qubit
    right = 1 << (n - 1 - qubit)
    t = rho.reshape(left, 2, right, left, 2, right)
    w = np.array([1.0 - flip_p, flip_p]) if outcome == 0 else np.array([flip_p, 1.0 - flip_p])
    reduced = w[0] * t[:, 0, :, :, 0, :] + w[1] * t[:, 1, :, :, 1, :]
    reduced = reduced.reshape(rho.shape[0] // 2, rho.shape[0] // 2)
    return reduced, float(np.trace(reduced).real)


def channel_apply(rho: np.ndarray, channel: tuple) -> np.ndarray:
    """Apply a channel given as a tagged tuple (thin dispatch wrapper)."""
    tag, *args = channel
    table = {
        "x": x_gate,
        "z": z_gate,
        "h": h_gate,
        "cnot": cnot_gate,
        "cz": cz_gate,
        "depol": depolarize,
        "flip": flip_channel,
        "noisy_cnot": noisy_cnot,
    }
    try:
        fn = table[tag]
    except KeyError:
        raise ValueError(f"unknown channel {tag!r}") from None
    return fn(rho, *args)


# ------------------------------------------------------- diagonal projection


def ghz_basis_unitary(b: BasisLabel) -> np.ndarray:
    """Unitary whose columns are the basis states of ``b``."""
    mats = []
    for f in b.factors:
        if f.kind == "comp":
            mats.append(np.eye(f.dim, dtype=np.complex128))
        else:
            cols = [ghz_amplitudes(s, f.nqubits) for s in range(f.dim)]
            mats.append(np.stack(cols, axis=1))
    return reduce(np.kron, mats)


def project_to_diagonal(rho: np.ndarray, b: BasisLabel) -> tuple[DiagonalState, float]:
    """Weights of rho in basis ``b`` plus the Frobenius mass left off-diagonal."""
    u = ghz_basis_unitary(b)
    sigma = u.conj().T @ rho @ u
    weights = np.clip(sigma.diagonal().real, 0.0, None)
    off = sigma - np.diag(sigma.diagonal())
    return DiagonalState(b, weights), float(np.linalg.norm(off))


# ------------------------------------------------------------ state builders


def ket_dm(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.complex128)
    return np.outer(vec, vec.conj())


def werner_dm(f: float) -> np.ndarray:
    rest = (1.0 - f) / 3.0
    weights = [f, rest, rest, rest]
    return sum(w * ket_dm(ghz_amplitudes(s, 2)) for s, w in enumerate(weights))


def plus_logical_dm(beta: float) -> np.ndarray:
    """Noisy |+++...> -> GHZ preparation: |+00>, then two noisy CNOTs from qubit 0."""
    psi = np.zeros(8, dtype=np.complex128)
    psi[0] = psi[4] = 1.0 / np.sqrt(2.0)
    rho = ket_dm(psi)
    rho = noisy_cnot(rho, 0, 1, beta)
    rho = noisy_cnot(rho, 0, 2, beta)
    return rho


# ------------------------------------------------------------------ encoding

# 12-qubit layout during encoding: data A1 A2 A3 B1 B2 B3 = 0..5, then the
# communication pair of row j on qubits (a_j, b_j) = (6 + 2(j-1), 7 + 2(j-1)),
# with a_j held next to A_j's node and b_j next to B_j's.


def simulate_encoding(timing: TimingProfile, noise: NoiseParams) -> np.ndarray:
    """End-to-end encoded-link preparation; returns the 6-qubit data state."""
    f1, f2, f3 = timing.pair_fidelities
    zero3 = np.zeros((8, 8), dtype=np.complex128)
    zero3[0, 0] = 1.0
    rho = reduce(
        np.kron,
        [plus_logical_dm(noise.beta), zero3, werner_dm(f1), werner_dm(f2), werner_dm(f3)],
    )
    # interleave: current order is A1A2A3 B1B2B3 a1b1 a2b2 a3b3 -- already the layout
    for j in range(3):
        a_j, b_j = 6 + 2 * j, 7 + 2 * j
        rho = noisy_cnot(rho, 0 + j, a_j, noise.beta)  # A_j -> a_j
        rho = noisy_cnot(rho, b_j, 3 + j, noise.beta)  # b_j -> B_j
    for j in range(3):
        a_j, b_j = 6 + 2 * j, 7 + 2 * j
        # Z-readout of a_j with flip rate delta, X correction on B_j (deferred)
        rho = flip_channel(rho, a_j, "bit", noise.delta)
        rho = cnot_gate(rho, a_j, 3 + j)
        # X-readout of b_j with flip rate delta, Z correction on A_j (deferred)
        rho = flip_channel(rho, b_j, "phase", noise.delta)
        rho = h_gate(rho, b_j)
        rho = cz_gate(rho, b_j, 0 + j)
    return ptrace(rho, list(range(6, 12)))


# ---------------------------------------------------------------------- swap


@dataclass
class SwapSim:
    """Joint outcome distribution of one encoded swap.

    ``probs[u, t]`` is the probability of X-readout pattern ``u`` (on the
    stored triple) and Z-readout pattern ``t`` (on the fresh triple);
    ``post[u, t]`` is the matching unnormalized 6-qubit state of the surviving
    (far, fresh-far) qubits.
    """

    probs: np.ndarray
    post: np.ndarray

    def accepted_total(self) -> float:
        return float(self.probs[:, 0].sum() + self.probs[:, 7].sum())


def simulate_swap(rho_mem: np.ndarray, rho_fresh: np.ndarray, noise: NoiseParams) -> SwapSim:
    """One swap round: CNOTs between the two stored triples, faulty readout.

    Layout: A = qubits 0-2 (far end of the held state), B = 3-5 (its near
    end), C = 6-8 (near end of the fresh link), D = 9-11 (its far end).
    B is read out in X, C in Z.
    """
    rho = np.kron(rho_mem, rho_fresh)
    for l in range(3):
        rho = noisy_cnot(rho, 3 + l, 6 + l, noise.beta)
    for l in range(3):
        rho = flip_channel(rho, 3 + l, "phase", noise.delta)
        rho = flip_channel(rho, 6 + l, "bit", noise.delta)
    for l in range(3):
        rho = h_gate(rho, 3 + l)
    t8 = rho.reshape((8,) * 8)
    post = np.einsum("abcdxbcy->bcadxy", t8)
    probs = np.einsum("utadad->ut", post).real.copy()
    return SwapSim(probs=probs, post=post.reshape(8, 8, 64, 64).copy())


def swap_correction(rho64: np.ndarray, u: int, t: int) -> np.ndarray:
    """Recovery applied to (A, D) for accepted outcomes (t in {0, 7})."""
    if t == 7:
        for q in (3, 4, 5):
            rho64 = x_gate(rho64, q)
    elif t != 0:
        raise ValueError("correction defined only for accepted patterns")
    if (bin(u).count("1") & 1) == 1:
        rho64 = z_gate(rho64, 3)
    return rho64


def readout_error_rates(rho64: np.ndarray, delta: float) -> tuple[float, float]:
    """Final-key error rates from the end-to-end 6-qubit state.

    e_Z: all qubits read in Z (flip rate delta), majority vote per side,
    sides compared.  e_X: all qubits read in X, parities compared.
    """
    rho_z = rho64
    rho_x = rho64
    for q in range(6):
        rho_z = flip_channel(rho_z, q, "bit", delta)
        rho_x = flip_channel(rho_x, q, "phase", delta)
    for q in range(6):
        rho_x = h_gate(rho_x, q)
    pz = rho_z.diagonal().real
    px = rho_x.diagonal().real
    patterns = np.arange(64)
    maj = lambda trip: (np.bitwise_count(trip) >= 2).astype(int)  # noqa: E731
    mismatch_z = maj(patterns >> 3) != maj(patterns & 7)
    mismatch_x = (np.bitwise_count(patterns) & 1) == 1
    return float(pz[mismatch_z].sum()), float(px[mismatch_x].sum())


@dataclass
class OracleChain:
    p_refs: list[float]
    rho_end: np.ndarray
    weights: DiagonalState
    off_diagonal_mass: float
    e_z: float
    e_x: float


def oracle_chain(
    nr: int, timing: TimingProfile, noise: NoiseParams, memory: bool = True
) -> OracleChain:
    """Reference-outcome chain of ``nr`` swaps over ``nr + 1`` encoded links."""
    rho0 = simulate_encoding(timing, noise)
    gamma = decoherence_prob(timing.tau_hop, noise.tcoh_s) if memory else 0.0
    rho = rho0
    p_refs = []
    for _ in range(nr):
        rho_mem = rho
        for q in (3, 4, 5):
            rho_mem = depolarize(rho_mem, [q], gamma)
        sim = simulate_swap(rho_mem, rho0, noise)
        p_ref = float(sim.probs[0, 0])
        p_refs.append(p_ref)
        rho = sim.post[0, 0] / p_ref
    weights, off = project_to_diagonal(rho, basis(GHZ(6)))
    e_z, e_x = readout_error_rates(rho, noise.delta)
    return OracleChain(p_refs, rho, weights, off, e_z, e_x)


# --------------------------------------------------- unencoded (Bell) oracle


def simulate_swap_unencoded(
    rho_mem: np.ndarray, rho_fresh: np.ndarray, noise: NoiseParams
) -> tuple[np.ndarray, np.ndarray]:
    """Plain Bell swap on 4 qubits (A, B, C, D); returns (probs, posts).

    probs[u, t] for B read in X and C in Z; posts[u, t] the unnormalized
    2-qubit (A, D) states.
    """
    rho = np.kron(rho_mem, rho_fresh)
    rho = noisy_cnot(rho, 1, 2, noise.beta)
    rho = flip_channel(rho, 1, "phase", noise.delta)
    rho = flip_channel(rho, 2, "bit", noise.delta)
    rho = h_gate(rho, 1)
    t4 = rho.reshape((2,) * 8)
    post = np.einsum("abcdxbcy->bcadxy", t4)
    probs = np.einsum("utadad->ut", post).real.copy()
    return probs, post.reshape(2, 2, 4, 4).copy()


def oracle_noed_chain(nr: int, tau_hop: float, noise: NoiseParams) -> np.ndarray:
    """Bell-level chain, all outcomes kept and corrected; returns final 2-qubit state."""
    rho0 = werner_dm(noise.f0)
    gamma = decoherence_prob(tau_hop, noise.tcoh_s)
    rho = rho0
    for _ in range(nr):
        rho_mem = depolarize(rho, [1], gamma)
        _, posts = simulate_swap_unencoded(rho_mem, rho0, noise)
        out = np.zeros((4, 4), dtype=np.complex128)
        for u in range(2):
            for t in range(2):
                corrected = posts[u, t]
                if t == 1:
                    corrected = x_gate(corrected, 1)
                if u == 1:
                    corrected = z_gate(corrected, 1)
                out += corrected
        rho = out
    return rho
