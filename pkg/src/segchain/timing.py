"""Link-level entanglement generation: success statistics and waiting times.

Each elementary link runs ``nmux`` heralded channels in parallel; one round
(duration ``2 L0 / c``: photon flight plus heralding signal) succeeds per
channel with probability ``p_gen``.  ``N_j`` is the number of rounds until
the j-th distinct channel has succeeded.  The first ``ncode`` completed pairs
are kept, ordered by completion; a pair finished in round ``N_j`` then idles
for ``tau_hop - g_j`` until the last needed pair arrives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .noise import NoiseParams, decoherence_prob


@dataclass(frozen=True)
class LinkParams:
    p_cou: float
    eta_d: float
    alpha_db_km: float
    l0_km: float
    c_km_s: float
    nmux: int
    ncode: int

    def __post_init__(self) -> None:
        if self.l0_km <= 0.0:
            raise ValueError("hop length must be positive")
        if not 1 <= self.ncode <= self.nmux:
            raise ValueError("need 1 <= ncode <= nmux")


@dataclass(frozen=True)
class TimingProfile:
    """Mean completion times g_j, hop time, and decohered pair fidelities."""

    g_times: tuple[float, ...]
    tau_hop: float
    pair_fidelities: tuple[float, ...]


def p_gen(params: LinkParams) -> float:
    """Per-round, per-channel success probability of one heralded attempt."""
    transmittance = 10.0 ** (-params.alpha_db_km * params.l0_km / 10.0)
    return params.p_cou**2 * (params.eta_d**2 / 2.0) * transmittance


def attempts_cdf(k: int, j: int, nmux: int, p: float) -> float:
    """P(N_j <= k): at least j of nmux channels succeed within k rounds.

    >>> attempts_cdf(2, 2, 2, 0.5)
    0.5625
    """
    if k < 0 or not 1 <= j <= nmux:
        raise ValueError("bad attempt-count arguments")
    if not 0.0 < p <= 1.0:
        raise ValueError("p outside (0, 1]")
    # per-channel success within k rounds, computed in log space for tails
    q_k = -math.expm1(k * math.log1p(-p)) if p < 1.0 else 1.0
    return float(binom.sf(j - 1, nmux, q_k))


def expected_attempts(j: int, nmux: int, p: float) -> float:
    """Mean number of rounds E{N_j} until the j-th channel success.

    Summing the tail P(N_j > k) over k and expanding (1 - q^k)^i binomially
    gives a finite inclusion-exclusion form in the per-round failure q = 1 - p:

        E{N_j} = sum_{i<j} C(nmux, i) sum_{l<=i} C(i, l) (-1)^l / (1 - q^(nmux-i+l))

    >>> expected_attempts(2, 2, 0.5)  # 8/3
    2.666666666666667
    """
    if not 1 <= j <= nmux:
        raise ValueError("need 1 <= j <= nmux")
    if not 0.0 < p <= 1.0:
        raise ValueError("p outside (0, 1]")
    q = 1.0 - p
    terms = []
    for i in range(j):
        for lo in range(i + 1):
            sign = -1.0 if lo % 2 else 1.0
            coeff = math.comb(nmux, i) * math.comb(i, lo)
            terms.append(sign * coeff / -math.expm1((nmux - i + lo) * math.log1p(-p)))
    return math.fsum(terms)


def sample_attempt_rounds(
    rng: np.random.Generator, nmux: int, p: float, n: int
) -> np.ndarray:
    """Draw ``n`` independent tables of per-channel success rounds, sorted.

    Returns an (n, nmux) integer array whose column j-1 is a sample of N_j.
    """
    rounds = rng.geometric(p, size=(n, nmux))
    rounds.sort(axis=1)
    return rounds


def timing_profile(params: LinkParams, noise: NoiseParams) -> TimingProfile:
    """Mean waiting times and the fidelities of the kept pairs at hop end."""
    p = p_gen(params)
    # each round costs 2 L0 / c; the trailing + 1 half-round delivers the herald
    g = tuple(
        (2.0 * expected_attempts(j, params.nmux, p) + 1.0)
        * params.l0_km
        / params.c_km_s
        for j in range(1, params.ncode + 1)
    )
    tau_hop = g[-1]
    fids = []
    for gj in g:
        gamma = decoherence_prob(tau_hop - gj, noise.tcoh_s)
        keep = (1.0 - gamma) ** 2
        fids.append(keep * noise.f0 + (1.0 - keep) / 4.0)
    return TimingProfile(g_times=g, tau_hop=tau_hop, pair_fidelities=tuple(fids))
