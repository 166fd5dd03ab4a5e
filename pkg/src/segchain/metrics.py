"""Headline quantities: secret fraction, rates, cost, benchmark, searches.

Distances are quantized: a chain with Nr swap stations spans L = (Nr + 1) L0,
so sweeps walk integer Nr and report the exact L they realize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .alt import run_scheme, scan_scheme
from .params import HardwareParams, SchemeId

PLOB_ALPHA_DB_KM = 0.1
PLOB_CLOCK_HZ = 1.0e9


@dataclass(frozen=True)
class PerformanceReport:
    scheme: SchemeId
    l0_km: float
    nr: int
    l_km: float
    e_z: float
    e_x: float
    r_inf: float
    r_bit_hz: float
    k_hz: float
    c_k: float
    p_end: float


def binary_entropy(p: float) -> float:
    """h(p) in bits; h(0) = h(1) = 0 by continuity.

    >>> binary_entropy(0.5)
    1.0
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def secret_fraction(e_z: float, e_x: float) -> float:
    return max(0.0, 1.0 - binary_entropy(e_z) - binary_entropy(e_x))


def raw_rate(p_end: float, tau_hop: float) -> float:
    if tau_hop <= 0.0:
        raise ValueError("hop period must be positive")
    return p_end / tau_hop


def secret_key_rate(r_bit_hz: float, r_inf: float) -> float:
    return r_bit_hz * r_inf


def normalized_cost(k_hz: float, nmux: int, accept_probs: Sequence[float]) -> float:
    """Average qubits occupied per secret bit per second, abort-credited.

    All 4 Nmux qubits of a hop stay blocked while rounds that survived the
    first i-1 checks are still in flight; surviving probability products
    weight those stretches.
    """
    if k_hz < 0.0:
        raise ValueError("negative rate")
    if k_hz == 0.0:
        return math.inf
    bracket = 2.0
    running = 1.0
    for p_i in accept_probs[:-1]:
        running *= p_i
        bracket += running
    return 4.0 * nmux / k_hz * bracket


def plob_bound(l_km: float, alpha_db_km: float = PLOB_ALPHA_DB_KM,
               clock_hz: float = PLOB_CLOCK_HZ) -> float:
    """Repeaterless benchmark, clock * (-log2(1 - eta)); infinite at L = 0."""
    if l_km < 0.0:
        raise ValueError("negative distance")
    if l_km == 0.0:
        return math.inf
    eta = 10.0 ** (-alpha_db_km * l_km / 10.0)
    # log1p keeps the far tail alive where 1 - eta would round to 1.0
    return clock_hz * (-math.log1p(-eta) / math.log(2.0))


def build_report(
    scheme: SchemeId, hw: HardwareParams, l0_km: float, nr: int, nmux: int
) -> PerformanceReport:
    result, timing = run_scheme(scheme, hw, l0_km, nr, nmux)
    return _report_from(scheme, l0_km, nr, nmux, result, timing.tau_hop)


def _report_from(scheme, l0_km, nr, nmux, result, tau_hop) -> PerformanceReport:
    r_inf = secret_fraction(result.e_z, result.e_x)
    r_bit = raw_rate(result.p_end, tau_hop)
    k = secret_key_rate(r_bit, r_inf)
    return PerformanceReport(
        scheme=scheme,
        l0_km=l0_km,
        nr=nr,
        l_km=(nr + 1) * l0_km,
        e_z=result.e_z,
        e_x=result.e_x,
        r_inf=r_inf,
        r_bit_hz=r_bit,
        k_hz=k,
        c_k=normalized_cost(k, nmux, result.accept_probs),
        p_end=result.p_end,
    )


def scan_reports(
    scheme: SchemeId, hw: HardwareParams, l0_km: float, nr_max: int, nmux: int
) -> Iterable[PerformanceReport]:
    for nr, result, timing in scan_scheme(scheme, hw, l0_km, nr_max, nmux):
        yield _report_from(scheme, l0_km, nr, nmux, result, timing.tau_hop)


@dataclass(frozen=True)
class RangeResult:
    range_km: float
    nr: int
    unbounded: bool


def max_range(
    scheme: SchemeId,
    hw: HardwareParams,
    l0_km: float,
    nmux: int = 12,
    l_cap_km: float = 50_000.0,
) -> RangeResult:
    """Largest L = (Nr + 1) L0 with positive secret fraction.

    Walks Nr upward; requires three consecutive dead points before giving up
    (the fraction should be monotone, this guards marginal numerics), and
    caps the scan at ``l_cap_km``.
    """
    nr_cap = max(1, int(math.ceil(l_cap_km / l0_km)) - 1)
    best_nr = 0
    dead_streak = 0
    for report in scan_reports(scheme, hw, l0_km, nr_cap, nmux):
        if report.r_inf > 0.0:
            best_nr = report.nr
            dead_streak = 0
        else:
            dead_streak += 1
            if dead_streak >= 3:
                break
    else:
        if best_nr == nr_cap:
            return RangeResult((nr_cap + 1) * l0_km, nr_cap, True)
    if best_nr == 0:
        return RangeResult(0.0, 0, False)
    return RangeResult((best_nr + 1) * l0_km, best_nr, False)


def optimize_hop_length(
    scheme: SchemeId,
    hw: HardwareParams,
    objective: str,
    grid: Sequence[float],
    l_target_km: float | None = None,
    nmux: int = 12,
) -> tuple[float, float]:
    """Grid argmax of range or of SKR at a target distance; ties favor small L0."""
    if not grid:
        raise ValueError("empty hop-length grid")
    best: tuple[float, float] | None = None
    for l0 in grid:
        if objective == "range":
            value = max_range(scheme, hw, l0, nmux=nmux).range_km
        elif objective == "skr_at_L":
            if l_target_km is None:
                raise ValueError("skr_at_L objective needs a target distance")
            nr = max(1, round(l_target_km / l0) - 1)
            value = build_report(scheme, hw, l0, nr, nmux).k_hz
        else:
            raise ValueError(f"unknown objective {objective!r}")
        if best is None or value > best[1]:
            best = (l0, value)
    if best[1] <= 0.0:
        raise ValueError("no feasible hop length: objective vanished on the whole grid")
    return best
