"""Self-checks wiring the analytic engine to its oracles.

Two levels.  "fast" exercises operator-level identities and single-config
oracle comparisons (seconds).  "full" adds exact-chain equivalence over every
hardware stage, seeded million-trajectory statistics, Monte-Carlo timing
checks, and the noise-monotonicity grid (minutes).  Every check yields one
CheckResult; the CLI renders them as ``CHECK <name> PASS|FAIL dev= tol=``
lines and maps any failure to a nonzero exit code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import engine
from .alt import qkd_error_vectors, run_scheme, scan_scheme, seg_prob_werner
from .engine import (
    B_PAIR,
    apply_swap,
    apply_swap_direct,
    build_swap_machinery,
    encode_link,
    memory_op,
    run_chain,
)
from .ghz import DiagonalState, ghz_amplitudes
from .noise import NoiseParams, decoherence_prob, werner_vector
from .oracle import density, trajectories
from .params import HardwareParams, SchemeId, load_stage
from .timing import (
    attempts_cdf,
    expected_attempts,
    p_gen,
    sample_attempt_rounds,
    timing_profile,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


def format_report(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        verdict = "PASS" if r.passed else "FAIL"
        line = f"CHECK {r.name} {verdict} dev={r.deviation:.6g} tol={r.tolerance:.6g}"
        if r.note:
            line += f"  # {r.note}"
        lines.append(line)
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)


def run_validation(level: str = "fast", seed: int = 0) -> list[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"unknown validation level {level!r}")
    results = fast_checks()
    if level == "full":
        results += full_checks(seed)
    return results


# --- fast: operator identities and one-config oracle comparisons ---


def fast_checks() -> list[CheckResult]:
    checks = [
        _check_basis_unitarity(),
        _check_decomposition_identity(),
        _check_swap_tables_cross_impl(),
        _check_ideal_swap(),
        _check_operator_stochasticity(),
        _check_chain_normalization(),
        _check_encode_oracle(),
        _check_swap_oracle(),
        _check_swap_direct_route(),
        _check_timing_consistency(),
        _check_timing_examples(),
        _check_noed_direct_example(),
        _check_segprob_closed_form(),
    ]
    checks += _check_noiseless_fixed_points()
    return checks


def _ghz6_matrix() -> np.ndarray:
    # GHZ amplitudes are real; drop the complex dtype for the overlap algebra
    return np.stack([ghz_amplitudes(s, 6) for s in range(64)], axis=1).real


def _check_basis_unitarity() -> CheckResult:
    b6 = _ghz6_matrix()
    dev = float(np.max(np.abs(b6.T @ b6 - np.eye(64))))
    return CheckResult("ghz-basis-unitarity", dev, 1e-12)


def _check_decomposition_identity() -> CheckResult:
    """Amplitude-level regrouping behind the swap branch tables.

    For every pair of labels (held, fresh) the product state over qubits
    (A,B,C,D), written as a 64 x 64 matrix over the (A,D) x (B,C) split and
    expanded in the 6-qubit bases on both sides, must have magnitude 1/2
    exactly at the four tabulated (n_k, m_k) entries and vanish elsewhere.
    """
    b6 = _ghz6_matrix()
    ns, ms = engine._swap_index_tables()
    worst = 0.0
    for held in range(64):
        ab = b6[:, held].reshape(8, 8)
        for fresh in range(64):
            cd = b6[:, fresh].reshape(8, 8)
            l_mat = np.einsum("ab,cd->adbc", ab, cd).reshape(64, 64)
            t = b6.T @ l_mat @ b6
            s = (held << 6) | fresh
            branch = np.zeros((64, 64), dtype=bool)
            branch[ns[:, s], ms[:, s]] = True
            worst = max(
                worst,
                float(np.max(np.abs(np.abs(t[branch]) - 0.5))),
                float(np.max(np.abs(t[~branch]))),
                abs(float(np.sum(t * t)) - 1.0),
            )
    return CheckResult("swap-decomposition-identity", worst, 1e-12,
                       note="all 4096 label pairs")


def _check_swap_tables_cross_impl() -> CheckResult:
    ns_e, ms_e = engine._swap_index_tables()
    ns_t, ms_t = trajectories._swap_tables()
    mismatches = int(np.sum(ns_e != ns_t) + np.sum(ms_e != ms_t))
    return CheckResult("swap-tables-cross-impl", float(mismatches), 0.0)


def _check_ideal_swap() -> CheckResult:
    quiet = NoiseParams(f0=1.0, beta=0.0, delta=0.0, tcoh_s=math.inf)
    mach = build_swap_machinery(quiet)
    pure = DiagonalState(B_PAIR, np.eye(64)[0])
    post, p_ref = apply_swap(mach, pure, pure)
    dev = abs(p_ref - 0.0625) + float(np.max(np.abs(post.weights - np.eye(64)[0])))

    b6 = _ghz6_matrix()
    rho0 = density.ket_dm(b6[:, 0].astype(complex))
    sim = density.simulate_swap(rho0, rho0, quiet)
    keep = np.zeros((8, 8), dtype=bool)
    keep[:, 0] = keep[:, 7] = True
    dev = max(dev, float(np.max(sim.probs[~keep])))
    return CheckResult("ideal-swap-reference", dev, 1e-15,
                       note="p_ref=1/16 and the 48 rejected patterns stay empty")


def _check_operator_stochasticity() -> CheckResult:
    dev = 0.0
    for gamma in (0.0, 0.3, 1.0):
        sums = np.asarray(memory_op(gamma).matrix.sum(axis=0)).ravel()
        dev = max(dev, float(np.max(np.abs(sums - 1.0))))
    hw = load_stage(2)
    noise = hw.noise()
    timing = timing_profile(hw.link(50.0, 3), noise)
    dev = max(dev, abs(encode_link(timing, noise).lambda0.total - 1.0))
    return CheckResult("operator-stochasticity", dev, 1e-12)


def _check_chain_normalization() -> CheckResult:
    hw = load_stage(2)
    noise = hw.noise()
    timing = timing_profile(hw.link(50.0, 3), noise)
    dev = 0.0
    for res in engine.chain_scan(4, timing, noise):
        dev = max(dev, abs(res.lambda_end.total - 1.0))
    return CheckResult("chain-normalization", dev, 1e-12)


def _check_encode_oracle() -> CheckResult:
    hw = load_stage(2)
    noise = hw.noise()
    timing = timing_profile(hw.link(50.0, 3), noise)
    lam = encode_link(timing, noise).lambda0
    rho = density.simulate_encoding(timing, noise)
    diag, off = density.project_to_diagonal(rho, B_PAIR)
    dev = max(float(np.max(np.abs(lam.weights - diag.weights))), off)
    return CheckResult("encode-oracle-equivalence", dev, 1e-10)


def _check_swap_oracle() -> CheckResult:
    hw = load_stage(2)
    noise = hw.noise()
    timing = timing_profile(hw.link(50.0, 3), noise)
    gamma = decoherence_prob(timing.tau_hop, noise.tcoh_s)
    lam0 = encode_link(timing, noise).lambda0
    held = engine.apply(memory_op(gamma), lam0)
    post, p_ref = apply_swap(build_swap_machinery(noise), held, lam0)

    rho0 = density.simulate_encoding(timing, noise)
    rho_held = rho0
    for q in (3, 4, 5):
        rho_held = density.depolarize(rho_held, [q], gamma)
    sim = density.simulate_swap(rho_held, rho0, noise)
    p_ref_o = float(sim.probs[0, 0])
    diag, off = density.project_to_diagonal(sim.post[0, 0] / p_ref_o, B_PAIR)
    dev = max(
        abs(p_ref - p_ref_o),
        float(np.max(np.abs(post.weights - diag.weights))),
        off,
        abs(16.0 * p_ref - sim.accepted_total()),
    )
    return CheckResult("swap-oracle-equivalence", dev, 1e-10)


def _check_swap_direct_route() -> CheckResult:
    mach = build_swap_machinery(load_stage(1).noise())
    rng = np.random.default_rng(7)
    dev = 0.0
    for _ in range(3):
        held = DiagonalState(B_PAIR, rng.dirichlet(np.ones(64)))
        fresh = DiagonalState(B_PAIR, rng.dirichlet(np.ones(64)))
        post_t, p_t = apply_swap(mach, held, fresh)
        post_d, p_d = apply_swap_direct(mach, held, fresh)
        dev = max(dev, abs(p_t - p_d), float(np.max(np.abs(post_t.weights - post_d.weights))))
    return CheckResult("swap-tensor-vs-direct", dev, 1e-12)


def _check_timing_consistency() -> CheckResult:
    dev = 0.0
    for nmux, j in ((1, 1), (2, 2), (12, 2), (12, 3), (12, 12), (5, 3)):
        for p in (0.01, 0.1, 0.5):
            total, k = 0.0, 0
            while True:
                tail = 1.0 - attempts_cdf(k, j, nmux, p)
                total += tail
                k += 1
                if tail < 1e-15:
                    break
            e = expected_attempts(j, nmux, p)
            dev = max(dev, abs(e - total) / max(1.0, abs(e)))
    return CheckResult("attempts-cdf-consistency", dev, 1e-9,
                       note="E{N_j} equals the CDF tail sum")


def _check_timing_examples() -> CheckResult:
    dev = max(
        abs(attempts_cdf(2, 2, 2, 0.5) - 0.5625),
        abs(expected_attempts(2, 2, 0.5) - 8.0 / 3.0),
        abs(expected_attempts(1, 1, 0.5) - 2.0),
    )
    return CheckResult("timing-frozen-examples", dev, 1e-12)


def _check_noed_direct_example() -> CheckResult:
    v_z, _ = qkd_error_vectors(0.01)
    e_z = float(v_z @ werner_vector(0.9).weights)
    return CheckResult("noed-error-vector-example", abs(e_z - 0.08382666666666665), 1e-12)


def _check_segprob_closed_form() -> CheckResult:
    hw = load_stage(2)
    noise = hw.noise()
    timing = timing_profile(hw.link(50.0, 1), noise)
    nr = 3
    w_end, w_naive = seg_prob_werner(nr, timing, noise)
    w0 = (4.0 * hw.f0 - 1.0) / 3.0
    closed = w0 ** (nr + 1) * math.exp(-timing.tau_hop / hw.tcoh_s) ** nr
    return CheckResult(
        "segprob-werner-closed-form",
        abs(w_end - closed),
        1e-12,
        note=f"recursion={w_end:.9g}, dropped-link form would give {w_naive:.9g}",
    )


def _check_noiseless_fixed_points() -> list[CheckResult]:
    quiet = HardwareParams(p_cou=1.0, eta_d=1.0, alpha_db_km=0.0, f0=1.0,
                           beta=0.0, delta=0.0, tcoh_s=math.inf)
    out = []
    for scheme in SchemeId:
        res, _ = run_scheme(scheme, quiet, 50.0, 3, 12)
        p_target = 0.5**3 if scheme is SchemeId.SEG_PROB else 1.0
        dev = max(abs(res.e_z), abs(res.e_x), abs(res.p_end - p_target))
        note = "p_end=(eta_d^2/2)^Nr: the 1/2 is the optical-BSM bound, not noise" \
            if scheme is SchemeId.SEG_PROB else ""
        out.append(CheckResult(f"noiseless-fixed-point-{scheme.value}", dev, 1e-12, note))
    return out


# --- full: exact-chain equivalence, trajectories, Monte-Carlo timing ---


def full_checks(seed: int = 0) -> list[CheckResult]:
    checks = [_check_oracle_chains(), _check_noed_oracle()]
    checks += _check_trajectory_stats(seed)
    checks.append(_check_timing_mc(seed))
    checks.append(_check_lleg_profile_mc(seed))
    checks.append(_check_monotonicity_grid())
    return checks


def _check_oracle_chains() -> CheckResult:
    worst = 0.0
    for stage in (1, 2, 3):
        hw = load_stage(stage)
        noise = hw.noise()
        for l0 in (25.0, 50.0, 100.0):
            timing = timing_profile(hw.link(l0, 3), noise)
            lam0 = encode_link(timing, noise).lambda0
            rho0 = density.simulate_encoding(timing, noise)
            diag0, off0 = density.project_to_diagonal(rho0, B_PAIR)
            worst = max(worst, float(np.max(np.abs(lam0.weights - diag0.weights))), off0)
            for nr in (1, 2):
                res = run_chain(nr, timing, noise)
                orc = density.oracle_chain(nr, timing, noise)
                worst = max(
                    worst,
                    float(np.max(np.abs(res.lambda_end.weights - orc.weights.weights))),
                    orc.off_diagonal_mass,
                    max(abs(a - b) for a, b in zip(res.p_refs, orc.p_refs)),
                    max(abs(p - 16.0 * r) for p, r in zip(res.accept_probs, orc.p_refs)),
                    abs(res.e_z - orc.e_z),
                    abs(res.e_x - orc.e_x),
                )
    return CheckResult("oracle-chain-equivalence", worst, 1e-10,
                       note="stages 1-3, L0 in {25,50,100} km, Nr in {1,2}")


def _check_noed_oracle() -> CheckResult:
    hw = load_stage(1)
    noise = hw.noise()
    timing = timing_profile(hw.link(50.0, 1), noise)
    res, _ = run_scheme(SchemeId.SEG_NOED, hw, 50.0, 2, 12)
    rho = density.oracle_noed_chain(2, timing.tau_hop, noise)
    bell = np.stack([ghz_amplitudes(s, 2) for s in range(4)], axis=1)
    diag = np.real(np.diag(bell.T @ rho @ bell))
    v_z, v_x = qkd_error_vectors(noise.delta)
    dev = max(
        float(np.max(np.abs(res.lambda_end.weights - diag))),
        abs(res.e_z - float(v_z @ diag)),
        abs(res.e_x - float(v_x @ diag)),
    )
    return CheckResult("noed-oracle-equivalence", dev, 1e-10)


def _check_trajectory_stats(seed: int) -> list[CheckResult]:
    out = []
    hw = load_stage(2)
    for scheme in SchemeId:
        cfg = trajectories.TrajectoryConfig(hw=hw, l0_km=50.0, nr=2)
        stats = trajectories.run_trajectories(scheme, cfg, 1_000_000, seed=seed + 17)
        res, _ = run_scheme(scheme, hw, 50.0, 2, 12)
        sig = max(
            abs(stats.p_end - res.p_end) / stats.p_end_se,
            abs(stats.e_z - res.e_z) / stats.e_z_se,
            abs(stats.e_x - res.e_x) / stats.e_x_se,
        )
        out.append(CheckResult(f"trajectory-stats-{scheme.value}", sig, 3.0,
                               note="max sigma distance over p_end, e_Z, e_X at 1e6 samples"))
    return out


def _check_timing_mc(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed + 101)
    dev = 0.0
    for nmux, j in ((1, 1), (2, 2), (12, 3)):
        for p in (0.01, 0.1, 0.5):
            table = sample_attempt_rounds(rng, nmux, p, 1_000_000)
            mc = float(table[:, j - 1].mean())
            dev = max(dev, abs(expected_attempts(j, nmux, p) - mc) / mc)
    return CheckResult("expected-attempts-mc", dev, 0.01,
                       note="nine (Nmux, j, p) triples at 1e6 samples")


def _check_lleg_profile_mc(seed: int) -> CheckResult:
    hw = load_stage(2)
    link = hw.link(50.0, 3)
    noise = hw.noise()
    prof = timing_profile(link, noise)
    rng = np.random.default_rng(seed + 202)
    table = sample_attempt_rounds(rng, link.nmux, p_gen(link), 1_000_000)
    round_s = 2.0 * link.l0_km / link.c_km_s
    n3 = table[:, 2].astype(float)
    dev = 0.0
    for j in (1, 2, 3):
        nj = table[:, j - 1].astype(float)
        g_mc = (2.0 * nj.mean() + 1.0) * link.l0_km / link.c_km_s
        dev = max(dev, abs(g_mc - prof.g_times[j - 1]) / prof.g_times[j - 1])
        gam = 1.0 - np.exp(-(n3 - nj) * round_s / noise.tcoh_s)
        f_mc = float(np.mean((1.0 - gam) ** 2 * hw.f0 + (1.0 - (1.0 - gam) ** 2) / 4.0))
        # fidelities carry an absolute 1e-3 budget; rescale onto the 1% tol
        dev = max(dev, abs(f_mc - prof.pair_fidelities[j - 1]) * 10.0)
    return CheckResult("lleg-profile-mc", dev, 0.01,
                       note="g_j within 1%, F_j within 1e-3 absolute")


def _check_monotonicity_grid() -> CheckResult:
    base = load_stage(2)
    betas = (0.0005, 0.001, 0.002)
    deltas = (0.0005, 0.001, 0.002)
    tcohs = (2.0, 1.0, 0.5)  # decreasing coherence = increasing noise
    e_z = np.empty((3, 3, 3))
    e_x = np.empty((3, 3, 3))
    for i, b in enumerate(betas):
        for j, d in enumerate(deltas):
            for k, t in enumerate(tcohs):
                hw = replace(base, beta=b, delta=d, tcoh_s=t)
                res, _ = run_scheme(SchemeId.SEG_ED, hw, 50.0, 2, 12)
                e_z[i, j, k] = res.e_z
                e_x[i, j, k] = res.e_x
    violation = 0.0
    for arr in (e_z, e_x):
        for axis in range(3):
            steps = np.diff(arr, axis=axis)
            violation = max(violation, float(np.max(-steps)))
    prev_p = None
    for nr, res, _ in scan_scheme(SchemeId.SEG_ED, load_stage(2), 50.0, 6, 12):
        if prev_p is not None:
            violation = max(violation, res.p_end - prev_p)
        prev_p = res.p_end
    return CheckResult("noise-monotonicity", violation, 1e-12,
                       note="e_Z, e_X nondecreasing in beta, delta, 1/Tcoh; p_end decreasing in Nr")
