"""Sampled-trajectory oracle: reproducibility and statistical agreement."""

import math
from dataclasses import replace

import numpy as np
import pytest

from segchain.metrics import build_report
from segchain.oracle.trajectories import TrajectoryConfig, run_trajectories
from segchain.params import SchemeId, load_stage
from segchain.timing import attempts_cdf, sample_attempt_rounds

HW2 = load_stage(2)


def test_same_seed_same_numbers():
    cfg = TrajectoryConfig(HW2, 50.0, 2)
    a = run_trajectories("seg-ed", cfg, 20_000, seed=42)
    b = run_trajectories("seg-ed", cfg, 20_000, seed=42)
    assert a == b
    c = run_trajectories("seg-ed", cfg, 20_000, seed=43)
    assert c.e_z != a.e_z


def test_noiseless_trajectories_are_perfect():
    quiet = replace(HW2, f0=1.0, beta=0.0, delta=0.0, tcoh_s=math.inf)
    for scheme in ("seg-ed", "seg-noed", "peg-ed"):
        stats = run_trajectories(scheme, TrajectoryConfig(quiet, 50.0, 2), 5_000, seed=7)
        assert stats.e_z == 0.0
        assert stats.e_x == 0.0
        assert stats.p_end == 1.0


def test_attempt_sampler_tracks_the_cdf():
    n = 100_000
    rng = np.random.default_rng(99)
    rounds = sample_attempt_rounds(rng, 12, 0.1, n)
    empirical = np.mean(rounds[:, 2][:, None] <= np.arange(1, 200)[None, :], axis=0)
    model = np.array([attempts_cdf(j, 3, 12, 0.1) for j in range(1, 200)])
    d_stat = float(np.max(np.abs(empirical - model)))
    # conservative Kolmogorov-Smirnov bound at alpha = 0.01
    assert d_stat < 1.628 / math.sqrt(n)


def test_trajectory_rates_match_the_analytic_report():
    stats = run_trajectories(
        "seg-ed", TrajectoryConfig(HW2, 50.0, 19), 200_000, seed=3)
    rep = build_report(SchemeId.SEG_ED, HW2, 50.0, 19, 12)
    assert abs(stats.p_end - rep.p_end) < 3.0 * stats.p_end_se
    assert abs(stats.e_z - rep.e_z) < 3.0 * stats.e_z_se
    assert abs(stats.e_x - rep.e_x) < 3.0 * stats.e_x_se
    assert abs(stats.r_bit_hz - rep.r_bit_hz) < 3.0 * stats.r_bit_se


def test_sampled_times_move_the_rate_not_the_errors():
    cfg = TrajectoryConfig(HW2, 50.0, 2, sampled_times=True)
    stats = run_trajectories("seg-ed", cfg, 50_000, seed=11)
    assert stats.r_bit_se > 0.0
    assert 0.0 < stats.p_end <= 1.0
