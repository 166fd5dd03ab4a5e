"""Encoded-link construction, swap machinery, and the chain walk."""

import math

import numpy as np
import pytest

from segchain.engine import (
    B_ENC,
    B_JOINT,
    B_LBSM,
    B_PAIR,
    apply_swap,
    apply_swap_direct,
    build_swap_machinery,
    chain_scan,
    encode_link,
    memory_op,
    run_chain,
    swap_indices,
)
from segchain.ghz import DiagonalState
from segchain.noise import NoiseParams
from segchain.params import load_stage
from segchain.timing import timing_profile

HW2 = load_stage(2)
NOISE2 = HW2.noise()
TIMING2 = timing_profile(HW2.link(50.0, 3), NOISE2)


def test_basis_dimensions():
    assert B_PAIR.dim == 64
    assert B_JOINT.dim == 64 * 64
    assert B_LBSM.dim == 64
    assert B_ENC.dim == 4096


def test_swap_indices_reference_values():
    assert swap_indices(0) == ((0, 7, 56, 63), (0, 7, 56, 63))
    assert swap_indices(1) == ((1, 6, 57, 62), (0, 7, 56, 63))


def test_swap_indices_branches_are_distinct():
    for s in (0, 1, 37, 255, 4095):
        ns, ms = swap_indices(s)
        assert len(set(ns)) == 4
        assert len(set(ms)) == 4


def test_encode_link_frozen_leading_weight():
    lam = encode_link(TIMING2, NOISE2).lambda0
    assert lam.total == pytest.approx(1.0, abs=1e-12)
    assert lam.weights[0] == pytest.approx(0.9406560926839685, rel=1e-12)


def test_memory_op_is_stochastic_and_trivial_at_zero():
    assert memory_op(0.37).trace_preserving
    assert np.allclose(memory_op(0.0).matrix.toarray(), np.eye(64))


def test_ideal_swap_fixed_point():
    quiet = NoiseParams(f0=1.0, beta=0.0, delta=0.0, tcoh_s=math.inf)
    mach = build_swap_machinery(quiet)
    pure = DiagonalState(B_PAIR, np.eye(64)[0])
    post, p_ref = apply_swap(mach, pure, pure)
    assert p_ref == pytest.approx(1.0 / 16.0, abs=1e-15)
    assert post.weights == pytest.approx(np.eye(64)[0], abs=1e-15)


def test_swap_routes_agree():
    mach = build_swap_machinery(NOISE2)
    rng = np.random.default_rng(5)
    held = DiagonalState(B_PAIR, rng.dirichlet(np.ones(64)))
    fresh = DiagonalState(B_PAIR, rng.dirichlet(np.ones(64)))
    post_t, p_t = apply_swap(mach, held, fresh)
    post_d, p_d = apply_swap_direct(mach, held, fresh)
    assert p_t == pytest.approx(p_d, abs=1e-14)
    assert post_t.weights == pytest.approx(post_d.weights, abs=1e-13)


def test_chain_frozen_values_stage2():
    res = run_chain(2, TIMING2, NOISE2)
    assert res.e_z == pytest.approx(0.0005463536707815178, rel=1e-12)
    assert res.e_x == pytest.approx(0.10120090625276619, rel=1e-12)
    assert res.p_end == pytest.approx(0.8798858637280598, rel=1e-12)
    assert len(res.p_refs) == 2
    assert res.accept_probs == pytest.approx([16.0 * p for p in res.p_refs])
    assert res.p_end == pytest.approx(math.prod(res.accept_probs), rel=1e-12)


def test_chain_scan_agrees_with_run_chain():
    states = list(chain_scan(3, TIMING2, NOISE2))
    assert len(states) == 4  # after 0..3 swaps
    direct = run_chain(3, TIMING2, NOISE2)
    assert states[-1].lambda_end.weights == pytest.approx(direct.lambda_end.weights)
    assert states[-1].p_refs == direct.p_refs


def test_chain_scan_rejects_negative():
    with pytest.raises(ValueError):
        list(chain_scan(-1, TIMING2, NOISE2))


def test_memory_flag_is_the_only_seg_peg_difference():
    # with an infinite coherence time, holding a state costs nothing
    noise = NoiseParams(f0=0.99, beta=0.001, delta=0.001, tcoh_s=math.inf)
    timing = timing_profile(
        load_stage(2).link(50.0, 3), noise)
    seg = run_chain(2, timing, noise, memory=True)
    peg = run_chain(2, timing, noise, memory=False)
    assert seg.lambda_end.weights == pytest.approx(peg.lambda_end.weights, abs=1e-15)
    assert seg.p_end == pytest.approx(peg.p_end, rel=1e-14)


def test_every_chain_state_is_normalized():
    for res in chain_scan(5, TIMING2, NOISE2):
        assert res.lambda_end.total == pytest.approx(1.0, abs=1e-12)
