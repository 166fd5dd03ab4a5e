"""Basis bookkeeping and the diagonal operator algebra."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segchain.ghz import (
    COMP,
    GHZ,
    DiagonalState,
    TransferOperator,
    apply,
    basis,
    depol_op,
    ghz_amplitudes,
    identity_op,
    kron,
    mix_with_identity,
    pauli_x_op,
    pauli_z_op,
    permutation_op,
    relabel_op,
)

B2 = basis(GHZ(2))
B3 = basis(GHZ(3))


def test_ghz_amplitudes_orthonormal():
    mat = np.stack([ghz_amplitudes(s, 2) for s in range(4)], axis=1)
    assert np.allclose(mat.conj().T @ mat, np.eye(4))


def test_ghz_amplitudes_bell_structure():
    # labels 0..3 carry the four Bell states, the sign riding on the top bit
    sq2 = 1.0 / np.sqrt(2.0)
    assert np.allclose(ghz_amplitudes(0, 2), [sq2, 0, 0, sq2])
    assert np.allclose(ghz_amplitudes(1, 2), [0, sq2, sq2, 0])
    assert np.allclose(ghz_amplitudes(2, 2), [0, sq2, -sq2, 0])
    assert np.allclose(ghz_amplitudes(3, 2), [sq2, 0, 0, -sq2])


def test_ghz_amplitudes_rejects_bad_label():
    with pytest.raises(ValueError):
        ghz_amplitudes(4, 2)


def test_basis_dims_and_locate():
    b = basis(GHZ(3), COMP(3), GHZ(2))
    assert b.dim == 8 * 8 * 4
    assert b.nqubits == 8
    assert b.locate(0) == (0, 0)
    assert b.locate(3) == (1, 0)
    assert b.locate(7) == (2, 1)
    with pytest.raises(ValueError):
        b.locate(8)


def _point(b, index):
    w = np.zeros(b.dim)
    w[index] = 1.0
    return DiagonalState(b, w)


def _image(op, index):
    return int(np.argmax(apply(op, _point(op.in_basis, index)).weights))


def test_pauli_z_flips_all_label_bits():
    for s in range(8):
        assert _image(pauli_z_op(B3, 0), s) == s ^ 7
        assert _image(pauli_z_op(B3, 2), s) == s ^ 7


def test_pauli_x_on_interior_qubit_toggles_one_bit():
    for s in range(8):
        assert _image(pauli_x_op(B3, 1), s) == s ^ 2
        assert _image(pauli_x_op(B3, 2), s) == s ^ 1


def test_pauli_x_on_leading_qubit_flips_the_rest():
    for s in range(8):
        assert _image(pauli_x_op(B3, 0), s) == s ^ 3


def test_comp_factor_sees_x_but_not_z():
    b = basis(COMP(3))
    assert _image(pauli_x_op(b, 0), 0) == 4
    for s in range(8):
        assert _image(pauli_z_op(b, 2), s) == s


def test_pauli_ops_are_involutions():
    for op in (pauli_x_op(B3, 0), pauli_x_op(B3, 2), pauli_z_op(B3, 1)):
        square = op @ op
        assert np.allclose(square.matrix.toarray(), np.eye(8))


def test_depol_is_idempotent_and_stochastic():
    op = depol_op(B2, 1)
    assert op.trace_preserving
    assert np.allclose((op @ op).matrix.toarray(), op.matrix.toarray())


def test_mix_with_identity_endpoints():
    op = pauli_x_op(B2, 0)
    assert np.allclose(mix_with_identity(op, 0.0).matrix.toarray(), np.eye(4))
    assert np.allclose(mix_with_identity(op, 1.0).matrix.toarray(), op.matrix.toarray())
    with pytest.raises(ValueError):
        mix_with_identity(op, 1.5)


def test_transfer_operator_rejects_bad_matrices():
    with pytest.raises(ValueError):
        TransferOperator(B2, B2, -np.eye(4))
    with pytest.raises(ValueError):
        TransferOperator(B2, B2, np.eye(3))
    with pytest.raises(ValueError):
        TransferOperator(B2, B2, 2.0 * np.eye(4))


def test_composition_requires_matching_bases():
    with pytest.raises(ValueError):
        pauli_x_op(B2, 0) @ pauli_x_op(B3, 0)
    with pytest.raises(ValueError):
        apply(pauli_x_op(B3, 0), _point(B2, 0))


def test_kron_of_states_and_relabel_roundtrip():
    left = _point(B2, 1)
    right = _point(B2, 2)
    joint = kron(left, right)
    assert joint.basis.dim == 16
    assert np.argmax(joint.weights) == 1 * 4 + 2
    back = relabel_op(joint.basis, basis(GHZ(4)), np.arange(16))
    assert apply(back, joint).basis == basis(GHZ(4))


def test_permutation_op_requires_a_permutation():
    with pytest.raises(ValueError):
        permutation_op(B2, np.array([0, 0, 1, 2]))


@settings(max_examples=50, derandomize=True)
@given(st.integers(0, 7), st.integers(0, 2))
def test_single_qubit_channels_preserve_mass(label, qubit):
    w = np.zeros(8)
    w[label] = 1.0
    state = DiagonalState(B3, w)
    for op in (pauli_x_op(B3, qubit), pauli_z_op(B3, qubit), depol_op(B3, qubit)):
        assert apply(op, state).total == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=25, derandomize=True)
@given(st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
def test_identity_op_fixes_any_state(raw):
    w = np.array(raw) / sum(raw)
    state = DiagonalState(B2, w)
    out = apply(identity_op(B2), state)
    assert np.allclose(out.weights, w)
