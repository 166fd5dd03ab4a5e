"""Diagonal-state calculus over GHZ-class and computational product bases.

States that stay diagonal in a product of GHZ-class and computational bases
are represented by their weight vectors, and noise/measurement maps by sparse
transfer matrices acting on those weights.  Conventions used throughout:

* ``|G_s^n>`` is the n-qubit GHZ-class state
  ``((-1)^MSB(s) |s> + |~s>) / sqrt(2)`` where ``s`` is read as the n-bit
  pattern of the upper branch, ``~s`` is its bitwise complement and ``MSB``
  its leading bit.  For n = 2 this enumerates the Bell states
  ``G_0 = Phi+, G_1 = Psi+, G_2 ~ Psi-, G_3 = Phi-``.
* Composite bases index in row-major order: the first factor is most
  significant.  Qubits are numbered globally, 0 first; qubit 0 of a factor is
  the most significant bit of its index.
* Transfer matrices ``M`` act as ``w_out = M @ w_in``; entries are
  nonnegative and column sums never exceed 1 (equal to 1 for
  trace-preserving maps).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.sparse as sp

EPS = 1e-12


@dataclass(frozen=True)
class BasisFactor:
    """One tensor factor: a GHZ-class ("ghz") or computational ("comp") basis."""

    kind: str
    nqubits: int

    def __post_init__(self) -> None:
        if self.kind not in ("ghz", "comp"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.nqubits < 1:
            raise ValueError("factor needs at least one qubit")

    @property
    def dim(self) -> int:
        return 1 << self.nqubits


def GHZ(n: int) -> BasisFactor:
    return BasisFactor("ghz", n)


def COMP(n: int) -> BasisFactor:
    return BasisFactor("comp", n)


@dataclass(frozen=True)
class BasisLabel:
    """An ordered product of basis factors."""

    factors: tuple[BasisFactor, ...]

    @property
    def dim(self) -> int:
        d = 1
        for f in self.factors:
            d *= f.dim
        return d

    @property
    def nqubits(self) -> int:
        return sum(f.nqubits for f in self.factors)

    def locate(self, qubit: int) -> tuple[int, int]:
        """Map a global qubit number to (factor index, qubit within factor)."""
        if not 0 <= qubit < self.nqubits:
            raise ValueError(f"qubit {qubit} out of range")
        for i, f in enumerate(self.factors):
            if qubit < f.nqubits:
                return i, qubit
            qubit -= f.nqubits
        raise AssertionError("unreachable")

    def stride(self, factor_index: int) -> int:
        """Index stride of a factor (product of dims of later factors)."""
        d = 1
        for f in self.factors[factor_index + 1 :]:
            d *= f.dim
        return d


def basis(*factors: BasisFactor) -> BasisLabel:
    return BasisLabel(tuple(factors))


@dataclass
class DiagonalState:
    """Weight vector of a (possibly sub-normalized) basis-diagonal state."""

    basis: BasisLabel
    weights: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (self.basis.dim,):
            raise ValueError(
                f"weights shape {self.weights.shape} does not match dim {self.basis.dim}"
            )
        if self.weights.min(initial=0.0) < -EPS:
            raise ValueError("negative weight")
        if self.weights.sum() > 1.0 + EPS:
            raise ValueError("weights sum above one")

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def normalized(self) -> "DiagonalState":
        t = self.total
        if t <= 0.0:
            raise ValueError("cannot normalize a zero state")
        return DiagonalState(self.basis, self.weights / t)


@dataclass
class TransferOperator:
    """Sparse transfer matrix between labeled bases (w_out = matrix @ w_in)."""

    in_basis: BasisLabel
    out_basis: BasisLabel
    matrix: sp.csr_array = field(repr=False)

    def __post_init__(self) -> None:
        m = sp.csr_array(self.matrix)
        if m.shape != (self.out_basis.dim, self.in_basis.dim):
            raise ValueError("matrix shape does not match bases")
        if m.nnz and m.data.min() < -EPS:
            raise ValueError("negative transfer entry")
        col_sums = np.asarray(m.sum(axis=0)).ravel()
        if col_sums.size and col_sums.max(initial=0.0) > 1.0 + EPS:
            raise ValueError("column sum above one")
        self.matrix = m

    def __matmul__(self, other: "TransferOperator") -> "TransferOperator":
        if other.out_basis != self.in_basis:
            raise ValueError("basis mismatch in composition")
        return TransferOperator(
            other.in_basis, self.out_basis, self.matrix @ other.matrix
        )

    @property
    def trace_preserving(self) -> bool:
        col_sums = np.asarray(self.matrix.sum(axis=0)).ravel()
        return bool(np.all(np.abs(col_sums - 1.0) <= EPS))


def apply(op: TransferOperator, state: DiagonalState) -> DiagonalState:
    if state.basis != op.in_basis:
        raise ValueError("state basis does not match operator input basis")
    return DiagonalState(op.out_basis, op.matrix @ state.weights)


def identity_op(b: BasisLabel) -> TransferOperator:
    return TransferOperator(b, b, sp.identity(b.dim, format="csr"))


def permutation_op(
    b: BasisLabel, perm: np.ndarray, out_basis: BasisLabel | None = None
) -> TransferOperator:
    """Operator sending basis state ``i`` of ``b`` to state ``perm[i]``."""
    perm = np.asarray(perm, dtype=np.int64)
    out = b if out_basis is None else out_basis
    if perm.shape != (b.dim,) or sorted(perm.tolist()) != list(range(out.dim)):
        raise ValueError("not a permutation")
    m = sp.csr_array(
        (np.ones(b.dim), (perm, np.arange(b.dim))), shape=(out.dim, b.dim)
    )
    return TransferOperator(b, out, m)


def relabel_op(
    in_basis: BasisLabel, out_basis: BasisLabel, index_map: np.ndarray
) -> TransferOperator:
    """Deterministic (possibly many-to-one) relabeling of basis states."""
    index_map = np.asarray(index_map, dtype=np.int64)
    if index_map.shape != (in_basis.dim,):
        raise ValueError("index map has wrong length")
    m = sp.csr_array(
        (np.ones(in_basis.dim), (index_map, np.arange(in_basis.dim))),
        shape=(out_basis.dim, in_basis.dim),
    )
    return TransferOperator(in_basis, out_basis, m)


def mix_with_identity(op: TransferOperator, p: float) -> TransferOperator:
    """Convex mixture ``(1 - p) I + p op`` (op must be square)."""
    if op.in_basis != op.out_basis:
        raise ValueError("mixture with identity needs a square operator")
    if not 0.0 <= p <= 1.0:
        raise ValueError("mixture weight outside [0, 1]")
    m = (1.0 - p) * sp.identity(op.in_basis.dim, format="csr") + p * op.matrix
    return TransferOperator(op.in_basis, op.out_basis, m)


def _factor_permutation(b: BasisLabel, factor_index: int, local_perm: np.ndarray) -> np.ndarray:
    """Lift a permutation of one factor's indices to the composite index set."""
    f = b.factors[factor_index]
    stride = b.stride(factor_index)
    idx = np.arange(b.dim, dtype=np.int64)
    post = idx % stride
    rem = idx // stride
    loc = rem % f.dim
    pre = rem // f.dim
    return (pre * f.dim + local_perm[loc]) * stride + post


def _local_x_perm(f: BasisFactor, q: int) -> np.ndarray:
    loc = np.arange(f.dim, dtype=np.int64)
    if f.kind == "comp" or q > 0:
        return loc ^ (1 << (f.nqubits - 1 - q))
    # X on the leading qubit of a GHZ factor exchanges the branches as well,
    # which at the label level flips every bit except the leading one.
    return loc ^ ((1 << (f.nqubits - 1)) - 1)


def _local_z_perm(f: BasisFactor, q: int) -> np.ndarray:
    loc = np.arange(f.dim, dtype=np.int64)
    if f.kind == "comp":
        return loc  # phases are invisible on computational diagonals
    return loc ^ (f.dim - 1)  # any Z toggles the relative branch sign


def pauli_x_op(b: BasisLabel, qubit: int) -> TransferOperator:
    """Transfer matrix of conjugation by X on one qubit.

    >>> op = pauli_x_op(basis(GHZ(2)), 0)
    >>> apply(op, DiagonalState(basis(GHZ(2)), np.array([1.0, 0, 0, 0]))).weights
    array([0., 1., 0., 0.])
    """
    fi, q = b.locate(qubit)
    return permutation_op(b, _factor_permutation(b, fi, _local_x_perm(b.factors[fi], q)))


def pauli_z_op(b: BasisLabel, qubit: int) -> TransferOperator:
    """Transfer matrix of conjugation by Z on one qubit.

    On a GHZ factor any single Z sends ``|G_s>`` to ``|G_~s>``; on a
    computational factor it acts trivially.
    """
    fi, q = b.locate(qubit)
    return permutation_op(b, _factor_permutation(b, fi, _local_z_perm(b.factors[fi], q)))


def depol_op(b: BasisLabel, qubit: int) -> TransferOperator:
    """Complete single-qubit depolarization, ``(I + X)(I + Z) / 4``."""
    half_x = mix_with_identity(pauli_x_op(b, qubit), 0.5)
    half_z = mix_with_identity(pauli_z_op(b, qubit), 0.5)
    return half_x @ half_z


def kron(*parts: "DiagonalState | TransferOperator"):
    """Tensor product of diagonal states, or of transfer operators."""
    if all(isinstance(p, DiagonalState) for p in parts):
        b = basis(*(f for p in parts for f in p.basis.factors))
        w = reduce(np.kron, (p.weights for p in parts))
        return DiagonalState(b, w)
    if all(isinstance(p, TransferOperator) for p in parts):
        bi = basis(*(f for p in parts for f in p.in_basis.factors))
        bo = basis(*(f for p in parts for f in p.out_basis.factors))
        m = reduce(lambda a, c: sp.kron(a, c, format="csr"), (p.matrix for p in parts))
        return TransferOperator(bi, bo, m)
    raise TypeError("kron arguments must be all states or all operators")


def ghz_amplitudes(s: int, n: int) -> np.ndarray:
    """Computational-basis amplitudes of ``|G_s^n>``.

    >>> ghz_amplitudes(0, 2) * np.sqrt(2)
    array([1.+0.j, 0.+0.j, 0.+0.j, 1.+0.j])
    """
    if not 0 <= s < (1 << n):
        raise ValueError("label out of range")
    amp = np.zeros(1 << n, dtype=np.complex128)
    sign = -1.0 if (s >> (n - 1)) & 1 else 1.0
    amp[s] += sign / np.sqrt(2.0)
    amp[s ^ ((1 << n) - 1)] += 1.0 / np.sqrt(2.0)
    return amp
