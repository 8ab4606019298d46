"""Generic MPS/PEPS correlation-space machinery.

Amplitudes, measurement-induced operators, readout, vertical two-site
contraction, and the locality condition for by-products crossing an
entangling gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    NumericsError,
    as_matrix,
    as_vector,
    assert_unitary,
    dag,
    kron,
    operator_schmidt_rank,
    schmidt_split,
)


@dataclass(frozen=True)
class MatrixList:
    """A rank-1 list of same-shape square matrices indexed by physical level.

    ``entries`` has shape (d, D, D): d physical levels acting on a
    D-dimensional correlation space.  With ``orthonormal=True`` the entries
    must form an orthonormal set under the Hilbert-Schmidt inner product
    Tr[A(i)^dag A(j)] = delta_ij.
    """

    entries: np.ndarray
    orthonormal: bool = False

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 3 or entries.shape[1] != entries.shape[2]:
            raise NumericsError(f"MatrixList needs shape (d, D, D), got {entries.shape}")
        object.__setattr__(self, "entries", entries)
        if self.orthonormal:
            gram = np.einsum("iab,jab->ij", entries.conj(), entries)
            if np.abs(gram - np.eye(self.arity)).max() > 1e-12:
                raise NumericsError("MatrixList flagged orthonormal fails the Gram check")

    @property
    def arity(self) -> int:
        return self.entries.shape[0]

    @property
    def dim(self) -> int:
        return self.entries.shape[1]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.entries[i]


@dataclass(frozen=True)
class BoundaryPair:
    """Left bra and right ket closing a correlation-space matrix product."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        left, right = as_vector(self.left), as_vector(self.right)
        if np.linalg.norm(left) == 0 or np.linalg.norm(right) == 0:
            raise NumericsError("boundary vectors must be nonzero")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)


@dataclass(frozen=True)
class MeasurementBasis:
    """An orthonormal measurement basis; ``vectors[k]`` is the outcome-k state."""

    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=complex)
        if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1]:
            raise NumericsError(f"MeasurementBasis needs a square vector stack, got {vectors.shape}")
        gram = vectors.conj() @ vectors.T
        if np.abs(gram - np.eye(vectors.shape[0])).max() > 1e-12:
            raise NumericsError("measurement basis is not orthonormal within 1e-12")
        object.__setattr__(self, "vectors", vectors)

    @property
    def outcomes(self) -> int:
        return self.vectors.shape[0]

    def assert_invertible_for(self, mlist: MatrixList, cond_cap: float = 1e8) -> None:
        """Reject bases whose induced operators are (near-)singular.

        Deterministic computation needs every outcome's induced operator to be
        invertible, so an unusable basis is an input error, not a warning.
        """
        for k in range(self.outcomes):
            op = project_site(mlist, self.vectors[k])
            if np.linalg.cond(op) > cond_cap:
                raise NumericsError(f"outcome {k} induces a non-invertible operator")


@dataclass(frozen=True)
class SiteTensor:
    """Rank-3 tensors of a two-dimensional lattice site.

    ``entries[i, b, :, :]`` is the horizontal D x D matrix attached to level i
    at vertical component b, i.e. entry i is sum_b |b> (x) entries[i, b].
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 4 or entries.shape[2] != entries.shape[3]:
            raise NumericsError(f"SiteTensor needs shape (d, Dv, D, D), got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @property
    def arity(self) -> int:
        return self.entries.shape[0]

    @property
    def vertical_dim(self) -> int:
        return self.entries.shape[1]

    @property
    def dim(self) -> int:
        return self.entries.shape[2]

    def project(self, state) -> np.ndarray:
        """Measurement-induced rank-2 tensor: sum_i state*(i) entries[i]."""
        state = as_vector(state)
        if state.shape[0] != self.arity:
            raise NumericsError("state dimension does not match tensor arity")
        return np.tensordot(state.conj(), self.entries, axes=1)

    def fold_vertical(self, op) -> "SiteTensor":
        """Act with a matrix on the vertical leg: |b> -> op |b>."""
        op = as_matrix(op)
        if op.shape[1] != self.vertical_dim:
            raise NumericsError("vertical operator dimension mismatch")
        return SiteTensor(np.einsum("cb,ibmn->icmn", op, self.entries))


@dataclass(frozen=True)
class ReadoutMap:
    """Linear map R transferring the correlation-space state onto the last
    physical site.  Full rank and column-orthogonality (R^dag R proportional
    to the identity) are required so no information is lost and orthogonality
    of inputs is preserved."""

    matrix: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        matrix = as_matrix(self.matrix)
        if self.scale <= 0:
            raise NumericsError("readout scale must be positive")
        d, dim = matrix.shape
        if np.linalg.matrix_rank(matrix, tol=1e-10) != dim:
            raise NumericsError("readout map must have full column rank")
        gram = dag(matrix) @ matrix
        if np.abs(gram - gram[0, 0] * np.eye(dim)).max() > 1e-10:
            raise NumericsError("readout columns are not proportional to an isometry")
        object.__setattr__(self, "matrix", matrix)

    @property
    def correlation_dim(self) -> int:
        return self.matrix.shape[1]


def mps_amplitude(lists, boundary: BoundaryPair, levels) -> complex:
    """Amplitude <L| A_N(i_N) ... A_1(i_1) |R> of a matrix-product state.

    ``lists[j]`` and ``levels[j]`` belong to site j+1 in the right-to-left
    site numbering: index 0 is the rightmost site and is applied to |R> first.
    """
    if len(lists) != len(levels):
        raise NumericsError("one level index per site required")
    vec = boundary.right
    for mlist, i in zip(lists, levels):
        if not 0 <= i < mlist.arity:
            raise NumericsError(f"level index {i} out of range")
        if mlist.dim != vec.shape[0]:
            raise NumericsError("correlation-space dimension mismatch along the chain")
        vec = mlist[i] @ vec
    if boundary.left.shape[0] != vec.shape[0]:
        raise NumericsError("left boundary dimension mismatch")
    return complex(boundary.left.conj() @ vec)


def project_site(mlist: MatrixList, state) -> np.ndarray:
    """Measurement-induced operator A[phi] = sum_i phi*(i) A(i)."""
    state = as_vector(state)
    if state.shape[0] != mlist.arity:
        raise NumericsError("state dimension does not match list arity")
    return np.tensordot(state.conj(), mlist.entries, axes=1)


def gate_product(ops, dim: int = 2) -> np.ndarray:
    """Product of operators as written: gate_product((A, B)) = A @ B.

    The rightmost operator acts first; the empty product is the identity
    (of dimension ``dim``).
    """
    ops = [as_matrix(op) for op in ops]
    if not ops:
        return np.eye(dim, dtype=complex)
    shape = ops[0].shape
    if shape[0] != shape[1] or any(op.shape != shape for op in ops):
        raise NumericsError("gate_product needs square operators of equal dimension")
    result = np.eye(shape[0], dtype=complex)
    for op in reversed(ops):
        result = op @ result
    return result


def byproduct_of(actual, intended) -> np.ndarray:
    """The operator E with actual = E @ intended (E = actual @ intended^-1)."""
    actual, intended = as_matrix(actual), as_matrix(intended)
    if actual.shape != intended.shape:
        raise NumericsError("byproduct_of: shape mismatch")
    if np.linalg.cond(intended) > 1e12:
        raise NumericsError("byproduct_of: intended operator is singular")
    return actual @ np.linalg.inv(intended)


def readout_apply(rmap: ReadoutMap, frame, state) -> np.ndarray:
    """Physical readout state R E |Phi>, renormalized.

    The frame E must be unitary; a non-unitary frame would break the
    orthogonality-preservation the readout construction relies on.
    """
    frame = assert_unitary(frame, what="readout frame")
    state = as_vector(state)
    out = rmap.scale * rmap.matrix @ (frame @ state)
    norm = np.linalg.norm(out)
    if norm < 1e-12:
        raise NumericsError("readout of a degenerate (zero) correlation state")
    return out / norm


def vertical_contract(upper: SiteTensor, lower: SiteTensor, up_state, down_state) -> np.ndarray:
    """Two-site vertical contraction after measuring both sites.

    Returns the induced two-wire gate sum_b upper[phi]_b (x) lower[psi]_b,
    with the upper site on the first (most significant) tensor factor.
    """
    if upper.vertical_dim != lower.vertical_dim:
        raise NumericsError("vertical dimensions do not match")
    up = upper.project(up_state)
    down = lower.project(down_state)
    d = upper.dim * lower.dim
    out = np.zeros((d, d), dtype=complex)
    for b in range(upper.vertical_dim):
        out += kron(up[b], down[b])
    return out


def locality_condition(w, e, f, tol: float = 1e-10):
    """Solve W (E x F) = (G x H) W for local G, H when possible.

    Returns (g, h) when W (E x F) W^dag factorizes (operator Schmidt rank 1),
    with the phase on g and h normalized to unit determinant; returns None
    when the conjugated operator is genuinely entangling.
    """
    w = assert_unitary(w, what="gate W")
    e = assert_unitary(e, what="by-product E")
    f = assert_unitary(f, what="by-product F")
    conj = w @ kron(e, f) @ dag(w)
    if operator_schmidt_rank(conj, tol) != 1:
        return None
    return schmidt_split(conj)
