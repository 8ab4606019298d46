"""The concrete 4-level honeycomb model.

Fixed tensor lists, measurement bases for arbitrary single-qubit gates,
the three-site vertical CZ construction with its by-product table, removal
of unused vertical edges, and the end-of-wire readout.

Tensor-factor order is fixed repo-wide: the upper vertical neighbor is the
first (most significant) factor of every two-wire operator.
"""

from __future__ import annotations

import json

import numpy as np

from .correlation import MatrixList, MeasurementBasis, ReadoutMap, SiteTensor, project_site, vertical_contract
from .frames import PauliTerm, identify_pauli_pair
from .numerics import I2, PAULIS, X, Z, NumericsError, assert_unitary, kron, su2_representative

SQRT2 = np.sqrt(2.0)

# Square-site matrices: an orthonormal basis of 2x2 matrices, so a single
# four-outcome measurement realizes any one-qubit gate.
SQUARE_LIST = MatrixList(
    np.array(
        [
            [[1, 0], [0, 1]],
            [[0, 1], [1j, 0]],
            [[0, 1j], [1, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )
    / SQRT2,
    orthonormal=True,
)

SIGMA = PAULIS  # (I, X, Y, Z): the by-product set of the model

# Circle-site horizontal matrices and vertical components: level i carries
# matrix B(i) on the wire and |0> or |1> on the vertical leg.
B_LIST = MatrixList(np.array([I2, X, Z, Z @ X]))
CIRCLE_VERTICAL_BITS = (0, 0, 1, 1)

_circle = np.zeros((4, 2, 2, 2), dtype=complex)
for _i in range(4):
    _circle[_i, CIRCLE_VERTICAL_BITS[_i]] = B_LIST[_i]
CIRCLE_TENSOR = SiteTensor(_circle)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2
CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)

# Vertical-edge measurement basis for the two circle sites of a CZ.
CZ_EDGE_BASIS = MeasurementBasis(
    np.array(
        [
            [1, 0, 1, 0],
            [0, 1, 0, -1],
            [1, 0, -1, 0],
            [0, 1, 0, 1],
        ],
        dtype=complex,
    )
    / SQRT2
)

# Local by-product factors of the three-site CZ block, by outcome.
# E_MID acts jointly on (upper, lower); E_LEFT/E_RIGHT act per wire.  The
# mid-square's own by-product list for the Hadamard attempt is the circle
# list (I, X, Z, ZX), which is what makes every insertion a pure X pattern.
E_SQUARE_CZ = (I2, X, Z, Z @ X)
E_MID = (kron(I2, I2), kron(X, I2), kron(I2, X), kron(X, X))
E_LEFT = (I2, X, X, I2)
E_RIGHT = (I2, I2, X, X)

LEFT_BOUNDARY = np.array([1.0, 0.0], dtype=complex)


def single_qubit_basis(u, tol: float = 1e-10) -> MeasurementBasis:
    """Four-outcome square-site basis realizing u up to a Pauli by-product.

    For u in SU(2), outcome k induces exactly SIGMA[k] @ u / sqrt(2) on the
    correlation space.
    """
    u = assert_unitary(u, tol, "single-qubit target")
    if u.shape != (2, 2) or abs(np.linalg.det(u) - 1.0) > tol:
        raise NumericsError("single_qubit_basis needs a special-unitary 2x2 target")
    a, b = u[0, 0], u[0, 1]
    ac, bc = np.conj(a), np.conj(b)
    vectors = np.array(
        [
            [a + ac, bc - 1j * b, 1j * bc - b, ac - a],
            [bc - b, a + 1j * ac, ac + 1j * a, -bc - b],
            [-1j * b - 1j * bc, ac + 1j * a, -1j * ac - a, -1j * b + 1j * bc],
            [ac - a, bc + 1j * b, b + 1j * bc, a + ac],
        ],
        dtype=complex,
    ) / 2.0
    basis = MeasurementBasis(vectors)
    basis.assert_invertible_for(SQUARE_LIST)
    return basis


def square_gate_for_outcome(basis: MeasurementBasis, outcome: int) -> np.ndarray:
    """Correlation-space operator induced by a square-site outcome."""
    return project_site(SQUARE_LIST, basis.vectors[outcome])


def cz_block(d: int, m: int, u: int, mid_op: np.ndarray | None = None) -> np.ndarray:
    """Two-wire gate realized by the vertical three-site measurement.

    Outcomes d, m, u belong to the lower circle, middle square, and upper
    circle.  ``mid_op`` is the operator the middle square realizes on the
    vertical correlation space; it defaults to E_SQUARE_CZ[m] @ H, the
    Hadamard attempt with its outcome-m by-product.
    """
    for name, k in (("d", d), ("m", m), ("u", u)):
        if not 0 <= k < 4:
            raise NumericsError(f"outcome {name}={k} out of range")
    if mid_op is None:
        mid_op = E_SQUARE_CZ[m] @ HADAMARD
    upper = CIRCLE_TENSOR.fold_vertical(mid_op)
    return vertical_contract(upper, CIRCLE_TENSOR, CZ_EDGE_BASIS.vectors[u], CZ_EDGE_BASIS.vectors[d])


def cz_block_reference(d: int, m: int, u: int) -> np.ndarray:
    """The factored form of the three-site block: local X factors around CZ."""
    left = E_MID[m] @ kron(E_LEFT[u], E_LEFT[d])
    right = kron(E_RIGHT[u], E_RIGHT[d]) @ E_MID[m]
    return left @ CZ @ right


def cz_mid_basis() -> MeasurementBasis:
    """Measurement basis of the middle square in a CZ block.

    Outcome m realizes E_SQUARE_CZ[m] @ H2 / sqrt(2) on the vertical space,
    where H2 is the special-unitary representative of the Hadamard.  Rows of
    the generic Hadamard basis are reordered (and one rephased) so the
    by-product list comes out as (I, X, Z, ZX) in outcome order.
    """
    h2 = su2_representative(HADAMARD)
    table = single_qubit_basis(h2).vectors
    # Sigma order is (I, X, Y, Z); ZX = i Y, and projection is antilinear.
    vectors = np.array([table[0], table[1], table[3], -1j * table[2]])
    return MeasurementBasis(vectors)


def cz_byproduct(d: int, m: int, u: int) -> tuple[PauliTerm, PauliTerm]:
    """Local Pauli pair (upper, lower) with cz_block = scale * (P_u (x) P_d) CZ.

    The right-hand local factors of the block are pushed through the CZ, so
    the whole by-product sits on the left in canonical frame position; the
    joint phase is carried by the upper term.
    """
    residual = cz_block(d, m, u) @ CZ  # CZ is its own inverse
    _, upper, lower = identify_pauli_pair(residual)
    return upper, lower


# Vertical-edge removal: measuring the mid square in this basis collapses the
# edge to |beta><alpha| with alpha, beta in {+, -}.
EDGE_REMOVAL_VECTORS = np.array(
    [
        [2, 1 + 1j, 1 + 1j, 0],
        [0, 1j - 1, 1 - 1j, 2],
        [0, 1 - 1j, 1j - 1, 2],
        [2, -1 - 1j, -1 - 1j, 0],
    ],
    dtype=complex,
) / (2 * SQRT2)

EDGE_REMOVAL_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))  # (beta, alpha) signs per outcome


def edge_removal_basis(outcome: int) -> tuple[np.ndarray, np.ndarray]:
    """Mid-square vector for ``outcome`` and the rank-1 vertical operator it
    realizes (one of |+-><+-|)."""
    if not 0 <= outcome < 4:
        raise NumericsError(f"edge-removal outcome {outcome} out of range")
    vector = EDGE_REMOVAL_VECTORS[outcome]
    return vector, project_site(SQUARE_LIST, vector)


def edge_removal_byproduct(outcome: int) -> tuple[bool, bool]:
    """Whether the (upper, lower) circle matrix lists pick up an X sandwich.

    A '-' on the bra side affects the upper neighbor, on the ket side the
    lower neighbor: B(s) -> X B(s) X wherever the flag is set.
    """
    if not 0 <= outcome < 4:
        raise NumericsError(f"edge-removal outcome {outcome} out of range")
    beta, alpha = EDGE_REMOVAL_SIGNS[outcome]
    return alpha < 0, beta < 0


def removed_circle_list(conjugated: bool) -> MatrixList:
    """Circle-site wire matrices after its vertical edge has been removed."""
    if not conjugated:
        return B_LIST
    return MatrixList(np.array([X @ b @ X for b in B_LIST.entries]))


def readout_map() -> tuple[ReadoutMap, tuple[np.ndarray, np.ndarray]]:
    """Readout of the leftmost square with left boundary <0|.

    Returns the rank-2 extraction map and the two-outcome projectors whose
    statistics reproduce a Z measurement of the correlation-space qubit.
    """
    rows = np.array([SQUARE_LIST[i][0, :] for i in range(4)])  # <0| A(i)
    rmap = ReadoutMap(rows, scale=1.0)
    pi0 = np.zeros((4, 4), dtype=complex)
    pi1 = np.zeros((4, 4), dtype=complex)
    pi0[0, 0] = pi0[3, 3] = 1.0
    pi1[1, 1] = pi1[2, 2] = 1.0
    return rmap, (pi0, pi1)


def _encode(array: np.ndarray):
    if array.ndim == 0:
        v = complex(array)
        return [v.real, v.imag]
    return [_encode(sub) for sub in array]


def dump_model_json() -> str:
    """All model constants with exact complex entries, row-major [re, im]."""
    payload = {
        "schema": "peps-mqc/1",
        "square_matrices": _encode(SQUARE_LIST.entries),
        "sigma": _encode(np.array(SIGMA)),
        "circle_matrices": _encode(B_LIST.entries),
        "circle_vertical_bits": list(CIRCLE_VERTICAL_BITS),
        "cz_edge_basis": _encode(CZ_EDGE_BASIS.vectors),
        "e_mid": _encode(np.array(E_MID)),
        "e_left": _encode(np.array(E_LEFT)),
        "e_right": _encode(np.array(E_RIGHT)),
        "edge_removal_vectors": _encode(EDGE_REMOVAL_VECTORS),
        "readout_rows": _encode(readout_map()[0].matrix),
        "left_boundary": _encode(LEFT_BOUNDARY),
    }
    return json.dumps(payload, indent=2)
