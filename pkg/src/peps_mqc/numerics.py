"""Dense complex linear algebra substrate shared by all modules.

Matrices and vectors are plain ``numpy.ndarray`` objects with dtype
``complex128``.  Index convention, fixed repo-wide: the leftmost tensor
factor is the most significant index (``kron(a, b)`` puts ``a`` on the
high bits).
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

STRUCTURAL_TOL = 1e-10
ITERATIVE_TOL = 1e-8

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X, Y, Z)
PAULI_NAMES = ("I", "X", "Y", "Z")


class NumericsError(ValueError):
    """Structural precondition violated (shape, symmetry, convergence)."""


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise NumericsError(f"expected a matrix, got ndim={m.ndim}")
    return m


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise NumericsError(f"expected a vector, got ndim={v.ndim}")
    return v


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def is_hermitian(m, tol: float = STRUCTURAL_TOL) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and np.abs(m - dag(m)).max() <= tol


def is_unitary(m, tol: float = STRUCTURAL_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return np.abs(dag(m) @ m - np.eye(m.shape[0])).max() <= tol


def assert_unitary(m, tol: float = STRUCTURAL_TOL, what: str = "matrix") -> np.ndarray:
    m = as_matrix(m)
    if not is_unitary(m, tol):
        raise NumericsError(f"{what} is not unitary within {tol}")
    return m


def assert_unit_norm(v, tol: float = 1e-12, what: str = "vector") -> np.ndarray:
    v = as_vector(v)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise NumericsError(f"{what} is not unit-norm within {tol}")
    return v


def kron(a, b) -> np.ndarray:
    """Tensor product with the first factor on the most significant index."""
    return np.kron(as_matrix(a), as_matrix(b))


def reshuffle(m: np.ndarray) -> np.ndarray:
    """Rearrange a 4x4 operator on two qubits so that product operators
    become rank-1 matrices: out[(i,k),(j,l)] = m[(i,j),(k,l)]."""
    m = as_matrix(m)
    if m.shape != (4, 4):
        raise NumericsError(f"reshuffle needs a 4x4 matrix, got {m.shape}")
    return m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def operator_schmidt_rank(m, tol: float = STRUCTURAL_TOL) -> int:
    """Number of terms in the operator Schmidt decomposition of a two-qubit
    operator, i.e. the rank of the reshuffled matrix relative to its largest
    singular value."""
    s = np.linalg.svd(reshuffle(m), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def schmidt_split(m, tol: float = STRUCTURAL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Factor a Schmidt-rank-1 two-qubit operator into g, h with m = kron(g, h).

    The full singular weight and phase go into ``g``; ``h`` is normalized to
    unit determinant (principal branch).
    """
    u, s, vh = np.linalg.svd(reshuffle(m))
    if s[0] > 0 and np.count_nonzero(s > tol * s[0]) != 1:
        raise NumericsError("operator is not a tensor product (Schmidt rank != 1)")
    # reshuffle(g (x) h) = vec(g) vec(h)^T, so the row of vh is vec(h) itself
    g = (s[0] * u[:, 0]).reshape(2, 2)
    h = vh[0, :].reshape(2, 2)
    det = np.linalg.det(h)
    if abs(det) < 1e-300:
        return g, h
    c = np.sqrt(det)
    return g * c, h / c


def hermitian_eig(m, tol: float = STRUCTURAL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending eigenvalues and the matrix of orthonormal column
    eigenvectors.  Rejects non-Hermitian input.
    """
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise NumericsError("hermitian_eig: input is not Hermitian")
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


def sparse_low_spectrum(h, k: int, tol: float = ITERATIVE_TOL, maxiter: int | None = None) -> np.ndarray:
    """The k smallest eigenvalues of a sparse Hermitian operator.

    Uses an iterative (Lanczos-type) solver for large problems and falls back
    to dense diagonalization when the dimension is too small for ARPACK.
    Each returned pair is residual-checked: ||h v - lambda v|| <= tol.
    Non-convergence raises NumericsError with the partial result attached.
    """
    h = sp.csr_matrix(h) if not sp.issparse(h) else h.tocsr()
    n = h.shape[0]
    if h.shape[0] != h.shape[1]:
        raise NumericsError("sparse_low_spectrum: operator must be square")
    if k < 1 or k > n:
        raise NumericsError(f"sparse_low_spectrum: k={k} out of range for dim {n}")
    herm_defect = abs(h - h.getH()).max()
    if herm_defect > STRUCTURAL_TOL:
        raise NumericsError(f"sparse_low_spectrum: operator not Hermitian (defect {herm_defect:.2e})")

    # ARPACK needs k < n and struggles near full spectrum; go dense there.
    if n <= 256 or k >= n - 1:
        vals, vecs = np.linalg.eigh(h.toarray())
        vals, vecs = vals[:k], vecs[:, :k]
    else:
        try:
            vals, vecs = spla.eigsh(h, k=k, which="SA", maxiter=maxiter)
        except spla.ArpackNoConvergence as exc:
            raise NumericsError(
                f"sparse_low_spectrum: no convergence after {maxiter or 'default'} iterations "
                f"({len(exc.eigenvalues)} of {k} pairs converged)"
            ) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    scale = max(np.abs(vals).max(), 1.0)
    for i in range(k):
        res = np.linalg.norm(h @ vecs[:, i] - vals[i] * vecs[:, i])
        if res > tol * scale:
            raise NumericsError(f"sparse_low_spectrum: residual {res:.2e} exceeds {tol:.1e} for pair {i}")
    return vals


def phase_scale_distance(a, b) -> float:
    """Frobenius distance between a and the closest e^{i theta} * s * b over
    all phases theta and positive scales s, normalized by ||a||_F.

    This is the repo-wide "equal up to positive scale and global phase"
    metric.  The residual is formed explicitly (not via norm cancellation),
    so near-equal inputs resolve down to machine precision.
    """
    a, b = as_matrix(a), as_matrix(b)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 and nb == 0.0:
        return 0.0
    if na == 0.0 or nb == 0.0:
        return 1.0
    c = np.vdot(b, a) / nb**2  # optimal complex scale e^{i theta} s
    return float(np.linalg.norm(a - c * b) / na)


def close_up_to_phase_scale(a, b, tol: float = 1e-9) -> bool:
    return phase_scale_distance(a, b) <= tol


def positive_scale_distance(a, b) -> float:
    """Like phase_scale_distance but only a positive real scale is allowed."""
    a, b = as_matrix(a), as_matrix(b)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 and nb == 0.0:
        return 0.0
    if na == 0.0 or nb == 0.0:
        return 1.0
    s = max(np.real(np.vdot(b, a)) / nb**2, 0.0)
    return float(np.linalg.norm(a - s * b) / na)


def su2_representative(u, tol: float = STRUCTURAL_TOL) -> np.ndarray:
    """Rescale a 2x2 unitary by a global phase so the result has det = +1.

    The principal square root of det(u) is divided out; the choice of sign
    is canonical (branch cut on the negative real axis).
    """
    u = assert_unitary(u, tol, "su2_representative input")
    if u.shape != (2, 2):
        raise NumericsError("su2_representative needs a 2x2 matrix")
    return u / np.sqrt(np.linalg.det(u))


def haar_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(2) element via a uniform point on the 3-sphere."""
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    a = v[0] + 1j * v[1]
    b = v[2] + 1j * v[3]
    return np.array([[a, b], [-np.conj(b), np.conj(a)]])
