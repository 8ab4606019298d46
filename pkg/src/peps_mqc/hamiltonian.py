"""Three-local parent Hamiltonian of the honeycomb resource state.

Each local term is given as a digit-string shorthand over the two-qubit
Pauli basis of a 4-level site: digit pair (p, q) at a site denotes
SIGMA[p] (x) SIGMA[q] on the site's two virtual qubits (first digit = most
significant qubit of the level index).  A term acts on three neighboring
sites of a vertical-edge unit; every term must be PSD and annihilate every
physical state the region's tensors can produce, which is the verification
oracle for the whole construction.

Seven-site unit geometry and the site names used throughout:

        lu -- u -- ru        (upper wire: square, circle, square)
              |
              m              (vertical mid square)
              |
        ld -- d -- rd        (lower wire)

Horizontal legs carry information right to left; the mid square's matrix
maps the upper circle's vertical leg (column index) to the lower circle's
(row index).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .honeycomb import CIRCLE_TENSOR, SQUARE_LIST
from .numerics import PAULIS, NumericsError, hermitian_eig, is_hermitian, kron, sparse_low_spectrum
from .tensornet import contract_network

TERM_NAMES = ("h_lr_u", "h_lr_d", "h_lum", "h_ldm", "h_mur", "h_mdr", "h_umd")

# Which data file backs each term (the horizontal-trio listing is shared by
# the upper and lower rows) and which unit sites it acts on, in digit order.
TERM_FILES = {
    "h_lr_u": "h_lr",
    "h_lr_d": "h_lr",
    "h_lum": "h_lum",
    "h_ldm": "h_ldm",
    "h_mur": "h_mur",
    "h_mdr": "h_mdr",
    "h_umd": "h_umd",
}
TERM_SITES = {
    "h_lr_u": ("lu", "u", "ru"),
    "h_lr_d": ("ld", "d", "rd"),
    "h_lum": ("lu", "u", "m"),
    "h_ldm": ("ld", "d", "m"),
    "h_mur": ("m", "u", "ru"),
    "h_mdr": ("m", "d", "rd"),
    "h_umd": ("u", "m", "d"),
}

UNIT7_SITES = ("lu", "u", "ru", "m", "ld", "d", "rd")

_TOKEN = re.compile(r"([0-9]+)\((-?\d+)\)")


@dataclass(frozen=True)
class ShorthandTerm:
    digits: str
    coefficient: int


def parse_shorthand(text: str) -> list[ShorthandTerm]:
    """Parse 'digits(coef)+digits(coef)+...'; whitespace is ignored."""
    compact = re.sub(r"\s", "", text)
    if not compact:
        raise NumericsError("empty shorthand")
    pieces = compact.split("+")
    terms = []
    for piece in pieces:
        m = _TOKEN.fullmatch(piece)
        if m is None:
            raise NumericsError(f"malformed shorthand token {piece!r}")
        digits, coef = m.group(1), int(m.group(2))
        if len(digits) % 2 != 0:
            raise NumericsError(f"odd digit count in {piece!r}")
        if any(d not in "0123" for d in digits):
            raise NumericsError(f"digit out of range in {piece!r}")
        if coef == 0:
            raise NumericsError(f"zero coefficient in {piece!r}")
        terms.append(ShorthandTerm(digits, coef))
    return terms


def _site_operator(p: int, q: int) -> np.ndarray:
    # Level index i of a 4-level site splits as two qubits, MSB first.
    return kron(PAULIS[p], PAULIS[q])


def build_term(terms: list[ShorthandTerm]) -> np.ndarray:
    """Dense Hermitian matrix of a shorthand listing (64x64 for 3 sites)."""
    if not terms:
        raise NumericsError("no shorthand terms")
    length = len(terms[0].digits)
    if any(len(t.digits) != length for t in terms):
        raise NumericsError("inconsistent digit-string lengths")
    sites = length // 2
    dim = 4**sites
    out = np.zeros((dim, dim), dtype=complex)
    for t in terms:
        op = np.eye(1, dtype=complex)
        for s in range(sites):
            op = kron(op, _site_operator(int(t.digits[2 * s]), int(t.digits[2 * s + 1])))
        out += t.coefficient * op
    if not is_hermitian(out, 1e-12):
        raise NumericsError("built term is not Hermitian")
    return out


def load_term(name: str) -> np.ndarray:
    """Load and build one of the seven model terms by name."""
    if name not in TERM_FILES:
        raise NumericsError(f"unknown term {name!r}")
    text = resources.files("peps_mqc.data").joinpath(TERM_FILES[name] + ".txt").read_text()
    return build_term(parse_shorthand(text))


# --- region tensors -------------------------------------------------------
#
# Site tensors with named legs.  Axes are always (level, leg, leg, ...) with
# legs in the order listed; every leg has dimension 2.

_SQ = SQUARE_LIST.entries  # (level, left, right)
_CT = CIRCLE_TENSOR.entries  # (level, vertical, left, right)


def _site_axes(site: str) -> tuple[np.ndarray, tuple[str, ...]]:
    if site in ("lu", "ru", "ld", "rd"):
        return _SQ, (f"{site}.l", f"{site}.r")
    if site == "m":
        # row = lower circle's vertical leg, column = upper circle's
        return _SQ, ("m.down", "m.up")
    if site in ("u", "d"):
        return _CT, (f"{site}.v", f"{site}.l", f"{site}.r")
    raise NumericsError(f"unknown site {site!r}")


# Bonds of the seven-site unit: (leg, leg) pairs that contract together.
UNIT7_BONDS = (
    ("lu.r", "u.l"),
    ("u.r", "ru.l"),
    ("ld.r", "d.l"),
    ("d.r", "rd.l"),
    ("u.v", "m.up"),
    ("d.v", "m.down"),
)


def contract_sites(sites, bonds) -> tuple[np.ndarray, list[str]]:
    """Contract named-leg unit-cell sites into one tensor.

    Returns (tensor, open_legs); tensor axes are the per-site level indices
    in the given site order followed by the open legs.
    """
    return contract_network([_site_axes(site) for site in sites], bonds)


@dataclass(frozen=True)
class RegionSupport:
    """Span of the physical vectors a region's tensors generate over all
    virtual boundary values."""

    kind: str
    vectors: np.ndarray  # (physical_dim, boundary_count), orthonormalized
    rank: int


def _support_from_tensor(tensor: np.ndarray, n_sites: int, kind: str) -> RegionSupport:
    phys = 4**n_sites
    mat = tensor.reshape(phys, -1)
    q, s, _ = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.count_nonzero(s > 1e-12 * (s[0] if s.size and s[0] > 0 else 1.0)))
    return RegionSupport(kind=kind, vectors=q[:, :rank], rank=rank)


def region_support(kind: str) -> RegionSupport:
    """Supports of the two partition regions used by the construction."""
    if kind == "vertical-mid-square":
        tensor, legs = contract_sites(("m",), ())
        return _support_from_tensor(tensor, 1, kind)
    if kind == "circle+right-square":
        tensor, legs = contract_sites(("u", "ru"), (("u.r", "ru.l"),))
        return _support_from_tensor(tensor, 2, kind)
    raise NumericsError(f"unknown region kind {kind!r}")


def term_patch_support(name: str) -> RegionSupport:
    """Support of the three-site patch a named term acts on."""
    sites = TERM_SITES[name]
    bonds = tuple((a, b) for a, b in UNIT7_BONDS if _belongs(a, sites) and _belongs(b, sites))
    tensor, _ = contract_sites(sites, bonds)
    return _support_from_tensor(tensor, 3, name)


def _belongs(leg: str, sites) -> bool:
    return leg.split(".")[0] in sites


def verify_term(term: np.ndarray, support: RegionSupport, psd_tol: float = 1e-9, ann_tol: float = 1e-8) -> dict:
    """PSD + annihilation report for one local term.

    The annihilation check ||h v|| <= ann_tol * ||h|| over the patch support
    is the construction's ground truth; kernel dimension is reported for
    reference.
    """
    vals, _ = hermitian_eig(term, tol=1e-10)
    norm = float(max(abs(vals[0]), abs(vals[-1])))
    worst = 0.0
    for i in range(support.rank):
        worst = max(worst, float(np.linalg.norm(term @ support.vectors[:, i])))
    kernel_dim = int(np.count_nonzero(vals < psd_tol * max(norm, 1.0)))
    return {
        "psd": bool(vals[0] >= -psd_tol),
        "min_eigenvalue": float(vals[0]),
        "annihilation": bool(worst <= ann_tol * norm),
        "annihilation_residual": worst / norm if norm else worst,
        "support_rank": support.rank,
        "kernel_dim": kernel_dim,
    }


def embed_term(term: np.ndarray, positions: tuple[int, int, int], n_sites: int) -> sp.csr_matrix:
    """Place a 3-site operator at the given site positions of an n-site patch."""
    dim = 4**n_sites
    term = sp.coo_matrix(term)
    rest = [i for i in range(n_sites) if i not in positions]
    # strides of each site in the global row-major index (site 0 most significant)
    stride = [4 ** (n_sites - 1 - i) for i in range(n_sites)]
    rest_levels = np.arange(4 ** len(rest))
    offsets = np.zeros_like(rest_levels)
    for k, site in enumerate(rest):
        digit = (rest_levels // 4 ** (len(rest) - 1 - k)) % 4
        offsets = offsets + digit * stride[site]
    rows, cols, vals = [], [], []
    for r, c, v in zip(term.row, term.col, term.data):
        row_base = sum(((r // 4 ** (2 - k)) % 4) * stride[site] for k, site in enumerate(positions))
        col_base = sum(((c // 4 ** (2 - k)) % 4) * stride[site] for k, site in enumerate(positions))
        rows.append(row_base + offsets)
        cols.append(col_base + offsets)
        vals.append(np.full(offsets.shape, v))
    data = np.concatenate(vals)
    return sp.csr_matrix((data, (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))


def unit7_hamiltonian() -> sp.csr_matrix:
    """All seven terms assembled on the seven-site unit patch."""
    index = {s: i for i, s in enumerate(UNIT7_SITES)}
    total = None
    for name in TERM_NAMES:
        positions = tuple(index[s] for s in TERM_SITES[name])
        h = embed_term(load_term(name), positions, len(UNIT7_SITES))
        total = h if total is None else total + h
    return total


def unit7_peps_state(boundary: np.ndarray | None = None) -> np.ndarray:
    """The resource state contracted on the unit patch with fixed boundaries.

    Open horizontal legs are closed with the given 2-vector (default |0>,
    matching the readout row boundary).
    """
    if boundary is None:
        boundary = np.array([1.0, 0.0], dtype=complex)
    tensor, legs = contract_sites(UNIT7_SITES, UNIT7_BONDS)
    for _ in range(len(legs)):
        tensor = np.tensordot(tensor, boundary, axes=([len(UNIT7_SITES)], [0]))
    vec = tensor.reshape(-1)
    norm = np.linalg.norm(vec)
    if norm < 1e-14:
        raise NumericsError("patch state contracted to zero")
    return vec / norm


def assemble_and_diagonalize(patch: str = "unit7", boundary: np.ndarray | None = None, k: int = 24) -> dict:
    """Low spectrum of the assembled patch Hamiltonian and how the contracted
    resource state sits in its ground space.

    On an open patch the ground space is degenerate: one ground state per
    assignment of the dangling virtual legs.  The report therefore carries
    the kernel dimension and the gap above the kernel rather than claiming
    uniqueness, plus the norm of the resource state's projection onto the
    numerical kernel (1 when it is a ground state).
    """
    if patch != "unit7":
        raise NumericsError(f"unsupported patch {patch!r}")
    ham = unit7_hamiltonian()
    peps = unit7_peps_state(boundary)
    low = sparse_low_spectrum(ham, k=2)  # residual-checked lowest pair
    try:
        vals = np.sort(spla.eigsh(ham, k=k, which="SA", return_eigenvectors=False))
    except spla.ArpackNoConvergence as exc:
        raise NumericsError("patch diagonalization did not converge") from exc
    spectral_scale = float(np.max(np.abs(ham).sum(axis=1)))  # bound on ||H||
    residual = float(np.linalg.norm(ham @ peps))
    kernel_tol = 1e-8 * spectral_scale
    kernel_dim = int(np.count_nonzero(vals < kernel_tol))
    above = vals[vals >= kernel_tol]
    gap = float(above[0]) if above.size else None
    # Certified bound: the weight of |peps> outside the kernel is at most
    # ||H peps|| / gap, independent of eigenvector quality in the
    # degenerate subspace (ARPACK vectors there are unreliable).
    if gap:
        in_kernel = float(np.sqrt(max(0.0, 1.0 - (residual / gap) ** 2)))
    else:
        in_kernel = 0.0
    return {
        "patch": patch,
        "lambda0": float(low[0]),
        "lambda1": float(low[1]),
        "kernel_dim": kernel_dim if kernel_dim < k else f">={k}",
        "gap_above_kernel": gap,
        "peps_residual": residual,
        "peps_residual_relative": residual / spectral_scale,
        "peps_in_ground_space": in_kernel,
    }
