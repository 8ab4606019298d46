"""Local unitaries crossing a canonical two-qubit gate locally.

Given canonical parameters (alpha, beta, gamma) of
W = exp(i/2 (alpha XX + beta YY + gamma ZZ)), find every local unitary u
with W u W^dag still local.  The search runs in the magic basis, where
locals become SO(4) matrices and the constraint becomes a support pattern
on a 4x4 matrix of phases: cells are grouped into binary filters by phase
class, the class containing the diagonal is matched against plane-rotation
generators, and every other class is (when solvable at all) a signed
permutation translate of the diagonal class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .numerics import (
    NumericsError,
    assert_unitary,
    dag,
    is_unitary,
    kron,
    operator_schmidt_rank,
    schmidt_split,
    PAULI_NAMES,
    PAULIS,
)

MAGIC_Q = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
) / np.sqrt(2.0)

# Plane-rotation generators of SO(4) and their local forms through the magic
# basis: label -> (axis pair, per-factor angle signs).  "14" reads: rotation
# in the 1-4 coordinate plane maps to Z(t) (x) Z(t).
PLANE_AXES = {
    "12": (0, 1),
    "13": (0, 2),
    "14": (0, 3),
    "23": (1, 2),
    "24": (1, 3),
    "34": (2, 3),
}
PLANE_LOCAL_FORM = {
    "12": ("X", 1, 1),
    "13": ("Y", 1, -1),
    "14": ("Z", 1, 1),
    "23": ("Z", -1, 1),
    "24": ("Y", 1, 1),
    "34": ("X", -1, 1),
}

_DIAG_SUPPORT = frozenset((i, i) for i in range(4))

# The eight diagonal SO(4) reflections diag(+-1) with an even number of -1.
EVEN_REFLECTIONS = tuple(
    np.diag(signs).astype(complex)
    for signs in (
        (1, 1, 1, 1),
        (1, 1, -1, -1),
        (1, -1, 1, -1),
        (1, -1, -1, 1),
        (-1, 1, 1, -1),
        (-1, 1, -1, 1),
        (-1, -1, 1, 1),
        (-1, -1, -1, -1),
    )
)


def plane_support(label: str) -> frozenset[tuple[int, int]]:
    i, j = PLANE_AXES[label]
    cells = {(i, i), (i, j), (j, i), (j, j)}
    cells.update((k, k) for k in range(4) if k not in (i, j))
    return frozenset(cells)


def plane_rotation(label: str, theta: float) -> np.ndarray:
    i, j = PLANE_AXES[label]
    out = np.eye(4)
    c, s = np.cos(theta), np.sin(theta)
    out[i, i] = out[j, j] = c
    out[i, j] = -s
    out[j, i] = s
    return out.astype(complex)


def axis_rotation(axis: str, theta: float) -> np.ndarray:
    """exp(i * theta/2 * sigma_axis)."""
    sigma = PAULIS[PAULI_NAMES.index(axis)]
    return np.cos(theta / 2) * np.eye(2) + 1j * np.sin(theta / 2) * sigma


@dataclass(frozen=True)
class CanonicalGate:
    """Canonical two-qubit interaction content, angles in [0, pi)."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name, v in (("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)):
            if not 0 <= v < np.pi:
                raise NumericsError(f"{name}={v} outside [0, pi)")

    def phases(self) -> np.ndarray:
        """Diagonal phases of the gate in the magic basis."""
        a, b, g = self.alpha, self.beta, self.gamma
        return 0.5 * np.array([a - b + g, a + b - g, -a - b - g, -a + b + g])

    def matrix(self) -> np.ndarray:
        d = np.diag(np.exp(1j * self.phases()))
        return MAGIC_Q @ d @ dag(MAGIC_Q)


def magic_transform(k) -> np.ndarray:
    """Conjugate into the magic basis: locals in SU(2) (x) SU(2) land in SO(4)."""
    k = assert_unitary(k, what="magic_transform input")
    if k.shape != (4, 4):
        raise NumericsError("magic_transform needs a 4x4 matrix")
    return dag(MAGIC_Q) @ k @ MAGIC_Q


@dataclass(frozen=True)
class PhaseFilter:
    """Phase-constraint matrix of a canonical gate and its binary decomposition.

    ``classes`` lists (eta, binary filter) pairs with eta in [0, pi); the
    filters have disjoint supports covering all 16 cells and reconstruct
    F = sum exp(2 i eta) F_eta exactly.
    """

    matrix: np.ndarray
    classes: tuple[tuple[float, np.ndarray], ...]

    def supports(self) -> dict[float, frozenset[tuple[int, int]]]:
        return {
            eta: frozenset(zip(*np.nonzero(f)))
            for eta, f in self.classes
        }

    def diagonal_class(self) -> tuple[float, np.ndarray]:
        for eta, f in self.classes:
            if f[0, 0]:
                return eta, f
        raise NumericsError("phase filter has no class containing the diagonal")


def filter_matrix(gate: CanonicalGate, tol: float = 1e-9) -> PhaseFilter:
    """Build the phase matrix F_ij = exp(2i (delta_i - delta_j)) and group its
    cells into binary filters by phase class (canonical eta in [0, pi))."""
    delta = gate.phases()
    f = np.exp(2j * (delta[:, None] - delta[None, :]))
    reps: list[complex] = []
    members: list[np.ndarray] = []
    for i in range(4):
        for j in range(4):
            z = f[i, j]
            for idx, rep in enumerate(reps):
                if abs(z - rep) <= tol:
                    members[idx][i, j] = 1
                    break
            else:
                reps.append(z)
                binmat = np.zeros((4, 4), dtype=int)
                binmat[i, j] = 1
                members.append(binmat)
    classes = []
    for rep, binmat in zip(reps, members):
        eta = (np.angle(rep) / 2.0) % np.pi
        if np.pi - eta < tol:
            eta = 0.0
        classes.append((float(eta), binmat))
    classes.sort(key=lambda item: item[0])
    return PhaseFilter(matrix=f, classes=tuple(classes))


@dataclass(frozen=True)
class LocalFamily:
    """One connected solution family: all locals whose magic-basis support
    lies inside one binary filter.

    Members are products of the matched plane rotations and even diagonal
    reflections, right-multiplied by the signed-permutation factor when the
    family sits at eta != 0.
    """

    eta: float
    plane_labels: tuple[str, ...]
    support: frozenset[tuple[int, int]]
    permutation_factor: np.ndarray | None = None
    local_factor: np.ndarray | None = None
    factor_name: str | None = None
    template: str = ""

    def sample_orthogonal(self, rng: np.random.Generator) -> np.ndarray:
        o = EVEN_REFLECTIONS[rng.integers(len(EVEN_REFLECTIONS))].copy()
        for label in self.plane_labels:
            o = o @ plane_rotation(label, rng.uniform(0.0, 2.0 * np.pi))
        if self.permutation_factor is not None:
            o = o @ self.permutation_factor
        return o

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """A random member as a 4x4 local unitary."""
        return MAGIC_Q @ self.sample_orthogonal(rng) @ dag(MAGIC_Q)

    def contains(self, u, tol: float = 1e-9) -> bool:
        o = realify_local(u, tol)
        if o is None:
            return False
        cells = set(zip(*np.nonzero(np.abs(o) > tol)))
        return cells <= self.support


def realify_local(u, tol: float = 1e-9) -> np.ndarray | None:
    """Strip the global phase of a local product so its magic-basis image is
    real special-orthogonal; None when u is not such a product."""
    u = np.asarray(u, dtype=complex)
    m = dag(MAGIC_Q) @ u @ MAGIC_Q
    k = np.argmax(np.abs(m))
    pivot = m.flat[k]
    if abs(pivot) < tol:
        return None
    o = m * np.exp(-1j * np.angle(pivot))
    if np.abs(o.imag).max() > tol:
        return None
    o = o.real
    if np.abs(o @ o.T - np.eye(4)).max() > 1e-8 or np.linalg.det(o) < 0:
        return None
    return o


def _signed_permutation(perm: tuple[int, ...]) -> np.ndarray:
    """Column-permutation matrix for perm, sign-fixed into SO(4)."""
    t = np.zeros((4, 4))
    for j, pj in enumerate(perm):
        t[j, pj] = 1.0
    if np.linalg.det(t) < 0:
        t[0, perm[0]] = -1.0
    return t.astype(complex)


def _factor_name(local: np.ndarray) -> str | None:
    for i in range(4):
        for j in range(4):
            basis = kron(PAULIS[i], PAULIS[j])
            coef = np.trace(dag(basis) @ local) / 4.0
            if abs(coef) > 0.5 and np.abs(local - coef * basis).max() < 1e-9:
                return f"{PAULI_NAMES[i]}(x){PAULI_NAMES[j]}"
    return None


def _base_template(planes: tuple[str, ...]) -> str:
    if len(planes) == 6:
        return "all local gates U(2)(x)U(2)"
    parts = []
    rest = list(planes)
    k = 1
    for pair, axis in (({"14", "23"}, "Z"), ({"12", "34"}, "X"), ({"13", "24"}, "Y")):
        if pair <= set(rest):
            parts.append(f"{axis}(t{k})(x){axis}(t{k + 1})")
            k += 2
            rest = [p for p in rest if p not in pair]
    for label in rest:
        axis, s1, s2 = PLANE_LOCAL_FORM[label]
        parts.append(f"{axis}({'-' if s1 < 0 else ''}t{k})(x){axis}({'-' if s2 < 0 else ''}t{k})")
        k += 1
    parts.append("L0(i)")
    return " . ".join(parts)


def solve_patterns(pf: PhaseFilter) -> tuple[list[LocalFamily], list[float]]:
    """All solution families of a phase filter, plus the unsolvable etas.

    The class containing the diagonal is matched against the plane-rotation
    library; any other class is solvable exactly when it is a column
    permutation of the diagonal class, in which case its family is the
    diagonal family times that (sign-fixed) permutation.
    """
    supports = pf.supports()
    eta0, _ = pf.diagonal_class()
    s0 = supports[eta0]
    matched = tuple(label for label in PLANE_AXES if plane_support(label) <= s0)
    base_template = _base_template(matched)
    families = [LocalFamily(eta=eta0, plane_labels=matched, support=s0, template=base_template)]
    unsolved: list[float] = []
    for eta, support in supports.items():
        if eta == eta0:
            continue
        found = None
        for perm in permutations(range(4)):
            if {(i, perm[j]) for i, j in s0} == support:
                found = _signed_permutation(perm)
                break
        if found is None:
            unsolved.append(eta)
            continue
        local = MAGIC_Q @ found @ dag(MAGIC_Q)
        name = _factor_name(local)
        families.append(
            LocalFamily(
                eta=eta,
                plane_labels=matched,
                support=support,
                permutation_factor=found,
                local_factor=local,
                factor_name=name,
                template=f"{base_template} . [{name or 'fixed local factor'}]",
            )
        )
    return families, sorted(unsolved)


def solve_gate(gate: CanonicalGate) -> tuple[list[LocalFamily], list[float]]:
    return solve_patterns(filter_matrix(gate))


def is_member(u, families, tol: float = 1e-9) -> bool:
    """Whether a local unitary belongs to any of the solution families."""
    return any(f.contains(u, tol) for f in families)


def combined_template(families) -> str | None:
    """Closed-form presentation of the union of families, when recognized.

    The CZ-class case (Z-plane pair at eta 0 plus a Y(x)Z-equivalent coset)
    merges into independently phased Pauli cosets on each wire.
    """
    if len(families) == 1:
        return families[0].template
    if (
        len(families) == 2
        and any(f.factor_name == "Y(x)Z" for f in families)
        and set(families[0].plane_labels) == {"14", "23"}
    ):
        return "Z(t1)S(i) (x) Z(t2)S(j) with S = (I, X, Y, Z)"
    return None


def verify_family(gate: CanonicalGate, family: LocalFamily, samples: int, seed: int = 0) -> dict:
    """Sample members and check each crosses the gate locally.

    Every draw is tested for: membership being an actual local product,
    unitarity of both factors, and W u W^dag having operator Schmidt rank 1
    with unitary factors.
    """
    rng = np.random.default_rng(seed)
    w = gate.matrix()
    failures = []
    for n in range(samples):
        u = family.sample(rng)
        conj = w @ u @ dag(w)
        ok = operator_schmidt_rank(u) == 1 and operator_schmidt_rank(conj) == 1
        if ok:
            for m in (u, conj):
                g, h = schmidt_split(m)
                scale = np.linalg.norm(g) / np.sqrt(2.0)
                if not (is_unitary(g / scale, 1e-8) and is_unitary(h, 1e-8)):
                    ok = False
        if not ok:
            failures.append(n)
    return {
        "eta": family.eta,
        "samples": samples,
        "pass": samples - len(failures),
        "fail": len(failures),
        "failures": failures,
    }
