"""Exact single-qubit Pauli-with-phase algebra used for by-product tracking.

A tracked by-product on one logical wire is a unit-phase multiple of one of
I, X, Y, Z.  Keeping the phase explicit lets the pattern simulator maintain
"accumulated operator = (positive scale) x frame x intended" as an exact
identity rather than an up-to-phase one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import PAULIS, PAULI_NAMES, NumericsError, kron

# Structure constants: PAULIS[i] @ PAULIS[j] = _MUL_PHASE[i,j] * PAULIS[_MUL_LABEL[i,j]]
_MUL_LABEL = np.zeros((4, 4), dtype=int)
_MUL_PHASE = np.zeros((4, 4), dtype=complex)
for _i in range(4):
    for _j in range(4):
        prod = PAULIS[_i] @ PAULIS[_j]
        for _k in range(4):
            coef = np.trace(PAULIS[_k].conj().T @ prod) / 2.0
            if abs(coef) > 0.5:
                _MUL_LABEL[_i, _j] = _k
                _MUL_PHASE[_i, _j] = complex(np.round(coef.real) + 1j * np.round(coef.imag))
                break


@dataclass(frozen=True)
class PauliTerm:
    """phase * PAULIS[label], with |phase| = 1."""

    phase: complex
    label: int

    def __post_init__(self):
        if not 0 <= self.label < 4:
            raise NumericsError(f"Pauli label {self.label} out of range")
        if abs(abs(self.phase) - 1.0) > 1e-9:
            raise NumericsError("PauliTerm phase must be unit modulus")
        object.__setattr__(self, "phase", complex(self.phase) / abs(self.phase))

    @property
    def name(self) -> str:
        return PAULI_NAMES[self.label]

    def matrix(self) -> np.ndarray:
        return self.phase * PAULIS[self.label]

    def __mul__(self, other: "PauliTerm") -> "PauliTerm":
        return PauliTerm(
            self.phase * other.phase * _MUL_PHASE[self.label, other.label],
            int(_MUL_LABEL[self.label, other.label]),
        )

    def dagger(self) -> "PauliTerm":
        # Paulis are Hermitian, so only the phase conjugates.
        return PauliTerm(np.conj(self.phase), self.label)

    def flips_z_outcome(self) -> bool:
        """True when conjugation by this term flips a Z-basis outcome."""
        return self.label in (1, 2)


IDENTITY_TERM = PauliTerm(1.0, 0)


def identify_pauli(m, tol: float = 1e-9) -> PauliTerm:
    """Recognize a 2x2 matrix as phase * Pauli * positive scale; scale is dropped."""
    m = np.asarray(m, dtype=complex)
    for k in range(4):
        coef = np.trace(PAULIS[k].conj().T @ m) / 2.0
        if abs(coef) < tol:
            continue
        if np.abs(m - coef * PAULIS[k]).max() <= tol * abs(coef):
            return PauliTerm(coef / abs(coef), k)
    raise NumericsError("matrix is not proportional to a Pauli")


def identify_pauli_pair(m, tol: float = 1e-9) -> tuple[float, PauliTerm, PauliTerm]:
    """Recognize a 4x4 matrix as scale * (P (x) Q) with P, Q phased Paulis.

    Returns (positive scale, first-factor term, second-factor term); the
    joint phase is carried by the first factor.
    """
    m = np.asarray(m, dtype=complex)
    for i in range(4):
        for j in range(4):
            basis = kron(PAULIS[i], PAULIS[j])
            coef = np.trace(basis.conj().T @ m) / 4.0
            if abs(coef) < tol:
                continue
            if np.abs(m - coef * basis).max() <= tol * abs(coef):
                return abs(coef), PauliTerm(coef / abs(coef), i), PauliTerm(1.0, j)
    raise NumericsError("matrix is not proportional to a Pauli tensor product")


_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def cz_push(upper: PauliTerm, lower: PauliTerm) -> tuple[PauliTerm, PauliTerm]:
    """Exact rewrite CZ (P (x) Q) = (P' (x) Q') CZ for phased Paulis."""
    conj = _CZ @ kron(upper.matrix(), lower.matrix()) @ _CZ
    _, new_upper, new_lower = identify_pauli_pair(conj)
    return new_upper, new_lower
