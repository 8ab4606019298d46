import numpy as np
import pytest

from peps_mqc.frames import IDENTITY_TERM, PauliTerm, cz_push, identify_pauli, identify_pauli_pair
from peps_mqc.numerics import I2, X, Y, Z, NumericsError, kron

CZ = np.diag([1, 1, 1, -1]).astype(complex)


def test_term_multiplication_matches_matrices():
    terms = [PauliTerm(1.0, k) for k in range(4)] + [PauliTerm(1j, 2), PauliTerm(np.exp(0.4j), 1)]
    for a in terms:
        for b in terms:
            prod = a * b
            assert np.abs(prod.matrix() - a.matrix() @ b.matrix()).max() < 1e-12


def test_term_dagger():
    t = PauliTerm(np.exp(0.9j), 3)
    assert np.abs(t.dagger().matrix() - t.matrix().conj().T).max() < 1e-12


def test_identify_pauli():
    assert identify_pauli(Z @ X).label == 2  # ZX = iY
    assert abs(identify_pauli(Z @ X).phase - 1j) < 1e-12
    assert identify_pauli(-3.0 * X).label == 1
    with pytest.raises(NumericsError):
        identify_pauli(X + Z)


def test_identify_pauli_pair():
    scale, p, q = identify_pauli_pair(2.0 * kron(1j * X, Z))
    assert scale == pytest.approx(2.0)
    assert (p.label, q.label) == (1, 3)
    assert abs(p.phase - 1j) < 1e-12 and abs(q.phase - 1.0) < 1e-12
    with pytest.raises(NumericsError):
        identify_pauli_pair(CZ)


@pytest.mark.parametrize(
    "pair,expected",
    [
        ((1, 0), (1, 3)),  # X (x) I -> X (x) Z
        ((3, 0), (3, 0)),  # Z (x) I -> Z (x) I
        ((0, 1), (3, 1)),
        ((2, 0), (2, 3)),  # Y picks up the partner Z as well
    ],
)
def test_cz_push_labels(pair, expected):
    up, down = cz_push(PauliTerm(1.0, pair[0]), PauliTerm(1.0, pair[1]))
    assert (up.label, down.label) == expected


def test_cz_push_is_exact():
    rng = np.random.default_rng(0)
    for _ in range(30):
        a = PauliTerm(np.exp(1j * rng.uniform(0, 2 * np.pi)), rng.integers(4))
        b = PauliTerm(np.exp(1j * rng.uniform(0, 2 * np.pi)), rng.integers(4))
        up, down = cz_push(a, b)
        lhs = CZ @ kron(a.matrix(), b.matrix())
        rhs = kron(up.matrix(), down.matrix()) @ CZ
        assert np.abs(lhs - rhs).max() < 1e-12


def test_flips_z_outcome():
    assert not IDENTITY_TERM.flips_z_outcome()
    assert PauliTerm(1.0, 1).flips_z_outcome()
    assert PauliTerm(1.0, 2).flips_z_outcome()
    assert not PauliTerm(1.0, 3).flips_z_outcome()
