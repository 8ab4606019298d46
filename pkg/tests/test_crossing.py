import numpy as np
import pytest
from scipy.linalg import expm

from peps_mqc.crossing import (
    EVEN_REFLECTIONS,
    MAGIC_Q,
    CanonicalGate,
    axis_rotation,
    combined_template,
    filter_matrix,
    is_member,
    magic_transform,
    plane_rotation,
    plane_support,
    realify_local,
    solve_gate,
    verify_family,
)
from peps_mqc.numerics import (
    I2,
    X,
    Y,
    Z,
    NumericsError,
    dag,
    haar_su2,
    kron,
    operator_schmidt_rank,
)

PI = np.pi
CZ_GATE = CanonicalGate(0.0, 0.0, PI / 2)


def test_magic_q_is_unitary():
    assert np.abs(dag(MAGIC_Q) @ MAGIC_Q - np.eye(4)).max() < 1e-15


def test_magic_transform_identity_and_xx():
    assert np.abs(magic_transform(np.eye(4)) - np.eye(4)).max() < 1e-15
    o = magic_transform(kron(X, X))
    assert np.abs(o.imag).max() < 1e-12
    assert np.linalg.det(o.real) == pytest.approx(1.0)


def test_magic_transform_sends_locals_to_so4():
    rng = np.random.default_rng(12)
    for _ in range(100):
        k = kron(haar_su2(rng), haar_su2(rng))
        o = magic_transform(k)
        assert np.abs(o.imag).max() < 1e-10
        assert np.abs(o.real @ o.real.T - np.eye(4)).max() < 1e-10
        assert np.linalg.det(o.real) == pytest.approx(1.0, abs=1e-10)


def test_magic_transform_rejects_non_unitary():
    with pytest.raises(NumericsError):
        magic_transform(np.ones((4, 4)))


def test_canonical_gate_matches_exponential():
    for abg in [(0.0, 0.0, PI / 2), (0.3, 0.7, 1.1), (PI / 3, 0.0, PI / 5)]:
        gate = CanonicalGate(*abg)
        a, b, g = abg
        direct = expm(0.5j * (a * kron(X, X) + b * kron(Y, Y) + g * kron(Z, Z)))
        assert np.abs(gate.matrix() - direct).max() < 1e-12


def test_canonical_gate_cz_diagonal_phases():
    d = np.diag(np.exp(1j * CZ_GATE.phases()))
    expected = np.diag(np.exp(1j * np.array([PI / 4, -PI / 4, -PI / 4, PI / 4])))
    assert np.abs(d - expected).max() < 1e-15
    assert np.abs(magic_transform(CZ_GATE.matrix()) - d).max() < 1e-12


def test_plane_rotations_have_claimed_local_forms():
    cases = {
        "12": ("X", 1, 1),
        "13": ("Y", 1, -1),
        "14": ("Z", 1, 1),
        "23": ("Z", -1, 1),
        "24": ("Y", 1, 1),
        "34": ("X", -1, 1),
    }
    theta = 0.631
    for label, (axis, s1, s2) in cases.items():
        local = MAGIC_Q @ plane_rotation(label, theta) @ dag(MAGIC_Q)
        target = kron(axis_rotation(axis, s1 * theta), axis_rotation(axis, s2 * theta))
        assert np.abs(local - target).max() < 1e-12


def test_even_reflections_map_to_pauli_pairs():
    expect = {0: (0, 0)}  # identity
    for refl in EVEN_REFLECTIONS:
        local = MAGIC_Q @ refl @ dag(MAGIC_Q)
        assert operator_schmidt_rank(local) == 1


# --- filter matrices ---------------------------------------------------------


def test_filter_matrix_cz():
    pf = filter_matrix(CZ_GATE)
    f0_expected = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]])
    classes = dict((round(eta, 12), f) for eta, f in pf.classes)
    assert set(np.round(list(classes), 6)) == {0.0, round(PI / 2, 6)}
    assert np.array_equal(classes[0.0], f0_expected)
    assert np.array_equal(classes[round(PI / 2, 12)], 1 - f0_expected)
    # F itself has +-1 entries
    assert np.abs(np.abs(pf.matrix) - 1).max() < 1e-12
    recon = sum(np.exp(2j * eta) * f for eta, f in pf.classes)
    assert np.abs(recon - pf.matrix).max() < 1e-12


def test_filter_matrix_generic_gamma():
    pf = filter_matrix(CanonicalGate(0.0, 0.0, PI / 3))
    etas = sorted(eta for eta, _ in pf.classes)
    assert np.allclose(etas, [0.0, PI / 3, PI - PI / 3], atol=1e-9)
    supports = pf.supports()
    assert supports[0.0] == {(0, 0), (0, 3), (3, 0), (3, 3), (1, 1), (1, 2), (2, 1), (2, 2)}
    assert supports[PI / 3] == {(0, 1), (0, 2), (3, 1), (3, 2)}


def test_filter_matrix_identity_gate():
    pf = filter_matrix(CanonicalGate(0.0, 0.0, 0.0))
    assert len(pf.classes) == 1
    assert pf.classes[0][0] == 0.0
    assert pf.classes[0][1].sum() == 16


def test_filter_inverse_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(10):
        gate = CanonicalGate(*rng.uniform(0, PI, size=3))
        f = filter_matrix(gate).matrix
        assert np.abs(f * f.T - 1).max() < 1e-9


# --- solving -----------------------------------------------------------------


def test_solve_cz_families():
    families, unsolved = solve_gate(CZ_GATE)
    assert unsolved == []
    assert len(families) == 2
    base = families[0]
    assert set(base.plane_labels) == {"14", "23"}
    coset = families[1]
    assert coset.eta == pytest.approx(PI / 2)
    assert coset.factor_name == "Y(x)Z"
    assert combined_template(families) == "Z(t1)S(i) (x) Z(t2)S(j) with S = (I, X, Y, Z)"


def test_solve_generic_gamma_only_l0():
    families, unsolved = solve_gate(CanonicalGate(0.0, 0.0, PI / 3))
    assert len(families) == 1
    assert set(families[0].plane_labels) == {"14", "23"}
    assert np.allclose(sorted(unsolved), [PI / 3, PI - PI / 3])
    assert combined_template(families) == "Z(t1)(x)Z(t2) . L0(i)"


def test_solve_identity_gate_full_group():
    families, unsolved = solve_gate(CanonicalGate(0.0, 0.0, 0.0))
    assert unsolved == []
    assert len(families) == 1
    assert len(families[0].plane_labels) == 6
    assert combined_template(families) == "all local gates U(2)(x)U(2)"


def test_cz_coset_factor_is_y_tensor_z():
    families, _ = solve_gate(CZ_GATE)
    factor = families[1].local_factor
    from peps_mqc.numerics import phase_scale_distance

    assert phase_scale_distance(factor, kron(Y, Z)) < 1e-12


def test_members_cross_locally():
    rng = np.random.default_rng(5)
    w = CZ_GATE.matrix()
    families, _ = solve_gate(CZ_GATE)
    for fam in families:
        for _ in range(20):
            u = fam.sample(rng)
            assert operator_schmidt_rank(u) == 1
            assert operator_schmidt_rank(w @ u @ dag(w)) == 1


def test_verify_family_reports():
    families, _ = solve_gate(CZ_GATE)
    for fam in families:
        rep = verify_family(CZ_GATE, fam, samples=30, seed=2)
        assert rep["pass"] == 30 and rep["fail"] == 0


def test_injected_non_member_fails_for_pi_third():
    gate = CanonicalGate(0.0, 0.0, PI / 3)
    w = gate.matrix()
    bad = kron(X, I2)  # member of the CZ family but not of the pi/3 family
    assert operator_schmidt_rank(w @ bad @ dag(w)) != 1
    families, _ = solve_gate(gate)
    assert not is_member(bad, families)


def test_eq9_family_membership_exact():
    # every Pauli-coset z-rotation pair crosses the CZ and is recognized, and
    # everything recognized crosses: scanned on a 24-point grid
    from peps_mqc.numerics import PAULIS

    families, _ = solve_gate(CZ_GATE)
    w = CZ_GATE.matrix()
    thetas = np.linspace(0.0, 2 * PI, 24, endpoint=False)
    for i in range(4):
        for j in range(4):
            for t1 in thetas[::6]:
                for t2 in thetas[::6]:
                    u = kron(PAULIS[i] @ axis_rotation("Z", t1), PAULIS[j] @ axis_rotation("Z", t2))
                    member = is_member(u, families)
                    crosses = operator_schmidt_rank(w @ u @ dag(w)) == 1
                    assert member and crosses


def test_completeness_scan_generic_gamma():
    from peps_mqc.numerics import PAULIS

    gate = CanonicalGate(0.0, 0.0, PI / 3)
    families, _ = solve_gate(gate)
    w = gate.matrix()
    thetas = np.linspace(0.0, 2 * PI, 24, endpoint=False)
    for i in range(4):
        for j in range(4):
            for t1 in thetas[::8]:
                for t2 in thetas[::8]:
                    u = kron(PAULIS[i] @ axis_rotation("Z", t1), PAULIS[j] @ axis_rotation("Z", t2))
                    member = is_member(u, families)
                    crosses = operator_schmidt_rank(w @ u @ dag(w)) == 1
                    assert member == crosses


def test_solution_set_is_closed():
    rng = np.random.default_rng(9)
    families, _ = solve_gate(CZ_GATE)
    for _ in range(25):
        fam1 = families[rng.integers(len(families))]
        fam2 = families[rng.integers(len(families))]
        u1, u2 = fam1.sample(rng), fam2.sample(rng)
        assert is_member(u1 @ u2, families)
        assert is_member(dag(u1), families)


def test_realify_rejects_entangling():
    assert realify_local(CZ_GATE.matrix()) is None


def test_plane_support_shapes():
    assert plane_support("12") == {(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (3, 3)}
