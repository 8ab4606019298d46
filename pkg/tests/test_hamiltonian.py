import numpy as np
import pytest

from peps_mqc.hamiltonian import (
    TERM_NAMES,
    TERM_SITES,
    ShorthandTerm,
    assemble_and_diagonalize,
    build_term,
    contract_sites,
    embed_term,
    load_term,
    parse_shorthand,
    region_support,
    term_patch_support,
    unit7_hamiltonian,
    unit7_peps_state,
    verify_term,
)
from peps_mqc.numerics import I2, X, Y, Z, NumericsError, kron


def test_parse_notation_example():
    terms = parse_shorthand("0122(-1)+3200(2)")
    assert terms == [ShorthandTerm("0122", -1), ShorthandTerm("3200", 2)]
    built = build_term(terms)
    expected = -kron(kron(I2, X), kron(Y, Y)) + 2 * kron(kron(Z, Y), kron(I2, I2))
    assert np.abs(built - expected).max() < 1e-14


def test_parse_identity_term():
    built = build_term(parse_shorthand("000000(28)"))
    assert np.abs(built - 28 * np.eye(64)).max() == 0.0


def test_parse_whitespace_ignored():
    a = parse_shorthand("000000(6)+  0011\n30(-1)")
    assert a == [ShorthandTerm("000000", 6), ShorthandTerm("001130", -1)]


@pytest.mark.parametrize(
    "bad",
    ["00000(1)", "00120(1)+", "0004(1)", "abc(1)", "0011(0)", "", "0011(2)++0011(1)"],
)
def test_parse_rejects_malformed(bad):
    with pytest.raises(NumericsError):
        parse_shorthand(bad)


def test_build_rejects_inconsistent_lengths():
    with pytest.raises(NumericsError):
        build_term([ShorthandTerm("0000", 1), ShorthandTerm("000000", 1)])


def test_all_terms_parse_and_are_hermitian():
    for name in TERM_NAMES:
        h = load_term(name)
        assert h.shape == (64, 64)
        assert np.abs(h - h.conj().T).max() < 1e-12


def test_h_umd_identity_coefficient():
    h = load_term("h_umd")
    assert np.trace(h).real == pytest.approx(6 * 64)


def test_h_lr_trace():
    h = load_term("h_lr_u")
    assert np.trace(h).real == pytest.approx(28 * 64)


def test_terms_psd_and_annihilating():
    for name in TERM_NAMES:
        rep = verify_term(load_term(name), term_patch_support(name))
        assert rep["psd"], name
        assert rep["min_eigenvalue"] >= -1e-9, name
        assert rep["annihilation"], name
        assert rep["annihilation_residual"] <= 1e-8, name


def test_patch_support_ranks():
    expected = {"h_umd": 16}
    for name in TERM_NAMES:
        rank = term_patch_support(name).rank
        assert rank == expected.get(name, 8), name


def test_region_injectivity_ranks():
    assert region_support("vertical-mid-square").rank == 4
    assert region_support("circle+right-square").rank == 8
    with pytest.raises(NumericsError):
        region_support("bogus")


def test_zeroed_tensor_has_rank_zero():
    from peps_mqc.hamiltonian import _support_from_tensor

    assert _support_from_tensor(np.zeros((4, 4, 4, 2, 2)), 3, "synthetic").rank == 0


def test_terms_do_not_annihilate_generic_vectors():
    rng = np.random.default_rng(21)
    for name in ("h_umd", "h_lr_u"):
        h = load_term(name)
        support = term_patch_support(name).vectors
        v = rng.normal(size=64) + 1j * rng.normal(size=64)
        v -= support @ (support.conj().T @ v)  # orthogonal to the kernel span
        v /= np.linalg.norm(v)
        assert np.linalg.norm(h @ v) > 1.0


def test_embed_term_matches_dense_kron():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(64, 64))
    a = a + a.T
    dense = np.kron(a, np.eye(4))
    sparse = embed_term(a, (0, 1, 2), 4).toarray()
    assert np.abs(sparse - dense).max() < 1e-12
    dense2 = np.kron(np.eye(4), a)
    sparse2 = embed_term(a, (1, 2, 3), 4).toarray()
    assert np.abs(sparse2 - dense2).max() < 1e-12


def test_embed_term_permuted_positions():
    # operator on sites (0, 2, 3) of a 4-site patch, checked on a random
    # product vector
    rng = np.random.default_rng(7)
    a = rng.normal(size=(64, 64))
    emb = embed_term(a, (0, 2, 3), 4)
    vecs = [rng.normal(size=4) for _ in range(4)]
    full = vecs[0]
    for v in vecs[1:]:
        full = np.kron(full, v)
    got = emb @ full
    acted = (a @ np.kron(np.kron(vecs[0], vecs[2]), vecs[3])).reshape(4, 4, 4)
    expected = np.einsum("ace,b->abce", acted, vecs[1]).reshape(-1)
    assert np.abs(got - expected).max() < 1e-10


def test_unit7_hamiltonian_assembles():
    h = unit7_hamiltonian()
    assert h.shape == (4**7, 4**7)
    assert abs(h - h.getH()).max() < 1e-12


def test_unit7_peps_state_boundaries():
    v = unit7_peps_state()
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    with pytest.raises(NumericsError):
        unit7_peps_state(np.zeros(2))


def test_patch_ground_space():
    rep = assemble_and_diagonalize()
    assert abs(rep["lambda0"]) <= 1e-8
    assert rep["peps_residual"] <= 1e-8
    assert rep["peps_in_ground_space"] >= 1 - 1e-6
    assert rep["kernel_dim"] == 16
    assert rep["gap_above_kernel"] > 1.0


def test_assemble_rejects_unknown_patch():
    with pytest.raises(NumericsError):
        assemble_and_diagonalize(patch="unit9")


def test_contract_sites_square_row():
    # <0| A(i) A(j) |0> via the generic contraction equals the direct product
    tensor, legs = contract_sites(("lu", "ru"), (("lu.r", "ru.l"),))
    assert legs == ["lu.l", "ru.r"]
    from peps_mqc.honeycomb import SQUARE_LIST

    boundary = np.array([1.0, 0.0])
    vec = np.einsum("ijab,a,b->ij", tensor, boundary, boundary)
    for i in range(4):
        for j in range(4):
            direct = boundary @ (SQUARE_LIST[i] @ SQUARE_LIST[j]) @ boundary
            assert abs(vec[i, j] - direct) < 1e-14
