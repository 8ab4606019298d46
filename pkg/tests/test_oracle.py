import numpy as np
import pytest

from peps_mqc.compiler import (
    ROLE_GATE,
    ROLE_READOUT,
    CircuitIR,
    Gate,
    PatternSite,
    compile_circuit,
    simulate_pattern,
)
from peps_mqc.correlation import BoundaryPair, MeasurementBasis, mps_amplitude
from peps_mqc.honeycomb import HADAMARD, SQUARE_LIST, single_qubit_basis
from peps_mqc.numerics import I2, NumericsError, haar_su2
from peps_mqc.oracle import (
    PhysicalOracle,
    build_patch,
    circuit_model_distribution,
    cross_validate,
    measure_site,
)


def row_layout(n):
    """A single wire of n sites: n-1 gate squares then the readout square."""
    sites = [
        PatternSite(index=i, role=ROLE_GATE, column=i, wire=0, target=I2) for i in range(n - 1)
    ]
    sites.append(PatternSite(index=n - 1, role=ROLE_READOUT, column=n - 1, wire=0))
    return sites


def test_single_square_state():
    state = build_patch(row_layout(1))
    assert np.abs(state.vector - np.array([1, 0, 0, 1]) / np.sqrt(2)).max() < 1e-12


def test_row_amplitudes_match_mps_amplitude():
    for n in (2, 3, 4):
        state = build_patch(row_layout(n))
        bound = BoundaryPair(left=np.array([1, 0]), right=np.array([1, 0]))
        lists = [SQUARE_LIST] * n
        raw = np.zeros((4,) * n, dtype=complex)
        for idx in np.ndindex(*(4,) * n):
            # state axes follow site order (first site = most significant);
            # the amplitude convention feeds the rightmost site first
            levels = list(reversed(idx))
            raw[idx] = mps_amplitude(lists, bound, levels)
        raw = raw.reshape(-1)
        raw /= np.linalg.norm(raw)
        assert np.abs(state.vector - raw).max() < 1e-12


def test_build_patch_errors():
    with pytest.raises(NumericsError):
        build_patch([])
    with pytest.raises(NumericsError):
        build_patch(row_layout(11))
    with pytest.raises(NumericsError):
        build_patch(row_layout(1), right_boundary=np.zeros(2))


def test_measure_site_completeness():
    state = build_patch(row_layout(2))
    basis = single_qubit_basis(I2)
    probs = [measure_site(state, 0, basis, k)[0] for k in range(4)]
    assert sum(probs) == pytest.approx(1.0)


def test_measure_site_own_basis():
    # measuring a site of a product-like state in a basis containing the
    # state's own factor gives probability 1 on that outcome
    state = build_patch(row_layout(1))
    vec = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    rest = np.array([0, 1, 0, 0], dtype=complex)
    other = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
    last = np.array([0, 0, 1, 0], dtype=complex)
    basis = MeasurementBasis(np.array([vec, rest, other, last]))
    p, post = measure_site(state, 0, basis, 0)
    assert p == pytest.approx(1.0)
    p0, post0 = measure_site(state, 0, basis, 2)
    assert p0 == pytest.approx(0.0)
    assert post0 is None


def test_measure_site_probabilities_uniform_on_first_square():
    # the orthonormal square list depolarizes: every outcome of the first
    # measured square is equally likely
    state = build_patch(row_layout(3))
    rng = np.random.default_rng(0)
    basis = single_qubit_basis(haar_su2(rng))
    probs = [measure_site(state, 0, basis, k)[0] for k in range(4)]
    assert np.allclose(probs, 0.25)


def test_oracle_probabilities_sum_to_one_per_branch_tree():
    circ = CircuitIR(wires=2, gates=(Gate("cz", (0, 1)),))
    pattern = compile_circuit(circ)
    branches = simulate_pattern(pattern, oracle=PhysicalOracle())
    total = sum(b.probability for b in branches)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_cross_validate_identity_reproduces_boundary():
    rep = cross_validate(CircuitIR(wires=1, gates=(Gate("su2", (0,), I2),)))
    assert rep["pass"]
    # |R> = |0> means logical outcome 0 with certainty
    dist = circuit_model_distribution(CircuitIR(wires=1, gates=(Gate("su2", (0,), I2),)))
    assert np.allclose(dist, [1.0, 0.0])


def test_cross_validate_hadamard():
    rep = cross_validate(CircuitIR(wires=1, gates=(Gate("su2", (0,), HADAMARD),)))
    assert rep["pass"]
    assert rep["branches"] == 4


def test_cross_validate_cz_on_plus_states():
    # H on both wires then CZ: matches the circuit model's entangled statistics
    circ = CircuitIR(
        wires=2,
        gates=(Gate("su2", (0,), HADAMARD), Gate("su2", (1,), HADAMARD), Gate("cz", (0, 1))),
    )
    rep = cross_validate(circ)
    assert rep["pass"]
    dist = circuit_model_distribution(circ)
    assert np.allclose(dist, [0.25, 0.25, 0.25, 0.25])


def test_cross_validate_rejects_oversized():
    gates = tuple(Gate("su2", (0,), I2) for _ in range(12))
    with pytest.raises(NumericsError):
        cross_validate(CircuitIR(wires=1, gates=gates))
