"""Brute-force physical ground truth for compiled patterns.

The resource state of a pattern's lattice is contracted into an explicit
state vector, measurements are simulated with honest Born probabilities,
and every correlation-space prediction (branch states, frames, readout
statistics) is cross-checked against a direct circuit-model simulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compiler import (
    ROLE_CZ_CIRCLE,
    ROLE_CZ_MID,
    ROLE_GATE,
    ROLE_READOUT,
    ROLE_REMOVAL_CIRCLE,
    ROLE_REMOVAL_MID,
    Branch,
    CircuitIR,
    MeasurementPattern,
    PatternSite,
    compile_circuit,
    simulate_pattern,
)
from .correlation import MeasurementBasis
from .honeycomb import CIRCLE_TENSOR, LEFT_BOUNDARY, SQUARE_LIST, readout_map
from .numerics import NumericsError, kron, positive_scale_distance
from .tensornet import contract_network

SITE_CAP = 10  # 4^10 amplitudes


@dataclass
class PatchState:
    """Explicit state vector over the unmeasured sites of a patch."""

    site_ids: tuple[int, ...]  # pattern site indices, most significant first
    vector: np.ndarray

    @property
    def site_count(self) -> int:
        return len(self.site_ids)

    def amplitude(self, levels) -> complex:
        if len(levels) != self.site_count:
            raise NumericsError("one level per site required")
        idx = 0
        for lv in levels:
            idx = idx * 4 + lv
        return complex(self.vector[idx])


def _site_network(sites, wires: int):
    """Tensors, legs, and bonds of a pattern's lattice."""
    tensors, bonds = [], []
    per_wire: dict[int, list[PatternSite]] = {w: [] for w in range(wires)}
    for site in sites:
        if site.role in (ROLE_CZ_MID, ROLE_REMOVAL_MID):
            tensors.append((site, SQUARE_LIST.entries, [f"{site.index}.down", f"{site.index}.up"]))
        elif site.role in (ROLE_CZ_CIRCLE, ROLE_REMOVAL_CIRCLE):
            tensors.append((site, CIRCLE_TENSOR.entries, [f"{site.index}.v", f"{site.index}.l", f"{site.index}.r"]))
            per_wire[site.wire].append(site)
        else:
            tensors.append((site, SQUARE_LIST.entries, [f"{site.index}.l", f"{site.index}.r"]))
            per_wire[site.wire].append(site)
    # vertical bonds: mid square column = upper circle, row = lower circle
    mids = {s.group: s for s in sites if s.role in (ROLE_CZ_MID, ROLE_REMOVAL_MID)}
    for site in sites:
        if site.role in (ROLE_CZ_CIRCLE, ROLE_REMOVAL_CIRCLE):
            mid = mids[site.group]
            end = "up" if site.wire == site.pair[0] else "down"
            bonds.append((f"{site.index}.v", f"{mid.index}.{end}"))
    return tensors, bonds, per_wire


def build_patch(layout, right_boundary: np.ndarray | None = None, left_boundary: np.ndarray | None = None) -> PatchState:
    """Contract a pattern's lattice into a normalized physical state vector.

    Each wire reads right to left: the first emitted site sits next to |R>
    and the readout square next to <L|.  Axis order of the state follows the
    site order, most significant first.
    """
    if isinstance(layout, MeasurementPattern):
        sites, wires = layout.sites, layout.wires
    else:
        sites = tuple(layout)
        wires = max((s.wire for s in sites if s.wire is not None), default=-1) + 1
    if not sites:
        raise NumericsError("empty layout")
    if len(sites) > SITE_CAP:
        raise NumericsError(f"patch of {len(sites)} sites exceeds the {SITE_CAP}-site cap")
    right = np.array([1.0, 0.0], dtype=complex) if right_boundary is None else np.asarray(right_boundary, complex)
    left = LEFT_BOUNDARY if left_boundary is None else np.asarray(left_boundary, complex)
    tensors, bonds, per_wire = _site_network(sites, wires)
    boundaries = {}
    for w, chain in per_wire.items():
        if not chain:
            raise NumericsError(f"wire {w} has no sites")
        boundaries[f"{chain[0].index}.r"] = right
        boundaries[f"{chain[-1].index}.l"] = np.conj(left)
        for a, b in zip(chain, chain[1:]):
            bonds.append((f"{a.index}.l", f"{b.index}.r"))
    tensor, open_legs = contract_network([(t, legs) for _, t, legs in tensors], bonds, boundaries)
    if open_legs:
        raise NumericsError(f"layout left legs open: {open_legs}")
    vec = tensor.reshape(-1)
    norm = np.linalg.norm(vec)
    if norm < 1e-14:
        raise NumericsError("patch contracted to the zero vector (invalid boundaries)")
    return PatchState(site_ids=tuple(s.index for s, _, _ in tensors), vector=vec / norm)


def measure_site(state: PatchState, site_id: int, basis: MeasurementBasis, outcome: int) -> tuple[float, PatchState | None]:
    """Born probability of an outcome and the renormalized post-state with
    the measured site factored out.  Zero-probability outcomes are flagged
    with a None post-state."""
    if site_id not in state.site_ids:
        raise NumericsError(f"site {site_id} not in state")
    if not 0 <= outcome < basis.outcomes:
        raise NumericsError(f"outcome {outcome} out of range")
    axis = state.site_ids.index(site_id)
    shaped = state.vector.reshape((4,) * state.site_count)
    reduced = np.tensordot(np.conj(basis.vectors[outcome]), shaped, axes=([0], [axis]))
    prob = float(np.linalg.norm(reduced) ** 2)
    if prob < 1e-14:
        return prob, None
    rest = tuple(s for s in state.site_ids if s != site_id)
    return prob, PatchState(site_ids=rest, vector=reduced.reshape(-1) / np.sqrt(prob))


class PhysicalOracle:
    """Born-rule probability source for ``simulate_pattern``."""

    def __init__(self, right_boundary: np.ndarray | None = None):
        self.right_boundary = right_boundary

    def initial_state(self, pattern: MeasurementPattern) -> PatchState:
        return build_patch(pattern, right_boundary=self.right_boundary)

    def measure(self, state, site, basis, outcome):
        if state is None:
            return 0.0, None
        return measure_site(state, site.index, basis, outcome)

    def finalize(self, state, pattern: MeasurementPattern, branch: Branch) -> None:
        if state is None:
            branch.oracle_data = {"skipped_zero_probability": True}
            return
        readouts = pattern.readout_sites()
        if tuple(state.site_ids) != tuple(s.index for s in readouts):
            raise NumericsError("finalize called before all non-readout sites were measured")
        rmap, (pi0, pi1) = readout_map()
        wires = pattern.wires
        psi = state.vector
        physical = []
        for z in range(2**wires):
            proj = np.eye(1, dtype=complex)
            for w in range(wires):
                proj = kron(proj, (pi0, pi1)[(z >> (wires - 1 - w)) & 1])
            physical.append(float(np.linalg.norm(proj @ psi) ** 2))
        branch.oracle_data = {
            "readout_state": psi.copy(),
            "readout_distribution": tuple(physical),
        }


def circuit_model_distribution(circuit: CircuitIR, right_boundary: np.ndarray | None = None) -> np.ndarray:
    """Z-basis outcome distribution of the intended circuit on |R>^wires."""
    right = np.array([1.0, 0.0], dtype=complex) if right_boundary is None else np.asarray(right_boundary, complex)
    state = np.array([1.0], dtype=complex)
    for _ in range(circuit.wires):
        state = np.kron(state, right)
    out = circuit.intended_unitary() @ state
    return np.abs(out) ** 2 / float(np.vdot(out, out).real)


def cross_validate(circuit: CircuitIR, max_sites: int = SITE_CAP, tol: float = 1e-9) -> dict:
    """Full branch enumeration against the physical oracle.

    Per positive-probability branch: the frame-corrected correlation operator
    must match the intended unitary, the physical post-measurement state on
    the readout sites must match the correlation-space prediction, and the
    frame-corrected readout distribution must match the circuit model; the
    branch-weighted (marginal) distribution is checked as well.
    """
    pattern = compile_circuit(circuit)
    if len(pattern.sites) > max_sites:
        raise NumericsError(f"pattern needs {len(pattern.sites)} sites, cap is {max_sites}")
    oracle = PhysicalOracle()
    branches = simulate_pattern(pattern, mode="enumerate", oracle=oracle)
    intended = circuit.intended_unitary()
    model_dist = circuit_model_distribution(circuit)
    rmap, _ = readout_map()
    joint_r = np.eye(1, dtype=complex)
    for _ in range(pattern.wires):
        joint_r = kron(joint_r, rmap.matrix)
    right = np.array([1.0, 0.0], dtype=complex)
    boundary = np.array([1.0], dtype=complex)
    for _ in range(pattern.wires):
        boundary = np.kron(boundary, right)

    total_p = 0.0
    marginal = np.zeros(2**pattern.wires)
    worst = {"map": 0.0, "state": 0.0, "physical_readout": 0.0, "logical_readout": 0.0}
    zero_branches = 0
    for branch in branches:
        p = branch.probability or 0.0
        total_p += p
        if p < 1e-12:
            zero_branches += 1
            continue
        marginal += p * np.asarray(branch.readout_logical)
        worst["map"] = max(
            worst["map"],
            positive_scale_distance(branch.operator, branch.frame_matrix() @ intended),
        )
        psi_corr = joint_r @ (branch.operator @ boundary)
        psi_corr = psi_corr / np.linalg.norm(psi_corr)
        psi_phys = branch.oracle_data["readout_state"]
        worst["state"] = max(worst["state"], 1.0 - min(1.0, abs(np.vdot(psi_phys, psi_corr))))
        worst["physical_readout"] = max(
            worst["physical_readout"],
            float(np.abs(np.asarray(branch.oracle_data["readout_distribution"]) - np.asarray(branch.readout_physical)).max()),
        )
        worst["logical_readout"] = max(
            worst["logical_readout"],
            float(np.abs(np.asarray(branch.readout_logical) - model_dist).max()),
        )
    report = {
        "circuit_wires": circuit.wires,
        "branches": len(branches),
        "zero_probability_branches": zero_branches,
        "probability_sum_error": abs(total_p - 1.0),
        "marginal_readout_error": float(np.abs(marginal - model_dist).max()),
        "worst_map_distance": worst["map"],
        "worst_state_mismatch": worst["state"],
        "worst_physical_readout_error": worst["physical_readout"],
        "worst_logical_readout_error": worst["logical_readout"],
    }
    report["pass"] = bool(
        report["probability_sum_error"] <= tol
        and report["marginal_readout_error"] <= tol
        and worst["map"] <= tol
        and worst["state"] <= tol
        and worst["physical_readout"] <= tol
        and worst["logical_readout"] <= tol
    )
    return report
