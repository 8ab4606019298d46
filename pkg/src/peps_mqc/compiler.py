"""Compile logical circuits to adaptive measurement patterns and simulate
them in correlation space.

A circuit is a list of SU(2) gates on single wires, CZ gates between
vertically adjacent wires, and explicit skips that materialize (and then
remove) an unused vertical edge.  The compiled pattern is deterministic:
every outcome branch realizes the intended circuit up to the tracked
per-wire Pauli frame, which later single-qubit sites compensate by
targeting U E^dag instead of U.

The simulator maintains the exact identity

    accumulated operator = (positive scale) * frame * intended

per branch, with the frame an explicit phased Pauli per wire, so frame
soundness is a strict numerical check rather than an up-to-phase one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .correlation import MeasurementBasis, project_site
from .frames import IDENTITY_TERM, PauliTerm, cz_push, identify_pauli, identify_pauli_pair
from .honeycomb import (
    CZ,
    CZ_EDGE_BASIS,
    EDGE_REMOVAL_VECTORS,
    SQUARE_LIST,
    cz_mid_basis,
    edge_removal_byproduct,
    readout_map,
    removed_circle_list,
    single_qubit_basis,
)
from .numerics import (
    PAULIS,
    NumericsError,
    assert_unitary,
    dag,
    kron,
    su2_representative,
)

SCHEMA = "peps-mqc/1"
DEFAULT_BRANCH_CAP = 4**10


class BranchCapExceeded(RuntimeError):
    """Enumeration would exceed the configured branch cap."""


# --- circuit IR -----------------------------------------------------------


@dataclass(frozen=True)
class Gate:
    kind: str  # "su2" | "cz" | "skip"
    wires: tuple[int, ...]
    matrix: np.ndarray | None = None


@dataclass(frozen=True)
class CircuitIR:
    """Validated logical circuit.

    SU(2) entries are stored as their canonical det=1 representatives (the
    dropped global phase is unobservable); CZ and skip act on vertically
    adjacent wire pairs (upper, lower).
    """

    wires: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.wires < 1:
            raise NumericsError("circuit needs at least one wire")
        gates = []
        for gate in self.gates:
            if gate.kind == "su2":
                (w,) = gate.wires
                if not 0 <= w < self.wires:
                    raise NumericsError(f"wire {w} out of range")
                u = su2_representative(assert_unitary(gate.matrix, what="su2 gate"))
                gates.append(Gate("su2", (w,), u))
            elif gate.kind in ("cz", "skip"):
                u, d = gate.wires
                if d != u + 1 or not 0 <= u < self.wires - 1:
                    raise NumericsError(f"{gate.kind} needs vertically adjacent wires, got {gate.wires}")
                gates.append(Gate(gate.kind, (u, d)))
            else:
                raise NumericsError(f"unknown gate kind {gate.kind!r}")
        object.__setattr__(self, "gates", tuple(gates))

    def intended_unitary(self) -> np.ndarray:
        """Product of the circuit's gates on the joint correlation space."""
        total = np.eye(2**self.wires, dtype=complex)
        for gate in self.gates:
            if gate.kind == "su2":
                total = embed_single(gate.matrix, gate.wires[0], self.wires) @ total
            elif gate.kind == "cz":
                total = embed_pair(CZ, gate.wires[0], self.wires) @ total
        return total


def embed_single(op: np.ndarray, wire: int, wires: int) -> np.ndarray:
    """Place a one-wire operator; wire 0 is the most significant factor."""
    return kron(np.eye(2**wire), kron(op, np.eye(2 ** (wires - wire - 1))))


def embed_pair(op: np.ndarray, upper: int, wires: int) -> np.ndarray:
    return kron(np.eye(2**upper), kron(op, np.eye(2 ** (wires - upper - 2))))


# --- measurement pattern --------------------------------------------------

ROLE_GATE = "gate_square"
ROLE_READOUT = "readout_square"
ROLE_CZ_MID = "cz_mid_square"
ROLE_CZ_CIRCLE = "cz_circle"
ROLE_REMOVAL_MID = "removal_mid_square"
ROLE_REMOVAL_CIRCLE = "removal_circle"


@dataclass(frozen=True)
class PatternSite:
    index: int
    role: str
    column: int
    wire: int | None = None
    pair: tuple[int, int] | None = None
    group: int | None = None
    target: np.ndarray | None = None  # gate squares: canonical SU(2) target

    @property
    def outcome_count(self) -> int:
        return 2 if self.role == ROLE_READOUT else 4


@dataclass(frozen=True)
class MeasurementPattern:
    """Topologically ordered adaptive measurement plan.

    Sites of one vertical edge share a ``group`` id and are enumerated
    jointly; the basis of a gate square depends on previous outcomes only
    through the wire's current frame label.
    """

    wires: int
    sites: tuple[PatternSite, ...]
    circuit: CircuitIR

    def branch_count(self) -> int:
        n = 1
        for site in self.sites:
            if site.role != ROLE_READOUT:
                n *= 4
        return n

    def measurement_sites(self) -> list[PatternSite]:
        return [s for s in self.sites if s.role != ROLE_READOUT]

    def readout_sites(self) -> list[PatternSite]:
        return [s for s in self.sites if s.role == ROLE_READOUT]

    def steps(self):
        """Sites grouped into atomic enumeration steps (vertical trios merge)."""
        steps, seen = [], set()
        for site in self.sites:
            if site.role == ROLE_READOUT:
                continue
            if site.group is None:
                steps.append((site,))
            elif site.group not in seen:
                seen.add(site.group)
                trio = tuple(s for s in self.sites if s.group == site.group)
                steps.append(trio)
        return steps


def compile_circuit(circuit: CircuitIR) -> MeasurementPattern:
    """Lower a circuit onto the honeycomb: one square per SU(2) gate, one
    vertical trio per CZ or skip, one readout square per wire."""
    if not circuit.gates:
        raise NumericsError("cannot compile an empty circuit")
    sites: list[PatternSite] = []
    group = 0
    for column, gate in enumerate(circuit.gates):
        if gate.kind == "su2":
            sites.append(
                PatternSite(
                    index=len(sites), role=ROLE_GATE, column=column,
                    wire=gate.wires[0], target=gate.matrix,
                )
            )
            continue
        mid_role = ROLE_CZ_MID if gate.kind == "cz" else ROLE_REMOVAL_MID
        circle_role = ROLE_CZ_CIRCLE if gate.kind == "cz" else ROLE_REMOVAL_CIRCLE
        up, down = gate.wires
        sites.append(PatternSite(index=len(sites), role=mid_role, column=column, pair=gate.wires, group=group))
        sites.append(
            PatternSite(index=len(sites), role=circle_role, column=column, wire=up, pair=gate.wires, group=group)
        )
        sites.append(
            PatternSite(index=len(sites), role=circle_role, column=column, wire=down, pair=gate.wires, group=group)
        )
        group += 1
    for w in range(circuit.wires):
        sites.append(PatternSite(index=len(sites), role=ROLE_READOUT, column=len(circuit.gates), wire=w))
    return MeasurementPattern(wires=circuit.wires, sites=tuple(sites), circuit=circuit)


_STANDARD_BASIS = MeasurementBasis(np.eye(4, dtype=complex))
_REMOVAL_BASIS = MeasurementBasis(EDGE_REMOVAL_VECTORS)


def site_basis(site: PatternSite, frame_label: int = 0, removal_outcome: int | None = None) -> MeasurementBasis:
    """Measurement basis at a site given the adaptive context.

    Gate squares compensate the wire's current frame label; removal circles
    are measured in the standard basis regardless of the mid outcome (the
    X sandwich only relabels their by-products).
    """
    if site.role == ROLE_GATE:
        comp = su2_representative(site.target @ dag(PAULIS[frame_label]))
        return single_qubit_basis(comp)
    if site.role == ROLE_CZ_MID:
        return cz_mid_basis()
    if site.role == ROLE_CZ_CIRCLE:
        return CZ_EDGE_BASIS
    if site.role == ROLE_REMOVAL_MID:
        return _REMOVAL_BASIS
    if site.role == ROLE_REMOVAL_CIRCLE:
        return _STANDARD_BASIS
    raise NumericsError(f"no measurement basis for role {site.role}")


# --- frame advance and branch simulation ----------------------------------


def advance_frame(frame: tuple[PauliTerm, ...], step, outcomes, removal_mid: int | None = None):
    """New frame after one enumeration step.

    ``step`` is a single site (gate square or removal circle) with one
    outcome, or a vertical CZ trio with outcomes (mid, up, down).  Returns
    the frame only; the simulator additionally accumulates operators.
    """
    frame = list(frame)
    if isinstance(step, PatternSite):
        step = (step,)
    site = step[0]
    if site.role == ROLE_GATE:
        (outcome,) = outcomes
        w = site.wire
        comp = su2_representative(site.target @ dag(PAULIS[frame[w].label]))
        delta = np.trace(comp @ dag(site.target @ dag(PAULIS[frame[w].label]))) / 2.0
        frame[w] = PauliTerm(frame[w].phase * delta / abs(delta), outcome)
        return tuple(frame)
    if site.role == ROLE_REMOVAL_CIRCLE:
        (outcome,) = outcomes
        if removal_mid is None:
            raise NumericsError("removal circle advance needs the mid outcome")
        flags = edge_removal_byproduct(removal_mid)
        conj = flags[0] if site.wire == site.pair[0] else flags[1]
        term = identify_pauli(removed_circle_list(conj)[outcome])
        frame[site.wire] = term * frame[site.wire]
        return tuple(frame)
    if site.role == ROLE_CZ_MID:
        mid_out, up_out, down_out = outcomes
        up, down = site.pair
        w_real = _realized_cz_block(down_out, mid_out, up_out)
        _, p_up, p_down = identify_pauli_pair(w_real @ CZ)
        pushed_up, pushed_down = cz_push(frame[up], frame[down])
        frame[up] = p_up * pushed_up
        frame[down] = p_down * pushed_down
        return tuple(frame)
    raise NumericsError(f"advance_frame: unsupported step role {site.role}")


def _realized_cz_block(d: int, m: int, u: int) -> np.ndarray:
    from .honeycomb import cz_block  # local import keeps module import light

    mid = project_site(SQUARE_LIST, cz_mid_basis().vectors[m])
    return cz_block(d, m, u, mid_op=mid)


@dataclass
class Branch:
    """One outcome branch of a pattern simulation."""

    outcomes: tuple[tuple[int, int], ...]  # (site index, outcome)
    frame: tuple[PauliTerm, ...]
    operator: np.ndarray  # accumulated correlation-space operator
    probability: float | None = None
    readout_physical: tuple[float, ...] | None = None  # joint distribution, wire-0 msb
    readout_logical: tuple[float, ...] | None = None
    oracle_data: dict | None = None

    def frame_matrix(self) -> np.ndarray:
        total = np.eye(1, dtype=complex)
        for term in self.frame:
            total = kron(total, term.matrix())
        return total


def _branch_readout(pattern: MeasurementPattern, branch: Branch, right_boundary: np.ndarray):
    """Readout distributions predicted by the correlation operator."""
    wires = pattern.wires
    phi = branch.operator @ _joint_boundary(right_boundary, wires)
    if np.linalg.norm(phi) < 1e-14:
        raise NumericsError("correlation state collapsed to zero")
    rmap, (pi0, pi1) = readout_map()
    joint_r = np.eye(1, dtype=complex)
    for _ in range(wires):
        joint_r = kron(joint_r, rmap.matrix)
    psi = joint_r @ phi
    psi = psi / np.linalg.norm(psi)
    projs = (pi0, pi1)
    physical = []
    for z in range(2**wires):
        proj = np.eye(1, dtype=complex)
        for w in range(wires):
            proj = kron(proj, projs[(z >> (wires - 1 - w)) & 1])
        physical.append(float(np.linalg.norm(proj @ psi) ** 2))
    logical = [0.0] * len(physical)
    for z, p in enumerate(physical):
        zl = z
        for w in range(wires):
            if branch.frame[w].flips_z_outcome():
                zl ^= 1 << (wires - 1 - w)
        logical[zl] += p
    return tuple(physical), tuple(logical)


def _joint_boundary(right_boundary: np.ndarray, wires: int) -> np.ndarray:
    vec = np.array([1.0], dtype=complex)
    for _ in range(wires):
        vec = np.kron(vec, right_boundary)
    return vec


def simulate_pattern(
    pattern: MeasurementPattern,
    mode: str = "enumerate",
    seed: int | None = None,
    shots: int = 1,
    oracle=None,
    max_branches: int = DEFAULT_BRANCH_CAP,
    right_boundary: np.ndarray | None = None,
) -> list[Branch]:
    """Walk outcome branches of a pattern.

    In enumerate mode every branch is visited (refusing beyond
    ``max_branches``); in sample mode ``shots`` trajectories are drawn with
    a seeded generator.  Branch probabilities come from the attached oracle
    (physical Born rule); without one they are None and sampling is uniform,
    which exercises control paths only.
    """
    if right_boundary is None:
        right_boundary = np.array([1.0, 0.0], dtype=complex)
    if mode not in ("enumerate", "sample"):
        raise NumericsError(f"unknown mode {mode!r}")
    if mode == "enumerate" and pattern.branch_count() > max_branches:
        raise BranchCapExceeded(
            f"pattern has {pattern.branch_count()} branches, cap is {max_branches}"
        )
    steps = pattern.steps()
    wires = pattern.wires
    init = Branch(
        outcomes=(),
        frame=tuple(IDENTITY_TERM for _ in range(wires)),
        operator=np.eye(2**wires, dtype=complex),
        probability=1.0 if oracle is not None else None,
    )
    oracle_state = oracle.initial_state(pattern) if oracle is not None else None
    results: list[Branch] = []

    def extend(branch: Branch, state, step, outcomes) -> tuple[Branch, object]:
        site = step[0]
        new_state = state
        prob = branch.probability
        if oracle is not None:
            for s, k in zip(step, outcomes):
                label = branch.frame[s.wire].label if s.role == ROLE_GATE else 0
                p, new_state = oracle.measure(new_state, s, site_basis(s, label), k)
                prob = (prob if prob is not None else 1.0) * p
        op = branch.operator
        frame = branch.frame
        if site.role == ROLE_GATE:
            (k,) = outcomes
            basis = site_basis(site, frame[site.wire].label)
            op2 = project_site(SQUARE_LIST, basis.vectors[k])
            op = embed_single(op2, site.wire, wires) @ op
            frame = advance_frame(frame, site, outcomes)
        elif site.role == ROLE_CZ_MID:
            m_out, u_out, d_out = outcomes
            up, down = site.pair
            w_real = _realized_cz_block(d_out, m_out, u_out)
            op = embed_pair(w_real, up, wires) @ op
            frame = advance_frame(frame, step, (m_out, u_out, d_out))
        elif site.role == ROLE_REMOVAL_MID:
            m_out, u_out, d_out = outcomes
            up, down = site.pair
            flags = edge_removal_byproduct(m_out)
            op_u = removed_circle_list(flags[0])[u_out] / np.sqrt(2.0)
            op_d = removed_circle_list(flags[1])[d_out] / np.sqrt(2.0)
            op = embed_single(op_u, up, wires) @ embed_single(op_d, down, wires) @ op
            frame = advance_frame(frame, (step[1],), (u_out,), removal_mid=m_out)
            frame = advance_frame(frame, (step[2],), (d_out,), removal_mid=m_out)
        new_outcomes = branch.outcomes + tuple((s.index, k) for s, k in zip(step, outcomes))
        return Branch(outcomes=new_outcomes, frame=frame, operator=op, probability=prob), new_state

    def finish(branch: Branch, state) -> None:
        physical, logical = _branch_readout(pattern, branch, right_boundary)
        branch.readout_physical = physical
        branch.readout_logical = logical
        if oracle is not None:
            branch.probability = branch.probability if branch.probability is not None else 1.0
            oracle.finalize(state, pattern, branch)
        results.append(branch)

    def walk(branch: Branch, state, depth: int) -> None:
        if depth == len(steps):
            finish(branch, state)
            return
        step = steps[depth]
        for outcomes in _step_outcomes(step):
            child, child_state = extend(branch, state, step, outcomes)
            walk(child, child_state, depth + 1)

    if mode == "enumerate":
        walk(init, oracle_state, 0)
    else:
        rng = np.random.default_rng(seed)
        for _ in range(shots):
            branch, state = init, oracle_state
            for step in steps:
                options = _step_outcomes(step)
                if oracle is not None:
                    weights = []
                    children = []
                    for outcomes in options:
                        child, child_state = extend(branch, state, step, outcomes)
                        weights.append(child.probability / max(branch.probability, 1e-300))
                        children.append((child, child_state))
                    weights = np.array(weights)
                    weights = weights / weights.sum()
                    choice = rng.choice(len(options), p=weights)
                    branch, state = children[choice]
                else:
                    choice = rng.integers(len(options))
                    branch, state = extend(branch, state, step, options[choice])
            finish(branch, state)
    return results


def _step_outcomes(step):
    if len(step) == 1:
        return [(k,) for k in range(4)]
    return [(m, u, d) for m in range(4) for u in range(4) for d in range(4)]


# --- JSON surfaces ---------------------------------------------------------


def _enc_complex(z: complex):
    return [float(np.real(z)), float(np.imag(z))]


def _enc_matrix(m: np.ndarray):
    return [[_enc_complex(z) for z in row] for row in np.asarray(m, dtype=complex)]


def _dec_matrix(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def circuit_to_json(circuit: CircuitIR) -> str:
    gates = []
    for gate in circuit.gates:
        if gate.kind == "su2":
            gates.append({"type": "su2", "wire": gate.wires[0], "matrix": _enc_matrix(gate.matrix)})
        else:
            gates.append({"type": gate.kind, "wires": list(gate.wires)})
    return json.dumps({"schema": SCHEMA, "wires": circuit.wires, "gates": gates}, indent=2)


def circuit_from_json(text: str) -> CircuitIR:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NumericsError(f"invalid circuit JSON: {exc}") from exc
    if not isinstance(payload, dict) or "wires" not in payload or "gates" not in payload:
        raise NumericsError("circuit JSON needs 'wires' and 'gates'")
    gates = []
    for entry in payload["gates"]:
        kind = entry.get("type")
        if kind == "su2":
            gates.append(Gate("su2", (int(entry["wire"]),), _dec_matrix(entry["matrix"])))
        elif kind in ("cz", "skip"):
            gates.append(Gate(kind, tuple(int(w) for w in entry["wires"])))
        else:
            raise NumericsError(f"unknown gate type {kind!r}")
    return CircuitIR(wires=int(payload["wires"]), gates=tuple(gates))


def pattern_to_json(pattern: MeasurementPattern) -> str:
    sites = []
    for site in pattern.sites:
        record = {
            "index": site.index,
            "role": site.role,
            "column": site.column,
            "wire": site.wire,
            "pair": list(site.pair) if site.pair else None,
            "group": site.group,
        }
        if site.role == ROLE_GATE:
            record["target"] = _enc_matrix(site.target)
            record["bases_by_frame"] = {
                label: _enc_matrix(site_basis(site, k).vectors)
                for k, label in enumerate("IXYZ")
            }
            record["frame_rule"] = "wire frame := Sigma(outcome) * compensation phase"
        elif site.role in (ROLE_CZ_MID, ROLE_CZ_CIRCLE, ROLE_REMOVAL_MID, ROLE_REMOVAL_CIRCLE):
            record["basis"] = _enc_matrix(site_basis(site).vectors)
            record["frame_rule"] = {
                ROLE_CZ_MID: "joint: push pair frame through CZ, compose block by-product",
                ROLE_CZ_CIRCLE: "handled jointly at the group's mid square",
                ROLE_REMOVAL_MID: "sets X-sandwich flags for the group's circles",
                ROLE_REMOVAL_CIRCLE: "wire frame := circle matrix (with sandwich) * frame",
            }[site.role]
        else:
            record["projectors"] = "outcome 0: levels {0,3}; outcome 1: levels {1,2}"
        sites.append(record)
    payload = {
        "schema": SCHEMA,
        "wires": pattern.wires,
        "circuit": json.loads(circuit_to_json(pattern.circuit)),
        "sites": sites,
    }
    return json.dumps(payload, indent=2)


def pattern_from_json(text: str) -> MeasurementPattern:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NumericsError(f"invalid pattern JSON: {exc}") from exc
    circuit = circuit_from_json(json.dumps(payload["circuit"]))
    sites = []
    for record in payload["sites"]:
        sites.append(
            PatternSite(
                index=int(record["index"]),
                role=record["role"],
                column=int(record["column"]),
                wire=record["wire"] if record["wire"] is None else int(record["wire"]),
                pair=tuple(record["pair"]) if record["pair"] else None,
                group=record["group"] if record["group"] is None else int(record["group"]),
                target=_dec_matrix(record["target"]) if "target" in record else None,
            )
        )
    return MeasurementPattern(wires=int(payload["wires"]), sites=tuple(sites), circuit=circuit)
