"""Command-line front end.

Subcommands: compile, simulate, crossing, hamiltonian, oracle, dump-model.
All reports are JSON with schema "peps-mqc/1", echo their configuration, and
carry a git-style blob hash of every input file.  Exit codes: 0 success,
2 input error, 3 resource cap exceeded, 4 verification failure.

Set PEPS_MQC_THREADS to pin the BLAS/OpenMP thread count before numerics
load.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_VERIFY = 4

_THREADS = os.environ.get("PEPS_MQC_THREADS")
if _THREADS:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, _THREADS)


def git_blob_sha1(data: bytes) -> str:
    return hashlib.sha1(b"blob %d\x00" % len(data) + data).hexdigest()


def _read_input(path: str) -> tuple[str, dict]:
    with open(path, "rb") as fh:
        data = fh.read()
    return data.decode("utf-8"), {"path": path, "git_blob_sha1": git_blob_sha1(data)}


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, default=_json_default)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _json_default(obj):
    import numpy as np

    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [[ [float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(obj)]
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _report(command: str, config: dict, inputs: dict, result) -> dict:
    return {"schema": "peps-mqc/1", "command": command, "config": config, "inputs": inputs, "result": result}


def cmd_compile(args) -> int:
    from .compiler import circuit_from_json, compile_circuit, pattern_to_json

    text, stamp = _read_input(args.circuit)
    pattern = compile_circuit(circuit_from_json(text))
    payload = json.loads(pattern_to_json(pattern))
    payload["inputs"] = {"circuit": stamp}
    _emit(payload, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .compiler import pattern_from_json, simulate_pattern

    text, stamp = _read_input(args.pattern)
    pattern = pattern_from_json(text)
    mode = "sample" if args.sample else "enumerate"
    branches = simulate_pattern(
        pattern,
        mode=mode,
        seed=args.seed,
        shots=args.sample or 1,
        max_branches=args.max_branches,
    )
    result = {
        "mode": mode,
        "branches": [
            {
                "outcomes": list(map(list, b.outcomes)),
                "frame": [{"pauli": t.name, "phase": [t.phase.real, t.phase.imag]} for t in b.frame],
                "probability": b.probability,
                "readout_physical": b.readout_physical,
                "readout_logical": b.readout_logical,
            }
            for b in branches
        ],
    }
    config = {"seed": args.seed, "shots": args.sample, "max_branches": args.max_branches}
    _emit(_report("simulate", config, {"pattern": stamp}, result), args.out)
    return EXIT_OK


def cmd_crossing(args) -> int:
    from .crossing import CanonicalGate, combined_template, filter_matrix, solve_patterns, verify_family

    gate = CanonicalGate(args.alpha, args.beta, args.gamma)
    families, unsolved = solve_patterns(filter_matrix(gate))
    result = {
        "families": [
            {
                "eta": f.eta,
                "planes": list(f.plane_labels),
                "includes_diagonal_group": True,
                "factor_name": f.factor_name,
                "factor_local": f.local_factor,
                "template": f.template,
            }
            for f in families
        ],
        "unsolved_etas": unsolved,
        "combined_template": combined_template(families),
    }
    if args.verify:
        result["verification"] = [verify_family(gate, f, args.verify, seed=args.seed) for f in families]
        if any(rep["fail"] for rep in result["verification"]):
            config = {"alpha": args.alpha, "beta": args.beta, "gamma": args.gamma, "verify": args.verify, "seed": args.seed}
            _emit(_report("crossing", config, {}, result), args.out)
            return EXIT_VERIFY
    config = {"alpha": args.alpha, "beta": args.beta, "gamma": args.gamma, "verify": args.verify, "seed": args.seed}
    _emit(_report("crossing", config, {}, result), args.out)
    return EXIT_OK


def cmd_hamiltonian(args) -> int:
    from .hamiltonian import (
        TERM_NAMES,
        assemble_and_diagonalize,
        load_term,
        region_support,
        term_patch_support,
        verify_term,
    )

    config = {"action": args.action, "patch": args.patch}
    if args.action == "verify":
        result = {"terms": {}, "region_ranks": {}}
        ok = True
        for name in TERM_NAMES:
            rep = verify_term(load_term(name), term_patch_support(name))
            result["terms"][name] = rep
            ok = ok and rep["psd"] and rep["annihilation"]
        for kind in ("vertical-mid-square", "circle+right-square"):
            result["region_ranks"][kind] = region_support(kind).rank
        ok = ok and result["region_ranks"]["vertical-mid-square"] == 4
        ok = ok and result["region_ranks"]["circle+right-square"] == 8
        result["pass"] = ok
        _emit(_report("hamiltonian", config, {}, result), args.report)
        return EXIT_OK if ok else EXIT_VERIFY
    result = assemble_and_diagonalize(patch=args.patch)
    _emit(_report("hamiltonian", config, {}, result), args.report)
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .compiler import circuit_from_json
    from .oracle import cross_validate

    text, stamp = _read_input(args.circuit)
    report = cross_validate(circuit_from_json(text), max_sites=args.max_sites)
    config = {"max_sites": args.max_sites}
    _emit(_report("oracle", config, {"circuit": stamp}, report), args.report)
    return EXIT_OK if report["pass"] else EXIT_VERIFY


def cmd_dump_model(args) -> int:
    from .honeycomb import dump_model_json

    payload = json.loads(dump_model_json())
    _emit(payload, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peps-mqc", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a circuit JSON into a measurement pattern JSON")
    p.add_argument("--circuit", required=True, help="input circuit JSON file")
    p.add_argument("--out", help="output pattern JSON file (default stdout)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="walk outcome branches of a pattern in correlation space")
    p.add_argument("--pattern", required=True, help="pattern JSON file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--enumerate", action="store_true", help="enumerate all branches (default)")
    group.add_argument("--sample", type=int, metavar="N", help="sample N trajectories instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-branches", type=int, default=4**10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("crossing", help="solve for local unitaries crossing a canonical gate")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--verify", type=int, default=0, metavar="N", help="verify each family with N samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_crossing)

    p = sub.add_parser("hamiltonian", help="verify the parent-Hamiltonian construction")
    p.add_argument("action", choices=["verify", "spectrum"])
    p.add_argument("--patch", default="unit7")
    p.add_argument("--report")
    p.set_defaults(func=cmd_hamiltonian)

    p = sub.add_parser("oracle", help="cross-validate a circuit against the state-vector oracle")
    p.add_argument("action", choices=["validate"])
    p.add_argument("--circuit", required=True)
    p.add_argument("--max-sites", type=int, default=10)
    p.add_argument("--report")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("dump-model", help="dump all model constants as JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dump_model)

    return parser


def main(argv=None) -> int:
    from .compiler import BranchCapExceeded
    from .numerics import NumericsError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BranchCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (NumericsError, FileNotFoundError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
