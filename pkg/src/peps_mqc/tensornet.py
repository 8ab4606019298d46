"""Exact contraction of small named-leg tensor networks.

Sites are tensors whose first axis is the physical level and whose remaining
axes are bond legs identified by name.  Bonds (leg-name pairs) are contracted
as soon as both ends are present; physical axes stay open, ordered by site.
All legs here have dimension 2 and networks stay at desk scale, so plain
sequential tensordot/trace is exact and fast enough.
"""

from __future__ import annotations

import numpy as np

from .numerics import NumericsError


def contract_network(site_tensors, bonds, boundaries=None) -> tuple[np.ndarray, list[str]]:
    """Contract a network given as [(tensor, leg_names), ...].

    ``bonds`` pairs leg names; ``boundaries`` maps a leg name to a vector
    contracted into it (bras must be passed already conjugated).  Returns the
    resulting tensor with axes = per-site levels in input order followed by
    the remaining open legs, plus those legs' names.
    """
    boundaries = dict(boundaries or {})
    bond_map: dict[str, str] = {}
    for a, b in bonds:
        if a in bond_map or b in bond_map:
            raise NumericsError(f"leg reused in bonds: {(a, b)}")
        bond_map[a] = b
        bond_map[b] = a
    current = np.ones((), dtype=complex)
    names: list[str] = []
    level_count = 0
    for tensor, legs in site_tensors:
        tensor = np.asarray(tensor, dtype=complex)
        if tensor.ndim != len(legs) + 1:
            raise NumericsError("tensor rank does not match its leg list")
        current = np.tensordot(current, tensor, axes=0)
        names = names + [f"#level{level_count}"] + list(legs)
        level_count += 1
        done = False
        while not done:
            done = True
            for i, name in enumerate(names):
                if name in boundaries:
                    current = np.tensordot(current, np.asarray(boundaries.pop(name), dtype=complex), axes=([i], [0]))
                    names.pop(i)
                    done = False
                    break
                partner = bond_map.get(name)
                if partner is not None and partner in names and partner != name:
                    j = names.index(partner)
                    current = np.trace(current, axis1=i, axis2=j)
                    names = [n for idx, n in enumerate(names) if idx not in (i, j)]
                    done = False
                    break
    if boundaries:
        raise NumericsError(f"boundary legs not found in network: {sorted(boundaries)}")
    level_axes = [names.index(f"#level{k}") for k in range(level_count)]
    open_legs = [n for n in names if not n.startswith("#level")]
    order = level_axes + [names.index(n) for n in open_legs]
    return np.transpose(current, order), open_legs
