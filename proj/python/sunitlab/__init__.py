"""Exact S-unit scans, lattices, and gcd certificates."""

from ._core import (
    InternalError,
    box_witness,
    certify,
    classify,
    constants,
    gcd_records,
    lattice_minima,
    lemma_diff,
    mult_dep_search,
    orbit_row,
    ord,
    relation_lattice,
    smooth_up_to,
    subgroup_order,
    theorem1_scan,
    theorem2_scan,
)

__version__ = "0.1.0"

__all__ = [
    "InternalError",
    "box_witness",
    "certify",
    "classify",
    "constants",
    "gcd_records",
    "lattice_minima",
    "lemma_diff",
    "mult_dep_search",
    "orbit_row",
    "ord",
    "relation_lattice",
    "smooth_up_to",
    "subgroup_order",
    "theorem1_scan",
    "theorem2_scan",
]
