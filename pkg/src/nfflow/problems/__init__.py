"""Problem adapters for cutting stock / bin packing and ordered open-end bin packing."""

from .csp import build_csp_standard, build_csp_waste_limited, default_max_waste
from .families import ArcFamily, make_family
from .heuristics import first_fit_decreasing, material_bound, next_fit_overflow, primal_heuristic
from .instances import (
    CspInstance,
    OoebppInstance,
    format_instance,
    generate_random,
    parse_instance,
)
from .ooebpp import build_ooebpp
from .oracles import brute_force
from .prepare import Prepared, prepare

__all__ = [
    "ArcFamily",
    "CspInstance",
    "OoebppInstance",
    "Prepared",
    "brute_force",
    "build_csp_standard",
    "build_csp_waste_limited",
    "build_ooebpp",
    "default_max_waste",
    "first_fit_decreasing",
    "format_instance",
    "generate_random",
    "make_family",
    "material_bound",
    "next_fit_overflow",
    "parse_instance",
    "prepare",
    "primal_heuristic",
]
