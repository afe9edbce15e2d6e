"""Maximum t-laminar set families: constructions and exact LP bounds.

A family is t-laminar when any two members sharing at least t points
are nested.  This package builds large 2- and 3-laminar families by
nesting finite-geometry designs (affine/projective planes, circle
geometries) and bounds their maximum size from above with an
exact-rational recursive linear program, bracketing the limiting ratio
f(n)/C(n,2) inside [1.3818, 1.3821].
"""

from .bounds import (
    BoundTable,
    Frontier,
    Halfspace,
    Rat,
    frontier_update,
    lp_dual_value,
    lp_primal_oracle,
    obf_table,
    projective_series,
    rat_to_decimal,
    rec_bound_check,
    tail_sum,
    upper_limit_report,
)
from .construct import (
    TowerReport,
    circle_tower,
    fano_tower,
    general_n_lower_bound,
    nested,
    seven_series,
    three_series_report,
)
from .geometry import (
    Design,
    FiniteField,
    affine_plane,
    circle_geometry,
    field_make,
    greedy_packing,
    is_design,
    is_packing,
    projective_plane,
)
from .search import CompatGraph, max_laminar_classic, max_laminar_exact, verify_gap
from .setfam import (
    Block,
    Family,
    contains_config,
    forbidden_matrix,
    incidence_matrix,
    is_t_laminar,
    laminarity_witness,
    maximal_sets,
    unique_chain_check,
)

__version__ = "0.1.0"
