"""Domino tilings of cubiculated regions: exact counts, local moves,
the twist invariant, sampling, slab tilings, and ideal exports."""

__version__ = "0.1.0"

from .core import (
    Cell,
    Domino,
    Region,
    Tiling,
    base_vertical_tiling,
    color_sign,
    decode,
    encode,
    make_box,
    make_cylinder,
    make_region,
    read_tilings,
    refine_region,
    refine_tiling,
    render_floors,
    validate,
    write_tilings,
)
from .counting import (
    build_automaton,
    count_cylinder,
    count_rect_2d_formula,
    count_region,
)
from .explore import (
    component_trit_graph,
    enumerate_tilings,
    flip_components,
    flip_free_tilings,
    tw_max,
    twist_census,
)
from .moves import (
    FlipMove,
    TritMove,
    apply_flip,
    apply_trit,
    difference_cycles,
    list_flips,
    list_trits,
)
from .sample import ChainConfig, TwistHistogram, mcmc_run, twist_distribution
from .twist import (
    calibration,
    kasteleyn_matrix,
    pfaffian_alternating_sum,
    pretwist,
    twist,
    twist_by_path,
    twist_mod2,
)

__all__ = [
    "__version__",
    "Cell",
    "ChainConfig",
    "Domino",
    "FlipMove",
    "Region",
    "Tiling",
    "TritMove",
    "TwistHistogram",
    "apply_flip",
    "apply_trit",
    "base_vertical_tiling",
    "build_automaton",
    "calibration",
    "color_sign",
    "component_trit_graph",
    "count_cylinder",
    "count_rect_2d_formula",
    "count_region",
    "decode",
    "difference_cycles",
    "encode",
    "enumerate_tilings",
    "flip_components",
    "flip_free_tilings",
    "kasteleyn_matrix",
    "list_flips",
    "list_trits",
    "make_box",
    "make_cylinder",
    "make_region",
    "mcmc_run",
    "pfaffian_alternating_sum",
    "pretwist",
    "read_tilings",
    "refine_region",
    "refine_tiling",
    "render_floors",
    "tw_max",
    "twist",
    "twist_by_path",
    "twist_census",
    "twist_distribution",
    "twist_mod2",
    "validate",
    "write_tilings",
]
