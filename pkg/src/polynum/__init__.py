"""Number systems in Z[X]/(p): exact digit expansion, verification, region
enumeration, fundamental-domain geometry, and empirical distribution tools."""

from .polycore import (
    IntPoly,
    ModulusContext,
    Residue,
    RingPoly,
    RootFindingError,
    companion_matrix,
    find_roots,
    gcd_monic,
    norm_trace,
    parse_poly,
    parse_ring_poly,
    reduce,
    residue_mul,
    squarefree_decompose,
)
from .numsys import (
    Expansion,
    ExpansionBudgetError,
    ExpansionCycleError,
    NotANumberSystemError,
    NumberSystem,
    VerificationBudgetError,
    VerifyReport,
    backward_divide,
    evaluate,
    expand,
    make_number_system,
    verify_number_system,
)
from .spectra import (
    BVector,
    Region,
    RegionBudgetError,
    RegionCount,
    b_values,
    count_region,
    enumerate_region,
    house_and_length,
    region_bounds,
)
from .embed import (
    BoundaryReport,
    TileParams,
    TileRaster,
    TileResult,
    apply_power,
    boundary_stats,
    embed_phi,
    integer_fractional,
    rasterize_tile,
    tile_membership,
    urysohn_eval,
)
from .stats import (
    AdditiveFunction,
    BorderReport,
    MomentProfile,
    PatternReport,
    SampleReport,
    TruncationWindow,
    WeylReport,
    additive_value,
    border_hits,
    clt_harness,
    digit_indicator,
    etk_bound,
    moment_profile,
    pattern_count,
    sum_of_digits,
    truncated_value,
    truncation_window,
    weyl_sum,
    zero_function,
)

__version__ = "0.1.0"
