"""Dynamics of mapping-class-group automorphisms on cubic character surfaces.

The surfaces are the affine cubics x^2 + y^2 + z^2 + xyz = Ax + By + Cz + D
carrying the polynomial action of the free product of three involutions.
Submodules: words (GL(2,Z) word calculus), surfaces (parameter families and
real topology), dynamics (orbits, Green functions, escape rasters, trace
maps), periodic (periodic points, Cayley census, real confinement),
schrodinger (substitution spectra via trace maps), painleve (monodromy
reports), cli (the charsurf binary).
"""

from .words import (
    ELLIPTIC,
    PARABOLIC,
    HYPERBOLIC,
    V_X,
    V_Y,
    V_Z,
    IsometryClass,
    StabilityData,
    boundary_fixed_points,
    check_word,
    classify,
    classify_word,
    cyclic_reduce,
    inverse_word,
    mat_inv,
    mat_mul,
    matrix_to_word,
    positive_form,
    reduce,
    stability_data,
    word_to_matrix,
)
from .surfaces import (
    CAYLEY_SINGULAR,
    CONNECTED_FOUR_PUNCTURED,
    FAM,
    FOUR_DISKS,
    FOUR_DISKS_AND_POINT,
    FOUR_DISKS_AND_SPHERE,
    OTHER,
    PT,
    SurfaceParams,
    cayley_project,
    classify_real_topology,
    convert_convention,
    gradient,
    on_surface,
    params_from_traces,
    pt_params,
    residual,
    singular_points,
    word_monomial,
)
from .dynamics import (
    EscapeRaster,
    GreenEstimate,
    OrbitRecord,
    TraceMap,
    apply_generator,
    apply_word,
    apply_word_batch,
    area_ratio,
    elementary_factors,
    escape_rate,
    escape_times_batch,
    escape_times_parallel,
    green_minus,
    green_plus,
    nielsen_action,
    orbit,
    render_complex_slice,
    render_real_chart,
    word_jacobians,
    write_pgm,
)
from .periodic import (
    CensusResult,
    EmpiricalMeasure,
    PeriodicList,
    PeriodicPoint,
    cayley_census,
    default_seeds,
    empirical_measure,
    find_periodic,
    one_sided_probe,
    real_confinement_report,
    tangent_multipliers,
)
from .schrodinger import (
    NAMED_SUBSTITUTIONS,
    DimensionEstimate,
    SchrodingerConfig,
    SpectrumEstimate,
    Substitution,
    box_dimension,
    build_substitution,
    depth_for_budget,
    fixed_word_prefix,
    lyapunov,
    schrodinger_curve,
    spectrum_estimate,
    substitute,
    trace_map,
    transfer_matrix,
    tridiagonal_oracle,
)
from .painleve import (
    LOOP_WORDS,
    monodromy_report,
    parse_loop,
    singular_measure_conditions,
    theta_to_traces,
)

__version__ = "0.1.0"
