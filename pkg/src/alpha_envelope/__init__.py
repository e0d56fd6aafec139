"""Alpha-convex envelopes of boundary data on strictly convex planar domains.

The alpha-convex envelope interpolates between the quasiconvex envelope
(alpha = 0) and the convex envelope (alpha = 1).  Chords are compared against
the 1-D solution of ``alpha v'' + (1 - alpha) v'^2 = 0`` instead of the affine
interpolant.
"""

from .analysis import (
    AlphaHyperplane,
    ViolationReport,
    c1_diagnostic,
    check_alpha_convex,
    check_composition,
    compare_fields,
    gradient,
    lipschitz_estimate,
    support_hyperplane,
)
from .envelope import (
    EnvelopeResult,
    Field,
    alpha_sweep,
    chord_update,
    init_field,
    residual,
    setup,
    solve_envelope,
    solve_on_arms,
    sweep,
)
from .expr import ExpressionError, parse_expression
from .geometry import BoundaryDatum, StrictlyConvexDomain, disc, domain_from_spec, ellipse, parse_datum, superellipse
from .lattice import ArmTable, DirectionSet, Grid, build_arms, build_directions, build_grid
from .oracles import (
    convex_envelope_oracle,
    fixed_point_oracle,
    quasiconvex_envelope_oracle,
    sample_boundary,
)
from .scalar import (
    Alpha,
    EtaSolution,
    chord_consistency,
    chord_derivative,
    chord_value,
    chord_values,
    eta_solution,
    eta_value,
    make_alpha,
    maximal_interval,
    ode_residual,
)

__version__ = "0.1.0"
