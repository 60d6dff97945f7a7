"""Planar tangles, Temperley-Lieb algebras and the tangles of real rational maps."""
from .errors import (
    AmbiguityError,
    ArityError,
    CapacityError,
    CompositionArityError,
    CompositionShadingError,
    ConsistencyError,
    EvaluationError,
    GenericityError,
    MapError,
    NumericalError,
    ParseError,
    SewingWeightError,
    ShadingError,
    TangleError,
    ValidationError,
)
from .poly import SparsePoly, TwoParamPoly, specialize
from .tangle import (
    BLACK,
    LOOP,
    OUTER,
    WHITE,
    Disc,
    Tangle,
    Violation,
    canonical_form,
    canonicalize,
    compose,
    compose_detailed,
    empty_disc,
    ensure_valid,
    equals,
    identity_tangle,
    involution,
    matching_tangle,
    regions,
    validate,
)
from .tl import (
    TLDiagram,
    TLElement,
    identity_diagram,
    stacking_tangle,
    tl_basis,
    tl_generator,
    tl_multiply,
    tl_trace,
    trace_tangle,
)
from .partition import OvalForest, OvalNode, TemperleyLiebTarget, evaluate, oval_factor, oval_forests
from .weighted import (
    WeightedTangle,
    canonicalize_weighted,
    compose_weighted,
    enumerate_genus0,
    euler_count_check,
    harnack_disc_count,
    total_weight,
)
from .realmaps import (
    RealRationalMap,
    chamber_stability,
    critical_points,
    extract_tangle,
    stability_report,
    trace_locus,
)
from .render import render_svg

__version__ = "0.1.0"
