"""Sharp ACE bounds under the binary IV model, a response-type LP oracle, and a
market equilibration simulator."""

__version__ = "0.1.0"

from .bounds import BoundsReport, Interval, balke_pearl_k2, g_value, natural_bounds, sharp_report
from .feasibility import check_joint, iv_compatible, joint_feasible, variation_independence_probe
from .law import (
    CounterfactualJoint,
    LawError,
    ObservedLaw,
    law_from_counts,
    law_from_json,
    law_from_pmfs,
    law_to_json,
    read_law,
    validate_law,
)
from .oracle import ResponseType, ResponseTypeDistribution, implied_law, oracle_ace_bounds
from .simplex import LinearProgram, simplex_solve
