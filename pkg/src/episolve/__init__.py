"""Epistemic logic program solver: belief sets, world views, splitting,
and stratified evaluation."""

from .limits import DEFAULT_LIMITS, ResourceLimitError, SolveLimits
from .semantics import (
    LIT_ALL,
    belief_sets,
    belief_sets_positive,
    enumerate_world_views,
    gl_reduct,
    is_consistent_world_view,
    modal_reduct,
    satisfies_subjective,
    world_views,
)
from .splitting import (
    NotASplittingSet,
    PossiblyUnsafeSplit,
    SubjectiveOverlap,
    UNKNOWN,
    is_guarded,
    is_splitting_set,
    multi_views,
    partial_eval,
    restrict,
    restricted_reduct,
    solve_by_splitting,
    split,
)
from .stratification import (
    ChainInvalid,
    NotStratified,
    find_stratification,
    solve_stratified,
    splitting_chain,
)
from .syntax import (
    Atom,
    ObjectiveLiteral,
    ParseError,
    Program,
    Rule,
    SubjectiveLiteral,
    ValidationError,
    ground,
    parse_literal,
    parse_program,
    sublit_closure,
)

__version__ = "0.1.0"
