"""Implication reasoning for functional, inclusion, and independence dependencies.

The package decides finite and unrestricted implication for the tractable
subclasses of FD+IND+IA, builds verified Armstrong sample databases, checks
non-interaction criteria, and mines independence atoms from data.
"""

from .core import (
    FD,
    IA,
    IND,
    ClassProfile,
    Dependency,
    DependencySet,
    Implied,
    NotImplied,
    Schema,
    Unknown,
    Unsupported,
    Verdict,
    classify,
    decompose_ia_query,
    restrict,
    unarize_ias,
)
from .semantics import (
    Database,
    NoCounterexampleFound,
    OracleBounds,
    division_equals_projection,
    find_counterexample,
    generate_models,
    satisfies,
)
from .axioms import (
    Deduction,
    NotDerivable,
    RuleSystem,
    SYSTEM_DIA_IND,
    SYSTEM_FD_IA,
    SYSTEM_FD_IA_CORE,
    SYSTEM_IA,
    SYSTEM_IND,
    SYSTEM_IND_IA,
    SYSTEM_UNARY_FINITE,
    SYSTEM_UNARY_UNRESTRICTED,
    apply_rule,
    derive,
    rule_matches,
    verify_deduction,
)
from .chase import (
    chase_dia,
    chase_ind,
    graph_chase_fd_ia,
    h_graph_reachable,
    imply_ind_ia,
    reduce_ca,
    uind_ca_closure,
)
from .polyengine import (
    algorithm1,
    build_star_closure,
    fd_closure,
    imply_star,
    singlevalued_span,
    uind_ca_implies,
)
from .armstrong import (
    ArmstrongReport,
    armstrong_ind_ia,
    armstrong_star_finite,
    armstrong_ufd_ia,
    verify_armstrong,
)
from .noninteract import (
    NonInteractionReport,
    intersects,
    noninteract_fd_ia,
    noninteract_ind_ia,
    splits,
)
from .profiler import MiningConfig, MiningResult, independence_ratio, mine_ias
from .parser import load_csv, parse_dependency, parse_spec, pretty_spec
from .dispatch import Decision, decide_implication

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
