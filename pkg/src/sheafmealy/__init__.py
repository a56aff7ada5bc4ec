"""Local-to-global consistency checkers for judged explanations of finite
Mealy transducers: coverings and their pullbacks, section validation,
separation and gluing at four resolutions of sameness, exact rectangle-union
topology for stateless explanations, and metric feasibility with Helly-bound
obstruction depth.
"""

from .errors import (
    CheckerError,
    EmptyInput,
    EmptyInterface,
    ForeignElement,
    HeterogeneousInput,
    IncompatibleFamily,
    Infeasible,
    InterfaceMismatch,
    InternalConsistencyError,
    NegativeEpsilon,
    NotStateless,
    PartialDynamics,
    ScaleExceeded,
)
from .systems import (
    Amalgam,
    Covering,
    CoveringCheck,
    MealySystem,
    MorphismCheck,
    OpenImmersion,
    PushoutResult,
    SystemMorphism,
    VKReport,
    amalgamate,
    check_covering,
    check_morphism,
    compose,
    covering,
    identity_morphism,
    make_system,
    morphism,
    open_immersion,
    overlap_patch,
    pullback_covering,
    pushout_along_mono,
    restrict_immersion,
    subsystem,
    system_violations,
    systems_isomorphic,
    validate_system,
    verify_vk_square,
)
from .explain import (
    BehEquivReport,
    BehaviorPartition,
    CogermWitness,
    JFullReport,
    Judge,
    MinimizeResult,
    Section,
    SectionCheck,
    behavioral_equiv,
    check_cogerm_witness,
    cogerm_equiv,
    distinguishing_word,
    extend_section_alphabet,
    identity_judge,
    is_j_full,
    judge,
    minimize,
    pooled_behavior,
    restrict_section,
    restricted_interface,
    section,
    validate_judge,
    validate_section,
)
from .localglobal import (
    CompatibleFamily,
    ForcedBehavior,
    GlueStatelessResult,
    GlueStrictResult,
    ObstructionReport,
    SeparationReport,
    StatelessSectionReport,
    StatelessSheafReport,
    check_separation,
    compatible_family,
    discrete_stateless_sheaf_check,
    glue_behavioral,
    glue_cogerm,
    glue_stateless,
    glue_strict,
    search_bounded_behavioral_glue,
    stateless_ri_section,
)
from .tame import (
    Interval,
    ProjectionJudge,
    Rect,
    RectUnion,
    RobustDisconnectionCertificate,
    SheafVerdict,
    StripComponents,
    TameCounterexample,
    components,
    critical_values,
    disjoint,
    fiber,
    interval,
    preimage_components_near,
    rect_union,
    regions_equal,
    robustly_disconnected,
    subtract_closed_band,
    sheaf_verdict,
    two_patch_counterexample,
    union_from_payload,
)
from .epshelly import (
    Ball,
    canonical_point,
    project_box,
    project_simplex,
    DepthReport,
    EpsGlueResult,
    EpsilonInstance,
    FeasibilityResult,
    TargetSet,
    discrete_feasible,
    discrete_obstruction_depth,
    eps_glue,
    epsilon_instance,
    feasibility,
    min_enclosing_ball,
    obstruction_depth,
    target_set,
)

__version__ = "0.1.0"
