"""Multi-criteria guided sampling for diverse keyframe in-betweening motion batches."""

from .criteria import (
    CentroidClassifier,
    ClassifierOutput,
    CriteriaVector,
    classify,
    diversity_components,
    evaluate_criteria,
    load_classifier,
    save_classifier,
    smoothness,
)
from .engine import (
    RunConfig,
    RunResult,
    TheoremReport,
    brute_force_pareto,
    run,
    unguided_baseline,
    verify_theorem_1,
    verify_theorem_2,
)
from .errors import (
    DegenerateInputError,
    DimensionError,
    DivtweenError,
    DomainGenerationError,
    EmptyPopulationError,
    EngineError,
    InvalidCriteriaError,
    IoError,
    MissingLabelError,
    NumericalError,
    ParseError,
    PropertyViolation,
    RangeError,
    ValidationError,
)
from .generators import (
    InterpNoiseGenerator,
    PrimitiveMixtureGenerator,
    SeededStream,
    SyntheticDomain,
    domain_classifier,
    heldout_classifier,
    load_domain,
    make_synthetic_domain,
    save_domain,
)
from .metrics import (
    GaussianSummary,
    acc,
    ade,
    apd,
    class_coverage,
    extract_features,
    fid,
    metrics_report,
    summarize_features,
)
from .motion import (
    BoundaryCondition,
    LengthPolicy,
    MotionSequence,
    boundary_similarity,
    estimate_transition_length,
    load_motion,
    pad_to_max,
    save_motion,
    sequences_equal,
)
from .pareto import (
    Individual,
    Population,
    crowding_distance,
    dominates,
    elite_select,
    fast_nondominated_sort,
)

__version__ = "0.1.0"
