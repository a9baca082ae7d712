"""Market share ranking: exact model, baselines, approximation scheme,
hardness reduction, and search-cost calibration utilities."""

from ._kernels import BACKEND
from .baselines import (
    OracleResult,
    brute_force_opt,
    brute_force_sorted_within_class,
    swc_assignment_count,
    w_ordering,
)
from .calibration import (
    EULER_GAMMA,
    ReservationSequence,
    WeightDistribution,
    reservation_price,
    reservation_sequence,
    welfare,
)
from .errors import (
    BadSpec,
    BracketExhausted,
    BudgetExceeded,
    CostsNotIncreasing,
    EmptyInstance,
    GuessInfeasible,
    IoError,
    MalformedThreePartition,
    MissingHeadProduct,
    NonPositiveCost,
    NonPositiveWeight,
    NotAValidPartition,
    NotBoundedRatio,
    PricesNotDecreasing,
    ProportionsNotNormalized,
    TrivialCaseNotHandled,
)
from .hardness import (
    HardnessDecision,
    HardnessInstance,
    ThreePartitionInstance,
    build_hardness_instance,
    canonical_yes_assignment,
    decide_three_partition,
)
from .model import (
    FLOAT,
    RATIONAL,
    Assignment,
    Evaluation,
    Instance,
    Segment,
    SolveReport,
    dump_instance,
    evaluate,
    instance_from_dict,
    instance_to_dict,
    instance_violations,
    load_instance,
    prefix_weights,
    stopping_point,
    to_float,
    to_rational,
    validate_instance,
)
from .ptas import (
    BlockStats,
    CandidatePartition,
    GoodPartitionReport,
    GuessStream,
    OraclePipeline,
    StatGuess,
    assign_heavy,
    assign_light,
    block_count,
    block_decompose,
    classify_stoppers,
    enumerate_guesses,
    grid_global_cap,
    grid_weight_unit,
    guess_layout,
    is_good_partition,
    oracle_pipeline,
    partition_to_assignment,
    ptas_solve,
    stats_of,
)
from .randgen import (
    RNG_ALGORITHM,
    RandomSpec,
    random_bounded_ratio_instance,
    random_instance,
    spec_with_seed,
)
from .reduction import (
    BoundedRatioTransform,
    bounded_ratio_transform,
    quasi_ptas,
    trivial_case,
)
from .weight_classes import (
    ClassStructure,
    build_classes,
    sorted_within_class,
    weight_floor,
)

__version__ = "0.1.0"
