"""Detect and remove chaotic activities from business-process event logs."""

from .eventlog import (
    AugmentedView,
    EventLog,
    LogError,
    LogParseError,
    augment,
    count_subsequence,
    export_xes,
    format_variant_lines,
    ingest_csv,
    ingest_xes,
    parse_variant_lines,
)
from .entropy import (
    DistributionVector,
    EntropyReport,
    FollowStats,
    UndefinedDistributionError,
    activity_entropy,
    adaptive_alpha,
    build_follow_stats,
    categorical_entropy,
    dfr_vector,
    dpr_vector,
    entropy_report,
    log_entropy,
    smoothed_log_entropy,
)
from .filters import (
    ChaoticActivityFilter,
    FilterMethod,
    FilterSchedule,
    StaleScheduleError,
    full_ranking,
    materialize,
    run_filter,
    standard_methods,
)
from .processtree import ProcessTree, TreeError, format_tree, parse_tree
from .discovery import (
    Dfg,
    DiscoveryConfig,
    ProcessTreeDiscoverer,
    build_dfg,
    discover,
    flower,
)
from .synthesis import (
    ChaosInsertionSpec,
    ChaosReport,
    chaos_grid,
    inject_chaos,
    random_tree,
    score_filter_against_ground_truth,
    simulate,
)
from .evaluation import (
    QualityRecord,
    ReplayResult,
    TauResult,
    explained_activity_curve,
    f_score,
    flower_baseline,
    kendall_tau_b,
    replay_nondeterminism,
    winning_number,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedView",
    "ChaosInsertionSpec",
    "ChaosReport",
    "ChaoticActivityFilter",
    "Dfg",
    "DiscoveryConfig",
    "DistributionVector",
    "EntropyReport",
    "EventLog",
    "FilterMethod",
    "FilterSchedule",
    "FollowStats",
    "LogError",
    "LogParseError",
    "ProcessTree",
    "ProcessTreeDiscoverer",
    "QualityRecord",
    "ReplayResult",
    "StaleScheduleError",
    "TauResult",
    "TreeError",
    "UndefinedDistributionError",
    "activity_entropy",
    "adaptive_alpha",
    "augment",
    "build_dfg",
    "build_follow_stats",
    "categorical_entropy",
    "chaos_grid",
    "count_subsequence",
    "dfr_vector",
    "discover",
    "dpr_vector",
    "entropy_report",
    "explained_activity_curve",
    "export_xes",
    "f_score",
    "flower",
    "flower_baseline",
    "format_tree",
    "format_variant_lines",
    "full_ranking",
    "ingest_csv",
    "ingest_xes",
    "inject_chaos",
    "kendall_tau_b",
    "log_entropy",
    "materialize",
    "parse_tree",
    "parse_variant_lines",
    "random_tree",
    "replay_nondeterminism",
    "run_filter",
    "score_filter_against_ground_truth",
    "simulate",
    "smoothed_log_entropy",
    "standard_methods",
    "winning_number",
]
