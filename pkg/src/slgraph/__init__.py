"""Subjective-logic assessment graphs.

Infers an overall functionality opinion for a component-based system from
per-component assessment opinions, handling trust weighting, conflicting
concurrent assessments and dependency propagation.
"""

from .opinions import (
    DEFAULT_BASE_RATE,
    DEFAULT_PRIOR_WEIGHT,
    FULL_TRUST,
    DogmaticOpinionError,
    Evidence,
    JointOpinion,
    Opinion,
    OpinionError,
    from_evidence,
    opinion_from_dict,
    opinion_to_dict,
    to_evidence,
)
from .operators import (
    ConditionalTable,
    UnfusionError,
    and_shaped_table,
    cumulative_fuse,
    cumulative_unfuse,
    decay,
    deduce,
    degree_of_conflict,
    fuse_all,
    multiply_joint,
    state_index,
    trust_discount,
)
from .graph import (
    OVERALL_NAME,
    SINK_NAME,
    AssessmentGraph,
    Edge,
    EdgeKind,
    GraphError,
    GraphFormatError,
    GraphValidationError,
    NodeKind,
    Violation,
    load_graph,
    save_graph,
)
from .engine import (
    AssessmentSnapshot,
    InferenceConfig,
    InferenceTrace,
    ProvenanceRecord,
    StreamError,
    StreamRecord,
    StreamState,
    evaluate_snapshot,
    evaluate_stream,
    parse_stream_record,
    resolve_node,
)
from .assessors import (
    TrajectoryClassification,
    WindowedConflictAssessor,
    assess_evidence_record,
    assess_planner_record,
    conflict_to_opinion,
    evidence_assess,
    planner_assess,
)

__all__ = [
    "DEFAULT_BASE_RATE",
    "DEFAULT_PRIOR_WEIGHT",
    "FULL_TRUST",
    "OVERALL_NAME",
    "SINK_NAME",
    "AssessmentGraph",
    "AssessmentSnapshot",
    "ConditionalTable",
    "DogmaticOpinionError",
    "Edge",
    "EdgeKind",
    "Evidence",
    "GraphError",
    "GraphFormatError",
    "GraphValidationError",
    "InferenceConfig",
    "InferenceTrace",
    "JointOpinion",
    "NodeKind",
    "Opinion",
    "OpinionError",
    "ProvenanceRecord",
    "StreamError",
    "StreamRecord",
    "StreamState",
    "TrajectoryClassification",
    "UnfusionError",
    "Violation",
    "WindowedConflictAssessor",
    "and_shaped_table",
    "assess_evidence_record",
    "assess_planner_record",
    "conflict_to_opinion",
    "cumulative_fuse",
    "cumulative_unfuse",
    "decay",
    "deduce",
    "degree_of_conflict",
    "evaluate_snapshot",
    "evaluate_stream",
    "evidence_assess",
    "from_evidence",
    "fuse_all",
    "load_graph",
    "multiply_joint",
    "opinion_from_dict",
    "opinion_to_dict",
    "parse_stream_record",
    "planner_assess",
    "resolve_node",
    "save_graph",
    "state_index",
    "to_evidence",
    "trust_discount",
]

__version__ = "0.1.0"
