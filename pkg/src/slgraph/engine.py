"""Resolving node opinions over a finalized assessment graph.

Every node's opinion from the overall assessor's point of view is the
cumulative fusion of whatever terms exist for it, assembled in a fixed
order:

1. the configured referral trust (assessment nodes; a live referral record
   in the snapshot overrides the configured value),
2. the declared standing expert opinion from the graph's ``defaults`` map,
3. the dependency term: the joint opinion of the resolved parents deduced
   through the node's conditional table,
4. one term per live assessment, the assessor's statement discounted by the
   assessor's own resolved opinion (the overall assessor trusts itself
   fully).

A node with no terms at all falls back to the configured missing-assessment
default.  Resolution is a pure function of (graph, snapshot, config), so
identical inputs give bit-identical traces; one evaluation memoizes each
node once and is equivalent to the recursive definition.

Streams are replayed with last-value-hold per trust edge: a record stays
live until it is ``stale_after`` time units old, after which a functional
assessment is replaced by the missing-assessment default and a referral
override expires back to the configured trust.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .graph import (
    OVERALL_NAME,
    SINK_NAME,
    AssessmentGraph,
    EdgeKind,
    GraphError,
    NodeKind,
)
from .opinions import FULL_TRUST, Opinion, OpinionError, opinion_from_dict, opinion_to_dict
from .operators import cumulative_fuse, deduce, multiply_joint, trust_discount


class StreamError(ValueError):
    """A stream record that cannot be applied; carries its line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class InferenceConfig:
    """Knobs for one inference run.

    ``missing_default`` (overridable per node) stands in where no opinion
    source exists at all; ``stale_after`` is the age at which held stream
    records expire; ``prior_weight`` parameterizes evidence-notation
    conversions for opinions given in evidence form.
    """

    missing_default: Opinion = Opinion.vacuous()
    node_defaults: Mapping[str, Opinion] = field(default_factory=dict)
    stale_after: float = 10.0
    prior_weight: float = 2.0

    def __post_init__(self) -> None:
        if not self.stale_after > 0:
            raise ValueError(f"stale_after must be positive, got {self.stale_after!r}")

    def default_for(self, node: str) -> Opinion:
        return self.node_defaults.get(node, self.missing_default)


@dataclass(frozen=True)
class AssessmentSnapshot:
    """Live trust opinions at one instant, keyed by (source, target) edge."""

    timestamp: float
    opinions: Mapping[tuple[str, str], Opinion] = field(default_factory=dict)


@dataclass
class ProvenanceRecord:
    """The terms that were fused into one node's resolved opinion."""

    referral: Opinion | None = None
    declared: Opinion | None = None
    dependency: Opinion | None = None
    assessors: dict[str, Opinion] = field(default_factory=dict)
    fallback: Opinion | None = None

    def to_dict(self) -> dict:
        obj: dict = {}
        if self.referral is not None:
            obj["referral"] = opinion_to_dict(self.referral)
        if self.declared is not None:
            obj["declared"] = opinion_to_dict(self.declared)
        if self.dependency is not None:
            obj["dependency"] = opinion_to_dict(self.dependency)
        if self.assessors:
            obj["assessors"] = {
                name: opinion_to_dict(self.assessors[name])
                for name in sorted(self.assessors)
            }
        if self.fallback is not None:
            obj["fallback"] = opinion_to_dict(self.fallback)
        return obj


@dataclass
class InferenceTrace:
    """Resolved opinions for every node at one timestamp."""

    timestamp: float
    resolved: dict[str, Opinion]
    provenance: dict[str, ProvenanceRecord]

    @property
    def overall(self) -> Opinion:
        return self.resolved[SINK_NAME]

    def to_dict(self, include_provenance: bool = False) -> dict:
        obj = {
            "t": self.timestamp,
            "nodes": {
                name: opinion_to_dict(self.resolved[name]) for name in sorted(self.resolved)
            },
            "overall": opinion_to_dict(self.overall),
        }
        if include_provenance:
            obj["provenance"] = {
                name: self.provenance[name].to_dict() for name in sorted(self.provenance)
            }
        return obj

    def to_json_line(self, include_provenance: bool = False) -> str:
        return json.dumps(self.to_dict(include_provenance), separators=(",", ":"))


def resolve_node(
    graph: AssessmentGraph,
    snapshot: AssessmentSnapshot,
    config: InferenceConfig,
    node: str,
    memo: dict[str, Opinion] | None = None,
) -> Opinion:
    """Resolved opinion about one node; memo may be shared across calls."""
    if memo is None:
        memo = {}
    return _resolve(graph, snapshot, config, node, memo, {}, set())


def _resolve(
    graph: AssessmentGraph,
    snapshot: AssessmentSnapshot,
    config: InferenceConfig,
    node: str,
    memo: dict[str, Opinion],
    provenance: dict[str, ProvenanceRecord],
    active: set[str],
) -> Opinion:
    if node in memo:
        return memo[node]
    if node not in graph.nodes:
        raise GraphError(f"unknown node {node!r}")
    if node in active:
        raise GraphError(f"resolution cycle through {node!r}")
    active.add(node)
    record = ProvenanceRecord()
    if graph.nodes[node] is NodeKind.OVERALL:
        # The overall assessor anchors the trust network by trusting itself.
        result = FULL_TRUST
    else:
        terms: list[Opinion] = []
        configured = graph.referral_trust.get(node)
        if configured is not None:
            live = snapshot.opinions.get((OVERALL_NAME, node))
            if live is not None and graph.has_referral_edge(node):
                configured = live
            record.referral = configured
            terms.append(configured)
        declared = graph.defaults.get(node)
        if declared is not None:
            record.declared = declared
            terms.append(declared)
        table = graph.tables.get(node)
        if graph.dependency_parents(node):
            if table is None:
                raise GraphError(f"node {node!r} has parents but no conditional table")
            joint = multiply_joint(
                [
                    _resolve(graph, snapshot, config, parent, memo, provenance, active)
                    for parent in table.parents
                ]
            )
            dependency = deduce(joint, table)
            record.dependency = dependency
            terms.append(dependency)
        for assessor in graph.assessors_of(node):
            if assessor == OVERALL_NAME and graph.has_referral_edge(node):
                # The (A, node) stream key means a referral update for this
                # node; A cannot double as a plain assessor of it.
                continue
            statement = snapshot.opinions.get((assessor, node))
            if statement is None:
                continue
            trust = _resolve(graph, snapshot, config, assessor, memo, provenance, active)
            discounted = trust_discount(trust, statement)
            record.assessors[assessor] = discounted
            terms.append(discounted)
        if terms:
            result = terms[0]
            for term in terms[1:]:
                result = cumulative_fuse(result, term)
        else:
            result = config.default_for(node)
            record.fallback = result
    active.discard(node)
    memo[node] = result
    provenance[node] = record
    return result


def evaluate_snapshot(
    graph: AssessmentGraph, snapshot: AssessmentSnapshot, config: InferenceConfig
) -> InferenceTrace:
    """Resolve every node of a finalized graph for one snapshot."""
    if not graph.finalized:
        raise GraphError("graph must be finalized before inference")
    valid_keys = graph.trust_edge_keys()
    for key in snapshot.opinions:
        if key not in valid_keys:
            raise StreamError(f"no trust edge {key[0]!r} -> {key[1]!r} in the graph")
    memo: dict[str, Opinion] = {}
    provenance: dict[str, ProvenanceRecord] = {}
    active: set[str] = set()
    for node in graph.resolution_order():
        _resolve(graph, snapshot, config, node, memo, provenance, active)
    return InferenceTrace(snapshot.timestamp, memo, provenance)


# ---------------------------------------------------------------------------
# Stream replay.

_RECORD_KEYS = frozenset({"t", "source", "target"})


@dataclass(frozen=True)
class StreamRecord:
    """One timestamped trust statement on a (source, target) edge."""

    timestamp: float
    source: str
    target: str
    opinion: Opinion
    line: int | None = None

    def to_dict(self) -> dict:
        obj = {"t": self.timestamp, "source": self.source, "target": self.target}
        obj.update(opinion_to_dict(self.opinion))
        return obj

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def parse_stream_record(obj: object, line: int | None = None) -> StreamRecord:
    """Parse one flat stream record: t, source, target plus an opinion key set."""
    if not isinstance(obj, dict):
        raise StreamError("stream record must be a JSON object", line)
    missing = _RECORD_KEYS - set(obj)
    if missing:
        raise StreamError(f"stream record is missing keys {sorted(missing)}", line)
    timestamp = obj["t"]
    if isinstance(timestamp, bool) or not isinstance(timestamp, (int, float)):
        raise StreamError(f"record key 't' must be a number, got {timestamp!r}", line)
    source, target = obj["source"], obj["target"]
    if not isinstance(source, str) or not isinstance(target, str):
        raise StreamError("record keys 'source' and 'target' must be strings", line)
    rest = {k: v for k, v in obj.items() if k not in _RECORD_KEYS}
    try:
        opinion = opinion_from_dict(rest)
    except OpinionError as exc:
        raise StreamError(str(exc), line) from None
    return StreamRecord(float(timestamp), source, target, opinion, line)


class StreamState:
    """Last-value-hold over stream records, with staleness expiry.

    Feed records in timestamp order through :meth:`ingest`, then ask for the
    effective snapshot at any time at or after the last ingested record.
    """

    def __init__(self, graph: AssessmentGraph, config: InferenceConfig):
        self._config = config
        self._held: dict[tuple[str, str], tuple[float, Opinion]] = {}
        self._valid_keys = graph.trust_edge_keys()
        self._referral_keys = {
            (e.source, e.target)
            for e in graph.edges
            if e.kind is EdgeKind.REFERRAL_TRUST
        }
        self._last_time: float | None = None

    def ingest(self, record: StreamRecord) -> None:
        key = (record.source, record.target)
        if key not in self._valid_keys:
            raise StreamError(
                f"no trust edge {record.source!r} -> {record.target!r} in the graph",
                record.line,
            )
        if self._last_time is not None and record.timestamp < self._last_time:
            raise StreamError(
                f"stream is not sorted: t={record.timestamp!r} after t={self._last_time!r}",
                record.line,
            )
        self._last_time = record.timestamp
        self._held[key] = (record.timestamp, record.opinion)

    def snapshot_at(self, timestamp: float) -> AssessmentSnapshot:
        opinions: dict[tuple[str, str], Opinion] = {}
        for key, (held_at, opinion) in self._held.items():
            if timestamp - held_at > self._config.stale_after:
                if key in self._referral_keys:
                    continue  # expired override, configured trust resumes
                opinion = self._config.default_for(key[1])
            opinions[key] = opinion
        return AssessmentSnapshot(timestamp, opinions)


def evaluate_stream(
    graph: AssessmentGraph,
    records: Iterable[StreamRecord],
    config: InferenceConfig | None = None,
) -> Iterator[InferenceTrace]:
    """Replay time-ordered records, yielding one trace per distinct timestamp."""
    if config is None:
        config = InferenceConfig()
    if not graph.finalized:
        raise GraphError("graph must be finalized before inference")
    state = StreamState(graph, config)
    pending: float | None = None
    for record in records:
        if pending is not None and record.timestamp < pending:
            raise StreamError(
                f"stream is not sorted: t={record.timestamp!r} after t={pending!r}",
                record.line,
            )
        if pending is not None and record.timestamp > pending:
            yield evaluate_snapshot(graph, state.snapshot_at(pending), config)
        state.ingest(record)
        pending = record.timestamp
    if pending is not None:
        yield evaluate_snapshot(graph, state.snapshot_at(pending), config)
