"""Assessment graphs: components, monitors and the artificial anchor nodes.

The graph has two interleaved parts.  Dependency edges describe how data (and
therefore failure) flows between functional components, data-exchange nodes
and monitors.  Trust edges carry the assessment structure: a functional-trust
edge says its source emits functionality opinions about its target, a
referral-trust edge says how much the overall-assessment node ``A`` believes
a monitor's statements.

Two reserved nodes complete a graph at :meth:`AssessmentGraph.finalize`: the
overall assessor ``A`` and the sink ``Z``, which depends on every functional
node that feeds nothing else, so that the opinion resolved for ``Z`` states
the functionality of the whole system.

Graphs are mutable while being built and frozen after ``finalize``.
:meth:`AssessmentGraph.validate` reports every structural violation as data
(deterministically ordered) instead of raising, so that files written by
hand or by other tools can be checked and the findings surfaced verbatim.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .opinions import Opinion, OpinionError, opinion_from_dict, opinion_to_dict
from .operators import ConditionalTable

OVERALL_NAME = "A"
SINK_NAME = "Z"


class NodeKind(Enum):
    FUNCTIONAL = "functional"
    ASSESSMENT = "assessment"
    OVERALL = "overall_assessment"
    SINK = "sink"
    DATA = "data_exchange"


class EdgeKind(Enum):
    DEPENDENCY = "dependency"
    FUNCTIONAL_TRUST = "functional_trust"
    REFERRAL_TRUST = "referral_trust"


#: Node kinds a dependency edge may point at (never the overall assessor).
DEPENDENCY_TARGETS = frozenset(
    {NodeKind.FUNCTIONAL, NodeKind.DATA, NodeKind.SINK, NodeKind.ASSESSMENT}
)
TRUST_SOURCES = frozenset({NodeKind.ASSESSMENT, NodeKind.OVERALL})
TRUST_TARGETS = frozenset({NodeKind.FUNCTIONAL, NodeKind.DATA, NodeKind.ASSESSMENT})

_RESERVED_KINDS = {OVERALL_NAME: NodeKind.OVERALL, SINK_NAME: NodeKind.SINK}


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    kind: EdgeKind


@dataclass(frozen=True)
class Violation:
    """One structural defect, identified by a stable code and its subject."""

    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.subject}: {self.message}"


class GraphError(ValueError):
    """A mutation or query that the graph cannot honor."""


class GraphFormatError(ValueError):
    """A graph document that cannot be interpreted at all."""


class GraphValidationError(GraphError):
    """Finalize failed; carries the validator findings."""

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


class AssessmentGraph:
    def __init__(self) -> None:
        self.nodes: dict[str, NodeKind] = {}
        self.edges: list[Edge] = []
        self.tables: dict[str, ConditionalTable] = {}
        self.referral_trust: dict[str, Opinion] = {}
        self.defaults: dict[str, Opinion] = {}
        self.finalized = False

    # -- construction -------------------------------------------------------

    def _mutable(self) -> None:
        if self.finalized:
            raise GraphError("graph is finalized and immutable")

    def _insert_node(self, name: str, kind: NodeKind) -> None:
        if not name or not isinstance(name, str):
            raise GraphError(f"node name must be a non-empty string, got {name!r}")
        if name in self.nodes:
            raise GraphError(f"duplicate node name {name!r}")
        self.nodes[name] = kind

    def add_node(self, name: str, kind: NodeKind) -> None:
        self._mutable()
        if name in _RESERVED_KINDS:
            raise GraphError(f"node name {name!r} is reserved for the artificial nodes")
        self._insert_node(name, kind)

    def _require_node(self, name: str) -> NodeKind:
        try:
            return self.nodes[name]
        except KeyError:
            raise GraphError(f"unknown node {name!r}") from None

    def _has_edge(self, source: str, target: str, kind: EdgeKind) -> bool:
        return any(
            e.source == source and e.target == target and e.kind == kind
            for e in self.edges
        )

    def add_dependency(self, source: str, target: str) -> None:
        """Add a data-flow edge; the target then depends on the source."""
        self._mutable()
        source_kind = self._require_node(source)
        target_kind = self._require_node(target)
        if target_kind not in DEPENDENCY_TARGETS:
            raise GraphError(f"dependency edge may not target {target_kind.value} node {target!r}")
        if source_kind is NodeKind.ASSESSMENT and target_kind is NodeKind.FUNCTIONAL:
            raise GraphError(
                f"monitor {source!r} cannot feed functional node {target!r}: "
                "assessments do not contribute to system function"
            )
        if self._has_edge(source, target, EdgeKind.DEPENDENCY):
            raise GraphError(f"duplicate dependency edge {source!r} -> {target!r}")
        if source == target or self._reaches(target, source, _DEPENDENCY_ONLY):
            raise GraphError(f"dependency edge {source!r} -> {target!r} would close a cycle")
        self.edges.append(Edge(source, target, EdgeKind.DEPENDENCY))

    def add_functional_trust(self, source: str, target: str) -> None:
        """Declare that ``source`` emits functionality opinions about ``target``."""
        self._mutable()
        if source == OVERALL_NAME:
            self._ensure_artificial(OVERALL_NAME)
        source_kind = self._require_node(source)
        target_kind = self._require_node(target)
        if source_kind not in TRUST_SOURCES:
            raise GraphError(f"functional trust must come from an assessor, not {source!r}")
        if target_kind not in TRUST_TARGETS:
            raise GraphError(f"functional trust may not target {target_kind.value} node {target!r}")
        if self._has_edge(source, target, EdgeKind.FUNCTIONAL_TRUST):
            raise GraphError(f"duplicate functional-trust edge {source!r} -> {target!r}")
        self.edges.append(Edge(source, target, EdgeKind.FUNCTIONAL_TRUST))

    def add_referral_trust(self, assessor: str, trust: Opinion) -> None:
        """Configure how much the overall assessor believes a monitor."""
        self._mutable()
        self._ensure_artificial(OVERALL_NAME)
        kind = self._require_node(assessor)
        if kind is not NodeKind.ASSESSMENT:
            raise GraphError(f"referral trust may only target assessment nodes, not {assessor!r}")
        if not self._has_edge(OVERALL_NAME, assessor, EdgeKind.REFERRAL_TRUST):
            self.edges.append(Edge(OVERALL_NAME, assessor, EdgeKind.REFERRAL_TRUST))
        self.referral_trust[assessor] = trust

    def set_conditional_table(self, node: str, table: ConditionalTable) -> None:
        """Attach the conditionals used to deduce ``node`` from its parents.

        Accepts the sink name before it exists so complete graphs can be
        described up front; consistency with the actual parents is checked
        by :meth:`validate`.
        """
        self._mutable()
        if node != SINK_NAME:
            self._require_node(node)
        self.tables[node] = table

    def set_default_opinion(self, node: str, opinion: Opinion) -> None:
        """Declare a standing expert opinion of the overall assessor about a node."""
        self._mutable()
        self._require_node(node)
        self._ensure_artificial(OVERALL_NAME)
        self.defaults[node] = opinion

    def insert_data_node(self, sender: str, data_name: str) -> None:
        """Splice a data-exchange node between ``sender`` and all its receivers.

        Former direct edges from the sender move to the new node, and tables
        of the receivers are re-pointed so their conditionals now answer to
        the exchanged data instead of the sender.
        """
        self._mutable()
        kind = self._require_node(sender)
        if kind is not NodeKind.FUNCTIONAL:
            raise GraphError(f"data nodes can only be inserted after functional nodes, not {sender!r}")
        children = [
            e for e in self.edges if e.source == sender and e.kind is EdgeKind.DEPENDENCY
        ]
        if not children:
            raise GraphError(f"node {sender!r} has no dependency children to intercept")
        if data_name in _RESERVED_KINDS:
            raise GraphError(f"node name {data_name!r} is reserved for the artificial nodes")
        self._insert_node(data_name, NodeKind.DATA)
        for edge in children:
            self.edges.remove(edge)
            self.edges.append(Edge(data_name, edge.target, EdgeKind.DEPENDENCY))
            table = self.tables.get(edge.target)
            if table is not None and sender in table.parents:
                parents = tuple(data_name if p == sender else p for p in table.parents)
                self.tables[edge.target] = ConditionalTable(parents, table.rows)
        self.edges.append(Edge(sender, data_name, EdgeKind.DEPENDENCY))

    def _ensure_artificial(self, name: str) -> None:
        if name not in self.nodes:
            self._insert_node(name, _RESERVED_KINDS[name])

    def finalize(self, default_referral_trust: Opinion | None = None) -> "AssessmentGraph":
        """Complete and freeze the graph.

        Inserts the artificial nodes, connects every functional node without
        dependents to the sink, gives unconfigured monitors dogmatic full
        referral trust (so their statements pass undiscounted), then
        validates.  Raises :class:`GraphValidationError` on any violation.
        """
        self._mutable()
        if default_referral_trust is None:
            default_referral_trust = Opinion(1.0, 0.0, 0.0)
        self._ensure_artificial(OVERALL_NAME)
        self._ensure_artificial(SINK_NAME)
        has_dependents = {
            e.source for e in self.edges if e.kind is EdgeKind.DEPENDENCY
        }
        for name in sorted(self.nodes):
            if self.nodes[name] is NodeKind.FUNCTIONAL and name not in has_dependents:
                self.edges.append(Edge(name, SINK_NAME, EdgeKind.DEPENDENCY))
        for name in sorted(self.nodes):
            if self.nodes[name] is NodeKind.ASSESSMENT and name not in self.referral_trust:
                self.add_referral_trust(name, default_referral_trust)
        violations = self.validate()
        if violations:
            raise GraphValidationError(violations)
        self.finalized = True
        return self

    # -- queries -------------------------------------------------------------

    def dependency_parents(self, name: str) -> list[str]:
        return [e.source for e in self.edges if e.target == name and e.kind is EdgeKind.DEPENDENCY]

    def dependency_children(self, name: str) -> list[str]:
        return [e.target for e in self.edges if e.source == name and e.kind is EdgeKind.DEPENDENCY]

    def assessors_of(self, name: str) -> list[str]:
        """Sources of functional-trust edges into ``name``, sorted."""
        return sorted(
            e.source
            for e in self.edges
            if e.target == name and e.kind is EdgeKind.FUNCTIONAL_TRUST
        )

    def has_referral_edge(self, assessor: str) -> bool:
        return self._has_edge(OVERALL_NAME, assessor, EdgeKind.REFERRAL_TRUST)

    def trust_edge_keys(self) -> set[tuple[str, str]]:
        """(source, target) pairs of all trust edges, the valid stream keys."""
        return {
            (e.source, e.target)
            for e in self.edges
            if e.kind in (EdgeKind.FUNCTIONAL_TRUST, EdgeKind.REFERRAL_TRUST)
        }

    def _reaches(self, start: str, goal: str, kinds: frozenset[EdgeKind]) -> bool:
        stack = [start]
        seen = set()
        while stack:
            node = stack.pop()
            if node == goal:
                return True
            if node in seen:
                continue
            seen.add(node)
            stack.extend(
                e.target for e in self.edges if e.source == node and e.kind in kinds
            )
        return False

    def topological_order(self) -> list[str]:
        """All nodes, every one after its dependency parents, ties lexicographic."""
        return self._order(_DEPENDENCY_ONLY)

    def resolution_order(self) -> list[str]:
        """Order in which node opinions can be resolved.

        Extends the dependency order with functional-trust edges, since a
        node's opinion also folds in the resolved opinions of its assessors.
        """
        return self._order(_RESOLUTION_KINDS)

    def _adjacency(self, kinds: frozenset[EdgeKind]) -> dict[str, list[str]]:
        pairs = {
            (e.source, e.target)
            for e in self.edges
            if e.kind in kinds and e.source in self.nodes and e.target in self.nodes
        }
        children: dict[str, list[str]] = {name: [] for name in self.nodes}
        for source, target in sorted(pairs):
            children[source].append(target)
        return children

    def _order(self, kinds: frozenset[EdgeKind]) -> list[str]:
        children = self._adjacency(kinds)
        indegree = {name: 0 for name in self.nodes}
        for targets in children.values():
            for target in targets:
                indegree[target] += 1
        ready = [name for name, deg in indegree.items() if deg == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            node = heapq.heappop(ready)
            order.append(node)
            for child in children[node]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    heapq.heappush(ready, child)
        if len(order) != len(self.nodes):
            stuck = sorted(set(self.nodes) - set(order))
            raise GraphError(f"cycle prevents ordering of nodes {stuck}")
        return order

    def _find_cycle(self, kinds: frozenset[EdgeKind]) -> list[str] | None:
        children = self._adjacency(kinds)
        state: dict[str, int] = {}  # 0 unseen, 1 on path, 2 done
        path: list[str] = []
        for start in sorted(self.nodes):
            if state.get(start, 0):
                continue
            # iterative DFS; (node, next-child-index) frames
            stack = [(start, 0)]
            state[start] = 1
            path.append(start)
            while stack:
                node, index = stack.pop()
                if index < len(children[node]):
                    stack.append((node, index + 1))
                    child = children[node][index]
                    mark = state.get(child, 0)
                    if mark == 1:
                        return path[path.index(child):] + [child]
                    if mark == 0:
                        state[child] = 1
                        path.append(child)
                        stack.append((child, 0))
                else:
                    state[node] = 2
                    path.pop()
        return None

    # -- validation ----------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Report every structural violation, sorted by subject then code."""
        found: list[Violation] = []

        def flag(code: str, subject: str, message: str) -> None:
            found.append(Violation(code, subject, message))

        for name, kind in self.nodes.items():
            reserved = _RESERVED_KINDS.get(name)
            if reserved is not None and kind is not reserved:
                flag("reserved-name", name, f"must be a {reserved.value} node, is {kind.value}")
            if kind in (NodeKind.OVERALL, NodeKind.SINK) and _RESERVED_KINDS.get(name) is not kind:
                flag("artificial-node", name, f"{kind.value} node must be named "
                     f"{OVERALL_NAME!r} or {SINK_NAME!r}")
        for name, expected in _RESERVED_KINDS.items():
            if name not in self.nodes:
                flag("missing-artificial", name, f"graph has no {expected.value} node")

        seen_edges: set[tuple[str, str, EdgeKind]] = set()
        for e in self.edges:
            subject = f"{e.source}->{e.target}"
            key = (e.source, e.target, e.kind)
            if key in seen_edges:
                flag("duplicate-edge", subject, f"{e.kind.value} edge occurs more than once")
            seen_edges.add(key)
            source_kind = self.nodes.get(e.source)
            target_kind = self.nodes.get(e.target)
            if source_kind is None:
                flag("unknown-node", subject, f"edge source {e.source!r} is not a node")
            if target_kind is None:
                flag("unknown-node", subject, f"edge target {e.target!r} is not a node")
            if source_kind is None or target_kind is None:
                continue
            if e.kind is EdgeKind.DEPENDENCY:
                if target_kind not in DEPENDENCY_TARGETS:
                    flag("dependency-target", subject,
                         f"dependency may not target {target_kind.value} node")
                if source_kind is NodeKind.ASSESSMENT and target_kind is NodeKind.FUNCTIONAL:
                    flag("am-dependency", subject,
                         "assessment node feeds a functional node; monitors do not "
                         "contribute to system function")
            elif e.kind is EdgeKind.FUNCTIONAL_TRUST:
                if source_kind not in TRUST_SOURCES:
                    flag("trust-source", subject,
                         f"functional trust must come from an assessor, not a "
                         f"{source_kind.value} node")
                if target_kind not in TRUST_TARGETS:
                    flag("trust-target", subject,
                         f"functional trust may not target a {target_kind.value} node")
            elif e.kind is EdgeKind.REFERRAL_TRUST:
                if e.source != OVERALL_NAME:
                    flag("referral-source", subject,
                         f"referral trust must come from {OVERALL_NAME!r}")
                if target_kind is not NodeKind.ASSESSMENT:
                    flag("referral-target", subject,
                         f"referral trust may not target a {target_kind.value} node")

        cycle = self._find_cycle(_DEPENDENCY_ONLY)
        if cycle:
            flag("cycle", " -> ".join(cycle), "dependency cycle")
        else:
            resolution_cycle = self._find_cycle(_RESOLUTION_KINDS)
            if resolution_cycle:
                flag("resolution-cycle", " -> ".join(resolution_cycle),
                     "dependencies and trust edges close a loop; opinions cannot "
                     "be resolved")

        for name in self.nodes:
            parents = self.dependency_parents(name)
            if not parents:
                continue
            table = self.tables.get(name)
            if table is None:
                flag("missing-table", name,
                     f"node has {len(parents)} parent(s) but no conditional table")
                continue
            if set(table.parents) != set(parents):
                flag("table-parents", name,
                     f"table conditions on {sorted(table.parents)} but the parents "
                     f"are {sorted(parents)}")
            if len(table.rows) != 1 << len(parents):
                flag("table-size", name,
                     f"table has {len(table.rows)} rows, {len(parents)} parent(s) "
                     f"require {1 << len(parents)}")
        for name in self.tables:
            if name not in self.nodes:
                flag("unknown-node", name, "conditional table for a node that does not exist")

        for name, kind in self.nodes.items():
            if kind is NodeKind.ASSESSMENT and name not in self.referral_trust:
                flag("missing-referral-trust", name,
                     "assessment node has no referral-trust opinion")
        for name in self.referral_trust:
            # kind misuse is flagged on the referral edge itself
            if name not in self.nodes:
                flag("unknown-node", name, "referral trust for a node that does not exist")
        for name in self.defaults:
            if name not in self.nodes:
                flag("unknown-node", name, "default opinion for a node that does not exist")

        if SINK_NAME in self.nodes:
            has_dependents = {
                e.source for e in self.edges if e.kind is EdgeKind.DEPENDENCY
            }
            for name, kind in self.nodes.items():
                if kind is NodeKind.FUNCTIONAL and name not in has_dependents:
                    flag("missing-z-edge", name,
                         f"functional node feeds nothing; it must depend into {SINK_NAME!r}")

        return sorted(found, key=lambda v: (v.subject, v.code, v.message))

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {"name": name, "kind": self.nodes[name].value} for name in sorted(self.nodes)
            ],
            "dependencies": sorted(
                [e.source, e.target] for e in self.edges if e.kind is EdgeKind.DEPENDENCY
            ),
            "functional_trust": sorted(
                [e.source, e.target] for e in self.edges if e.kind is EdgeKind.FUNCTIONAL_TRUST
            ),
            "referral_trust": {
                name: opinion_to_dict(self.referral_trust[name])
                for name in sorted(self.referral_trust)
            },
            "conditional_tables": {
                name: {
                    "parents": list(self.tables[name].parents),
                    "rows": [opinion_to_dict(row) for row in self.tables[name].rows],
                }
                for name in sorted(self.tables)
            },
            "defaults": {
                name: opinion_to_dict(self.defaults[name]) for name in sorted(self.defaults)
            },
        }

    @classmethod
    def from_dict(cls, obj: object) -> "AssessmentGraph":
        """Build a graph from its document form without judging its semantics.

        Structural problems (wrong types, unknown kinds, duplicate names) are
        :class:`GraphFormatError`; semantic problems (cycles, bad endpoints,
        missing tables) are left for :meth:`validate` to report.
        """
        if not isinstance(obj, dict):
            raise GraphFormatError("graph document must be a JSON object")
        unknown = set(obj) - _DOCUMENT_KEYS
        if unknown:
            raise GraphFormatError(f"unknown top-level keys {sorted(unknown)}")
        graph = cls()
        for i, entry in enumerate(_expect(obj, "nodes", list)):
            if not isinstance(entry, dict) or set(entry) != {"name", "kind"}:
                raise GraphFormatError(f"nodes[{i}] must be an object with keys name, kind")
            name, kind_name = entry["name"], entry["kind"]
            if not isinstance(name, str) or not name:
                raise GraphFormatError(f"nodes[{i}].name must be a non-empty string")
            try:
                kind = NodeKind(kind_name)
            except ValueError:
                raise GraphFormatError(
                    f"nodes[{i}].kind {kind_name!r} is not one of "
                    f"{sorted(k.value for k in NodeKind)}"
                ) from None
            if name in graph.nodes:
                raise GraphFormatError(f"duplicate node name {name!r}")
            graph.nodes[name] = kind
        for key, kind in (
            ("dependencies", EdgeKind.DEPENDENCY),
            ("functional_trust", EdgeKind.FUNCTIONAL_TRUST),
        ):
            for i, pair in enumerate(_expect(obj, key, list)):
                if (
                    not isinstance(pair, list)
                    or len(pair) != 2
                    or not all(isinstance(p, str) for p in pair)
                ):
                    raise GraphFormatError(f"{key}[{i}] must be a [from, to] pair of strings")
                graph.edges.append(Edge(pair[0], pair[1], kind))
        for name, value in _expect(obj, "referral_trust", dict).items():
            graph.referral_trust[name] = _parse_opinion(value, f"referral_trust[{name!r}]")
            graph.edges.append(Edge(OVERALL_NAME, name, EdgeKind.REFERRAL_TRUST))
        for name, value in _expect(obj, "conditional_tables", dict).items():
            where = f"conditional_tables[{name!r}]"
            if not isinstance(value, dict) or set(value) != {"parents", "rows"}:
                raise GraphFormatError(f"{where} must be an object with keys parents, rows")
            parents = value["parents"]
            rows = value["rows"]
            if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
                raise GraphFormatError(f"{where}.parents must be a list of node names")
            if not isinstance(rows, list) or not rows:
                raise GraphFormatError(f"{where}.rows must be a non-empty list of opinions")
            try:
                graph.tables[name] = ConditionalTable(
                    tuple(parents),
                    tuple(
                        _parse_opinion(row, f"{where}.rows[{i}]") for i, row in enumerate(rows)
                    ),
                )
            except OpinionError as exc:
                raise GraphFormatError(f"{where}: {exc}") from None
        for name, value in _expect(obj, "defaults", dict).items():
            graph.defaults[name] = _parse_opinion(value, f"defaults[{name!r}]")
        return graph

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AssessmentGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and sorted(self.edges, key=_edge_key) == sorted(other.edges, key=_edge_key)
            and self.tables == other.tables
            and self.referral_trust == other.referral_trust
            and self.defaults == other.defaults
        )


_DEPENDENCY_ONLY = frozenset({EdgeKind.DEPENDENCY})
_RESOLUTION_KINDS = frozenset({EdgeKind.DEPENDENCY, EdgeKind.FUNCTIONAL_TRUST})
_DOCUMENT_KEYS = frozenset(
    {"nodes", "dependencies", "functional_trust", "referral_trust",
     "conditional_tables", "defaults"}
)


def _edge_key(edge: Edge) -> tuple[str, str, str]:
    return (edge.source, edge.target, edge.kind.value)


def _expect(obj: dict, key: str, expected: type) -> object:
    value = obj.get(key, expected())
    if not isinstance(value, expected):
        raise GraphFormatError(f"{key!r} must be a {expected.__name__}")
    return value


def _parse_opinion(value: object, where: str) -> Opinion:
    try:
        return opinion_from_dict(value)
    except OpinionError as exc:
        raise GraphFormatError(f"{where}: {exc}") from None


def load_graph(path: str | Path) -> AssessmentGraph:
    """Read a graph document; JSON and format errors are GraphFormatError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: "
                               f"{exc.msg}") from None
    return AssessmentGraph.from_dict(obj)


def save_graph(graph: AssessmentGraph, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(graph.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
