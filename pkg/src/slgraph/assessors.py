"""Reference assessment modules that turn raw inputs into opinions.

Three assessor families cover the bundled scenario:

* :func:`planner_assess` scores a classified trajectory, weighting early
  points more heavily (near-term deviations matter most).
* :func:`evidence_assess` maps a track record of correct/incorrect outcomes
  straight onto an opinion through the evidence notation.
* :class:`WindowedConflictAssessor` maintains a short-term fused opinion of
  the last N step opinions (oldest removed by unfusion) next to a decaying
  long-term history, and emits the agreement with a reference opinion.

Each assessor also understands its line-record form, so streams of raw
inputs can be transformed into assessment-stream records.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
import math

from .opinions import (
    DEFAULT_BASE_RATE,
    DEFAULT_PRIOR_WEIGHT,
    DogmaticOpinionError,
    Evidence,
    Opinion,
    OpinionError,
    from_evidence,
    opinion_from_dict,
)
from .operators import (
    cumulative_fuse,
    cumulative_unfuse,
    decay,
    degree_of_conflict,
)


@dataclass(frozen=True)
class TrajectoryClassification:
    """A trajectory of ``length`` points with the off-distribution ones flagged.

    ``uncertainty`` carries how ambiguous the underlying map matching was;
    it is an input here, not derived.
    """

    length: int
    nonfunctional: frozenset[int]
    uncertainty: float

    def __post_init__(self) -> None:
        if self.length < 1:
            raise OpinionError("a trajectory needs at least one point")
        if not 0.0 <= self.uncertainty <= 1.0:
            raise OpinionError(f"uncertainty must lie in [0, 1], got {self.uncertainty!r}")
        bad = [i for i in self.nonfunctional if not 0 <= i < self.length]
        if bad:
            raise OpinionError(f"point indices {sorted(bad)} outside 0..{self.length - 1}")
        object.__setattr__(self, "nonfunctional", frozenset(self.nonfunctional))


def planner_assess(
    classification: TrajectoryClassification, base_rate: float = DEFAULT_BASE_RATE
) -> Opinion:
    """Opinion on a planned trajectory from its per-point classification.

    Point ``i`` of ``n`` carries weight ``(n - i) / n``; belief is the
    functional share of the total weight scaled by the available certainty,
    disbelief the remainder, so additivity holds by construction.
    """
    n = classification.length
    total = sum((n - i) / n for i in range(n))
    broken = sum((n - i) / n for i in sorted(classification.nonfunctional))
    certainty = 1.0 - classification.uncertainty
    disbelief = certainty * broken / total
    return Opinion(
        certainty - disbelief, disbelief, classification.uncertainty, base_rate
    )


def evidence_assess(
    correct: float,
    incorrect: float,
    prior_weight: float = DEFAULT_PRIOR_WEIGHT,
    base_rate: float = DEFAULT_BASE_RATE,
) -> Opinion:
    """Opinion from a track record of correct/incorrect past outcomes."""
    return from_evidence(Evidence(correct, incorrect, prior_weight, base_rate))


class WindowedConflictAssessor:
    """Short/long sliding-window fusion with conflict scoring.

    Each step opinion is fused into the short-term opinion and buffered;
    once the buffer exceeds ``window_size`` the oldest opinion is removed by
    unfusion and folded into the long-term opinion, which first decays by
    ``decay_factor``.  The emitted assessment scores the agreement of the
    short-term opinion with the caller's reference; the short-vs-long
    conflict is kept as auxiliary data on :attr:`short_long_conflict`.

    ``window_size=None`` never evicts, which with ``decay_factor=1`` makes
    the short-term opinion the plain fusion of every input.
    """

    def __init__(
        self,
        window_size: int | None = 10,
        decay_factor: float = 0.95,
        prior_weight: float = DEFAULT_PRIOR_WEIGHT,
        base_rate: float = DEFAULT_BASE_RATE,
    ):
        if window_size is not None and window_size < 1:
            raise OpinionError(f"window_size must be at least 1, got {window_size!r}")
        if not 0.0 < decay_factor <= 1.0:
            raise OpinionError(f"decay_factor must lie in (0, 1], got {decay_factor!r}")
        self.window_size = window_size
        self.decay_factor = decay_factor
        self.prior_weight = prior_weight
        self.base_rate = base_rate
        self.window: deque[Opinion] = deque()
        self.short_term = Opinion.vacuous(base_rate)
        self.long_term = Opinion.vacuous(base_rate)
        self.short_long_conflict = 0.0

    def step(self, step_opinion: Opinion, reference: Opinion) -> Opinion:
        """Fold one step opinion in and score agreement with the reference."""
        if step_opinion.is_dogmatic:
            raise DogmaticOpinionError(
                "dogmatic step opinions cannot be windowed (unfusion is undefined)"
            )
        self.short_term = cumulative_fuse(self.short_term, step_opinion)
        self.window.append(step_opinion)
        if self.window_size is not None and len(self.window) > self.window_size:
            oldest = self.window.popleft()
            self.short_term = cumulative_unfuse(self.short_term, oldest, self.prior_weight)
            self.long_term = cumulative_fuse(
                decay(self.long_term, self.decay_factor, self.prior_weight), oldest
            )
        self.short_long_conflict = degree_of_conflict(self.short_term, self.long_term)
        conflict = degree_of_conflict(self.short_term, reference)
        return conflict_to_opinion(conflict, self.short_term, reference, self.base_rate)

    def assess_record(self, record: dict) -> Opinion:
        """Process one ``{t, step, reference}`` line record."""
        _require_keys(record, {"t", "step", "reference"}, "window")
        return self.step(
            opinion_from_dict(record["step"]), opinion_from_dict(record["reference"])
        )


def conflict_to_opinion(
    conflict: float,
    first: Opinion,
    second: Opinion,
    base_rate: float = DEFAULT_BASE_RATE,
) -> Opinion:
    """Interpret a degree of conflict between two opinions as an opinion.

    The joint certainty of the inputs bounds how much mass the verdict may
    carry; it splits between belief and disbelief by the conflict, the rest
    stays uncertain.
    """
    if not 0.0 <= conflict <= 1.0:
        raise OpinionError(f"degree of conflict must lie in [0, 1], got {conflict!r}")
    certainty = (1.0 - first.uncertainty) * (1.0 - second.uncertainty)
    return Opinion(
        (1.0 - conflict) * certainty,
        conflict * certainty,
        1.0 - certainty,
        base_rate,
    )


# ---------------------------------------------------------------------------
# Line-record forms.


def assess_planner_record(record: dict, base_rate: float = DEFAULT_BASE_RATE) -> Opinion:
    """Process one ``{t, n, nonfunctional_indices, u}`` planner record."""
    _require_keys(record, {"t", "n", "nonfunctional_indices", "u"}, "planner")
    n = record["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise OpinionError(f"planner record key 'n' must be an integer, got {n!r}")
    indices = record["nonfunctional_indices"]
    if not isinstance(indices, list) or not all(
        isinstance(i, int) and not isinstance(i, bool) for i in indices
    ):
        raise OpinionError("planner record key 'nonfunctional_indices' must be a list of integers")
    u = record["u"]
    if isinstance(u, bool) or not isinstance(u, (int, float)) or not math.isfinite(u):
        raise OpinionError(f"planner record key 'u' must be a number, got {u!r}")
    classification = TrajectoryClassification(n, frozenset(indices), float(u))
    return planner_assess(classification, base_rate)


def assess_evidence_record(
    record: dict,
    prior_weight: float = DEFAULT_PRIOR_WEIGHT,
    base_rate: float = DEFAULT_BASE_RATE,
) -> Opinion:
    """Process one ``{t, r, s}`` track-record record."""
    _require_keys(record, {"t", "r", "s"}, "evidence")
    for key in ("r", "s"):
        value = record[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise OpinionError(f"evidence record key {key!r} must be a number, got {value!r}")
    return evidence_assess(float(record["r"]), float(record["s"]), prior_weight, base_rate)


def _require_keys(record: dict, keys: set[str], kind: str) -> None:
    if not isinstance(record, dict) or set(record) != keys:
        raise OpinionError(
            f"{kind} record must be an object with exactly the keys {sorted(keys)}"
        )
