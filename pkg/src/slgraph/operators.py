"""Operators over subjective opinions.

Implements the algebra the assessment engine is built from:

* ``trust_discount`` weighs a statement by the referral trust in its source.
* ``cumulative_fuse`` / ``cumulative_unfuse`` add and remove independent
  evidence about the same proposition (aleatory cumulative belief fusion).
* ``decay`` scales the evidence behind an opinion, drifting it toward
  ignorance.
* ``multiply_joint`` builds the joint opinion over the product domain of
  independent parent opinions.
* ``deduce`` pushes a joint parent opinion through a table of conditional
  opinions (subjective total probability).
* ``degree_of_conflict`` scores how irreconcilable two opinions are.

All functions are pure and return valid opinions for valid inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .opinions import (
    DEFAULT_BASE_RATE,
    DEFAULT_PRIOR_WEIGHT,
    Evidence,
    JointOpinion,
    Opinion,
    OpinionError,
    from_evidence,
    to_evidence,
)

#: Resulting evidence below this after unfusion means the removed opinion was
#: never part of the fused one.
NEGATIVE_EVIDENCE_TOL = 1e-9


class UnfusionError(ValueError):
    """Unfusing an opinion that was never fused in (negative evidence)."""


def trust_discount(referral: Opinion, statement: Opinion) -> Opinion:
    """Derive a functional-trust opinion through a referral-trust hop.

    The statement's belief and disbelief are scaled by the projected
    probability of the referral trust; the freed mass becomes uncertainty.
    Full dogmatic trust is the identity, zero trust discards the statement.
    """
    weight = referral.projected_probability
    return Opinion(
        weight * statement.belief,
        weight * statement.disbelief,
        1.0 - weight * (statement.belief + statement.disbelief),
        statement.base_rate,
    )


def cumulative_fuse(first: Opinion, second: Opinion) -> Opinion:
    """Aleatory cumulative belief fusion of two independent opinions.

    Equivalent to adding the evidence behind both opinions; the vacuous
    opinion is the neutral element and a dogmatic opinion dominates.  Two
    dogmatic inputs take the symmetric equal-weight limit.
    """
    u1, u2 = first.uncertainty, second.uncertainty
    norm = u1 + u2 - u1 * u2
    if norm <= 0.0:
        belief = 0.5 * (first.belief + second.belief)
        base = 0.5 * (first.base_rate + second.base_rate)
        return Opinion(belief, 1.0 - belief, 0.0, base)
    # A single vacuous operand is the exact neutral element; skip the
    # formula's rounding (when both are vacuous the base rates still mix).
    if first.is_vacuous and not second.is_vacuous:
        return second
    if second.is_vacuous and not first.is_vacuous:
        return first
    belief = (first.belief * u2 + second.belief * u1) / norm
    uncertainty = (u1 * u2) / norm
    # Base rates combine as the evidence-mass-weighted mean; the factored
    # weights avoid the cancellation the expanded formula suffers near u = 1.
    if first.base_rate == second.base_rate:
        base = first.base_rate
    else:
        first_weight = u2 * (1.0 - u1)
        second_weight = u1 * (1.0 - u2)
        base_norm = first_weight + second_weight
        if base_norm > 0.0:
            base = (
                first.base_rate * first_weight + second.base_rate * second_weight
            ) / base_norm
        else:
            # Removable singularity (both inputs vacuous): no evidence to
            # weigh the base rates by, fall back to their mean.
            base = 0.5 * (first.base_rate + second.base_rate)
    return Opinion(belief, 1.0 - belief - uncertainty, uncertainty, min(max(base, 0.0), 1.0))


def fuse_all(opinions: Iterable[Opinion]) -> Opinion:
    """Left-associative cumulative fusion of one or more opinions."""
    ops = list(opinions)
    if not ops:
        raise OpinionError("fuse_all needs at least one opinion")
    return reduce(cumulative_fuse, ops)


def cumulative_unfuse(
    fused: Opinion, removed: Opinion, prior_weight: float = DEFAULT_PRIOR_WEIGHT
) -> Opinion:
    """Remove a previously fused opinion (inverse of cumulative fusion).

    Works by subtracting evidence counts; both inputs must be non-dogmatic.
    Raises :class:`UnfusionError` when the removed evidence exceeds what is
    present, which signals removing an opinion that was never fused in.
    """
    fused_ev = to_evidence(fused, prior_weight)
    removed_ev = to_evidence(removed, prior_weight)
    positive = fused_ev.positive - removed_ev.positive
    negative = fused_ev.negative - removed_ev.negative
    if positive < -NEGATIVE_EVIDENCE_TOL or negative < -NEGATIVE_EVIDENCE_TOL:
        raise UnfusionError(
            f"removed opinion was never fused in (evidence {positive!r}, {negative!r})"
        )
    positive = max(positive, 0.0)
    negative = max(negative, 0.0)
    remaining_u = prior_weight / (positive + negative + prior_weight)
    base = _unfuse_base_rate(fused, removed, remaining_u)
    return from_evidence(Evidence(positive, negative, prior_weight, base))


def _unfuse_base_rate(fused: Opinion, removed: Opinion, remaining_u: float) -> float:
    """Recover the base rate the remaining opinion must have carried.

    Inverts the evidence-weighted base-rate combination of fusion where that
    is determined; keeps the fused base rate where the remaining opinion is
    vacuous (its base rate left no trace in the fused value).
    """
    if fused.base_rate == removed.base_rate:
        return fused.base_rate
    remaining_weight = removed.uncertainty * (1.0 - remaining_u)
    removed_weight = remaining_u * (1.0 - removed.uncertainty)
    if remaining_weight > 1e-12:
        # equivalent to solving the weighted mean for the unknown side, but
        # anchored at the fused value so equal rates cancel exactly
        base = fused.base_rate + (fused.base_rate - removed.base_rate) * (
            removed_weight / remaining_weight
        )
    elif remaining_u >= 1.0 - 1e-12 and removed.uncertainty >= 1.0 - 1e-12:
        base = 2.0 * fused.base_rate - removed.base_rate
    else:
        base = fused.base_rate
    return min(max(base, 0.0), 1.0)


def decay(
    opinion: Opinion, factor: float, prior_weight: float = DEFAULT_PRIOR_WEIGHT
) -> Opinion:
    """Scale the evidence behind an opinion by ``factor`` in (0, 1].

    Uncertainty never decreases; repeated decay drifts the projected
    probability toward the base rate.  The vacuous opinion is a fixed point.
    """
    if not 0.0 < factor <= 1.0:
        raise OpinionError(f"decay factor must lie in (0, 1], got {factor!r}")
    evidence = to_evidence(opinion, prior_weight)
    return from_evidence(
        Evidence(
            evidence.positive * factor,
            evidence.negative * factor,
            prior_weight,
            opinion.base_rate,
        )
    )


def multiply_joint(parents: Sequence[Opinion]) -> JointOpinion:
    """Joint opinion over the product states of independent parents.

    State masses are products of the picked belief/disbelief per parent, the
    joint uncertainty is ``1 - prod(1 - u_i)`` and base rates multiply, so
    additivity holds by construction.  States are ordered lexicographically,
    functional before non-functional, first parent varying slowest.
    """
    ops = list(parents)
    if not ops:
        raise OpinionError("joint multiplication needs at least one parent")
    if len(ops) == 1:
        # Embed a single parent exactly rather than through 1 - (1 - u).
        op = ops[0]
        return JointOpinion(
            (op.belief, op.disbelief), op.uncertainty, (op.base_rate, 1.0 - op.base_rate)
        )
    count = len(ops)
    beliefs = []
    base_rates = []
    for state in range(1 << count):
        mass = 1.0
        base = 1.0
        for i, op in enumerate(ops):
            if state >> (count - 1 - i) & 1:
                mass *= op.disbelief
                base *= 1.0 - op.base_rate
            else:
                mass *= op.belief
                base *= op.base_rate
        beliefs.append(mass)
        base_rates.append(base)
    certainty = 1.0
    for op in ops:
        certainty *= 1.0 - op.uncertainty
    return JointOpinion(tuple(beliefs), 1.0 - certainty, tuple(base_rates))


@dataclass(frozen=True)
class ConditionalTable:
    """One conditional opinion about a child per joint parent state.

    ``parents`` fixes the state enumeration: rows are ordered
    lexicographically over the parent list, functional before non-functional,
    ``parents[0]`` varying slowest (use :func:`state_index` to address a
    row).  For deduction the row count must equal ``2 ** len(parents)``;
    consumers check that so that malformed tables can be reported as data
    rather than crashes.
    """

    parents: tuple[str, ...]
    rows: tuple[Opinion, ...]

    def __post_init__(self) -> None:
        parents = tuple(self.parents)
        rows = tuple(self.rows)
        if not parents:
            raise OpinionError("conditional table needs at least one parent")
        if len(set(parents)) != len(parents):
            raise OpinionError(f"duplicate parent in conditional table: {parents}")
        if not rows:
            raise OpinionError("conditional table needs at least one row")
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "rows", rows)

    @property
    def expected_rows(self) -> int:
        return 1 << len(self.parents)

    @property
    def is_complete(self) -> bool:
        return len(self.rows) == self.expected_rows


def state_index(flags: Sequence[bool]) -> int:
    """Row index of a joint parent state; flags[i] is True for functional."""
    index = 0
    for flag in flags:
        index = index << 1 | (0 if flag else 1)
    return index


def and_shaped_table(
    parents: Sequence[str],
    belief: float = 0.95,
    uncertainty: float = 0.05,
    base_rate: float = DEFAULT_BASE_RATE,
) -> ConditionalTable:
    """Conditional table requiring every parent to function.

    The all-functional state gets ``belief`` on the child functioning, every
    other state mirrors that mass onto disbelief; ``uncertainty`` is shared
    by all rows.
    """
    functional = Opinion(belief, 1.0 - belief - uncertainty, uncertainty, base_rate)
    broken = Opinion(1.0 - belief - uncertainty, belief, uncertainty, base_rate)
    names = tuple(parents)
    rows = tuple(
        functional if state == 0 else broken for state in range(1 << len(names))
    )
    return ConditionalTable(names, rows)


def deduce(joint: JointOpinion, table: ConditionalTable) -> Opinion:
    """Deduce the child opinion from a joint parent opinion and conditionals.

    Uses the subjective total-probability construction: the projected
    probability of the result is exactly ``sum_k P_k * Q_k`` where ``P_k``
    projects the parent state and ``Q_k`` the conditional.  Uncertainty
    accumulates the conditional uncertainties plus the parent uncertainty
    scaled by the spread of the conditionals, capped so the resulting masses
    stay feasible.
    """
    size = joint.domain_size
    if len(table.rows) != size:
        raise OpinionError(
            f"conditional table has {len(table.rows)} rows, parent domain has {size} states"
        )
    state_prob = [joint.projected(k) for k in range(size)]
    cond_prob = [row.projected_probability for row in table.rows]
    # Complements are accumulated from the row components (1 - Q = d + (1-a)u)
    # rather than as 1 - prob: near the feasibility boundary that difference
    # is pure cancellation and would collapse the uncertainty cap.
    cond_against = [
        row.disbelief + (1.0 - row.base_rate) * row.uncertainty for row in table.rows
    ]
    prob = sum(p * q for p, q in zip(state_prob, cond_prob))
    against = sum(p * q for p, q in zip(state_prob, cond_against))
    base = min(
        max(sum(joint.base_rates[k] * table.rows[k].base_rate for k in range(size)), 0.0),
        1.0,
    )
    base_against = sum(
        joint.base_rates[k] * (1.0 - table.rows[k].base_rate) for k in range(size)
    )
    spread = max(cond_prob) - min(cond_prob)
    uncertainty = (
        sum(state_prob[k] * table.rows[k].uncertainty for k in range(size))
        + joint.uncertainty * spread
    )
    cap = 1.0
    if base > 0.0:
        cap = min(cap, prob / base)
    if base_against > 0.0:
        cap = min(cap, against / base_against)
    uncertainty = min(uncertainty, cap)
    belief = min(max(prob - base * uncertainty, 0.0), 1.0)
    return Opinion(belief, max(1.0 - belief - uncertainty, 0.0), uncertainty, base)


def degree_of_conflict(first: Opinion, second: Opinion) -> float:
    """Projected-probability distance scaled by the joint certainty, in [0, 1]."""
    distance = abs(first.projected_probability - second.projected_probability)
    return distance * (1.0 - first.uncertainty) * (1.0 - second.uncertainty)
