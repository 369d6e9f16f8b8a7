"""Subjective opinions and their evidence (Beta/Dirichlet) mapping.

A binomial opinion ``(belief, disbelief, uncertainty, base_rate)`` states
support for a binary proposition while keeping the lack of evidence explicit:
``belief + disbelief + uncertainty = 1``.  The base rate is the prior
probability used when the opinion is collapsed into the projected probability
``P = belief + base_rate * uncertainty``.

Every binomial opinion corresponds bijectively to a Beta distribution through
the evidence notation ``(positive, negative)`` with a prior weight ``W``:

    belief      = positive / (positive + negative + W)
    disbelief   = negative / (positive + negative + W)
    uncertainty = W        / (positive + negative + W)

which is what makes cumulative fusion, unfusion and decay behave like adding,
subtracting and scaling observation counts.

Joint opinions over the product domain of several binary propositions are
represented by :class:`JointOpinion`; they only arise internally when the
states of multiple parents are multiplied together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

#: Allowed slack on the additivity requirement b + d + u = 1 at construction.
ADDITIVITY_TOL = 1e-9
#: Allowed slack below 0 / above 1 for a single component at construction.
COMPONENT_TOL = 1e-12
#: Additivity residual small enough to keep verbatim (see Opinion).  The
#: normalization below always lands within this, so it is a fixed point.
_RENORM_SKIP = 4e-15

DEFAULT_BASE_RATE = 0.5
#: Non-informative prior weight for a binary domain (uniform Beta prior).
DEFAULT_PRIOR_WEIGHT = 2.0


class OpinionError(ValueError):
    """An opinion or evidence value violates its validity rules."""


class DogmaticOpinionError(OpinionError):
    """An operation that needs the evidence notation received an opinion
    with zero uncertainty, whose evidence is unbounded."""


def _check_unit(value: float, name: str) -> float:
    if not math.isfinite(value):
        raise OpinionError(f"{name} must be finite, got {value!r}")
    if value < -COMPONENT_TOL or value > 1.0 + COMPONENT_TOL:
        raise OpinionError(f"{name} must lie in [0, 1], got {value!r}")
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class Opinion:
    """A binomial opinion about one proposition.

    Construction clamps each component into [0, 1] (tolerating slack of
    ``COMPONENT_TOL``), requires additivity within ``ADDITIVITY_TOL`` and
    renormalizes so the stored components sum to 1.  Instances are immutable
    and safe to share.
    """

    belief: float
    disbelief: float
    uncertainty: float
    base_rate: float = DEFAULT_BASE_RATE

    def __post_init__(self) -> None:
        belief = _check_unit(self.belief, "belief")
        disbelief = _check_unit(self.disbelief, "disbelief")
        uncertainty = _check_unit(self.uncertainty, "uncertainty")
        base_rate = _check_unit(self.base_rate, "base_rate")
        total = belief + disbelief + uncertainty
        if abs(total - 1.0) > ADDITIVITY_TOL:
            raise OpinionError(
                f"belief + disbelief + uncertainty must equal 1, got {total!r}"
            )
        # Residuals of a few ulps are kept as-is; that keeps construction
        # idempotent (re-making an opinion from its own components never
        # perturbs it).
        if abs(total - 1.0) > _RENORM_SKIP:
            belief /= total
            disbelief /= total
            uncertainty /= total
            # Absorb the remaining residual into the largest mass: additivity
            # becomes near exact without costing a tiny component its
            # relative precision, which the evidence mapping depends on.
            if belief >= disbelief and belief >= uncertainty:
                belief = max(1.0 - disbelief - uncertainty, 0.0)
            elif disbelief >= uncertainty:
                disbelief = max(1.0 - belief - uncertainty, 0.0)
            else:
                uncertainty = max(1.0 - belief - disbelief, 0.0)
        object.__setattr__(self, "belief", belief)
        object.__setattr__(self, "disbelief", disbelief)
        object.__setattr__(self, "uncertainty", uncertainty)
        object.__setattr__(self, "base_rate", base_rate)

    @property
    def projected_probability(self) -> float:
        """Point estimate the opinion collapses to: b + a * u."""
        return self.belief + self.base_rate * self.uncertainty

    @property
    def is_vacuous(self) -> bool:
        return self.uncertainty == 1.0

    @property
    def is_dogmatic(self) -> bool:
        return self.uncertainty == 0.0

    @classmethod
    def vacuous(cls, base_rate: float = DEFAULT_BASE_RATE) -> "Opinion":
        """Total ignorance: all mass on uncertainty."""
        return cls(0.0, 0.0, 1.0, base_rate)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.belief, self.disbelief, self.uncertainty, self.base_rate)


#: Dogmatic full trust; discounting by it is the identity.
FULL_TRUST = Opinion(1.0, 0.0, 0.0, DEFAULT_BASE_RATE)


@dataclass(frozen=True)
class Evidence:
    """Positive/negative observation counts with a prior weight.

    Counts are real-valued (fusion weights and decay produce fractional
    evidence); the prior weight must be positive.
    """

    positive: float
    negative: float
    prior_weight: float = DEFAULT_PRIOR_WEIGHT
    base_rate: float = DEFAULT_BASE_RATE

    def __post_init__(self) -> None:
        for name in ("positive", "negative", "prior_weight"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise OpinionError(f"{name} must be finite, got {value!r}")
        if self.positive < 0.0 or self.negative < 0.0:
            raise OpinionError("evidence counts must be non-negative")
        if self.prior_weight <= 0.0:
            raise OpinionError("prior_weight must be positive")
        object.__setattr__(self, "base_rate", _check_unit(self.base_rate, "base_rate"))


def from_evidence(evidence: Evidence) -> Opinion:
    """Map evidence counts to the equivalent opinion."""
    total = evidence.positive + evidence.negative + evidence.prior_weight
    return Opinion(
        evidence.positive / total,
        evidence.negative / total,
        evidence.prior_weight / total,
        evidence.base_rate,
    )


def to_evidence(opinion: Opinion, prior_weight: float = DEFAULT_PRIOR_WEIGHT) -> Evidence:
    """Map an opinion back to evidence counts.

    Raises :class:`DogmaticOpinionError` for dogmatic input (u = 0), whose
    evidence is unbounded; callers must take the dogmatic branch of the
    operation instead.
    """
    if opinion.uncertainty <= 0.0:
        raise DogmaticOpinionError("a dogmatic opinion has unbounded evidence")
    scale = prior_weight / opinion.uncertainty
    return Evidence(
        opinion.belief * scale,
        opinion.disbelief * scale,
        prior_weight,
        opinion.base_rate,
    )


# ---------------------------------------------------------------------------
# Canonical textual form, shared by every file format.

_OPINION_KEYS = frozenset({"b", "d", "u", "a"})
_EVIDENCE_KEYS = frozenset({"r", "s", "W", "a"})


def opinion_to_dict(opinion: Opinion) -> dict:
    """Canonical JSON object for one opinion (keys b, d, u, a)."""
    return {
        "b": opinion.belief,
        "d": opinion.disbelief,
        "u": opinion.uncertainty,
        "a": opinion.base_rate,
    }


def opinion_from_dict(obj: object) -> Opinion:
    """Parse the canonical textual form of one opinion.

    Accepts exactly the key set {b, d, u, a} or the evidence form
    {r, s, W, a}; anything else is rejected.
    """
    if not isinstance(obj, dict):
        raise OpinionError(f"opinion must be an object, got {type(obj).__name__}")
    keys = frozenset(obj)
    if keys == _OPINION_KEYS:
        values = {k: _as_number(obj[k], k) for k in ("b", "d", "u", "a")}
        return Opinion(values["b"], values["d"], values["u"], values["a"])
    if keys == _EVIDENCE_KEYS:
        values = {k: _as_number(obj[k], k) for k in ("r", "s", "W", "a")}
        return from_evidence(Evidence(values["r"], values["s"], values["W"], values["a"]))
    raise OpinionError(
        "opinion object must have exactly the keys {b, d, u, a} or {r, s, W, a}, "
        f"got {sorted(keys)}"
    )


def _as_number(value: object, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise OpinionError(f"opinion key {key!r} must be a number, got {value!r}")
    return float(value)


# ---------------------------------------------------------------------------
# Joint opinions over products of binary propositions.


@dataclass(frozen=True)
class JointOpinion:
    """Opinion over the product domain of several binary propositions.

    ``beliefs[k]`` is the mass on joint state ``k``; states enumerate the
    parent combinations lexicographically with "functional" ordered before
    "non-functional" and the first parent varying slowest.  Additivity
    ``uncertainty + sum(beliefs) = 1`` and ``sum(base_rates) = 1`` are
    required within ``ADDITIVITY_TOL``.
    """

    beliefs: tuple[float, ...]
    uncertainty: float
    base_rates: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.beliefs) < 2:
            raise OpinionError("joint opinion needs a domain of at least 2 states")
        if len(self.base_rates) != len(self.beliefs):
            raise OpinionError("belief and base-rate vectors must have equal length")
        beliefs = tuple(
            _check_unit(float(b), f"beliefs[{i}]") for i, b in enumerate(self.beliefs)
        )
        base_rates = tuple(
            _check_unit(float(a), f"base_rates[{i}]") for i, a in enumerate(self.base_rates)
        )
        uncertainty = _check_unit(self.uncertainty, "uncertainty")
        if abs(uncertainty + sum(beliefs) - 1.0) > ADDITIVITY_TOL:
            raise OpinionError("uncertainty + sum(beliefs) must equal 1")
        if abs(sum(base_rates) - 1.0) > ADDITIVITY_TOL:
            raise OpinionError("base rates must sum to 1")
        object.__setattr__(self, "beliefs", beliefs)
        object.__setattr__(self, "base_rates", base_rates)
        object.__setattr__(self, "uncertainty", uncertainty)

    @property
    def domain_size(self) -> int:
        return len(self.beliefs)

    def projected(self, state: int) -> float:
        """Projected probability of one joint state."""
        return self.beliefs[state] + self.base_rates[state] * self.uncertainty
