"""Stopping criteria for adaptive interviews.

Three rule kinds: a fixed question count; thresholds on the point-estimate
class posterior (top probability above ``p1st`` with the runner-up below
``p2nd``); and a predictive variant that stops once at least a fraction ``r``
of posterior draws satisfy those thresholds simultaneously. Every rule is
additionally capped by ``max_length`` and by bank exhaustion.

Inequalities are pinned as: top > p1st (strict), runner-up < p2nd (strict),
satisfied fraction >= r. Criteria are evaluated only after at least one
response has been recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Collection, Mapping

import numpy as np

from vaq.model import modal_cause

FIXED_LENGTH = "fixed_length"
POINT = "point"
PREDICTIVE = "predictive"

CRITERION_MET = "criterion_met"
MAX_LENGTH_REACHED = "max_length_reached"
BANK_EXHAUSTED = "bank_exhausted"
NOT_STOPPED = "not_stopped"


@dataclass(frozen=True)
class StopDecision:
    """Outcome of one stopping check. ``satisfied_fraction`` is populated for
    predictive rules only (the fraction of draws meeting the thresholds)."""

    stop: bool
    reason: str
    satisfied_fraction: float | None = None


@dataclass(frozen=True)
class StoppingRule:
    """Configured stopping criterion.

    ``p2nd`` may be given directly or left to be derived from ``d`` via
    :func:`threshold_pair` once the number of causes is known (see
    :meth:`resolve`); ``max_length`` defaults to the bank size at resolution.
    """

    kind: str
    length: int | None = None
    p1st: float | None = None
    p2nd: float | None = None
    d: float | None = None
    r: float | None = None
    max_length: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in (FIXED_LENGTH, POINT, PREDICTIVE):
            raise ValueError(f"unknown stopping rule kind {self.kind!r}")
        if self.kind == FIXED_LENGTH:
            if self.length is None or self.length < 1:
                raise ValueError("fixed-length rule needs a positive length")
        else:
            if self.p1st is None or not 0 < self.p1st < 1:
                raise ValueError("p1st must lie in (0, 1)")
            if self.p2nd is None and self.d is None:
                raise ValueError("give p2nd directly or d to derive it")
            if self.p2nd is not None and not 0 < self.p2nd <= self.p1st:
                raise ValueError("p2nd must satisfy 0 < p2nd <= p1st")
            if self.d is not None and not 0 <= self.d <= 1:
                raise ValueError("d must lie in [0, 1]")
        if self.kind == PREDICTIVE and (self.r is None or not 0 < self.r < 1):
            raise ValueError("r must lie in (0, 1)")
        if self.max_length is not None:
            if self.max_length < 1:
                raise ValueError("max_length must be positive")
            if self.length is not None and self.length > self.max_length:
                raise ValueError("fixed length exceeds max_length")

    @classmethod
    def fixed_length(cls, length: int, max_length: int | None = None) -> "StoppingRule":
        return cls(kind=FIXED_LENGTH, length=length, max_length=max_length)

    @classmethod
    def point(
        cls,
        p1st: float,
        p2nd: float | None = None,
        *,
        d: float | None = None,
        max_length: int | None = None,
    ) -> "StoppingRule":
        return cls(kind=POINT, p1st=p1st, p2nd=p2nd, d=d, max_length=max_length)

    @classmethod
    def predictive(
        cls,
        p1st: float,
        r: float,
        p2nd: float | None = None,
        *,
        d: float | None = None,
        max_length: int | None = None,
    ) -> "StoppingRule":
        return cls(kind=PREDICTIVE, p1st=p1st, p2nd=p2nd, d=d, r=r,
                   max_length=max_length)

    def resolve(self, num_causes: int, num_questions: int) -> "StoppingRule":
        """Concrete rule for a given model: fills ``p2nd`` from ``d`` and
        defaults ``max_length`` to the bank size."""
        rule = self
        if rule.kind != FIXED_LENGTH and rule.p2nd is None:
            rule = replace(rule, p2nd=threshold_pair(rule.p1st, rule.d, num_causes))
        if rule.max_length is None:
            rule = replace(rule, max_length=num_questions)
        return rule


_RULE_FIELDS = ("length", "p1st", "p2nd", "d", "r", "max_length")


def rule_from_config(cfg: Mapping[str, Any]) -> StoppingRule:
    """Build a rule from a JSON-shaped config mapping.

    Two layouts are accepted: a flat one where ``rule`` names the kind and
    the thresholds sit beside it ({"rule": "predictive", "p1st": 0.8, ...}),
    and a nested one where ``rule`` is an object with an optional ``kind``
    field. The kind defaults to the point rule.
    """
    spec = cfg.get("rule", POINT)
    if isinstance(spec, Mapping):
        fields = dict(spec)
        kind = fields.pop("kind", POINT)
    else:
        kind = spec
        fields = {k: cfg[k] for k in _RULE_FIELDS if k in cfg}
    unknown = set(fields) - set(_RULE_FIELDS)
    if unknown:
        raise ValueError(f"unknown stopping rule fields {sorted(unknown)}")
    return StoppingRule(kind=kind, **fields)


def threshold_pair(p1st: float, d: float, num_causes: int) -> float:
    """Runner-up threshold paired with ``p1st``:
    ``(1 - p1st)/C + d*(C - 2)*(1 - p1st)/C``. At d=0 this is the uniform
    share of the residual mass; d=1 relaxes it to (C-1)/C of the residual."""
    if not 0 < p1st < 1:
        raise ValueError("p1st must lie in (0, 1)")
    if not 0 <= d <= 1:
        raise ValueError("d must lie in [0, 1]")
    if num_causes < 2:
        raise ValueError("at least two causes are required")
    residual = (1.0 - p1st) / num_causes
    return residual + d * (num_causes - 2) * residual


def point_rule_met(probs: np.ndarray, p1st: float, p2nd: float) -> bool:
    """True iff the largest posterior entry exceeds ``p1st`` and the second
    largest falls below ``p2nd``."""
    probs = np.asarray(probs)
    if probs.shape[0] < 2:
        raise ValueError("need at least two causes")
    top2 = np.partition(probs, -2)[-2:]
    return bool(top2[1] > p1st and top2[0] < p2nd)


def _event_fraction(
    draw_probs: np.ndarray, y_star0: int, p1st: float, p2nd: float
) -> float:
    """Fraction of draws whose posterior puts ``y_star0`` (0-based) above
    ``p1st`` with every other cause below ``p2nd``."""
    target = draw_probs[:, y_star0]
    others = draw_probs.copy()
    others[:, y_star0] = -np.inf
    met = (target > p1st) & (others.max(axis=1) < p2nd)
    return float(met.sum() / draw_probs.shape[0])


def predictive_rule_met(
    draw_probs: np.ndarray, p1st: float, p2nd: float, r: float
) -> tuple[bool, float]:
    """Evaluate the predictive criterion on a (B, C) posterior matrix.

    The target cause is the modal per-draw argmax; a draw satisfies the event
    when that cause exceeds ``p1st`` and all others fall below ``p2nd``.
    Returns (stop, fraction) with stop iff fraction >= r.
    """
    draw_probs = np.asarray(draw_probs)
    if draw_probs.ndim != 2:
        raise ValueError("draw_probs must be a (B, C) matrix")
    fraction = _event_fraction(draw_probs, modal_cause(draw_probs) - 1, p1st, p2nd)
    return fraction >= r, fraction


def should_stop(
    rule: StoppingRule,
    t: int,
    probs_or_draws: np.ndarray | None,
    candidates: Collection[int],
) -> StopDecision:
    """Full stopping check after ``t`` recorded responses.

    Checks, in order: bank exhaustion, the hard length caps, then (only for
    t >= 1) the configured criterion. ``probs_or_draws`` is the point
    posterior (C,) for point rules, the per-draw matrix (B, C) for predictive
    rules, and unused for fixed-length rules.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    fraction: float | None = None
    if rule.kind == PREDICTIVE and probs_or_draws is not None:
        probs_or_draws = np.asarray(probs_or_draws)
        if probs_or_draws.ndim != 2:
            raise ValueError("predictive rule needs a (B, C) posterior matrix")
        fraction = _event_fraction(
            probs_or_draws, modal_cause(probs_or_draws) - 1, rule.p1st, rule.p2nd
        )
    if not candidates:
        return StopDecision(True, BANK_EXHAUSTED, fraction)
    if rule.max_length is not None and t >= rule.max_length:
        return StopDecision(True, MAX_LENGTH_REACHED, fraction)
    if rule.kind == FIXED_LENGTH:
        if t >= rule.length:
            return StopDecision(True, MAX_LENGTH_REACHED, fraction)
        return StopDecision(False, NOT_STOPPED, fraction)
    if t == 0:
        return StopDecision(False, NOT_STOPPED, fraction)
    if rule.kind == POINT:
        probs = np.asarray(probs_or_draws)
        if probs.ndim != 1:
            raise ValueError("point rule needs a (C,) posterior vector")
        if point_rule_met(probs, rule.p1st, rule.p2nd):
            return StopDecision(True, CRITERION_MET)
        return StopDecision(False, NOT_STOPPED)
    if fraction is None:
        raise ValueError("predictive rule needs a (B, C) posterior matrix")
    if fraction >= rule.r:
        return StopDecision(True, CRITERION_MET, fraction)
    return StopDecision(False, NOT_STOPPED, fraction)
