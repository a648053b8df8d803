"""Question scoring and selection.

Scores measure how sharply a candidate question separates the current best
cause from the alternatives: the expected KL divergence between the
question's answer distributions, weighted by the class posterior. The
predictive variant averages the score over posterior parameter draws. A
distance penalty can discourage jumping between unrelated questions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Collection, Mapping, Sequence

import numpy as np

from vaq import _kernels
from vaq.model import (
    ParameterDraws,
    ParameterPoint,
    class_posterior,
    class_posterior_draws,
    modal_cause,
)


@dataclass(frozen=True)
class ScoreVector:
    """Selection scores keyed by candidate question index.

    ``method`` records which posterior fed the score ('point' or
    'predictive'); ``penalized`` whether a distance penalty was subtracted
    (penalized scores may be negative, raw scores never are).
    """

    scores: dict[int, float]
    method: str
    penalized: bool = False


@dataclass(frozen=True)
class DistanceMetric:
    """Distance between questions, used by the jump penalty and the
    order-noise model.

    Kinds: ``index`` is |j - k| / J; ``group`` is 0 within the same topic
    group and 1 across groups (ungrouped questions match nothing but
    themselves); ``matrix`` is an explicit symmetric non-negative table with
    zero diagonal.
    """

    kind: str
    size: int | None = None
    groups: tuple[str | None, ...] | None = None
    table: np.ndarray | None = None

    @classmethod
    def by_index(cls, num_questions: int) -> "DistanceMetric":
        if num_questions < 1:
            raise ValueError("num_questions must be positive")
        return cls(kind="index", size=num_questions)

    @classmethod
    def by_group(cls, groups: Sequence[str | None]) -> "DistanceMetric":
        return cls(kind="group", groups=tuple(groups))

    @classmethod
    def from_matrix(cls, table: np.ndarray) -> "DistanceMetric":
        table = np.asarray(table, dtype=np.float64)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError("distance table must be square")
        if (table < 0).any():
            raise ValueError("distances must be non-negative")
        if np.diagonal(table).any():
            raise ValueError("distance table diagonal must be zero")
        if not np.array_equal(table, table.T):
            raise ValueError("distance table must be symmetric")
        return cls(kind="matrix", table=table)

    def check_size(self, num_questions: int) -> None:
        """Reject a metric built for a different bank size."""
        if self.kind == "index":
            actual = self.size
        elif self.kind == "group":
            actual = len(self.groups)
        else:
            actual = self.table.shape[0]
        if actual != num_questions:
            raise ValueError(
                f"distance metric covers {actual} questions, bank has {num_questions}"
            )

    def distance(self, j: int, k: int) -> float:
        if self.kind == "index":
            return abs(j - k) / self.size
        if self.kind == "group":
            if j == k:
                return 0.0
            gj, gk = self.groups[j], self.groups[k]
            return 0.0 if (gj is not None and gj == gk) else 1.0
        return float(self.table[j, k])

    def distances(self, j: int, ks: np.ndarray) -> np.ndarray:
        """Vector of distances from question j to each question in ``ks``."""
        if self.kind == "index":
            return np.abs(ks - j) / self.size
        if self.kind == "matrix":
            return self.table[j, ks]
        return np.array([self.distance(j, int(k)) for k in ks])


def symptom_kl(params: ParameterPoint, j: int, y_hat: int, y: int) -> float:
    """KL divergence between question j's answer distribution under cause
    ``y_hat`` and under cause ``y`` (1-based causes, natural log)."""
    t1 = params.theta[y_hat - 1, j]
    t2 = params.theta[y - 1, j]
    return t1 * math.log(t1 / t2) + (1.0 - t1) * math.log((1.0 - t1) / (1.0 - t2))


def _candidate_array(candidates: Collection[int], num_questions: int) -> np.ndarray:
    if not candidates:
        raise ValueError("candidate set is empty")
    cand = np.asarray(sorted(candidates), dtype=np.int64)
    if cand[0] < 0 or cand[-1] >= num_questions:
        raise ValueError("candidate question index out of range")
    return cand


def _score_map(cand: np.ndarray, values: np.ndarray) -> dict[int, float]:
    return {int(j): float(s) for j, s in zip(cand, values)}


def scores_at_point(
    params: ParameterPoint, post: np.ndarray, cand: np.ndarray
) -> np.ndarray:
    """Raw score vector at one parameter point given its class posterior."""
    yhat = np.array([post.argmax()], dtype=np.int64)
    return _kernels.pwkl_scores(
        params.theta[None, :, :],
        params.log_theta[None, :, :],
        params.log_comp[None, :, :],
        np.ascontiguousarray(post[None, :]),
        yhat,
        cand,
    )


def scores_over_draws(
    draws: ParameterDraws,
    draw_probs: np.ndarray,
    cand: np.ndarray,
    shared_yhat: bool = False,
) -> np.ndarray:
    """Raw predictive score vector given the per-draw class posteriors.

    By default each draw scores against its own best cause; with
    ``shared_yhat`` every draw scores against the modal cause across draws.
    """
    if shared_yhat:
        yhat = np.full(len(draws), modal_cause(draw_probs) - 1, dtype=np.int64)
    else:
        yhat = draw_probs.argmax(axis=1).astype(np.int64)
    return _kernels.pwkl_scores(
        draws.theta,
        draws.log_theta,
        draws.log_comp,
        np.ascontiguousarray(draw_probs),
        yhat,
        cand,
    )


def pwkl_score(
    params: ParameterPoint,
    responses: Mapping[int, int],
    candidates: Collection[int],
) -> ScoreVector:
    """Posterior-weighted KL score for each eligible question at a single
    parameter point. Only candidate questions are scored."""
    cand = _candidate_array(candidates, params.num_questions)
    post = class_posterior(params, responses)
    return ScoreVector(scores=_score_map(cand, scores_at_point(params, post, cand)),
                       method="point")


def predictive_pwkl_score(
    draws: ParameterDraws,
    responses: Mapping[int, int],
    candidates: Collection[int],
    shared_yhat: bool = False,
) -> ScoreVector:
    """Predictive score: the single-point score averaged over posterior
    draws, with the best cause recomputed inside each draw (or held at the
    modal cause when ``shared_yhat`` is set)."""
    cand = _candidate_array(candidates, draws.theta.shape[2])
    draw_probs, _ = class_posterior_draws(draws, responses)
    values = scores_over_draws(draws, draw_probs, cand, shared_yhat=shared_yhat)
    return ScoreVector(scores=_score_map(cand, values), method="predictive")


def penalize(
    scores: ScoreVector,
    last_question: int | None,
    penalty_weight: float,
    metric: DistanceMetric | None,
) -> ScoreVector:
    """Subtract ``penalty_weight * distance(j, last_question)`` from every
    score. With no previous question or a zero weight the input is returned
    unchanged."""
    if penalty_weight < 0:
        raise ValueError("penalty_weight must be non-negative")
    if last_question is None or penalty_weight == 0:
        return scores
    if metric is None:
        raise ValueError("a distance metric is required to penalize scores")
    penalized = {
        j: s - penalty_weight * metric.distance(j, last_question)
        for j, s in scores.scores.items()
    }
    return ScoreVector(scores=penalized, method=scores.method, penalized=True)


def select_next(scores: ScoreVector) -> int:
    """Candidate with the maximal score; ties break toward the lowest
    question index."""
    if not scores.scores:
        raise ValueError("no scores to select from")
    return min(scores.scores, key=lambda j: (-scores.scores[j], j))
