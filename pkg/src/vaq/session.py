"""Interview session state machine.

A session walks one respondent through the question bank: it proposes the
next question (by active scoring or a fixed order), records the answer,
re-checks the stopping rule, and classifies on demand. Gated sub-questions
become eligible only once their parent has the unlocking answer; answers may
be yes (1), no (0), or missing (-1), and a missing answer still counts as
asked.

Question proposals are cached: repeated ``next_question`` calls between
answers return the same question, and the answer must be for that question.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from vaq.bank import Question, QuestionBank
from vaq.data import MISSING
from vaq.model import (
    ParameterDraws,
    ParameterPoint,
    PosteriorModel,
    class_posterior,
    class_posterior_draws,
    modal_cause,
    posterior_mean,
    sample_draws,
)
from vaq.selector import (
    DistanceMetric,
    ScoreVector,
    _candidate_array,
    _score_map,
    penalize,
    scores_at_point,
    scores_over_draws,
    select_next,
)
from vaq.stopping import (
    NOT_STOPPED,
    POINT,
    PREDICTIVE,
    _RULE_FIELDS,
    StopDecision,
    StoppingRule,
    rule_from_config,
    should_stop,
)

ACTIVE_POINT = "active_point"
ACTIVE_PREDICTIVE = "active_predictive"
STATIC = "static"
STRATEGIES = (ACTIVE_POINT, ACTIVE_PREDICTIVE, STATIC)

VALID_ANSWERS = (0, 1, MISSING)


class SessionStoppedError(RuntimeError):
    """Raised when asking for or answering a question after the session
    stopped."""


class PendingQuestionError(RuntimeError):
    """Raised when an answer arrives for a question other than the proposed
    one."""


@dataclass(frozen=True)
class SessionConfig:
    """How one interview runs: question-selection strategy, stopping rule,
    and the knobs the active strategies use.

    ``question_order`` applies to the static strategy only (defaults to bank
    order); a gated question whose turn arrives while locked is deferred, not
    skipped. ``num_draws``/``seed`` control the posterior draws, which are
    materialized once per session when the strategy or the rule needs them.
    """

    strategy: str
    rule: StoppingRule
    num_draws: int = 200
    seed: int = 0
    penalty_weight: float = 0.0
    metric: DistanceMetric | None = None
    question_order: tuple[int, ...] | None = None
    shared_yhat: bool = False

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.num_draws < 1:
            raise ValueError("num_draws must be at least 1")
        if self.penalty_weight < 0:
            raise ValueError("penalty_weight must be non-negative")
        if self.penalty_weight > 0 and self.metric is None:
            raise ValueError("a distance metric is required when penalizing")
        if self.question_order is not None and self.strategy != STATIC:
            raise ValueError("question_order applies to the static strategy only")


def metric_from_config(obj: Any, bank: QuestionBank) -> DistanceMetric | None:
    """Distance metric from JSON config: the strings 'index' and 'group', or
    an object {"kind": ..., "table": ...} for an explicit matrix."""
    if obj is None:
        return None
    if isinstance(obj, str):
        kind = obj
        table = None
    elif isinstance(obj, Mapping):
        kind = obj.get("kind")
        table = obj.get("table")
    else:
        raise ValueError(f"cannot interpret distance metric config {obj!r}")
    if kind == "index":
        return DistanceMetric.by_index(bank.size)
    if kind == "group":
        return DistanceMetric.by_group(bank.group_labels())
    if kind == "matrix":
        if table is None:
            raise ValueError("matrix metric config needs a 'table' field")
        metric = DistanceMetric.from_matrix(np.asarray(table, dtype=np.float64))
        metric.check_size(bank.size)
        return metric
    raise ValueError(f"unknown distance metric kind {kind!r}")


def session_config_from_dict(
    cfg: Mapping[str, Any], bank: QuestionBank
) -> SessionConfig:
    """Session configuration from a JSON-shaped mapping.

    Recognized keys: strategy ('static_order' is accepted for the static
    strategy), the rule layout of :func:`rule_from_config`, num_draws/B,
    seed, penalty_weight/lambda, metric, question_order, shared_yhat.
    """
    strategy = cfg.get("strategy", ACTIVE_POINT)
    if strategy == "static_order":
        strategy = STATIC
    num_draws = cfg.get("num_draws", cfg.get("B", 200))
    penalty = cfg.get("penalty_weight", cfg.get("lambda", 0.0))
    order = cfg.get("question_order")
    return SessionConfig(
        strategy=strategy,
        rule=rule_from_config(cfg),
        num_draws=int(num_draws),
        seed=int(cfg.get("seed", 0)),
        penalty_weight=float(penalty),
        metric=metric_from_config(cfg.get("metric"), bank),
        question_order=None if order is None else tuple(int(j) for j in order),
        shared_yhat=bool(cfg.get("shared_yhat", False)),
    )


def default_session_config() -> dict[str, Any]:
    """The interview configuration used when a caller supplies no overrides:
    point-estimate selection with the point stopping rule at p1st=0.8, d=0."""
    return {"strategy": ACTIVE_POINT, "rule": {"kind": POINT, "p1st": 0.8, "d": 0.0}}


def merged_session_config(
    overrides: Mapping[str, Any] | None,
) -> dict[str, Any]:
    """Overlay user overrides on :func:`default_session_config`.

    A nested ``rule`` object merges field-wise into the default rule; a
    string ``rule`` swaps the kind while keeping inherited thresholds;
    top-level threshold fields fold into the rule either way. All other
    keys replace the default.
    """
    merged = default_session_config()
    rest = dict(overrides or {})
    rule_override = rest.pop("rule", None)
    flat = {k: rest.pop(k) for k in list(rest) if k in _RULE_FIELDS}
    rule = dict(merged["rule"])
    if isinstance(rule_override, Mapping):
        rule.update(flat)
        rule.update(rule_override)
    elif rule_override is not None:
        rule["kind"] = rule_override
        rule.update(flat)
    else:
        rule.update(flat)
    merged["rule"] = rule
    merged.update(rest)
    return merged


def top_causes(probs: np.ndarray, count: int = 3) -> list[dict[str, Any]]:
    """Largest posterior entries as {cause, probability} records, probability
    descending with ties toward the lowest cause."""
    order = np.argsort(-np.asarray(probs), kind="stable")[:count]
    return [{"cause": int(y) + 1, "probability": float(probs[y])} for y in order]


@dataclass(frozen=True)
class Classification:
    """Cause call for the respondent: 1-based ``cause``, the (C,) probability
    vector behind it, and which posterior produced it ('point' uses the
    point-estimate argmax, 'modal_draw' the modal cause over draws with the
    draw-averaged probabilities)."""

    cause: int
    probs: np.ndarray
    method: str


class Session:
    """One interview against a fitted model.

    ``params`` overrides the posterior-mean parameter point (for example the
    generator's true parameters); it is incompatible with draw-based
    strategies or rules, which sample from the model posterior.
    """

    def __init__(
        self,
        model: PosteriorModel,
        config: SessionConfig,
        *,
        params: ParameterPoint | None = None,
        draws: ParameterDraws | None = None,
    ):
        self.model = model
        self.config = config
        self.bank: QuestionBank = model.bank
        self.rule: StoppingRule = config.rule.resolve(model.num_causes, self.bank.size)
        self.params: ParameterPoint = params if params is not None else posterior_mean(model)
        needs_draws = config.strategy == ACTIVE_PREDICTIVE or self.rule.kind == PREDICTIVE
        if needs_draws and params is not None:
            raise ValueError(
                "explicit parameters cannot serve draw-based strategies or rules"
            )
        if draws is not None:
            if not needs_draws:
                raise ValueError("draws supplied to a session that cannot use them")
            if draws.theta.shape[1:] != model.beta_a.shape:
                raise ValueError("supplied draws do not match the model dimensions")
            self.draws: ParameterDraws | None = draws
        else:
            self.draws = (
                sample_draws(model, config.num_draws, config.seed)
                if needs_draws
                else None
            )
        if config.metric is not None:
            config.metric.check_size(self.bank.size)
        self._order = self._resolve_order()
        self._responses: dict[int, int] = {}
        self._asked: list[int] = []
        self._pending: int | None = None
        self._pending_score: float | None = None
        self._decision = StopDecision(False, NOT_STOPPED)
        self._records: list[dict[str, Any]] = []
        self._post_cache: np.ndarray | None = None
        self._draw_cache: np.ndarray | None = None

    def _resolve_order(self) -> tuple[int, ...] | None:
        if self.config.strategy != STATIC:
            return None
        order = self.config.question_order
        if order is None:
            return tuple(range(self.bank.size))
        if sorted(order) != list(range(self.bank.size)):
            raise ValueError("question_order must be a permutation of the bank")
        return tuple(order)

    # -- state ------------------------------------------------------------

    @property
    def responses(self) -> dict[int, int]:
        """Recorded answers by question index, in the order asked."""
        return dict(self._responses)

    @property
    def asked(self) -> tuple[int, ...]:
        return tuple(self._asked)

    @property
    def num_answered(self) -> int:
        return len(self._asked)

    @property
    def stopped(self) -> bool:
        return self._decision.stop

    @property
    def stop_decision(self) -> StopDecision:
        return self._decision

    @property
    def score_method(self) -> str:
        if self.config.strategy == ACTIVE_POINT:
            return "point"
        if self.config.strategy == ACTIVE_PREDICTIVE:
            return "predictive"
        return "static"

    def eligible(self) -> list[int]:
        """Unasked questions whose gate is open, in bank order."""
        return [j for j in self.unlocked() if j not in self._responses]

    def unlocked(self) -> list[int]:
        """Questions whose gate is open, asked or not: roots plus every
        sub-question whose parent was answered compatibly. A missing parent
        answer unlocks only trigger-free children."""
        out = []
        for q in self.bank.questions:
            if q.parent is None:
                out.append(q.index)
            elif q.parent in self._responses:
                if q.trigger is None or self._responses[q.parent] == q.trigger:
                    out.append(q.index)
        return out

    def posterior(self) -> np.ndarray:
        """Point-estimate class posterior over causes given answers so far."""
        if self._post_cache is None:
            self._post_cache = class_posterior(self.params, self._responses)
        return self._post_cache.copy()

    def draw_posteriors(self) -> np.ndarray:
        """Per-draw class posteriors (B, C); requires materialized draws."""
        if self.draws is None:
            raise ValueError("session holds no posterior draws")
        if self._draw_cache is None:
            self._draw_cache, _ = class_posterior_draws(self.draws, self._responses)
        return self._draw_cache.copy()

    # -- selection --------------------------------------------------------

    def scores(self) -> ScoreVector:
        """Current selection scores over eligible questions, penalty applied.
        Not defined for the static strategy."""
        if self.config.strategy == STATIC:
            raise ValueError("the static strategy does not score questions")
        cand = _candidate_array(self.eligible(), self.bank.size)
        if self.config.strategy == ACTIVE_POINT:
            raw = scores_at_point(self.params, self._point_post(), cand)
            vector = ScoreVector(scores=_score_map(cand, raw), method="point")
        else:
            raw = scores_over_draws(
                self.draws, self._draw_post(), cand, shared_yhat=self.config.shared_yhat
            )
            vector = ScoreVector(scores=_score_map(cand, raw), method="predictive")
        last = self._asked[-1] if self._asked else None
        return penalize(vector, last, self.config.penalty_weight, self.config.metric)

    def _point_post(self) -> np.ndarray:
        if self._post_cache is None:
            self._post_cache = class_posterior(self.params, self._responses)
        return self._post_cache

    def _draw_post(self) -> np.ndarray:
        if self._draw_cache is None:
            self._draw_cache, _ = class_posterior_draws(self.draws, self._responses)
        return self._draw_cache

    def next_question(self) -> Question:
        """The question to ask now. Stable until it is answered."""
        if self._decision.stop:
            raise SessionStoppedError(f"session stopped ({self._decision.reason})")
        if self._pending is None:
            if self.config.strategy == STATIC:
                open_set = set(self.eligible())
                self._pending = next(j for j in self._order if j in open_set)
                self._pending_score = None
            else:
                vector = self.scores()
                self._pending = select_next(vector)
                self._pending_score = vector.scores[self._pending]
        return self.bank[self._pending]

    # -- answering --------------------------------------------------------

    def record_response(self, question_id: str, value: int) -> StopDecision:
        """Record the answer to the currently proposed question, advance the
        stopping check, and return its decision."""
        if self._decision.stop:
            raise SessionStoppedError(f"session stopped ({self._decision.reason})")
        if value not in VALID_ANSWERS:
            raise ValueError(f"answer must be one of {VALID_ANSWERS}, got {value!r}")
        try:
            index = self.bank.index_of(question_id)
        except KeyError:
            raise ValueError(f"unknown question id {question_id!r}") from None
        expected = self.next_question()
        if index != expected.index:
            raise PendingQuestionError(
                f"expected an answer to {expected.id!r}, got {question_id!r}"
            )
        score = self._pending_score
        self._responses[index] = int(value)
        self._asked.append(index)
        self._pending = None
        self._pending_score = None
        self._post_cache = None
        self._draw_cache = None
        self._decision = self._check_stop()
        record: dict[str, Any] = {
            "t": len(self._asked),
            "question_id": expected.id,
            "score_method": self.score_method,
            "score": score,
            "response": int(value),
            "class_posterior_top3": top_causes(self.classify().probs),
        }
        if self._decision.satisfied_fraction is not None:
            record["stop_fraction"] = self._decision.satisfied_fraction
        self._records.append(record)
        return self._decision

    def _check_stop(self) -> StopDecision:
        if self.rule.kind == PREDICTIVE:
            probs: np.ndarray | None = self._draw_post()
        elif self.rule.kind == POINT:
            probs = self._point_post()
        else:
            probs = None
        return should_stop(self.rule, len(self._asked), probs, self.eligible())

    # -- outcomes ---------------------------------------------------------

    def classify(self) -> Classification:
        """Current cause call. Uses the posterior draws when the session
        holds them (modal cause, draw-averaged probabilities), otherwise the
        point-estimate argmax; ties break toward the lowest cause."""
        if self.draws is not None:
            draw_probs = self._draw_post()
            return Classification(
                cause=modal_cause(draw_probs),
                probs=draw_probs.mean(axis=0),
                method="modal_draw",
            )
        probs = self._point_post()
        return Classification(
            cause=int(probs.argmax()) + 1, probs=probs.copy(), method="point"
        )

    def transcript(self) -> list[dict[str, Any]]:
        """One JSON-ready record per answered step, in interview order. The
        ``score`` field is the selected question's (penalized) score at issue
        time, null under the static strategy."""
        return list(self._records)


def start_session(
    model: PosteriorModel,
    config: SessionConfig,
    *,
    params: ParameterPoint | None = None,
) -> Session:
    """Begin an interview; a plain constructor alias kept for call sites that
    read better as an action."""
    return Session(model, config, params=params)
