"""Experiment harness: accuracy curves, stopping-rule tables, per-cause
breakdowns, and k-fold cross-validation, from one JSON-shaped config.

The engine exploits that question selection never depends on the stopping
rule: each (death, strategy) pair runs a single capped-length session whose
per-step snapshots (point top-two probabilities, per-draw threshold-event
fractions, classification) are then scanned once per configured rule. Curves
and stopping tables therefore share trajectories.

Point-threshold rules are scanned on the trajectories of the arm named
``active_point``; predictive rules on those of ``active_predictive``. Those
arms are added with default settings when the strategy list omits them.

Every random quantity derives from the experiment seed through named
substreams, so a config reproduces its results bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, IO, Mapping, Sequence

import numpy as np

from vaq._kernels import BACKEND
from vaq.bank import QuestionBank
from vaq.data import TrainingDataset
from vaq.datagen import (
    CorrectSpec,
    MisspecSpec,
    NoiseSpec,
    gen_correct,
    gen_misspecified,
)
from vaq.io import hyperparameters_from_config, load_bank, load_binary_dataset
from vaq.model import (
    ParameterPoint,
    PosteriorModel,
    fit,
    modal_cause,
    sample_draws,
)
from vaq.session import (
    ACTIVE_POINT,
    ACTIVE_PREDICTIVE,
    STATIC,
    Session,
    SessionConfig,
    metric_from_config,
)
from vaq.stopping import (
    POINT,
    PREDICTIVE,
    StoppingRule,
    _event_fraction,
    threshold_pair,
)

ORACLE = "oracle"

# Substream tags for seed derivation.
_DATA_STREAM = 0
_DRAW_STREAM = 1
_NOISE_STREAM = 2
_FOLD_STREAM = 3


def derive_seed(root: int, *parts: int) -> int:
    """Independent child seed for a named substream of ``root``."""
    seq = np.random.SeedSequence([root, *parts])
    return int(seq.generate_state(1, np.uint64)[0])


# -- configuration ---------------------------------------------------------


@dataclass(frozen=True)
class StrategyArm:
    """One question-selection arm of an experiment. ``oracle`` runs point
    selection at the generator's true parameters when available."""

    name: str
    strategy: str
    penalty_weight: float = 0.0
    metric: Any = None
    question_order: tuple[int, ...] | None = None
    shared_yhat: bool = False

    def __post_init__(self) -> None:
        if self.strategy not in (ACTIVE_POINT, ACTIVE_PREDICTIVE, STATIC, ORACLE):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def _arm_from_config(entry: Any) -> StrategyArm:
    if isinstance(entry, str):
        name = STATIC if entry == "static_order" else entry
        return StrategyArm(name=name, strategy=name)
    strategy = entry.get("strategy", entry.get("name"))
    if strategy == "static_order":
        strategy = STATIC
    order = entry.get("question_order")
    return StrategyArm(
        name=entry.get("name", strategy),
        strategy=strategy,
        penalty_weight=float(entry.get("penalty_weight", entry.get("lambda", 0.0))),
        metric=entry.get("metric"),
        question_order=None if order is None else tuple(int(j) for j in order),
        shared_yhat=bool(entry.get("shared_yhat", False)),
    )


@dataclass(frozen=True)
class RuleRow:
    """One stopping-table row: a concrete rule plus its grid coordinates."""

    p1st: float
    d: float
    kind: str
    r: float | None
    p2nd: float
    max_length: int

    @property
    def label(self) -> str:
        if self.kind == POINT:
            return "point"
        return f"predictive_r{self.r:g}"


@dataclass(frozen=True)
class RuleGrid:
    """Cartesian rule grid: every (p1st, d) pair crossed with the point rule
    and/or the predictive rule at each tolerance in ``r``."""

    p1st: tuple[float, ...]
    d: tuple[float, ...]
    kinds: tuple[str, ...] = (POINT, PREDICTIVE)
    r: tuple[float, ...] = (0.5, 0.7)

    def __post_init__(self) -> None:
        if not self.p1st or not self.d or not self.kinds:
            raise ValueError("rule grid axes must be non-empty")
        bad = set(self.kinds) - {POINT, PREDICTIVE}
        if bad:
            raise ValueError(f"unknown rule kinds in grid: {sorted(bad)}")
        if PREDICTIVE in self.kinds and not self.r:
            raise ValueError("predictive rules need at least one r value")

    @classmethod
    def from_config(cls, obj: Mapping[str, Any]) -> "RuleGrid":
        grid = cls(
            p1st=tuple(float(v) for v in obj["p1st"]),
            d=tuple(float(v) for v in obj.get("d", [0.0])),
            kinds=tuple(obj.get("kinds", (POINT, PREDICTIVE))),
            r=tuple(float(v) for v in obj.get("r", (0.5, 0.7))),
        )
        return grid

    def rows(self, num_causes: int, max_length: int) -> list[RuleRow]:
        out = []
        for p1 in self.p1st:
            for dd in self.d:
                p2 = threshold_pair(p1, dd, num_causes)
                for kind in self.kinds:
                    if kind == POINT:
                        out.append(RuleRow(p1, dd, POINT, None, p2, max_length))
                    else:
                        for rv in self.r:
                            out.append(
                                RuleRow(p1, dd, PREDICTIVE, rv, p2, max_length)
                            )
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one run needs. Build from JSON via :meth:`from_dict`.

    Exactly one data source applies: a generator name (synthetic mode, with
    ``replications`` independent train/test draws) or a dataset path plus
    ``folds`` (cross-validation mode).
    """

    seed: int
    num_draws: int
    generator: str | None = None
    generator_options: Mapping[str, Any] | None = None
    n_train: int = 200
    n_test: int = 200
    replications: int = 1
    dataset_path: str | None = None
    bank_path: str | None = None
    labels_path: str | None = None
    folds: int | None = None
    strategies: tuple[StrategyArm, ...] = (StrategyArm(ACTIVE_POINT, ACTIVE_POINT),)
    rule_grid: RuleGrid | None = None
    max_length: int | None = None
    noise: Mapping[str, Any] | None = None
    hyper: Mapping[str, Any] | None = None
    transcripts: bool = True
    raw: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if (self.generator is None) == (self.dataset_path is None):
            raise ValueError("configure exactly one of generator or dataset")
        if self.generator is not None and self.generator not in (
            "correct",
            "misspecified",
        ):
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.dataset_path is not None and (self.folds is None or self.folds < 2):
            raise ValueError("dataset mode requires folds >= 2")
        if self.generator is not None and (self.n_train < 1 or self.n_test < 1):
            raise ValueError("n_train and n_test must be positive")
        if self.replications < 1:
            raise ValueError("replications must be positive")
        if self.num_draws < 1:
            raise ValueError("num_draws must be positive")
        if not self.strategies:
            raise ValueError("at least one strategy arm is required")
        names = [arm.name for arm in self.strategies]
        if len(set(names)) != len(names):
            raise ValueError("strategy arm names must be unique")

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "ExperimentConfig":
        arms = tuple(_arm_from_config(e) for e in obj.get("strategies", ["active_point"]))
        grid = obj.get("rule_grid")
        return cls(
            seed=int(obj.get("seed", 0)),
            num_draws=int(obj.get("num_draws", obj.get("B", 200))),
            generator=obj.get("generator"),
            generator_options=obj.get("generator_options"),
            n_train=int(obj.get("n_train", 200)),
            n_test=int(obj.get("n_test", 200)),
            replications=int(obj.get("replications", 1)),
            dataset_path=obj.get("dataset"),
            bank_path=obj.get("bank"),
            labels_path=obj.get("labels"),
            folds=None if obj.get("folds") is None else int(obj["folds"]),
            strategies=arms,
            rule_grid=None if grid is None else RuleGrid.from_config(grid),
            max_length=None if obj.get("max_length") is None else int(obj["max_length"]),
            noise=obj.get("noise"),
            hyper=obj.get("hyperparameters"),
            transcripts=bool(obj.get("transcripts", True)),
            raw=dict(obj),
        )


def _correct_spec(options: Mapping[str, Any] | None) -> CorrectSpec:
    if not options:
        return CorrectSpec.default()
    if "beta_groups" in options:
        return CorrectSpec.from_groups(
            num_questions=int(options["num_questions"]),
            alpha=np.asarray(options["alpha"], dtype=np.float64),
            groups=[
                ((int(lo), int(hi)), (float(a), float(b)))
                for (lo, hi), (a, b) in options["beta_groups"]
            ],
        )
    return CorrectSpec(
        num_questions=int(options["num_questions"]),
        alpha=np.asarray(options["alpha"], dtype=np.float64),
        theta_a=np.asarray(options["theta_a"], dtype=np.float64),
        theta_b=np.asarray(options["theta_b"], dtype=np.float64),
    )


def _misspec_spec(options: Mapping[str, Any] | None) -> MisspecSpec:
    options = options or {}
    return MisspecSpec(
        num_causes=int(options.get("num_causes", 10)),
        num_questions=int(options.get("num_questions", 50)),
        num_classes=int(options.get("num_classes", 3)),
    )


# -- results ---------------------------------------------------------------


@dataclass
class CurveResult:
    """Pooled accuracy-by-length curves: ``accuracy[arm][t-1]`` is the
    fraction of test deaths classified correctly after t answers."""

    max_steps: int
    samples: int
    accuracy: dict[str, np.ndarray]


@dataclass(frozen=True)
class StoppingRow:
    p1st: float
    d: float
    rule: str
    r: float | None
    samples: int
    accuracy: float
    median_length: float
    length_p5: float
    length_p95: float


@dataclass
class StoppingResult:
    rows: list[StoppingRow]


@dataclass(frozen=True)
class PerCauseRow:
    p1st: float
    d: float
    rule: str
    r: float | None
    cause: int
    cause_label: str
    samples: int
    accuracy: float
    median_length: float


@dataclass
class PerCauseResult:
    rows: list[PerCauseRow]


def nearest_rank(sorted_values: np.ndarray, fraction: float) -> float:
    """Nearest-rank percentile: the ceil(fraction * n)-th smallest value."""
    n = len(sorted_values)
    if n == 0:
        raise ValueError("no values to take a percentile of")
    rank = max(1, math.ceil(fraction * n))
    return float(sorted_values[rank - 1])


# -- trajectory capture ----------------------------------------------------


@dataclass
class _Trajectory:
    """Per-step snapshots of one capped session."""

    true_cause: int
    questions: list[int]
    cause_at: list[int]
    top1: list[float]
    top2: list[float]
    fractions: dict[tuple[float, float], list[float]]


def _run_trajectory(
    model: PosteriorModel,
    arm: StrategyArm,
    responses_row: np.ndarray,
    true_cause: int,
    cap: int,
    cfg: ExperimentConfig,
    pairs: Sequence[tuple[float, float]],
    noise: NoiseSpec | None,
    noise_rng: np.random.Generator | None,
    shared_draws,
    oracle_params: ParameterPoint | None,
) -> tuple[_Trajectory, Session]:
    wants_draws = arm.strategy == ACTIVE_PREDICTIVE
    session_cfg = SessionConfig(
        strategy=ACTIVE_POINT if arm.strategy == ORACLE else arm.strategy,
        rule=StoppingRule.fixed_length(cap),
        num_draws=cfg.num_draws,
        seed=derive_seed(cfg.seed, _DRAW_STREAM),
        penalty_weight=arm.penalty_weight,
        metric=metric_from_config(arm.metric, model.bank),
        question_order=arm.question_order,
        shared_yhat=arm.shared_yhat,
    )
    session = Session(
        model,
        session_cfg,
        params=oracle_params if arm.strategy == ORACLE else None,
        draws=shared_draws if wants_draws else None,
    )
    traj = _Trajectory(
        true_cause=true_cause,
        questions=[],
        cause_at=[],
        top1=[],
        top2=[],
        fractions={pair: [] for pair in (pairs if wants_draws else ())},
    )
    while not session.stopped:
        question = session.next_question()
        previous = session.asked[-1] if session.asked else None
        value = int(responses_row[question.index])
        if noise is not None:
            value = noise.corrupt(value, previous, question.index, noise_rng)
        session.record_response(question.id, value)
        traj.questions.append(question.index)
        if wants_draws:
            draw_probs = session.draw_posteriors()
            modal = modal_cause(draw_probs)
            traj.cause_at.append(modal)
            for pair in pairs:
                traj.fractions[pair].append(
                    _event_fraction(draw_probs, modal - 1, pair[0], pair[1])
                )
        else:
            post = session.posterior()
            pair_top = np.partition(post, -2)[-2:]
            traj.cause_at.append(int(post.argmax()) + 1)
            traj.top1.append(float(pair_top[1]))
            traj.top2.append(float(pair_top[0]))
    return traj, session


def _scan_rule(row: RuleRow, traj: _Trajectory) -> tuple[int, bool]:
    """Stop length and correctness of one rule on one trajectory."""
    steps = len(traj.questions)
    horizon = min(row.max_length, steps)
    if row.kind == POINT:
        met = [
            traj.top1[t] > row.p1st and traj.top2[t] < row.p2nd
            for t in range(horizon)
        ]
    else:
        fractions = traj.fractions[(row.p1st, row.p2nd)]
        met = [fractions[t] >= row.r for t in range(horizon)]
    try:
        length = met.index(True) + 1
    except ValueError:
        length = horizon
    return length, traj.cause_at[length - 1] == traj.true_cause


# -- the engine ------------------------------------------------------------


class _TranscriptWriter:
    """Streams per-step transcript records as JSON lines."""

    def __init__(self, fh: IO[str]):
        self.fh = fh

    def write(self, identity: Mapping[str, Any], session: Session) -> None:
        for record in session.transcript():
            json.dump({**identity, **record}, self.fh)
            self.fh.write("\n")


@dataclass
class _Accumulator:
    """Pools per-death outcomes across replications or folds."""

    cap: int
    arms: tuple[StrategyArm, ...]
    rows: list[RuleRow]
    curve_hits: dict[str, np.ndarray] = field(init=False)
    curve_n: int = 0
    outcomes: dict[int, list[tuple[int, int, bool]]] = field(init=False)

    def __post_init__(self) -> None:
        self.curve_hits = {
            arm.name: np.zeros(self.cap, dtype=np.int64) for arm in self.arms
        }
        self.outcomes = {i: [] for i in range(len(self.rows))}

    def add_curve(self, arm: StrategyArm, traj: _Trajectory) -> None:
        hits = self.curve_hits[arm.name]
        last = len(traj.cause_at) - 1
        for t in range(self.cap):
            if traj.cause_at[min(t, last)] == traj.true_cause:
                hits[t] += 1

    def add_rules(self, indices: Sequence[int], traj: _Trajectory) -> None:
        for i in indices:
            length, correct = _scan_rule(self.rows[i], traj)
            self.outcomes[i].append((traj.true_cause, length, correct))

    def curve_result(self) -> CurveResult:
        accuracy = {
            name: hits / self.curve_n for name, hits in self.curve_hits.items()
        }
        return CurveResult(max_steps=self.cap, samples=self.curve_n, accuracy=accuracy)

    def stopping_result(self) -> StoppingResult:
        out = []
        for i, row in enumerate(self.rows):
            recs = self.outcomes[i]
            lengths = np.sort(np.array([length for _, length, _ in recs]))
            correct = np.array([c for _, _, c in recs])
            out.append(
                StoppingRow(
                    p1st=row.p1st,
                    d=row.d,
                    rule=row.kind,
                    r=row.r,
                    samples=len(recs),
                    accuracy=float(correct.mean()),
                    median_length=nearest_rank(lengths, 0.5),
                    length_p5=nearest_rank(lengths, 0.05),
                    length_p95=nearest_rank(lengths, 0.95),
                )
            )
        return StoppingResult(rows=out)

    def per_cause_result(self, cause_labels: Sequence[str]) -> PerCauseResult:
        out = []
        for i, row in enumerate(self.rows):
            recs = self.outcomes[i]
            for y in range(1, len(cause_labels) + 1):
                sub = [(length, c) for cause, length, c in recs if cause == y]
                if not sub:
                    continue
                lengths = np.sort(np.array([length for length, _ in sub]))
                out.append(
                    PerCauseRow(
                        p1st=row.p1st,
                        d=row.d,
                        rule=row.kind,
                        r=row.r,
                        cause=y,
                        cause_label=cause_labels[y - 1],
                        samples=len(sub),
                        accuracy=float(np.mean([c for _, c in sub])),
                        median_length=nearest_rank(lengths, 0.5),
                    )
                )
        return PerCauseResult(rows=out)


def _resolve_arms(
    cfg: ExperimentConfig, rows: list[RuleRow]
) -> tuple[tuple[StrategyArm, ...], dict[str, list[int]]]:
    """Final arm list plus, per arm name, the rule-row indices it serves."""
    arms = {arm.name: arm for arm in cfg.strategies}
    assignments: dict[str, list[int]] = {name: [] for name in arms}
    for i, row in enumerate(rows):
        name = ACTIVE_POINT if row.kind == POINT else ACTIVE_PREDICTIVE
        if name not in arms:
            arms[name] = StrategyArm(name=name, strategy=name)
            assignments[name] = []
        assignments[name].append(i)
    return tuple(arms.values()), assignments


def stratified_folds(
    causes: np.ndarray, k: int, seed: int
) -> tuple[np.ndarray, list[str]]:
    """Fold id per row, stratified by cause. A cause with fewer rows than k
    cannot be stratified and falls back to uniform assignment (warned)."""
    rng = np.random.default_rng(seed)
    fold = np.empty(len(causes), dtype=np.int64)
    notes: list[str] = []
    for y in np.unique(causes):
        members = np.flatnonzero(causes == y)
        if len(members) < k:
            note = (
                f"cause {int(y)} has {len(members)} rows, fewer than {k} folds; "
                "assigned unstratified"
            )
            warnings.warn(note)
            notes.append(note)
            fold[members] = rng.integers(0, k, size=len(members))
        else:
            fold[rng.permutation(members)] = np.arange(len(members)) % k
    return fold, notes


def _run_block(
    model: PosteriorModel,
    test: TrainingDataset,
    death_ids: Sequence[int],
    block_id: int,
    block_key: str,
    cfg: ExperimentConfig,
    arms: tuple[StrategyArm, ...],
    assignments: dict[str, list[int]],
    pairs: list[tuple[float, float]],
    cap: int,
    acc: _Accumulator,
    noise: NoiseSpec | None,
    oracle_params: ParameterPoint | None,
    writer: _TranscriptWriter | None,
) -> None:
    """Run every arm over one test block (a replication or a fold)."""
    shared_draws = None
    if any(arm.strategy == ACTIVE_PREDICTIVE for arm in arms):
        shared_draws = sample_draws(
            model, cfg.num_draws, derive_seed(cfg.seed, _DRAW_STREAM, block_id)
        )
    for arm_index, arm in enumerate(arms):
        for pos in range(test.n):
            noise_rng = (
                np.random.default_rng(
                    derive_seed(
                        cfg.seed, _NOISE_STREAM, block_id, arm_index, death_ids[pos]
                    )
                )
                if noise is not None
                else None
            )
            traj, session = _run_trajectory(
                model,
                arm,
                test.responses[pos],
                int(test.causes[pos]),
                cap,
                cfg,
                pairs,
                noise,
                noise_rng,
                shared_draws,
                oracle_params,
            )
            acc.add_curve(arm, traj)
            acc.add_rules(assignments.get(arm.name, ()), traj)
            if writer is not None:
                writer.write(
                    {
                        block_key: block_id,
                        "arm": arm.name,
                        "death": death_ids[pos],
                        "true_cause": traj.true_cause,
                    },
                    session,
                )


def _execute(
    cfg: ExperimentConfig,
    dataset: TrainingDataset | None = None,
    writer: _TranscriptWriter | None = None,
) -> tuple[CurveResult, StoppingResult, PerCauseResult, dict[str, Any]]:
    """Run the full experiment described by ``cfg``; the core behind every
    public entry point."""
    notes: list[str] = []
    spec_c: CorrectSpec | None = None
    spec_m: MisspecSpec | None = None
    if cfg.generator == "correct":
        spec_c = _correct_spec(cfg.generator_options)
        num_causes, num_questions = spec_c.num_causes, spec_c.num_questions
        cause_labels = tuple(f"cause_{y}" for y in range(1, num_causes + 1))
    elif cfg.generator == "misspecified":
        spec_m = _misspec_spec(cfg.generator_options)
        num_causes, num_questions = spec_m.num_causes, spec_m.num_questions
        cause_labels = tuple(f"cause_{y}" for y in range(1, num_causes + 1))
    else:
        if dataset is None:
            bank = load_bank(cfg.bank_path) if cfg.bank_path else None
            labels = None
            if cfg.labels_path:
                with open(cfg.labels_path, "r", encoding="utf-8") as fh:
                    labels = json.load(fh)
            dataset = load_binary_dataset(cfg.dataset_path, bank, labels)
        if dataset.n < cfg.folds:
            raise ValueError("dataset has fewer rows than folds")
        num_causes, num_questions = dataset.num_causes, dataset.num_questions
        cause_labels = dataset.cause_labels

    cap = min(cfg.max_length or num_questions, num_questions)
    rows = (
        cfg.rule_grid.rows(num_causes, cap) if cfg.rule_grid is not None else []
    )
    arms, assignments = _resolve_arms(cfg, rows)
    # The oracle arm needs the generator's true parameter point, which only
    # the well-specified generator produces.
    if cfg.generator != "correct" and any(a.strategy == ORACLE for a in arms):
        note = "oracle arm dropped: no true parameter point available"
        warnings.warn(note)
        notes.append(note)
        arms = tuple(a for a in arms if a.strategy != ORACLE)
        if not arms:
            raise ValueError("no runnable strategy arms remain")
    pairs = sorted({(row.p1st, row.p2nd) for row in rows if row.kind == PREDICTIVE})
    noise = None
    if cfg.noise is not None:
        noise_bank = (
            dataset.bank if dataset is not None else QuestionBank.default(num_questions)
        )
        noise = NoiseSpec(
            metric=metric_from_config(cfg.noise.get("metric", "index"), noise_bank),
            scale=float(cfg.noise["scale"]),
        )
    hyper = hyperparameters_from_config(cfg.hyper, num_causes)

    acc = _Accumulator(cap=cap, arms=arms, rows=rows)

    if cfg.generator is not None:
        total = cfg.n_train + cfg.n_test
        for rep in range(cfg.replications):
            data_seed = derive_seed(cfg.seed, _DATA_STREAM, rep)
            if spec_c is not None:
                oracle_params, full = gen_correct(spec_c, total, data_seed)
            else:
                _, full = gen_misspecified(spec_m, total, data_seed)
                oracle_params = None
            train = full.subset(np.arange(cfg.n_train))
            test = full.subset(np.arange(cfg.n_train, total))
            model = fit(train, hyper)
            _run_block(
                model,
                test,
                list(range(cfg.n_test)),
                rep,
                "replication",
                cfg,
                arms,
                assignments,
                pairs,
                cap,
                acc,
                noise,
                oracle_params,
                writer,
            )
            acc.curve_n += cfg.n_test
    else:
        fold_of, fold_notes = stratified_folds(
            dataset.causes, cfg.folds, derive_seed(cfg.seed, _FOLD_STREAM)
        )
        notes.extend(fold_notes)
        for fold in range(cfg.folds):
            test_rows = np.flatnonzero(fold_of == fold)
            train_rows = np.flatnonzero(fold_of != fold)
            if not len(test_rows):
                continue
            model = fit(dataset.subset(train_rows), hyper)
            _run_block(
                model,
                dataset.subset(test_rows),
                [int(i) for i in test_rows],
                fold,
                "fold",
                cfg,
                arms,
                assignments,
                pairs,
                cap,
                acc,
                noise,
                None,
                writer,
            )
            acc.curve_n += len(test_rows)

    meta = {
        "backend": BACKEND,
        "num_causes": num_causes,
        "num_questions": num_questions,
        "cause_labels": list(cause_labels),
        "arms": [arm.name for arm in arms],
        "max_length": cap,
        "notes": notes,
    }
    return (
        acc.curve_result(),
        acc.stopping_result(),
        acc.per_cause_result(cause_labels),
        meta,
    )


def _as_config(cfg: ExperimentConfig | Mapping[str, Any]) -> ExperimentConfig:
    if isinstance(cfg, ExperimentConfig):
        return cfg
    return ExperimentConfig.from_dict(cfg)


def fixed_length_curve(cfg: ExperimentConfig | Mapping[str, Any]) -> CurveResult:
    """Accuracy-by-question-count curves for every configured arm."""
    curve, _, _, _ = _execute(_as_config(cfg))
    return curve


def stopping_experiment(cfg: ExperimentConfig | Mapping[str, Any]) -> StoppingResult:
    """Stopping-rule table over the configured rule grid."""
    config = _as_config(cfg)
    if config.rule_grid is None:
        raise ValueError("stopping_experiment needs a rule_grid")
    _, stopping, _, _ = _execute(config)
    return stopping


def kfold_cv(
    dataset: TrainingDataset, k: int, cfg: ExperimentConfig | Mapping[str, Any]
) -> tuple[CurveResult, StoppingResult, PerCauseResult]:
    """Stratified k-fold cross-validation of an in-memory dataset."""
    if k < 2:
        raise ValueError("folds must be at least 2")
    base = _as_config(cfg)
    config = replace(
        base,
        generator=None,
        generator_options=None,
        dataset_path="<memory>",
        folds=int(k),
    )
    curve, stopping, per_cause, _ = _execute(config, dataset=dataset)
    return curve, stopping, per_cause


# -- file outputs ----------------------------------------------------------


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])


def run_experiment(
    cfg: ExperimentConfig | Mapping[str, Any], out_dir: str | Path
) -> dict[str, Path]:
    """Execute a config and write its result files into ``out_dir``.

    Emits curve.csv (plot data), stopping.csv and per_cause.csv (when a rule
    grid is configured), transcripts.jsonl (unless disabled), and
    metadata.json. Identical config and seed produce byte-identical files.
    """
    config = _as_config(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    writer = None
    transcript_fh = None
    if config.transcripts:
        paths["transcripts"] = out / "transcripts.jsonl"
        transcript_fh = open(paths["transcripts"], "w", encoding="utf-8")
        writer = _TranscriptWriter(transcript_fh)
    try:
        curve, stopping, per_cause, meta = _execute(config, writer=writer)
    finally:
        if transcript_fh is not None:
            transcript_fh.close()

    paths["curve"] = out / "curve.csv"
    curve_rows = []
    for name in sorted(curve.accuracy):
        for t in range(curve.max_steps):
            curve_rows.append([t + 1, name, float(curve.accuracy[name][t])])
    _write_csv(paths["curve"], ["t", "strategy", "accuracy"], curve_rows)

    if config.rule_grid is not None:
        paths["stopping"] = out / "stopping.csv"
        _write_csv(
            paths["stopping"],
            ["p1st", "d", "rule", "r", "n", "accuracy", "median_length",
             "length_p5", "length_p95"],
            [
                [row.p1st, row.d, row.rule, row.r, row.samples, row.accuracy,
                 row.median_length, row.length_p5, row.length_p95]
                for row in stopping.rows
            ],
        )
        paths["per_cause"] = out / "per_cause.csv"
        _write_csv(
            paths["per_cause"],
            ["p1st", "d", "rule", "r", "cause", "cause_label", "n", "accuracy",
             "median_length"],
            [
                [row.p1st, row.d, row.rule, row.r, row.cause, row.cause_label,
                 row.samples, row.accuracy, row.median_length]
                for row in per_cause.rows
            ],
        )

    paths["metadata"] = out / "metadata.json"
    with open(paths["metadata"], "w", encoding="utf-8") as fh:
        json.dump({"config": config.raw, **meta}, fh, indent=2)
        fh.write("\n")
    return paths
