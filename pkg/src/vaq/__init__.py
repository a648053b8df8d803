"""Actively ordered diagnostic questionnaires with early stopping.

The package fits a conjugate naive-Bayes cause-of-death classifier to
binary symptom data, selects the next interview question by posterior-
weighted KL divergence (optionally averaged over posterior draws), and
stops the interview once a configurable posterior-threshold rule is
satisfied. An experiment harness reproduces the accuracy/length studies,
and :mod:`vaq.cli` / :mod:`vaq.service` expose the engine on the command
line and over HTTP.
"""

from vaq._kernels import BACKEND
from vaq.bank import Question, QuestionBank
from vaq.data import MISSING, TrainingDataset
from vaq.datagen import (
    CorrectSpec,
    LatentClassParams,
    MisspecSpec,
    NoiseSpec,
    apply_order_noise,
    draw_correct_params,
    draw_misspec_params,
    gen_correct,
    gen_misspecified,
    sample_dataset,
    sample_latent_dataset,
)
from vaq.harness import (
    ExperimentConfig,
    RuleGrid,
    StrategyArm,
    derive_seed,
    fixed_length_curve,
    kfold_cv,
    nearest_rank,
    run_experiment,
    stopping_experiment,
    stratified_folds,
)
from vaq.io import (
    hyperparameters_from_config,
    load_bank,
    load_binary_dataset,
    load_model,
    load_true_params,
    save_bank,
    save_dataset,
    save_model,
    save_true_params,
)
from vaq.model import (
    Hyperparameters,
    ParameterDraws,
    ParameterPoint,
    PosteriorModel,
    class_posterior,
    class_posterior_draws,
    fit,
    modal_cause,
    posterior_mean,
    sample_draws,
)
from vaq.selector import (
    DistanceMetric,
    ScoreVector,
    penalize,
    predictive_pwkl_score,
    pwkl_score,
    select_next,
)
from vaq.session import (
    ACTIVE_POINT,
    ACTIVE_PREDICTIVE,
    STATIC,
    Classification,
    PendingQuestionError,
    Session,
    SessionConfig,
    SessionStoppedError,
    default_session_config,
    merged_session_config,
    metric_from_config,
    session_config_from_dict,
    start_session,
    top_causes,
)
from vaq.stopping import (
    StopDecision,
    StoppingRule,
    point_rule_met,
    predictive_rule_met,
    rule_from_config,
    should_stop,
    threshold_pair,
)

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_POINT",
    "ACTIVE_PREDICTIVE",
    "BACKEND",
    "Classification",
    "CorrectSpec",
    "DistanceMetric",
    "ExperimentConfig",
    "Hyperparameters",
    "LatentClassParams",
    "MISSING",
    "MisspecSpec",
    "NoiseSpec",
    "ParameterDraws",
    "ParameterPoint",
    "PendingQuestionError",
    "PosteriorModel",
    "Question",
    "QuestionBank",
    "RuleGrid",
    "STATIC",
    "ScoreVector",
    "Session",
    "SessionConfig",
    "SessionStoppedError",
    "StopDecision",
    "StoppingRule",
    "StrategyArm",
    "TrainingDataset",
    "apply_order_noise",
    "class_posterior",
    "class_posterior_draws",
    "default_session_config",
    "derive_seed",
    "draw_correct_params",
    "draw_misspec_params",
    "fit",
    "fixed_length_curve",
    "gen_correct",
    "gen_misspecified",
    "hyperparameters_from_config",
    "kfold_cv",
    "load_bank",
    "load_binary_dataset",
    "load_model",
    "load_true_params",
    "merged_session_config",
    "metric_from_config",
    "modal_cause",
    "nearest_rank",
    "penalize",
    "point_rule_met",
    "posterior_mean",
    "predictive_pwkl_score",
    "predictive_rule_met",
    "pwkl_score",
    "rule_from_config",
    "run_experiment",
    "sample_dataset",
    "sample_draws",
    "sample_latent_dataset",
    "save_bank",
    "save_dataset",
    "save_model",
    "save_true_params",
    "select_next",
    "session_config_from_dict",
    "should_stop",
    "start_session",
    "stopping_experiment",
    "stratified_folds",
    "threshold_pair",
    "top_causes",
]
