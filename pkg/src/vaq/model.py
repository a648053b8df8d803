"""Conjugate naive-Bayes cause-of-death model.

The classifier assumes symptoms are conditionally independent given the
cause: a Dirichlet prior over cause prevalence and independent Beta priors
over each per-cause Bernoulli response probability, so fitting reduces to
count arithmetic and the posterior factorizes cell by cell.

Randomness contract: all sampling uses ``numpy.random.default_rng`` (PCG64)
with an explicit seed, and every stochastic function is a pure function of
its inputs and that seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from vaq import _kernels
from vaq.bank import QuestionBank
from vaq.data import MISSING, TrainingDataset


@dataclass
class Hyperparameters:
    """Prior settings: Dirichlet concentration ``alpha`` (length C) and
    per-cause Beta shape pairs ``a``, ``b`` (length C each)."""

    alpha: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        self.alpha = np.asarray(self.alpha, dtype=np.float64)
        self.a = np.asarray(self.a, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if not (self.alpha.ndim == self.a.ndim == self.b.ndim == 1):
            raise ValueError("hyperparameters must be 1-D vectors")
        if not (len(self.alpha) == len(self.a) == len(self.b)):
            raise ValueError("alpha, a, b must all have length C")
        for name, arr in (("alpha", self.alpha), ("a", self.a), ("b", self.b)):
            if not (arr > 0).all():
                raise ValueError(f"{name} entries must be strictly positive")

    @classmethod
    def uniform(cls, num_causes: int) -> "Hyperparameters":
        """Flat priors: alpha = 1, (a, b) = (1, 1) for every cause."""
        ones = np.ones(num_causes)
        return cls(alpha=ones.copy(), a=ones.copy(), b=ones.copy())


@dataclass
class ParameterPoint:
    """One concrete parameter set: prevalence ``pi`` (C,) on the simplex and
    response probabilities ``theta`` (C, J) strictly inside (0, 1)."""

    pi: np.ndarray
    theta: np.ndarray

    def __post_init__(self) -> None:
        self.pi = np.ascontiguousarray(self.pi, dtype=np.float64)
        self.theta = np.ascontiguousarray(self.theta, dtype=np.float64)
        if self.pi.ndim != 1 or self.theta.ndim != 2:
            raise ValueError("pi must be (C,), theta must be (C, J)")
        if self.theta.shape[0] != self.pi.shape[0]:
            raise ValueError("pi and theta disagree on the number of causes")
        if abs(self.pi.sum() - 1.0) > 1e-12:
            raise ValueError("pi must sum to 1")
        if not ((self.theta > 0.0) & (self.theta < 1.0)).all():
            raise ValueError("theta entries must lie strictly inside (0, 1)")

    @property
    def num_causes(self) -> int:
        return self.pi.shape[0]

    @property
    def num_questions(self) -> int:
        return self.theta.shape[1]

    @cached_property
    def log_pi(self) -> np.ndarray:
        return np.log(self.pi)

    @cached_property
    def log_theta(self) -> np.ndarray:
        return np.log(self.theta)

    @cached_property
    def log_comp(self) -> np.ndarray:
        return np.log1p(-self.theta)


@dataclass
class PosteriorModel:
    """Posterior parameters after fitting: Dirichlet counts over causes and a
    Beta pair per (cause, question) cell. Immutable once constructed."""

    dirichlet: np.ndarray
    beta_a: np.ndarray
    beta_b: np.ndarray
    bank: QuestionBank
    cause_labels: tuple[str, ...]
    hyper: Hyperparameters

    def __post_init__(self) -> None:
        self.dirichlet = np.asarray(self.dirichlet, dtype=np.float64)
        self.beta_a = np.asarray(self.beta_a, dtype=np.float64)
        self.beta_b = np.asarray(self.beta_b, dtype=np.float64)
        self.cause_labels = tuple(self.cause_labels)
        c, j = self.beta_a.shape
        if self.dirichlet.shape != (c,) or self.beta_b.shape != (c, j):
            raise ValueError("posterior parameter shapes disagree")
        if len(self.cause_labels) != c:
            raise ValueError("cause_labels length must equal C")
        if j != self.bank.size:
            raise ValueError("beta matrices must have one column per question")
        if (self.dirichlet <= 0).any() or (self.beta_a <= 0).any() or (self.beta_b <= 0).any():
            raise ValueError("posterior parameters must be strictly positive")

    @property
    def num_causes(self) -> int:
        return self.dirichlet.shape[0]

    @property
    def num_questions(self) -> int:
        return self.beta_a.shape[1]


@dataclass
class ParameterDraws:
    """B posterior parameter draws, stored stacked: ``pi`` (B, C) and
    ``theta`` (B, C, J), with the seed that produced them."""

    pi: np.ndarray
    theta: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        self.pi = np.ascontiguousarray(self.pi, dtype=np.float64)
        self.theta = np.ascontiguousarray(self.theta, dtype=np.float64)
        if self.pi.ndim != 2 or self.theta.ndim != 3:
            raise ValueError("pi must be (B, C), theta must be (B, C, J)")
        if self.theta.shape[:2] != self.pi.shape:
            raise ValueError("pi and theta disagree on (B, C)")
        if self.pi.shape[0] < 1:
            raise ValueError("at least one draw is required")

    def __len__(self) -> int:
        return self.pi.shape[0]

    @property
    def num_causes(self) -> int:
        return self.pi.shape[1]

    def point(self, b: int) -> ParameterPoint:
        """The b-th draw as a standalone parameter point."""
        return ParameterPoint(pi=self.pi[b].copy(), theta=self.theta[b].copy())

    @cached_property
    def log_pi(self) -> np.ndarray:
        return np.log(self.pi)

    @cached_property
    def log_theta(self) -> np.ndarray:
        return np.log(self.theta)

    @cached_property
    def log_comp(self) -> np.ndarray:
        return np.log1p(-self.theta)


def fit(data: TrainingDataset, hyper: Hyperparameters) -> PosteriorModel:
    """Conjugate update from labeled data.

    Per cause y: the Dirichlet count gains the number of rows with that cause;
    cell (y, j) gains its 1-count on the Beta a side and its 0-count on the
    b side. Missing responses contribute to neither count.
    """
    c = data.num_causes
    if len(hyper.alpha) != c:
        raise ValueError(
            f"hyperparameters are for {len(hyper.alpha)} causes, data has {c}"
        )
    dirichlet = hyper.alpha.copy()
    beta_a = np.tile(hyper.a[:, None], (1, data.num_questions)).astype(np.float64)
    beta_b = np.tile(hyper.b[:, None], (1, data.num_questions)).astype(np.float64)
    for y in range(1, c + 1):
        rows = data.responses[data.causes == y]
        dirichlet[y - 1] += rows.shape[0]
        beta_a[y - 1] += (rows == 1).sum(axis=0)
        beta_b[y - 1] += (rows == 0).sum(axis=0)
    return PosteriorModel(
        dirichlet=dirichlet,
        beta_a=beta_a,
        beta_b=beta_b,
        bank=data.bank,
        cause_labels=data.cause_labels,
        hyper=hyper,
    )


def posterior_mean(model: PosteriorModel) -> ParameterPoint:
    """Posterior-mean parameters: Dirichlet and per-cell Beta means."""
    pi = model.dirichlet / model.dirichlet.sum()
    theta = model.beta_a / (model.beta_a + model.beta_b)
    return ParameterPoint(pi=pi, theta=theta)


def sample_draws(model: PosteriorModel, num_draws: int, seed: int) -> ParameterDraws:
    """Independent posterior draws; identical (model, num_draws, seed) inputs
    reproduce bit-identical draws. Order: pi first, then theta."""
    if num_draws < 1:
        raise ValueError("num_draws must be at least 1")
    rng = np.random.default_rng(seed)
    pi = rng.dirichlet(model.dirichlet, size=num_draws)
    theta = rng.beta(
        model.beta_a, model.beta_b,
        size=(num_draws, model.num_causes, model.num_questions),
    )
    return ParameterDraws(pi=pi, theta=theta, seed=seed)


def split_responses(
    responses: Mapping[int, int], num_questions: int
) -> tuple[np.ndarray, np.ndarray]:
    """Validate a partial response map and split it into aligned index/value
    arrays (insertion order preserved). Missing answers carry no likelihood
    and are dropped here, so every consumer inherits that exclusion."""
    idx = np.fromiter(responses.keys(), dtype=np.int64, count=len(responses))
    vals = np.fromiter(responses.values(), dtype=np.int64, count=len(responses))
    if idx.size:
        if idx.min() < 0 or idx.max() >= num_questions:
            raise ValueError("response question index out of range")
        keep = np.isin(vals, (0, 1))
        bad = ~keep & (vals != MISSING)
        if bad.any():
            raise ValueError(
                f"response value must be 0, 1, or {MISSING}, got {vals[bad][0]}"
            )
        idx, vals = idx[keep], vals[keep]
    return idx, vals.astype(np.int8)


def class_posterior(params: ParameterPoint, responses: Mapping[int, int]) -> np.ndarray:
    """Class posterior given a partial response vector.

    Returns the (C,) normalized vector proportional to
    ``pi[y] * prod_j theta[y,j]^x_j (1-theta[y,j])^(1-x_j)`` over the answered
    questions; computed in log space with a max shift. An empty response set
    returns ``pi`` itself.
    """
    idx, vals = split_responses(responses, params.num_questions)
    if not idx.size:
        return params.pi.copy()
    return _kernels.class_posteriors(
        params.log_pi[None, :],
        params.log_theta[None, :, :],
        params.log_comp[None, :, :],
        idx,
        vals,
    )[0]


def class_posterior_draws(
    draws: ParameterDraws, responses: Mapping[int, int]
) -> tuple[np.ndarray, int]:
    """Per-draw class posteriors for a partial response vector.

    Returns the (B, C) matrix of posterior rows and the modal cause: the most
    frequent per-draw argmax, 1-based, ties broken toward the lowest cause.
    """
    idx, vals = split_responses(responses, draws.theta.shape[2])
    if not idx.size:
        probs = draws.pi.copy()
    else:
        probs = _kernels.class_posteriors(
            draws.log_pi, draws.log_theta, draws.log_comp, idx, vals
        )
    return probs, modal_cause(probs)


def modal_cause(draw_probs: np.ndarray) -> int:
    """Most frequent row argmax of a (B, C) posterior matrix, 1-based; ties in
    both the argmax and the vote count break toward the lowest cause."""
    winners = draw_probs.argmax(axis=1)
    counts = np.bincount(winners, minlength=draw_probs.shape[1])
    return int(counts.argmax()) + 1
