"""Synthetic data generators.

Two generating processes: one inside the model family (parameters drawn from
the same conjugate priors the classifier assumes) and a latent-class process
outside it (each cause is a mixture over hidden response profiles, so the
conditional-independence assumption is wrong). Both are driven by an explicit
generator so a seed pins every dataset bit for bit.

``NoiseSpec`` models order-induced answer corruption: an answer is flipped
with probability proportional to the distance from the previously asked
question, and the first question of an interview is never corrupted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from vaq.bank import QuestionBank
from vaq.data import MISSING, TrainingDataset
from vaq.model import ParameterPoint
from vaq.selector import DistanceMetric


def default_cause_labels(num_causes: int) -> tuple[str, ...]:
    return tuple(f"cause_{y}" for y in range(1, num_causes + 1))


@dataclass(frozen=True)
class CorrectSpec:
    """Well-specified generator settings.

    ``alpha`` is the Dirichlet concentration for the prevalence draw;
    ``theta_a``/``theta_b`` give one Beta shape pair per cause, shared by all
    of that cause's questions.
    """

    num_questions: int
    alpha: np.ndarray
    theta_a: np.ndarray
    theta_b: np.ndarray

    def __post_init__(self) -> None:
        for name in ("alpha", "theta_a", "theta_b"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, arr)
            if arr.ndim != 1 or (arr <= 0).any():
                raise ValueError(f"{name} must be a 1-D positive vector")
        if not (len(self.alpha) == len(self.theta_a) == len(self.theta_b)):
            raise ValueError("alpha, theta_a and theta_b must share a length")
        if self.num_questions < 1:
            raise ValueError("num_questions must be positive")

    @property
    def num_causes(self) -> int:
        return len(self.alpha)

    @classmethod
    def from_groups(
        cls,
        num_questions: int,
        alpha: np.ndarray,
        groups: Sequence[tuple[tuple[int, int], tuple[float, float]]],
    ) -> "CorrectSpec":
        """Spec from cause-range groups: each entry maps an inclusive 1-based
        cause range to a Beta shape pair. The ranges must partition 1..C."""
        num_causes = len(np.asarray(alpha))
        theta_a = np.zeros(num_causes)
        theta_b = np.zeros(num_causes)
        covered: set[int] = set()
        for (lo, hi), (a, b) in groups:
            span = set(range(lo, hi + 1))
            if not span or span & covered or not span <= set(range(1, num_causes + 1)):
                raise ValueError("cause ranges must partition 1..C")
            covered |= span
            theta_a[lo - 1 : hi] = a
            theta_b[lo - 1 : hi] = b
        if len(covered) != num_causes:
            raise ValueError("cause ranges must partition 1..C")
        return cls(
            num_questions=num_questions, alpha=alpha, theta_a=theta_a, theta_b=theta_b
        )

    @classmethod
    def default(cls) -> "CorrectSpec":
        """Ten causes over fifty questions with three response regimes:
        causes 1-3 draw sharp Beta(0.5, 0.5) response rates, causes 4-6
        diffuse Beta(3, 3), causes 7-10 rare-leaning Beta(1, 3)."""
        return cls.from_groups(
            num_questions=50,
            alpha=np.ones(10),
            groups=[
                ((1, 3), (0.5, 0.5)),
                ((4, 6), (3.0, 3.0)),
                ((7, 10), (1.0, 3.0)),
            ],
        )


def draw_correct_params(spec: CorrectSpec, rng: np.random.Generator) -> ParameterPoint:
    """One true parameter set from the generator's priors (prevalence first,
    then the response matrix)."""
    pi = rng.dirichlet(spec.alpha)
    theta = rng.beta(
        spec.theta_a[:, None],
        spec.theta_b[:, None],
        size=(spec.num_causes, spec.num_questions),
    )
    return ParameterPoint(pi=pi, theta=theta)


def sample_dataset(
    params: ParameterPoint,
    n: int,
    rng: np.random.Generator,
    bank: QuestionBank | None = None,
    cause_labels: tuple[str, ...] | None = None,
) -> TrainingDataset:
    """Draw ``n`` respondents from a concrete parameter point: causes from
    the prevalence vector, then answers cell-wise from the response matrix.
    No answers are missing."""
    if n < 1:
        raise ValueError("n must be positive")
    causes = rng.choice(params.num_causes, size=n, p=params.pi) + 1
    probs = params.theta[causes - 1]
    responses = (rng.random((n, params.num_questions)) < probs).astype(np.int8)
    return TrainingDataset(
        bank=bank if bank is not None else QuestionBank.default(params.num_questions),
        responses=responses,
        causes=causes,
        cause_labels=cause_labels or default_cause_labels(params.num_causes),
    )


@dataclass(frozen=True)
class LatentClassParams:
    """True parameters of the latent-class process: per-cause mixture weights
    ``mix`` (C, K) and per-profile response rates ``theta`` (C, K, J). Causes
    themselves are equally likely."""

    mix: np.ndarray
    theta: np.ndarray

    def __post_init__(self) -> None:
        mix = np.asarray(self.mix, dtype=np.float64)
        theta = np.asarray(self.theta, dtype=np.float64)
        object.__setattr__(self, "mix", mix)
        object.__setattr__(self, "theta", theta)
        if mix.ndim != 2 or theta.ndim != 3 or theta.shape[:2] != mix.shape:
            raise ValueError("mix must be (C, K) and theta (C, K, J)")
        if not np.allclose(mix.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("mixture rows must sum to one")

    @property
    def num_causes(self) -> int:
        return self.mix.shape[0]

    @property
    def num_questions(self) -> int:
        return self.theta.shape[2]


@dataclass(frozen=True)
class MisspecSpec:
    """Latent-class generator settings: flat priors for the mixture weights
    and the per-profile response rates."""

    num_causes: int = 10
    num_questions: int = 50
    num_classes: int = 3

    def __post_init__(self) -> None:
        if min(self.num_causes, self.num_questions, self.num_classes) < 1:
            raise ValueError("all dimensions must be positive")


def draw_misspec_params(
    spec: MisspecSpec, rng: np.random.Generator
) -> LatentClassParams:
    """One true latent-class parameter set: mixture weights row-wise from a
    flat Dirichlet, response rates uniform on (0, 1)."""
    mix = rng.dirichlet(np.ones(spec.num_classes), size=spec.num_causes)
    theta = rng.random((spec.num_causes, spec.num_classes, spec.num_questions))
    return LatentClassParams(mix=mix, theta=theta)


def sample_latent_dataset(
    params: LatentClassParams,
    n: int,
    rng: np.random.Generator,
    bank: QuestionBank | None = None,
    cause_labels: tuple[str, ...] | None = None,
) -> TrainingDataset:
    """Draw ``n`` respondents from the latent-class process. The cause is
    uniform over causes, the hidden profile follows that cause's mixture,
    answers follow the profile's rates; the profile is then discarded."""
    if n < 1:
        raise ValueError("n must be positive")
    causes = rng.integers(1, params.num_causes + 1, size=n)
    u = rng.random(n)
    cum = params.mix.cumsum(axis=1)
    profiles = (u[:, None] > cum[causes - 1]).sum(axis=1)
    probs = params.theta[causes - 1, profiles]
    responses = (rng.random((n, params.num_questions)) < probs).astype(np.int8)
    return TrainingDataset(
        bank=bank if bank is not None else QuestionBank.default(params.num_questions),
        responses=responses,
        causes=causes,
        cause_labels=cause_labels or default_cause_labels(params.num_causes),
    )


def gen_correct(
    spec: CorrectSpec, n: int, seed: int
) -> tuple[ParameterPoint, TrainingDataset]:
    """Well-specified generation end to end: draw true parameters, then a
    dataset of ``n`` respondents, all from one seeded generator."""
    rng = np.random.default_rng(seed)
    params = draw_correct_params(spec, rng)
    return params, sample_dataset(params, n, rng)


def gen_misspecified(
    spec: MisspecSpec, n: int, seed: int
) -> tuple[LatentClassParams, TrainingDataset]:
    """Latent-class generation end to end, seeded like :func:`gen_correct`."""
    rng = np.random.default_rng(seed)
    params = draw_misspec_params(spec, rng)
    return params, sample_latent_dataset(params, n, rng)


@dataclass(frozen=True)
class NoiseSpec:
    """Order-induced answer corruption.

    Asking question j right after question k flips the true answer with
    probability ``min(1, distance(k, j) / scale)``; the first question is
    asked cold and never flipped. Missing answers pass through untouched.
    """

    metric: DistanceMetric
    scale: float

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def flip_probability(self, previous: int | None, question: int) -> float:
        if previous is None:
            return 0.0
        return min(1.0, self.metric.distance(previous, question) / self.scale)

    def corrupt(
        self,
        value: int,
        previous: int | None,
        question: int,
        rng: np.random.Generator,
    ) -> int:
        """The answer actually recorded for ``question`` when the true answer
        is ``value``. Consumes one uniform whenever a flip is possible."""
        if value == MISSING:
            return value
        p = self.flip_probability(previous, question)
        if p > 0.0 and rng.random() < p:
            return 1 - value
        return int(value)

    def corrupt_sequence(
        self, values: np.ndarray, order: np.ndarray, rng: np.random.Generator
    ) -> np.ndarray:
        """Apply the noise along a full question order: ``values[t]`` is the
        true answer to question ``order[t]``. Returns the recorded answers."""
        values = np.asarray(values)
        order = np.asarray(order)
        if values.shape != order.shape:
            raise ValueError("values and order must align")
        out = values.copy()
        prev: int | None = None
        for t, j in enumerate(order):
            out[t] = self.corrupt(int(values[t]), prev, int(j), rng)
            prev = int(j)
        return out


def apply_order_noise(
    true_value: int,
    prev_question: int | None,
    question: int,
    spec: NoiseSpec,
    rng: np.random.Generator,
) -> int:
    """Functional form of :meth:`NoiseSpec.corrupt`."""
    return spec.corrupt(true_value, prev_question, question, rng)
