import numpy as np
import pytest

from vaq import (
    CorrectSpec,
    Hyperparameters,
    ParameterPoint,
    Question,
    QuestionBank,
    TrainingDataset,
    fit,
    gen_correct,
)


def random_params(rng: np.random.Generator, num_causes: int, num_questions: int) -> ParameterPoint:
    """A valid random parameter point with theta kept away from {0, 1}."""
    pi = rng.dirichlet(np.ones(num_causes))
    theta = rng.uniform(0.05, 0.95, size=(num_causes, num_questions))
    return ParameterPoint(pi=pi, theta=theta)


def random_dataset(
    rng: np.random.Generator,
    n: int,
    num_causes: int,
    num_questions: int,
    missing_rate: float = 0.0,
) -> TrainingDataset:
    responses = rng.integers(0, 2, size=(n, num_questions)).astype(np.int8)
    if missing_rate > 0:
        responses[rng.random((n, num_questions)) < missing_rate] = -1
    causes = rng.integers(1, num_causes + 1, size=n)
    # Guarantee every cause appears so label-dependent code paths are hit.
    causes[:num_causes] = np.arange(1, num_causes + 1)
    return TrainingDataset(
        bank=QuestionBank.default(num_questions),
        responses=responses,
        causes=causes,
        cause_labels=tuple(f"c{y}" for y in range(1, num_causes + 1)),
    )


@pytest.fixture(scope="session")
def small_model():
    """A 10-cause, 50-question model fitted on synthetic data."""
    _, data = gen_correct(CorrectSpec.default(), 400, seed=402)
    return fit(data, Hyperparameters.uniform(10))


# Verdicts recorded by the acceptance suite, keyed by criterion id in run
# order. Each criterion may accumulate several entries (one per table cell
# or sub-check); the criterion passes only if all of them do.
ACCEPTANCE_RESULTS: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """Record one sub-result for an acceptance criterion. The terminal
    summary prints a single PASS/FAIL line per criterion that ran."""

    def record(criterion: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_RESULTS.setdefault(criterion, []).append((bool(ok), detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, entries in ACCEPTANCE_RESULTS.items():
        ok = all(passed for passed, _ in entries)
        notes = "; ".join(detail for passed, detail in entries if not passed and detail)
        line = f"{'PASS' if ok else 'FAIL'}  {criterion}"
        if notes:
            line += f"  [{notes}]"
        terminalreporter.write_line(line, green=ok, red=not ok)


@pytest.fixture
def gated_bank():
    """Five questions: one root with three sub-questions (yes-trigger,
    no-trigger, any-answer) plus an independent second root."""
    return QuestionBank(
        [
            Question(id="root_a", index=0, group="onset"),
            Question(id="sub_yes", index=1, group="onset", parent=0, trigger=1),
            Question(id="sub_no", index=2, group="onset", parent=0, trigger=0),
            Question(id="sub_any", index=3, group="history", parent=0),
            Question(id="root_b", index=4, group="history"),
        ]
    )
