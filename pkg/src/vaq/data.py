"""Labeled response data used to fit the classifier.

Responses are coded 0/1, with ``MISSING`` (-1) marking answers that carry no
information; cause labels are 1-based integers ``1..C`` indexing into
``cause_labels``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vaq.bank import QuestionBank

#: Response code for "no usable answer" (unasked or "don't know").
MISSING: int = -1


@dataclass
class TrainingDataset:
    """Binary/missing response matrix with cause labels.

    ``responses`` is an ``(n, J)`` int8 matrix over {0, 1, MISSING};
    ``causes`` an ``(n,)`` vector over ``1..C``. Treated as immutable after
    construction.
    """

    bank: QuestionBank
    responses: np.ndarray
    causes: np.ndarray
    cause_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        self.responses = np.asarray(self.responses, dtype=np.int8)
        self.causes = np.asarray(self.causes, dtype=np.int64)
        self.cause_labels = tuple(self.cause_labels)
        if self.responses.ndim != 2:
            raise ValueError("responses must be a 2-D matrix")
        n, width = self.responses.shape
        if width != self.bank.size:
            raise ValueError(
                f"responses have {width} columns, bank has {self.bank.size} questions"
            )
        if self.causes.shape != (n,):
            raise ValueError("causes must be one value per row")
        if n == 0:
            raise ValueError("dataset has no rows")
        if not self.cause_labels:
            raise ValueError("cause_labels is empty")
        bad = ~np.isin(self.responses, (0, 1, MISSING))
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValueError(
                f"response at row {i}, column {j} is {self.responses[i, j]}; "
                "expected 0, 1, or missing"
            )
        c = len(self.cause_labels)
        if self.causes.min() < 1 or self.causes.max() > c:
            bad_cause = self.causes[(self.causes < 1) | (self.causes > c)][0]
            raise ValueError(f"cause value {bad_cause} outside 1..{c}")

    @property
    def n(self) -> int:
        return self.responses.shape[0]

    @property
    def num_causes(self) -> int:
        return len(self.cause_labels)

    @property
    def num_questions(self) -> int:
        return self.bank.size

    def subset(self, rows: np.ndarray) -> "TrainingDataset":
        """Dataset restricted to the given row indices (labels unchanged)."""
        return TrainingDataset(
            bank=self.bank,
            responses=self.responses[rows],
            causes=self.causes[rows],
            cause_labels=self.cause_labels,
        )
