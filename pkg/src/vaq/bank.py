"""Question bank: identifiers, topic groups, and root/sub-question gating."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence


@dataclass(frozen=True)
class Question:
    """One question in the bank.

    A question with a ``parent`` is a sub-question: it becomes askable only
    after the parent has been answered, and only with the ``trigger`` answer
    when one is set (``trigger=None`` unlocks on any answer, including "don't
    know"). Questions without a parent are root questions, askable from the
    start. ``group`` is a free-form topic label used by the group distance
    metric; ``text`` is optional display text for interviews.
    """

    id: str
    index: int
    group: str | None = None
    parent: int | None = None
    trigger: int | None = None
    text: str | None = None


class QuestionBank:
    """Ordered collection of questions with validated gating structure."""

    def __init__(self, questions: Sequence[Question]):
        qs = tuple(questions)
        if not qs:
            raise ValueError("question bank is empty")
        for pos, q in enumerate(qs):
            if q.index != pos:
                raise ValueError(
                    f"question {q.id!r} has index {q.index}, expected {pos}"
                )
        ids = [q.id for q in qs]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate question ids in bank")
        n = len(qs)
        for q in qs:
            if q.parent is not None:
                if not 0 <= q.parent < n:
                    raise ValueError(f"question {q.id!r}: parent {q.parent} not in bank")
                if q.parent == q.index:
                    raise ValueError(f"question {q.id!r} is its own parent")
                if q.trigger is not None and q.trigger not in (0, 1):
                    raise ValueError(f"question {q.id!r}: trigger must be 0 or 1")
            elif q.trigger is not None:
                raise ValueError(f"question {q.id!r}: trigger without a parent")
        self.questions = qs
        self._index_by_id = {q.id: q.index for q in qs}
        self._children: dict[int, list[int]] = {}
        for q in qs:
            if q.parent is not None:
                self._children.setdefault(q.parent, []).append(q.index)
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        for q in self.questions:
            seen = set()
            node: int | None = q.index
            while node is not None:
                if node in seen:
                    raise ValueError(f"cyclic parent chain through question {q.id!r}")
                seen.add(node)
                node = self.questions[node].parent

    def __len__(self) -> int:
        return len(self.questions)

    @property
    def size(self) -> int:
        return len(self.questions)

    def __getitem__(self, index: int) -> Question:
        return self.questions[index]

    def index_of(self, question_id: str) -> int:
        return self._index_by_id[question_id]

    def roots(self) -> list[int]:
        """Indices askable at the start of an interview."""
        return [q.index for q in self.questions if q.parent is None]

    def children_of(self, index: int) -> list[int]:
        """Sub-question indices gated behind the given question."""
        return list(self._children.get(index, ()))

    def group_labels(self) -> list[str | None]:
        return [q.group for q in self.questions]

    @classmethod
    def default(cls, size: int) -> "QuestionBank":
        """All-root bank with ids ``q0 .. q{size-1}`` and no groups."""
        return cls([Question(id=f"q{j}", index=j) for j in range(size)])

    def to_records(self) -> list[dict[str, Any]]:
        """JSON-ready per-question records, in bank order."""
        records = []
        for q in self.questions:
            rec: dict[str, Any] = {"id": q.id, "index": q.index}
            for key in ("group", "parent", "trigger", "text"):
                value = getattr(q, key)
                if value is not None:
                    rec[key] = value
            records.append(rec)
        return records

    @classmethod
    def from_records(cls, records: Iterable[dict[str, Any]]) -> "QuestionBank":
        questions = []
        for pos, rec in enumerate(records):
            questions.append(
                Question(
                    id=str(rec["id"]),
                    index=int(rec.get("index", pos)),
                    group=rec.get("group"),
                    parent=rec.get("parent"),
                    trigger=rec.get("trigger"),
                    text=rec.get("text"),
                )
            )
        return cls(questions)
