"""File formats: model artifacts, datasets, sidecars.

All documents are JSON except datasets, which travel as CSV with a header
row: one ``cause`` column of string labels followed by one column per
question id. Response cells are ``0``, ``1``, or empty/``NA`` for missing.
Cause labels map to codes 1..C either by a supplied label list or by first
appearance in the file.

Serialization is deterministic: keys are written in a fixed order and floats
use the shortest round-tripping decimal form, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from vaq.bank import QuestionBank
from vaq.data import MISSING, TrainingDataset
from vaq.datagen import LatentClassParams
from vaq.model import Hyperparameters, ParameterPoint, PosteriorModel

MODEL_FORMAT_VERSION = 1

MISSING_TOKENS = ("", "NA")


def _dump_json(obj: Any, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _load_json(path: str | Path) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# -- model artifact --------------------------------------------------------


def save_model(model: PosteriorModel, path: str | Path) -> None:
    """Write a fitted model as a single JSON document. Posterior draws are
    never persisted; consumers re-sample from (num_draws, seed)."""
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "cause_labels": list(model.cause_labels),
        "question_bank": model.bank.to_records(),
        "hyperparameters": {
            "alpha": model.hyper.alpha.tolist(),
            "a": model.hyper.a.tolist(),
            "b": model.hyper.b.tolist(),
        },
        "dirichlet": model.dirichlet.tolist(),
        "beta_a": model.beta_a.tolist(),
        "beta_b": model.beta_b.tolist(),
    }
    _dump_json(doc, path)


def load_model(path: str | Path) -> PosteriorModel:
    doc = _load_json(path)
    version = doc.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(
            f"unsupported model artifact version {version!r} "
            f"(expected {MODEL_FORMAT_VERSION})"
        )
    hyper = doc["hyperparameters"]
    return PosteriorModel(
        dirichlet=np.asarray(doc["dirichlet"], dtype=np.float64),
        beta_a=np.asarray(doc["beta_a"], dtype=np.float64),
        beta_b=np.asarray(doc["beta_b"], dtype=np.float64),
        bank=QuestionBank.from_records(doc["question_bank"]),
        cause_labels=tuple(doc["cause_labels"]),
        hyper=Hyperparameters(alpha=hyper["alpha"], a=hyper["a"], b=hyper["b"]),
    )


# -- question bank sidecar -------------------------------------------------


def save_bank(bank: QuestionBank, path: str | Path) -> None:
    _dump_json(bank.to_records(), path)


def load_bank(path: str | Path) -> QuestionBank:
    return QuestionBank.from_records(_load_json(path))


# -- hyperparameter config -------------------------------------------------


def hyperparameters_from_config(obj: Any, num_causes: int) -> Hyperparameters:
    """Build hyperparameters from a JSON-shaped mapping; scalar entries
    broadcast across causes, absent entries default to 1."""
    if obj is None:
        obj = {}
    vectors = {}
    for name in ("alpha", "a", "b"):
        value = obj.get(name, 1.0)
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim == 0:
            arr = np.full(num_causes, float(arr))
        vectors[name] = arr
    return Hyperparameters(**vectors)


# -- datasets --------------------------------------------------------------


def save_dataset(data: TrainingDataset, path: str | Path) -> None:
    """Write the dataset CSV: cause label column then one column per
    question, missing cells left empty."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cause"] + [q.id for q in data.bank.questions])
        for i in range(data.n):
            row: list[str] = [data.cause_labels[data.causes[i] - 1]]
            for value in data.responses[i]:
                row.append("" if value == MISSING else str(int(value)))
            writer.writerow(row)


def _parse_cell(token: str, row: int, column: str) -> int:
    token = token.strip()
    if token in MISSING_TOKENS:
        return MISSING
    if token == "0":
        return 0
    if token == "1":
        return 1
    raise ValueError(
        f"row {row}, column {column!r}: invalid response value {token!r} "
        "(expected 0, 1, empty, or NA)"
    )


def load_binary_dataset(
    path: str | Path,
    bank: QuestionBank | None = None,
    cause_labels: Sequence[str] | None = None,
) -> TrainingDataset:
    """Read a dataset CSV.

    Without a ``bank``, every header column after ``cause`` becomes a root
    question in file order. With one, columns are matched to the bank by id
    (any column order) and must cover it exactly. ``cause_labels`` pins the
    label-to-code mapping; otherwise labels are coded 1..C by first
    appearance.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty dataset file") from None
        if not header or header[0] != "cause":
            raise ValueError(f"{path}: first column must be 'cause'")
        ids = header[1:]
        if len(set(ids)) != len(ids):
            dupe = next(q for q in ids if ids.count(q) > 1)
            raise ValueError(f"{path}: duplicate question column {dupe!r}")
        if bank is None:
            bank = QuestionBank.from_records(
                [{"id": q, "index": pos} for pos, q in enumerate(ids)]
            )
            column_of = np.arange(len(ids))
        else:
            if sorted(ids) != sorted(q.id for q in bank.questions):
                raise ValueError(
                    f"{path}: question columns do not match the question bank"
                )
            position = {q: pos for pos, q in enumerate(ids)}
            column_of = np.array(
                [position[q.id] for q in bank.questions], dtype=np.int64
            )

        labels: list[str] = list(cause_labels) if cause_labels else []
        fixed_labels = cause_labels is not None
        code_of = {label: y + 1 for y, label in enumerate(labels)}
        causes: list[int] = []
        rows: list[list[int]] = []
        for row_num, record in enumerate(reader, start=1):
            if len(record) != len(header):
                raise ValueError(
                    f"{path}: row {row_num} has {len(record)} fields, "
                    f"expected {len(header)}"
                )
            label = record[0]
            if label not in code_of:
                if fixed_labels:
                    raise ValueError(
                        f"{path}: row {row_num}: unknown cause label {label!r}"
                    )
                labels.append(label)
                code_of[label] = len(labels)
            causes.append(code_of[label])
            cells = record[1:]
            rows.append(
                [_parse_cell(cells[c], row_num, ids[c]) for c in column_of]
            )
    if not rows:
        raise ValueError(f"{path}: dataset has no data rows")
    return TrainingDataset(
        bank=bank,
        responses=np.array(rows, dtype=np.int8),
        causes=np.array(causes, dtype=np.int64),
        cause_labels=tuple(labels),
    )


# -- true-parameter sidecars ----------------------------------------------


def save_true_params(
    params: ParameterPoint | LatentClassParams, path: str | Path
) -> None:
    """Sidecar with a generator's realized parameters, for oracle runs."""
    if isinstance(params, ParameterPoint):
        doc: dict[str, Any] = {
            "kind": "point",
            "pi": params.pi.tolist(),
            "theta": params.theta.tolist(),
        }
    else:
        doc = {
            "kind": "latent_class",
            "mix": params.mix.tolist(),
            "theta": params.theta.tolist(),
        }
    _dump_json(doc, path)


def load_true_params(path: str | Path) -> ParameterPoint | LatentClassParams:
    doc = _load_json(path)
    kind = doc.get("kind")
    if kind == "point":
        return ParameterPoint(
            pi=np.asarray(doc["pi"], dtype=np.float64),
            theta=np.asarray(doc["theta"], dtype=np.float64),
        )
    if kind == "latent_class":
        return LatentClassParams(
            mix=np.asarray(doc["mix"], dtype=np.float64),
            theta=np.asarray(doc["theta"], dtype=np.float64),
        )
    raise ValueError(f"unknown parameter sidecar kind {kind!r}")
