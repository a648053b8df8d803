"""Artifact round-trip tests: model files, dataset CSVs with missing cells,
bank sidecars, hyperparameter configs, and true-parameter sidecars."""

import numpy as np
import pytest

from conftest import random_dataset
from vaq import (
    MISSING,
    Hyperparameters,
    LatentClassParams,
    ParameterPoint,
    Question,
    QuestionBank,
    fit,
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
from vaq.io import MODEL_FORMAT_VERSION, _load_json


@pytest.fixture
def dataset():
    return random_dataset(np.random.default_rng(314), 30, 4, 6, missing_rate=0.2)


class TestModelRoundTrip:
    def test_fitted_model_survives(self, dataset, tmp_path):
        model = fit(dataset, Hyperparameters.uniform(4))
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert np.array_equal(loaded.dirichlet, model.dirichlet)
        assert np.array_equal(loaded.beta_a, model.beta_a)
        assert np.array_equal(loaded.beta_b, model.beta_b)
        assert loaded.cause_labels == model.cause_labels
        assert [q.id for q in loaded.bank.questions] == [
            q.id for q in model.bank.questions
        ]
        assert np.array_equal(loaded.hyper.alpha, model.hyper.alpha)

    def test_version_field_written(self, dataset, tmp_path):
        model = fit(dataset, Hyperparameters.uniform(4))
        path = tmp_path / "model.json"
        save_model(model, path)
        assert _load_json(path)["version"] == MODEL_FORMAT_VERSION

    def test_unknown_version_rejected(self, dataset, tmp_path):
        import json

        model = fit(dataset, Hyperparameters.uniform(4))
        path = tmp_path / "model.json"
        save_model(model, path)
        doc = _load_json(path)
        doc["version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(ValueError, match="unsupported model artifact version"):
            load_model(path)


class TestBankSidecar:
    def test_gated_bank_round_trip(self, gated_bank, tmp_path):
        path = tmp_path / "bank.json"
        save_bank(gated_bank, path)
        loaded = load_bank(path)
        assert loaded.size == gated_bank.size
        for orig, back in zip(gated_bank.questions, loaded.questions):
            assert (back.id, back.index, back.group) == (
                orig.id,
                orig.index,
                orig.group,
            )
            assert (back.parent, back.trigger) == (orig.parent, orig.trigger)


class TestHyperparameterConfig:
    def test_defaults_to_flat_ones(self):
        hyper = hyperparameters_from_config(None, 5)
        assert hyper.alpha.tolist() == [1.0] * 5
        assert hyper.a.tolist() == [1.0] * 5
        assert hyper.b.tolist() == [1.0] * 5

    def test_scalars_broadcast(self):
        hyper = hyperparameters_from_config({"alpha": 2.5, "a": 0.5}, 3)
        assert hyper.alpha.tolist() == [2.5] * 3
        assert hyper.a.tolist() == [0.5] * 3
        assert hyper.b.tolist() == [1.0] * 3

    def test_vectors_pass_through(self):
        hyper = hyperparameters_from_config({"alpha": [1.0, 2.0]}, 2)
        assert hyper.alpha.tolist() == [1.0, 2.0]

    def test_wrong_length_vector_rejected(self):
        with pytest.raises(ValueError):
            hyperparameters_from_config({"alpha": [1.0, 2.0, 3.0]}, 2)


class TestDatasetRoundTrip:
    def test_missing_cells_survive(self, dataset, tmp_path):
        path = tmp_path / "data.csv"
        save_dataset(dataset, path)
        loaded = load_binary_dataset(
            path, bank=dataset.bank, cause_labels=dataset.cause_labels
        )
        assert np.array_equal(loaded.responses, dataset.responses)
        assert np.array_equal(loaded.causes, dataset.causes)
        assert loaded.cause_labels == dataset.cause_labels

    def test_labels_coded_by_first_appearance_without_pin(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("cause,q0\nzebra,1\nant,0\nzebra,\n")
        data = load_binary_dataset(path)
        assert data.cause_labels == ("zebra", "ant")
        assert data.causes.tolist() == [1, 2, 1]
        assert data.responses[2, 0] == MISSING

    def test_pinned_labels_fix_the_coding(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("cause,q0\nzebra,1\nant,0\n")
        data = load_binary_dataset(path, cause_labels=("ant", "zebra"))
        assert data.causes.tolist() == [2, 1]

    def test_pinned_labels_reject_unknown_label(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("cause,q0\nzebra,1\n")
        with pytest.raises(ValueError, match="row 1: unknown cause label 'zebra'"):
            load_binary_dataset(path, cause_labels=("ant",))

    def test_bank_matches_columns_in_any_order(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("cause,b,a\nx,1,0\n")
        bank = QuestionBank(
            [Question(id="a", index=0), Question(id="b", index=1)]
        )
        data = load_binary_dataset(path, bank=bank)
        # columns realigned to bank order: a=0, b=1
        assert data.responses.tolist() == [[0, 1]]

    def test_bank_column_mismatch_rejected(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("cause,a,c\nx,1,0\n")
        bank = QuestionBank(
            [Question(id="a", index=0), Question(id="b", index=1)]
        )
        with pytest.raises(ValueError, match="do not match the question bank"):
            load_binary_dataset(path, bank=bank)

    def test_na_token_reads_as_missing(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("cause,q0,q1\nx,NA,1\n")
        data = load_binary_dataset(path)
        assert data.responses.tolist() == [[MISSING, 1]]

    def test_bad_cell_names_row_and_column(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("cause,q0,q1\nx,1,0\ny,2,0\n")
        with pytest.raises(
            ValueError, match="row 2, column 'q0': invalid response value '2'"
        ):
            load_binary_dataset(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("cause,q0,q1\nx,1\n")
        with pytest.raises(ValueError, match="row 1 has 2 fields, expected 3"):
            load_binary_dataset(path)

    def test_structural_errors(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(ValueError, match="empty dataset file"):
            load_binary_dataset(empty)
        wrong = tmp_path / "wrong.csv"
        wrong.write_text("id,q0\nx,1\n")
        with pytest.raises(ValueError, match="first column must be 'cause'"):
            load_binary_dataset(wrong)
        dupe = tmp_path / "dupe.csv"
        dupe.write_text("cause,q0,q0\nx,1,1\n")
        with pytest.raises(ValueError, match="duplicate question column 'q0'"):
            load_binary_dataset(dupe)
        bare = tmp_path / "bare.csv"
        bare.write_text("cause,q0\n")
        with pytest.raises(ValueError, match="no data rows"):
            load_binary_dataset(bare)


class TestTrueParamsSidecar:
    def test_point_round_trip(self, tmp_path):
        params = ParameterPoint(
            pi=np.array([0.6, 0.4]), theta=np.array([[0.2, 0.8], [0.5, 0.5]])
        )
        path = tmp_path / "params.json"
        save_true_params(params, path)
        loaded = load_true_params(path)
        assert isinstance(loaded, ParameterPoint)
        assert np.array_equal(loaded.pi, params.pi)
        assert np.array_equal(loaded.theta, params.theta)

    def test_latent_class_round_trip(self, tmp_path):
        params = LatentClassParams(
            mix=np.array([[0.3, 0.7]]), theta=np.full((1, 2, 3), 0.4)
        )
        path = tmp_path / "params.json"
        save_true_params(params, path)
        loaded = load_true_params(path)
        assert isinstance(loaded, LatentClassParams)
        assert np.array_equal(loaded.mix, params.mix)
        assert np.array_equal(loaded.theta, params.theta)

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "params.json"
        path.write_text('{"kind": "mystery"}')
        with pytest.raises(ValueError, match="unknown parameter sidecar kind"):
            load_true_params(path)
