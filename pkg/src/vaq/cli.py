"""Command-line entry points: fit a model, simulate datasets, run
experiments, hold an interview in the terminal, and serve the HTTP API.

All file-writing subcommands are deterministic: the same arguments and
seed produce byte-identical output files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import click

from vaq.data import MISSING
from vaq.datagen import gen_correct, gen_misspecified
from vaq.harness import _correct_spec, _misspec_spec, run_experiment
from vaq.io import (
    hyperparameters_from_config,
    load_bank,
    load_binary_dataset,
    load_model,
    save_bank,
    save_dataset,
    save_model,
    save_true_params,
)
from vaq.model import fit as fit_model
from vaq.session import (
    Session,
    merged_session_config,
    session_config_from_dict,
)

# Answer tokens accepted by the interview prompt and script files.
_ANSWER_VALUES = {
    "y": 1,
    "yes": 1,
    "1": 1,
    "n": 0,
    "no": 0,
    "0": 0,
    "d": MISSING,
    "dk": MISSING,
    "dont_know": MISSING,
    "don't_know": MISSING,
    "missing": MISSING,
    str(MISSING): MISSING,
}


def _read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


@click.group()
def main() -> None:
    """Adaptive diagnostic questionnaire toolkit."""


@main.command()
@click.option("--data", "data_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Labeled dataset CSV (cause column plus one response column per question).")
@click.option("--bank", "bank_path", type=click.Path(exists=True, dir_okay=False),
              help="Question bank sidecar JSON; defaults to a flat bank from the CSV header.")
@click.option("--hyper", "hyper_path", type=click.Path(exists=True, dir_okay=False),
              help="Prior hyperparameters JSON; defaults to all-ones.")
@click.option("--labels", "labels_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON array fixing the cause label coding.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Where to write the fitted model JSON.")
def fit(data_path: str, bank_path: str | None, hyper_path: str | None,
        labels_path: str | None, out_path: str) -> None:
    """Fit the classifier on a labeled dataset and save the model."""
    bank = load_bank(bank_path) if bank_path else None
    labels = _read_json(labels_path) if labels_path else None
    try:
        dataset = load_binary_dataset(data_path, bank, labels)
        hyper = hyperparameters_from_config(
            _read_json(hyper_path) if hyper_path else None, dataset.num_causes
        )
        model = fit_model(dataset, hyper)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    save_model(model, out_path)
    click.echo(
        f"model written to {out_path}: {dataset.num_causes} causes, "
        f"{dataset.num_questions} questions, {dataset.n} training rows"
    )


@main.command()
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help='Generator spec JSON: {"generator": "correct"|"misspecified", "options": {...}}.')
@click.option("--n", "n", required=True, type=click.IntRange(min=1),
              help="Number of simulated interview records.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for data.csv, bank.json, and params.json.")
def simulate(spec_path: str, n: int, seed: int, out_dir: str) -> None:
    """Draw a synthetic dataset and its realized true parameters."""
    spec_cfg = _read_json(spec_path)
    generator = spec_cfg.get("generator", "correct")
    options = spec_cfg.get("options", spec_cfg.get("generator_options"))
    try:
        if generator == "correct":
            params, dataset = gen_correct(_correct_spec(options), n, seed)
        elif generator == "misspecified":
            params, dataset = gen_misspecified(_misspec_spec(options), n, seed)
        else:
            raise click.ClickException(f"unknown generator {generator!r}")
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_dataset(dataset, out / "data.csv")
    save_bank(dataset.bank, out / "bank.json")
    save_true_params(params, out / "params.json")
    with open(out / "labels.json", "w", encoding="utf-8") as fh:
        json.dump(list(dataset.cause_labels), fh, indent=2)
        fh.write("\n")
    click.echo(
        f"{n} records from the {generator} generator written to {out}: "
        "data.csv, bank.json, params.json, labels.json"
    )


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Experiment config JSON.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for result tables and transcripts.")
def evaluate(config_path: str, out_dir: str) -> None:
    """Run a configured experiment and write its result tables."""
    try:
        paths = run_experiment(_read_json(config_path), out_dir)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    for name in sorted(paths):
        click.echo(f"{name}: {paths[name]}")


def _parse_rule_option(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _load_answer_script(path: str) -> list[int]:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.strip().lower()
            if not token or token.startswith("#"):
                continue
            if token not in _ANSWER_VALUES:
                raise click.ClickException(
                    f"{path}:{lineno}: unrecognized answer {token!r}"
                )
            values.append(_ANSWER_VALUES[token])
    return values


def _prompt_answer() -> int:
    while True:
        token = click.prompt("answer [y/n/d]", type=str).strip().lower()
        if token in _ANSWER_VALUES:
            return _ANSWER_VALUES[token]
        click.echo("please answer y(es), n(o), or d(ont know)")


@main.command()
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Fitted model JSON.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Session config JSON file; command-line overrides apply on top.")
@click.option("--rule", "rule_text",
              help='Stopping rule: a kind name or a JSON object such as '
                   '\'{"kind": "predictive", "p1st": 0.8, "d": 0.5, "r": 0.7}\'.')
@click.option("--strategy", help="Question-selection strategy.")
@click.option("--seed", type=int, help="Seed for posterior draws.")
@click.option("--answers", "answers_path", type=click.Path(exists=True, dir_okay=False),
              help="Scripted answers, one yes/no/dont_know token per line (non-interactive).")
@click.option("--transcript", "transcript_path", type=click.Path(dir_okay=False),
              help="Write the finished transcript as JSON lines.")
def interview(model_path: str, config_path: str | None, rule_text: str | None,
              strategy: str | None, seed: int | None, answers_path: str | None,
              transcript_path: str | None) -> None:
    """Run one interview session in the terminal."""
    model = load_model(model_path)
    overrides: dict[str, Any] = dict(_read_json(config_path)) if config_path else {}
    if rule_text:
        overrides["rule"] = _parse_rule_option(rule_text)
    if strategy:
        overrides["strategy"] = strategy
    if seed is not None:
        overrides["seed"] = seed
    try:
        config = session_config_from_dict(merged_session_config(overrides), model.bank)
        session = Session(model, config)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc

    script = iter(_load_answer_script(answers_path)) if answers_path else None
    while not session.stopped:
        question = session.next_question()
        click.echo(f"[{session.num_answered + 1}] {question.text or question.id}")
        if script is None:
            value = _prompt_answer()
        else:
            try:
                value = next(script)
            except StopIteration:
                raise click.ClickException(
                    "answer script exhausted before the session stopped"
                ) from None
            click.echo(f"answer: {_answer_word(value)}")
        session.record_response(question.id, value)
        top = session.transcript()[-1]["class_posterior_top3"][0]
        label = model.cause_labels[top["cause"] - 1]
        click.echo(f"  leading cause: {label} ({top['probability']:.4f})")

    result = session.classify()
    decision = session.stop_decision
    click.echo(
        f"stopped after {session.num_answered} questions ({decision.reason}): "
        f"{model.cause_labels[result.cause - 1]} "
        f"({float(result.probs[result.cause - 1]):.4f})"
    )
    if transcript_path:
        with open(transcript_path, "w", encoding="utf-8") as fh:
            for record in session.transcript():
                json.dump(record, fh)
                fh.write("\n")
        click.echo(f"transcript written to {transcript_path}")


def _answer_word(value: int) -> str:
    return {1: "yes", 0: "no", MISSING: "dont_know"}[value]


@main.command()
@click.option("--model", "model_path", required=True, envvar="MODEL_PATH",
              type=click.Path(exists=True, dir_okay=False),
              help="Fitted model JSON (env MODEL_PATH).")
@click.option("--port", type=int, default=8000, show_default=True, envvar="PORT",
              help="Listen port (env PORT).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--transcript-dir", "transcript_dir", envvar="TRANSCRIPT_DIR",
              type=click.Path(file_okay=False),
              help="Persist completed session transcripts here (env TRANSCRIPT_DIR).")
@click.option("--ui-dir", "ui_dir", envvar="UI_DIR",
              type=click.Path(exists=True, file_okay=False),
              help="Serve a built browser UI from this directory at /ui.")
def serve(model_path: str, port: int, host: str, transcript_dir: str | None,
          ui_dir: str | None) -> None:
    """Serve interview sessions over HTTP."""
    import uvicorn

    from vaq.service import create_app

    app = create_app(
        model_path=model_path, transcript_dir=transcript_dir, ui_dir=ui_dir
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
