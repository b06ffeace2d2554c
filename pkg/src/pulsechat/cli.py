"""Command-line entry points: serve, analyze, export, check-registry.

Exit codes: 0 success, 1 validation error, 2 I/O error. Diagnostics go to
stderr; data goes to files or stdout.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import analytics, sentiment, storage, survey
from .gateway import provider_from_env
from .service import ServiceConfig, SurveyService, create_app

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main() -> None:
    """Adaptive campus-climate survey platform."""


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--data-dir", type=click.Path(path_type=Path), default=Path("./data"))
@click.option("--registry", type=click.Path(path_type=Path), default=survey.DEFAULT_REGISTRY_PATH)
@click.option("--lexicon", type=click.Path(path_type=Path), default=sentiment.DEFAULT_LEXICON_PATH)
@click.option("--stopwords", type=click.Path(path_type=Path), default=analytics.DEFAULT_STOPWORDS_PATH)
@click.option("--seed", type=int, default=None, help="Fixed base seed for reproducible runs.")
@click.option("--admin-token", default="", help="Bearer token guarding /api/admin endpoints.")
@click.option("--threshold", default=15, show_default=True, help="Elaboration word threshold.")
@click.option("--static-dir", type=click.Path(path_type=Path), default=None,
              help="Serve the browser UI from this directory at /.")
def serve(port, data_dir, registry, lexicon, stopwords, seed, admin_token, threshold,
          static_dir) -> None:
    """Start the survey service."""
    import uvicorn

    try:
        config = ServiceConfig(
            port=port,
            data_dir=data_dir,
            registry_path=registry,
            lexicon_path=lexicon,
            stopwords_path=stopwords,
            seed=seed,
            admin_token=admin_token,
            elaboration_word_threshold=threshold,
        )
        provider = provider_from_env()
        service = SurveyService(config=config, provider=provider)
    except (ValueError, survey.RegistryError) as exc:
        _fail(str(exc), EXIT_VALIDATION)
        return
    except OSError as exc:
        _fail(str(exc), EXIT_IO)
        return
    if static_dir is not None and not static_dir.is_dir():
        _fail(f"static dir does not exist: {static_dir}", EXIT_VALIDATION)
        return
    uvicorn.run(create_app(service, static_dir=static_dir), host="0.0.0.0", port=config.port)


@main.command()
@click.option("--input", "input_dir", type=click.Path(path_type=Path), required=True,
              help="Data directory containing events.ndjson.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@click.option("--lexicon", type=click.Path(path_type=Path), default=sentiment.DEFAULT_LEXICON_PATH)
@click.option("--stopwords", type=click.Path(path_type=Path), default=analytics.DEFAULT_STOPWORDS_PATH)
def analyze(input_dir: Path, out_path: Path, lexicon: Path, stopwords: Path) -> None:
    """Run the analytics pipeline offline and write the report document."""
    try:
        lex = sentiment.SentimentLexicon.from_file(lexicon)
        stop = analytics.load_stopwords(stopwords)
        log = storage.EventLog(input_dir, durable=False)
    except OSError as exc:
        _fail(str(exc), EXIT_IO)
        return
    except (ValueError, storage.StorageError) as exc:
        _fail(str(exc), EXIT_VALIDATION)
        return
    surveys = [
        analytics.FeedbackSurvey.from_dict(
            {**record, "comment": record["comment"] or None}
        )
        for record in storage.feedback_records(log)
    ]
    if not surveys:
        _fail("no feedback surveys found in the data directory (EmptyInput)", EXIT_VALIDATION)
        return
    report = analytics.build_report(
        surveys, lambda text: sentiment.score_text(text, lex), stop
    )
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n",
                            encoding="utf-8")
    except OSError as exc:
        _fail(str(exc), EXIT_IO)
        return
    click.echo(f"report written to {out_path}")


@main.command()
@click.option("--what", type=click.Choice([k.value for k in storage.ExportKind]), required=True)
@click.option("--format", "fmt", type=click.Choice([f.value for f in storage.ExportFormat]),
              default="csv", show_default=True)
@click.option("--data-dir", type=click.Path(path_type=Path), default=Path("./data"))
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Defaults to <data-dir>/exports/<what>-<utc timestamp>.<ext>")
@click.option("--lexicon", type=click.Path(path_type=Path), default=sentiment.DEFAULT_LEXICON_PATH)
def export(what: str, fmt: str, data_dir: Path, out_path: Path | None, lexicon: Path) -> None:
    """Export transcripts, feedback, or per-comment sentiment scores."""
    kind = storage.ExportKind(what)
    out_fmt = storage.ExportFormat(fmt)
    try:
        log = storage.EventLog(data_dir, durable=False)
        lex = sentiment.SentimentLexicon.from_file(lexicon)
    except OSError as exc:
        _fail(str(exc), EXIT_IO)
        return
    except (ValueError, storage.StorageError) as exc:
        _fail(str(exc), EXIT_VALIDATION)
        return
    payload = storage.export(
        log, kind, out_fmt, score_fn=lambda text: sentiment.score_text(text, lex)
    )
    if out_path is None:
        out_path = data_dir / "exports" / storage.export_file_name(kind, out_fmt)
    try:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_bytes(payload)
    except OSError as exc:
        _fail(str(exc), EXIT_IO)
        return
    click.echo(f"export written to {out_path}")


@main.command("check-registry")
@click.option("--registry", type=click.Path(path_type=Path), default=survey.DEFAULT_REGISTRY_PATH)
def check_registry(registry: Path) -> None:
    """Validate that every role/detail combination maps to exactly one template."""
    try:
        templates = survey.load_registry(registry)
        survey.check_registry_coverage(templates)
    except OSError as exc:
        _fail(str(exc), EXIT_IO)
        return
    except (survey.RegistryError, survey.ProfileValidationError, ValueError) as exc:
        _fail(str(exc), EXIT_VALIDATION)
        return
    combos = len(survey.enumerate_detail_combinations())
    click.echo(
        f"registry ok: {len(templates)} templates cover all {combos} "
        "role/detail combinations exactly once"
    )


if __name__ == "__main__":
    main()
