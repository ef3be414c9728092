"""Operator tooling: serve the game, validate corpora, generate worm banks,
run headless policy simulations, and audit replay logs.

Exit codes: 0 success, 1 validation/divergence failures, 2 bad arguments,
3 I/O problems.
"""

from __future__ import annotations

import csv
import io
import os
import sys
from pathlib import Path

import click

from .detector import bundled_rules, load_rules_path
from .engine import ReplayWriter, replay_session, state_digest
from .generator import bank_to_text, bundled_corpus, generate_bank, load_corpus, validate_corpus
from .model import PhishingConcept
from .simulate import PolicySpec, simulate_run

EXIT_VALIDATION = 1
EXIT_BAD_ARGS = 2
EXIT_IO = 3


def _load_rules(rules_path: str | None):
    if rules_path:
        try:
            return load_rules_path(rules_path)
        except OSError as exc:
            click.echo(f"cannot read rules config: {exc}", err=True)
            sys.exit(EXIT_IO)
    return bundled_rules()


def _load_corpus(corpus_path: str | None):
    if corpus_path:
        try:
            return load_corpus(corpus_path)
        except (OSError, FileNotFoundError) as exc:
            click.echo(f"cannot read corpus: {exc}", err=True)
            sys.exit(EXIT_IO)
    return bundled_corpus()


@click.group()
def main():
    """Phish Phinder operator tools."""


def _read_serve_config(path: str) -> dict:
    """Service config file: line-oriented `key = value` with the keys
    addr, data_dir, corpus, rules, web."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key = key.strip()
        if key not in {"addr", "data_dir", "corpus", "rules", "web"}:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


@main.command()
@click.option("--config", "config_path", default=None, help="Service config file (key = value).")
@click.option("--addr", envvar="PHINDER_ADDR", default=None, help="listen address [default: 127.0.0.1:8000]")
@click.option("--data-dir", envvar="PHINDER_DATA", default=None, help="state directory [default: phinder-data]")
@click.option("--corpus", "corpus_path", default=None, help="Corpus directory (default: bundled).")
@click.option("--rules", "rules_path", default=None, help="Rules/brands config file.")
@click.option("--web", "web_dir", default=None, help="Static frontend directory to serve at /.")
def serve(config_path, addr, data_dir, corpus_path, rules_path, web_dir):
    """Run the session service.

    Precedence: command-line flag / environment variable, then the config
    file, then built-in defaults.
    """
    import uvicorn

    from .service import create_app

    file_cfg = {}
    if config_path:
        try:
            file_cfg = _read_serve_config(config_path)
        except OSError as exc:
            click.echo(f"cannot read config: {exc}", err=True)
            sys.exit(EXIT_IO)
        except ValueError as exc:
            click.echo(f"bad config: {exc}", err=True)
            sys.exit(EXIT_BAD_ARGS)
    addr = addr or file_cfg.get("addr") or "127.0.0.1:8000"
    data_dir = data_dir or file_cfg.get("data_dir") or "phinder-data"
    corpus_path = corpus_path or file_cfg.get("corpus")
    rules_path = rules_path or file_cfg.get("rules")
    web_dir = web_dir or file_cfg.get("web")

    host, _, port = addr.partition(":")
    brands, rules = _load_rules(rules_path)
    corpus = _load_corpus(corpus_path)
    app = create_app(
        data_dir=Path(data_dir),
        corpus=corpus,
        brands=brands,
        rules=rules,
        static_dir=Path(web_dir) if web_dir else None,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="info")


@main.command()
@click.argument("corpus_path")
@click.option("--rules", "rules_path", default=None)
def validate(corpus_path, rules_path):
    """Check that every corpus item is detector-clean; exit 0 iff clean."""
    brands, rules = _load_rules(rules_path)
    try:
        corpus = load_corpus(corpus_path)
    except FileNotFoundError as exc:
        click.echo(f"cannot read corpus: {exc}", err=True)
        sys.exit(EXIT_IO)
    except ValueError as exc:
        click.echo(f"corpus does not parse: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    entries = validate_corpus(corpus, brands, rules)
    if not entries:
        click.echo(f"corpus clean: {len(corpus.items())} items")
        return
    for entry in entries:
        concepts = sorted({e.concept.value for e in entry.report.findings})
        click.echo(f"{entry.item_id}: {', '.join(concepts)}")
        for finding, advice in zip(entry.report.findings, entry.report.advice):
            click.echo(f"  - {finding.detail}")
    click.echo(f"{len(entries)} item(s) not clean", err=True)
    sys.exit(EXIT_VALIDATION)


@main.command()
@click.option("--level", type=int, required=True)
@click.option("-n", "count", type=int, required=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_path", default="-", help="Output file ('-' = stdout).")
@click.option("--corpus", "corpus_path", default=None)
@click.option("--rules", "rules_path", default=None)
def genbank(level, count, seed, out_path, corpus_path, rules_path):
    """Generate a deterministic offline worm bank (one JSON record per line)."""
    brands, rules = _load_rules(rules_path)
    corpus = _load_corpus(corpus_path)
    try:
        worms = generate_bank(level, count, seed, corpus=corpus, brands=brands, rules=rules)
    except KeyError as exc:
        click.echo(f"bad level: {exc}", err=True)
        sys.exit(EXIT_BAD_ARGS)
    text = bank_to_text(worms)
    if out_path == "-":
        click.echo(text, nl=False)
    else:
        try:
            Path(out_path).write_text(text, "utf-8")
        except OSError as exc:
            click.echo(f"cannot write bank: {exc}", err=True)
            sys.exit(EXIT_IO)


def _parse_levels(spec: str) -> list[int]:
    if "-" in spec:
        lo, _, hi = spec.partition("-")
        levels = list(range(int(lo), int(hi) + 1))
    else:
        levels = [int(p) for p in spec.split(",") if p]
    if not levels:
        raise ValueError(f"no levels in {spec!r}")
    return levels


def _parse_skill(entries: tuple[str, ...]) -> dict:
    accuracies = {}
    for entry in entries:
        name, _, value = entry.partition("=")
        accuracies[PhishingConcept(name.strip())] = float(value)
    return accuracies


@main.command()
@click.option("--policy", type=click.Choice(["oracle", "random", "skill"]), required=True)
@click.option("--levels", default="1", show_default=True, help="e.g. 1, 1-5 or 2,3.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--skill",
    "skill_entries",
    multiple=True,
    help="Per-concept accuracy, e.g. --skill lookalike_domain=0.8 (skill policy).",
)
@click.option("--csv", "as_csv", is_flag=True, help="Emit CSV instead of the aligned table.")
@click.option("--log", "log_path", default=None, help="Write the session replay log here.")
def simulate(policy, levels, seed, skill_entries, as_csv, log_path):
    """Play levels headlessly with a policy and print the per-level table.

    CSV columns: level, worms, phish, score, lives_lost, medals, timeouts,
    completed.
    """
    try:
        level_list = _parse_levels(levels)
        spec = PolicySpec(policy, seed=seed, accuracies=_parse_skill(skill_entries))
    except ValueError as exc:
        click.echo(f"bad arguments: {exc}", err=True)
        sys.exit(EXIT_BAD_ARGS)
    writer = ReplayWriter(Path(log_path)) if log_path else None
    try:
        rows, sess = simulate_run(spec, level_list, seed, replay=writer)
    except ValueError as exc:
        click.echo(f"bad arguments: {exc}", err=True)
        sys.exit(EXIT_BAD_ARGS)

    columns = ["level", "worms", "phish", "score", "lives_lost", "medals", "timeouts", "completed"]
    table = [
        [r.level, r.worms, r.phish, r.score, r.lives_lost, r.medals, r.timeouts, r.completed]
        for r in rows
    ]
    if as_csv:
        buf = io.StringIO()
        writer_ = csv.writer(buf)
        writer_.writerow(columns)
        writer_.writerows(table)
        click.echo(buf.getvalue(), nl=False)
    else:
        widths = [
            max(len(str(col)), *(len(str(row[i])) for row in table)) if table else len(str(col))
            for i, col in enumerate(columns)
        ]
        click.echo("  ".join(str(c).ljust(w) for c, w in zip(columns, widths)))
        for row in table:
            click.echo("  ".join(str(v).ljust(w) for v, w in zip(row, widths)))
    click.echo(f"final: phase={sess.state.phase.value} score={sess.state.score} "
               f"digest={state_digest(sess)[:16]}")


@main.command()
@click.argument("log_path")
@click.option("--corpus", "corpus_path", default=None)
@click.option("--rules", "rules_path", default=None)
def replay(log_path, corpus_path, rules_path):
    """Re-drive a replay log and verify every recorded state digest."""
    brands, rules = _load_rules(rules_path)
    corpus = _load_corpus(corpus_path) if corpus_path else None
    try:
        lines = Path(log_path).read_text("utf-8").splitlines()
    except OSError as exc:
        click.echo(f"cannot read log: {exc}", err=True)
        sys.exit(EXIT_IO)
    sess, divergences = replay_session(lines, corpus=corpus, brands=brands, rules=rules)
    click.echo(
        f"replayed {len(lines)} records: phase={sess.state.phase.value} "
        f"score={sess.state.score} lives={sess.state.lives} digest={state_digest(sess)[:16]}"
    )
    if divergences:
        for d in divergences:
            click.echo(
                f"divergence at record {d.index} ({d.record_type}): "
                f"expected {d.expected[:16]} got {d.actual[:16]}",
                err=True,
            )
        sys.exit(EXIT_VALIDATION)
    click.echo("no divergence")


if __name__ == "__main__":
    main()
