"""Command-line entry point: fetch, build-distributions, analyze, evaluate.

Exit status is 0 on success, 1 for usage or validation errors and 2 when the
work itself fails (network, I/O).
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from pathlib import Path
from typing import Mapping, Sequence, TextIO

from .distributions import build_distributions, load_tables, save_tables
from .errors import RuntimeFailure, SkillminerError, ValidationError
from .evaluation import compute_precision, load_assessments, render_precision
from .exclusion import LANGUAGES, default_language_map, default_rules, load_rules
from .ingestion import TOKEN_ENV, FetchReport, FetchSpec, FixtureTransport, HttpxTransport, RecordingTransport, fetch_archive
from .model import load_archive, parse_timestamp, save_archive
from .rating import build_report, dumps_report, render_text, report_from_dict
from .signals import SignalConfig, default_scorer, load_lexicon

logger = logging.getLogger("skillminer")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _timestamp(text: str) -> datetime:
    try:
        return parse_timestamp(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid ISO-8601 timestamp: {text!r}") from None


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _languages(text: str) -> list[str]:
    by_lower = {lang.lower(): lang for lang in LANGUAGES}
    out = []
    for name in _csv_list(text):
        if name.lower() not in by_lower:
            raise argparse.ArgumentTypeError(f"unknown language {name!r}; choose from {', '.join(LANGUAGES)}")
        out.append(by_lower[name.lower()])
    if not out:
        raise argparse.ArgumentTypeError("at least one language is required")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skillminer", description="Detect OSS contribution skills from repository activity.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("fetch", help="mine GitHub into an archive file")
    p.add_argument("--users", type=_csv_list, default=[], help="comma-separated logins")
    p.add_argument("--repos", type=_csv_list, default=[], help="comma-separated owner/name")
    p.add_argument("--since", type=_timestamp)
    p.add_argument("--page-size", type=int, default=100)
    p.add_argument("--fixtures", type=Path, help="replay recorded responses from this directory")
    p.add_argument("--record", type=Path, help="record live responses into this directory")
    p.add_argument("--captured-at", type=_timestamp, help="fixed capture time (defaults to now)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", type=Path, required=True)

    p = sub.add_parser("build-distributions", help="build percentile baselines")
    p.add_argument("--archive", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True, help="directory for table files")
    p.add_argument("--population", type=Path, help="file with one login per line (default: every user)")
    p.add_argument("--users", type=_csv_list, help="comma-separated population logins")
    p.add_argument("--exclusion-rules", type=Path)
    p.add_argument("--as-of", type=_timestamp)
    p.add_argument("--nonzero-baselines", action="store_true", help="leave users without activity out of language tables")

    p = sub.add_parser("analyze", help="rate skills for users")
    p.add_argument("--archive", type=Path, required=True)
    p.add_argument("--distributions", type=Path, required=True)
    p.add_argument("--users", type=_csv_list, help="comma-separated logins (default: every user)")
    p.add_argument("--as-of", type=_timestamp)
    p.add_argument("--languages", type=_languages, default=list(LANGUAGES))
    p.add_argument("--exclusion-rules", type=Path)
    p.add_argument("--toxicity-lexicon", type=Path)
    p.add_argument("--negate-t7", action="store_true", help="count fast issue responses as the teaching signal")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--output", type=Path, help="directory for one report file per user (default: stdout)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("evaluate", help="precision of reports against self-assessments")
    p.add_argument("--assessments", type=Path, required=True)
    p.add_argument("--reports", type=Path, required=True)
    p.add_argument("--threshold", type=int, choices=(0, 3), action="append")
    p.add_argument("--direction", choices=("self", "tool"), default="self")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--output", type=Path)
    return parser


def _need_file(path: Path | None, flag: str) -> None:
    if path is not None and not path.is_file():
        raise ValidationError(f"{flag}: {path} is not a readable file")


def _need_dir(path: Path | None, flag: str) -> None:
    if path is not None and not path.is_dir():
        raise ValidationError(f"{flag}: {path} is not a directory")


def _write(text: str, path: Path | None, stdout: TextIO) -> None:
    if path is None:
        stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def cmd_fetch(args, env: Mapping[str, str], stdout: TextIO) -> None:
    _need_dir(args.fixtures, "--fixtures")
    spec = FetchSpec(tuple(args.users), tuple(args.repos), args.since, env.get(TOKEN_ENV), args.page_size)
    transport = FixtureTransport(args.fixtures) if args.fixtures else HttpxTransport()
    if args.record:
        transport = RecordingTransport(transport, args.record)
    clock = (lambda: args.captured_at) if args.captured_at else None
    report = FetchReport()
    kwargs = {"clock": clock} if clock else {}
    archive = fetch_archive(spec, transport, report=report, workers=args.workers, **kwargs)
    save_archive(archive, args.output)
    logger.info(
        "fetched %d users, %d repos, %d commits (%d requests, %d commits dropped without login)",
        len(archive.users), len(archive.repos), len(archive.commits), report.requests, report.dropped_commits,
    )


def _population(args, archive) -> list[str]:
    if args.population:
        lines = args.population.read_text(encoding="utf-8").splitlines()
        return [x.strip() for x in lines if x.strip() and not x.startswith("#")]
    if args.users:
        return args.users
    return [u.login for u in archive.users]


def cmd_build_distributions(args, env, stdout) -> None:
    _need_file(args.archive, "--archive")
    _need_file(args.population, "--population")
    _need_file(args.exclusion_rules, "--exclusion-rules")
    archive = load_archive(args.archive)
    rules = load_rules(args.exclusion_rules) if args.exclusion_rules else default_rules()
    as_of = args.as_of or archive.captured_at
    tables = build_distributions(
        archive, _population(args, archive), rules, default_language_map(), as_of, nonzero_baselines=args.nonzero_baselines
    )
    save_tables(tables, args.output)
    for metric_id in sorted(tables):
        if not tables[metric_id].usable:
            logger.warning("table %s has fewer than 2 samples and cannot back a signal", metric_id)


def cmd_analyze(args, env, stdout) -> None:
    _need_file(args.archive, "--archive")
    _need_dir(args.distributions, "--distributions")
    _need_file(args.exclusion_rules, "--exclusion-rules")
    _need_file(args.toxicity_lexicon, "--toxicity-lexicon")
    archive = load_archive(args.archive)
    tables = load_tables(args.distributions)
    rules = load_rules(args.exclusion_rules) if args.exclusion_rules else default_rules()
    scorer = load_lexicon(args.toxicity_lexicon) if args.toxicity_lexicon else default_scorer()
    config = SignalConfig(negate_t7=args.negate_t7)
    language_map = default_language_map()
    users = args.users if args.users is not None else [u.login for u in archive.users]
    if not users:
        raise ValidationError("no users to analyze")
    for login in users:
        if not archive.has_user(login) or "/" in login:
            raise ValidationError(f"user {login!r} is not in the archive")
    users = sorted(dict.fromkeys(users), key=lambda x: (x.casefold(), x))

    def one(login):
        return build_report(login, archive, rules, language_map, tables, scorer, args.languages, args.as_of, config)

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        reports = list(pool.map(one, users))

    if args.output is not None:
        args.output.mkdir(parents=True, exist_ok=True)
        for report in reports:
            if args.format == "json":
                (args.output / f"{report.login}.json").write_text(dumps_report(report), encoding="utf-8")
            else:
                (args.output / f"{report.login}.txt").write_text(render_text(report), encoding="utf-8")
    elif args.format == "json":
        stdout.write(json.dumps([r.to_dict() for r in reports], indent=2, ensure_ascii=False) + "\n")
    else:
        stdout.write("\n".join(render_text(r) for r in reports))


def cmd_evaluate(args, env, stdout) -> None:
    _need_file(args.assessments, "--assessments")
    _need_dir(args.reports, "--reports")
    assessments = load_assessments(args.assessments)
    reports = {}
    for path in sorted(args.reports.glob("*.json")):
        try:
            report = report_from_dict(json.loads(path.read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        reports[report.login] = report
    thresholds = sorted(set(args.threshold or (0, 3)))
    results = [compute_precision(assessments, reports, t, args.direction) for t in thresholds]
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in results], indent=2) + "\n"
    else:
        text = render_precision(results)
    _write(text, args.output, stdout)


COMMANDS = {
    "fetch": cmd_fetch,
    "build-distributions": cmd_build_distributions,
    "analyze": cmd_analyze,
    "evaluate": cmd_evaluate,
}


def run(argv: Sequence[str], env: Mapping[str, str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    env = os.environ if env is None else env
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout):
            args = parser.parse_args(list(argv))
    except UsageError as exc:
        print(exc, file=stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if not exc.code else 1

    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.INFO if args.verbose else logging.WARNING)
    try:
        COMMANDS[args.command](args, env, stdout)
        return 0
    except ValidationError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except (RuntimeFailure, SkillminerError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    finally:
        logger.removeHandler(handler)


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
