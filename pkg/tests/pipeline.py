"""The fetch -> build-distributions -> analyze -> evaluate run over the shipped fixtures.

Run as a script to rewrite the golden outputs after an intended change:

    python tests/pipeline.py
"""

from __future__ import annotations

import io
import shutil
from pathlib import Path

from skillminer.cli import run

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"


def _run(argv: list[str]) -> str:
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, env={}, stdout=out, stderr=err)
    if code != 0:
        raise RuntimeError(f"skillminer {argv[0]} exited {code}: {err.getvalue()}")
    return out.getvalue()


def run_pipeline(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    archive = str(out / "archive.json")
    _run([
        "fetch", "--repos", "kit/lantern", "--since", "2020-01-01T00:00:00Z", "--page-size", "2",
        "--fixtures", str(FIXTURES / "http" / "small-repo"), "--captured-at", "2021-06-01T00:00:00Z",
        "--output", archive,
    ])
    _run(["build-distributions", "--archive", archive, "--output", str(out / "distributions")])
    _run(["analyze", "--archive", archive, "--distributions", str(out / "distributions"), "--output", str(out / "reports")])
    text = _run(["analyze", "--archive", archive, "--distributions", str(out / "distributions"), "--format", "text"])
    (out / "analyze.txt").write_text(text, encoding="utf-8")
    _run([
        "evaluate", "--assessments", str(GOLDEN / "assessments.csv"), "--reports", str(out / "reports"),
        "--output", str(out / "precision.txt"),
    ])


def output_files(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file() and p.name != "assessments.csv"
    }


if __name__ == "__main__":
    for child in GOLDEN.iterdir():
        if child.name != "assessments.csv":
            shutil.rmtree(child) if child.is_dir() else child.unlink()
    run_pipeline(GOLDEN)
