#!/usr/bin/env python3
"""Run the full pipeline over the committed case-study fixture.

Creates a scratch project under ./case_study_run/, executes every stage, and
leaves the report bundle in ./case_study_run/out/. Delete the directory to
rerun from scratch; output bytes are identical run to run.
"""

from __future__ import annotations

import sys
from pathlib import Path

from click.testing import CliRunner

from threadreq.cli import main

ROOT = Path(__file__).resolve().parents[1]
FIXTURE = ROOT / "tests" / "fixtures" / "casestudy"


def run() -> int:
    target = Path.cwd() / "case_study_run"
    runner = CliRunner()
    result = runner.invoke(
        main,
        [
            "run-all",
            "--project", str(target),
            "--export", str(FIXTURE / "case_study_aggregate.json"),
            "--annotations", str(FIXTURE / "annotations.json"),
            "--ratings", str(FIXTURE / "ratings.csv"),
            "--out", str(target / "out"),
        ],
        catch_exceptions=False,
    )
    sys.stdout.write(result.output)
    if result.exit_code == 0:
        print(f"report bundle: {target / 'out'}")
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(run())
