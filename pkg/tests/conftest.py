from __future__ import annotations

import re
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
MINIPROJECT = FIXTURES / "miniproject"


@pytest.fixture(scope="session")
def miniproject() -> Path:
    return MINIPROJECT


@pytest.fixture(scope="session")
def mini_records():
    from clozesmell.ingest import scan_project

    records, summary = scan_project(MINIPROJECT, "miniproj")
    assert summary.skipped == 0
    return records


def readme_expectations() -> dict:
    """Hand-derived oracle values parsed out of the fixture README."""
    text = (MINIPROJECT / "README.md").read_text(encoding="utf-8")
    rows = {}
    for line in text.splitlines():
        cells = [c.strip() for c in line.strip().strip("|").split("|")]
        if len(cells) == 7 and cells[0].endswith(".java"):
            rows[(cells[1], cells[2])] = {
                "file": cells[0],
                "nop": int(cells[3]),
                "loc": int(cells[4]),
                "cyclo": int(cells[5]),
                "nesting": int(cells[6]),
            }
    match = re.search(r"Label histogram: `(\{[^`]+\})`", text)
    assert match, "README must document the label histogram"
    histogram = eval(match.group(1))  # literal dict frozen in the README
    per_file = {
        m.group(1): int(m.group(2))
        for m in re.finditer(r"- (\S+\.java): (\d+) methods", text)
    }
    return {"methods": rows, "histogram": histogram, "per_file": per_file}


@pytest.fixture(scope="session")
def readme_oracle() -> dict:
    return readme_expectations()
