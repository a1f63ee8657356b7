"""Extract method declarations from Java projects into standalone records."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import JavaSyntaxError
from .javaparse import SyntaxTree, parse_source

log = logging.getLogger(__name__)

RECORD_FIELDS = (
    "project", "file_path", "class_name", "method_name", "signature",
    "start_line", "end_line", "body_text", "parameter_names",
)


@dataclass(frozen=True)
class SourceFile:
    path: str
    text: str
    project: str


@dataclass(frozen=True)
class MethodRecord:
    project: str
    file_path: str
    class_name: str
    method_name: str
    signature: str
    start_line: int
    end_line: int
    body_text: str
    parameter_names: tuple[str, ...]

    def to_json(self) -> str:
        d = asdict(self)
        d["parameter_names"] = list(self.parameter_names)
        return json.dumps(d, ensure_ascii=False)


@dataclass
class ScanSummary:
    seen: int = 0
    parsed: int = 0
    skipped: int = 0
    skipped_files: list[tuple[str, str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "seen": self.seen,
            "parsed": self.parsed,
            "skipped": self.skipped,
            "skipped_files": [{"path": p, "error": e} for p, e in self.skipped_files],
        }


def parse_file(file: SourceFile) -> SyntaxTree:
    """Parse one source file; raises JavaSyntaxError for unparseable input."""
    if not file.text:
        raise JavaSyntaxError(file.path, 1, "empty source file")
    return parse_source(file.text, file.path)


def extract_methods(tree: SyntaxTree, file: SourceFile) -> list[MethodRecord]:
    """One record per bodied method or constructor declaration, in source order.

    Bodyless declarations (abstract and interface methods) carry no code to
    classify and are skipped. Nested and anonymous class methods are included,
    attributed to their innermost enclosing type.
    """
    records = []
    for decl in tree.methods:
        if not decl.has_body:
            continue
        records.append(
            MethodRecord(
                project=file.project,
                file_path=file.path,
                class_name=decl.class_name,
                method_name=decl.name,
                signature=decl.signature,
                start_line=decl.start_line,
                end_line=decl.end_line,
                body_text=tree.text[decl.start : decl.end],
                parameter_names=decl.parameter_names,
            )
        )
    records.sort(key=lambda r: r.start_line)
    return records


def extract_from_path(path: Path, project: str) -> list[MethodRecord]:
    text = path.read_text(encoding="utf-8")
    file = SourceFile(path=str(path), text=text, project=project)
    return extract_methods(parse_file(file), file)


def scan_project(
    root: str | Path, project_name: str, jobs: int = 1
) -> tuple[list[MethodRecord], ScanSummary]:
    """Recursively extract every method under ``root``.

    Files are processed in lexicographic path order; unparseable or unreadable
    files are skipped and reported in the summary.
    """
    root = Path(root)
    if not root.is_dir():
        raise OSError(f"not a readable directory: {root}")
    paths = sorted(root.rglob("*.java"), key=lambda p: p.as_posix())
    summary = ScanSummary(seen=len(paths))
    records: list[MethodRecord] = []

    def work(path: Path) -> tuple[Path, list[MethodRecord] | None, str | None]:
        try:
            return path, extract_from_path(path, project_name), None
        except (JavaSyntaxError, UnicodeDecodeError, OSError) as exc:
            return path, None, str(exc)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, paths))
    else:
        results = [work(p) for p in paths]
    for path, recs, error in results:
        if recs is None:
            summary.skipped += 1
            summary.skipped_files.append((str(path), error or "unknown error"))
            log.warning("skipping %s: %s", path, error)
        else:
            summary.parsed += 1
            records.extend(recs)
    return records, summary


def dump_records_jsonl(records: list[MethodRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")


def load_records_jsonl(path: str | Path) -> list[MethodRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                records.append(
                    MethodRecord(
                        project=raw["project"],
                        file_path=raw["file_path"],
                        class_name=raw["class_name"],
                        method_name=raw["method_name"],
                        signature=raw["signature"],
                        start_line=raw["start_line"],
                        end_line=raw["end_line"],
                        body_text=raw["body_text"],
                        parameter_names=tuple(raw["parameter_names"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad record line: {exc}") from exc
    return records
