"""Structural method metrics feeding the smell detection rules."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from .ingest import MethodRecord
from .javaparse import SyntaxTree, Token, code_lines, tokenize

_BRANCH_KEYWORDS = frozenset({"if", "for", "while", "case", "catch"})
_BRANCH_OPS = frozenset({"&&", "||"})
# A '{' directly after one of these opens a data initializer, not a block.
_INITIALIZER_PREV = frozenset({"=", ",", "(", "]"})


@dataclass(frozen=True)
class MethodMetrics:
    nop: int
    loc: int
    cyclo: int
    max_nesting: int


def count_parameters(record: MethodRecord) -> int:
    return len(record.parameter_names)


def _body_tokens(record: MethodRecord, tree: SyntaxTree | None) -> list[Token]:
    # body_text is the verbatim declaration span, so tokenizing it is exact;
    # the tree argument is accepted for callers that already hold one.
    del tree
    return tokenize(record.body_text, record.file_path)


def count_loc(record: MethodRecord) -> int:
    """Physical lines from declaration through closing brace, minus blank and
    comment-only lines. A trailing comment does not disqualify a code line."""
    tokens = tokenize(record.body_text, record.file_path)
    return len(code_lines(tokens))


def cyclomatic_complexity(record: MethodRecord, tree: SyntaxTree | None = None) -> int:
    """1 + decision points: if / for / while / do / case / catch / ternary / && / ||.

    Loops are counted through their `for` and `while` keywords; counting the
    trailing `while` of a do-while (and not `do`) gives each loop exactly one
    point. `default` labels and bare `switch` are not decision points. A `?`
    counts as a ternary unless it sits in a generic wildcard position, where
    the preceding token is `<` or `,`.
    """
    tokens = _body_tokens(record, tree)
    count = 1
    prev_text = ""
    for tok in tokens:
        if tok.kind == "word" and tok.text in _BRANCH_KEYWORDS:
            count += 1
        elif tok.kind == "punct" and tok.text in _BRANCH_OPS:
            count += 1
        elif tok.kind == "punct" and tok.text == "?" and prev_text not in ("<", ","):
            count += 1
        prev_text = tok.text
    return count


def max_nesting(record: MethodRecord, tree: SyntaxTree | None = None) -> int:
    """Depth of the deepest statement block, the method body itself at depth 0.

    Braces opening array or annotation initializers are classified by their
    preceding token and excluded from the depth count.
    """
    tokens = _body_tokens(record, tree)
    stack: list[str] = []  # "block" | "init" per open brace
    deepest = 0
    prev_text = ""
    for tok in tokens:
        if tok.kind == "punct" and tok.text == "{":
            if prev_text in _INITIALIZER_PREV or (stack and stack[-1] == "init"):
                stack.append("init")
            else:
                stack.append("block")
                blocks = sum(1 for kind in stack if kind == "block")
                deepest = max(deepest, blocks - 1)  # method body brace is level 0
        elif tok.kind == "punct" and tok.text == "}":
            if stack:
                stack.pop()
        prev_text = tok.text
    return deepest


def compute_metrics(record: MethodRecord, tree: SyntaxTree | None = None) -> MethodMetrics:
    return MethodMetrics(
        nop=count_parameters(record),
        loc=count_loc(record),
        cyclo=cyclomatic_complexity(record, tree),
        max_nesting=max_nesting(record, tree),
    )


CSV_HEADER = ["project", "file", "class", "method", "nop", "loc", "cyclo", "max_nesting"]


def write_metrics_csv(
    rows: list[tuple[MethodRecord, MethodMetrics]], out: TextIO | str | Path
) -> None:
    """Export metrics with the mandatory header row."""
    close = False
    if isinstance(out, (str, Path)):
        out = open(out, "w", newline="", encoding="utf-8")
        close = True
    try:
        writer = csv.writer(out)
        writer.writerow(CSV_HEADER)
        for record, metrics in rows:
            writer.writerow([
                record.project, record.file_path, record.class_name,
                record.method_name, metrics.nop, metrics.loc,
                metrics.cyclo, metrics.max_nesting,
            ])
    finally:
        if close:
            out.close()
