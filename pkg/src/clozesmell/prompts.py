"""Cloze prompt templates and verbalizer answer spaces.

Template specs are plain strings over four segment kinds:

    literal text ... [MASK] ... [CODE] ... [SOFT] / [SOFT]*k

Exactly one [MASK] and one [CODE] are required; [SOFT]*k expands to k opaque
soft tokens, rendered as ``<soft_0>``, ``<soft_1>``, ... Literal text is
preserved byte for byte, so the rendered prompt reproduces the spec exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyCode, TemplateError, VerbalizerError
from .rules import LABELS

MASK_MARKER = "[MASK]"

# Shipped template specs: hard, soft, and mixed cloze prompts.
BUILTIN_TEMPLATES = {
    "P1": "The method has [MASK] code smell. [CODE]",
    "P2": "[SOFT]*3 [MASK] [SOFT]*2. [CODE]",
    "P3": "[SOFT]*3 [MASK] code smell. [CODE]",
}

_TOKEN_RE = re.compile(r"\[MASK\]|\[CODE\]|\[SOFT\](?:\*(\d+))?")


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Mask:
    pass


@dataclass(frozen=True)
class Soft:
    index: int


@dataclass(frozen=True)
class CodeSlot:
    pass


Segment = Literal | Mask | Soft | CodeSlot


@dataclass(frozen=True)
class PromptTemplate:
    segments: tuple[Segment, ...]

    @property
    def soft_count(self) -> int:
        return sum(1 for seg in self.segments if isinstance(seg, Soft))


@dataclass(frozen=True)
class FilledPrompt:
    text_before_code: str
    code: str
    text_after_code: str
    mask_marker: str
    soft_count: int

    def render(self) -> str:
        return self.text_before_code + self.code + self.text_after_code


def parse_template(spec: str) -> PromptTemplate:
    if not spec:
        raise TemplateError("template spec is empty")
    segments: list[Segment] = []
    soft_index = 0
    pos = 0
    for match in _TOKEN_RE.finditer(spec):
        if match.start() > pos:
            segments.append(Literal(spec[pos : match.start()]))
        token = match.group(0)
        if token == "[MASK]":
            segments.append(Mask())
        elif token == "[CODE]":
            segments.append(CodeSlot())
        else:
            repeat = 1
            if match.group(1) is not None:
                repeat = int(match.group(1))
                if repeat < 1:
                    raise TemplateError(f"malformed soft repetition {token!r}")
            for _ in range(repeat):
                segments.append(Soft(soft_index))
                soft_index += 1
        pos = match.end()
    if pos < len(spec):
        segments.append(Literal(spec[pos:]))
    if "[SOFT]*" in spec and not _valid_soft_usages(spec):
        raise TemplateError("malformed soft repetition")
    masks = sum(1 for seg in segments if isinstance(seg, Mask))
    codes = sum(1 for seg in segments if isinstance(seg, CodeSlot))
    if masks != 1:
        raise TemplateError(f"template must contain exactly one [MASK], found {masks}")
    if codes != 1:
        raise TemplateError(f"template must contain exactly one [CODE], found {codes}")
    return PromptTemplate(segments=tuple(segments))


def _valid_soft_usages(spec: str) -> bool:
    # every '[SOFT]*' must be followed by digits; '[SOFT]*x' would otherwise
    # silently parse as a single soft token plus literal '*x'
    return all(
        re.match(r"\d", spec[m.end() :] or " ")
        for m in re.finditer(r"\[SOFT\]\*", spec)
    )


def render_template(template: PromptTemplate) -> str:
    """Inverse of parse_template on well-formed templates (soft runs collapse)."""
    parts: list[str] = []
    softs_pending = 0

    def flush_softs():
        nonlocal softs_pending
        if softs_pending == 1:
            parts.append("[SOFT]")
        elif softs_pending > 1:
            parts.append(f"[SOFT]*{softs_pending}")
        softs_pending = 0

    for seg in template.segments:
        if isinstance(seg, Soft):
            softs_pending += 1
            continue
        flush_softs()
        if isinstance(seg, Literal):
            parts.append(seg.text)
        elif isinstance(seg, Mask):
            parts.append("[MASK]")
        elif isinstance(seg, CodeSlot):
            parts.append("[CODE]")
    flush_softs()
    return "".join(parts)


def fill(template: PromptTemplate, code: str) -> FilledPrompt:
    """Substitute the code snippet into the template's code slot."""
    if not code:
        raise EmptyCode("cannot fill a template with empty code")
    before: list[str] = []
    after: list[str] = []
    target = before
    for seg in template.segments:
        if isinstance(seg, CodeSlot):
            target = after
        elif isinstance(seg, Literal):
            target.append(seg.text)
        elif isinstance(seg, Mask):
            target.append(MASK_MARKER)
        elif isinstance(seg, Soft):
            target.append(f"<soft_{seg.index}>")
    return FilledPrompt(
        text_before_code="".join(before),
        code=code,
        text_after_code="".join(after),
        mask_marker=MASK_MARKER,
        soft_count=template.soft_count,
    )


@dataclass(frozen=True)
class Verbalizer:
    classes: tuple[tuple[int, tuple[str, ...]], ...]

    @classmethod
    def from_mapping(cls, mapping: dict[int, list[str]]) -> "Verbalizer":
        """Build a verbalizer, folding casing variants to lowercase canon."""
        if set(mapping) != set(LABELS):
            raise VerbalizerError(
                f"verbalizer must define exactly classes {list(LABELS)}, got {sorted(mapping)}"
            )
        seen: dict[str, int] = {}
        classes = []
        for label in LABELS:
            words: list[str] = []
            for word in mapping[label]:
                canon = word.lower()
                if not canon:
                    raise VerbalizerError(f"class {label} has an empty label word")
                if canon in words:
                    continue  # casing alias of a word already in this class
                if canon in seen:
                    raise VerbalizerError(
                        f"label word {canon!r} appears in classes {seen[canon]} and {label}"
                    )
                seen[canon] = label
                words.append(canon)
            if not words:
                raise VerbalizerError(f"class {label} has no label words")
            classes.append((label, tuple(words)))
        return cls(classes=tuple(classes))

    def words_for(self, label: int) -> tuple[str, ...]:
        return dict(self.classes)[label]

    def first_word(self, label: int) -> str:
        return self.words_for(label)[0]


def candidate_words(verbalizer: Verbalizer) -> tuple[list[str], dict[str, int]]:
    """Flat answer space in class order, plus the word -> class inverse map."""
    words: list[str] = []
    word_to_class: dict[str, int] = {}
    for label, class_words in verbalizer.classes:
        for word in class_words:
            words.append(word)
            word_to_class[word] = label
    return words, word_to_class


def builtin_verbalizers() -> dict[str, Verbalizer]:
    return {
        "V1": Verbalizer.from_mapping({
            0: ["no"],
            1: ["long parameter list"],
            2: ["long method"],
            3: ["long method and long parameter list"],
        }),
        "V2": Verbalizer.from_mapping({
            0: ["no", "not", "zero"],
            1: ["long parameter list", "lpl"],
            2: ["long method", "lm"],
            3: ["long method and long parameter list", "two", "all"],
        }),
    }


def load_prompt_config(path: str | Path) -> tuple[PromptTemplate, Verbalizer]:
    """Read a ``{"template": str, "verbalizer": {"0": [...], ...}}`` JSON file."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if "template" not in raw or "verbalizer" not in raw:
        raise TemplateError(f"{path}: prompt config needs 'template' and 'verbalizer'")
    template = parse_template(raw["template"])
    try:
        mapping = {int(k): list(v) for k, v in raw["verbalizer"].items()}
    except (ValueError, TypeError) as exc:
        raise VerbalizerError(f"{path}: bad verbalizer mapping: {exc}") from exc
    return template, Verbalizer.from_mapping(mapping)
