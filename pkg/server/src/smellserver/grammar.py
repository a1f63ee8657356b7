"""Template-spec grammar shared with pipeline clients over the wire.

Specs are strings over [MASK], [CODE], [SOFT], and [SOFT]*k tokens plus
literal text. The server re-validates specs arriving on /train with the same
rules the pipeline applies: exactly one mask, exactly one code slot, positive
soft repeat counts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN_RE = re.compile(r"\[MASK\]|\[CODE\]|\[SOFT\](?:\*(\d+))?")


class GrammarError(ValueError):
    pass


@dataclass(frozen=True)
class TemplateSpec:
    parts: tuple[tuple[str, str | int], ...]  # (kind, payload): literal/mask/code/soft

    @property
    def soft_count(self) -> int:
        return sum(1 for kind, _ in self.parts if kind == "soft")

    def render(self, code: str, mask_marker: str) -> str:
        chunks = []
        for kind, payload in self.parts:
            if kind == "literal":
                chunks.append(payload)
            elif kind == "mask":
                chunks.append(mask_marker)
            elif kind == "code":
                chunks.append(code)
            else:
                chunks.append(f"<soft_{payload}>")
        return "".join(chunks)


def parse_spec(spec: str) -> TemplateSpec:
    if not spec:
        raise GrammarError("template spec is empty")
    for match in re.finditer(r"\[SOFT\]\*", spec):
        if not re.match(r"\d", spec[match.end() :] or " "):
            raise GrammarError("malformed soft repetition")
    parts: list[tuple[str, str | int]] = []
    soft_index = 0
    pos = 0
    for match in _TOKEN_RE.finditer(spec):
        if match.start() > pos:
            parts.append(("literal", spec[pos : match.start()]))
        token = match.group(0)
        if token == "[MASK]":
            parts.append(("mask", ""))
        elif token == "[CODE]":
            parts.append(("code", ""))
        else:
            repeat = int(match.group(1)) if match.group(1) is not None else 1
            if repeat < 1:
                raise GrammarError("malformed soft repetition")
            for _ in range(repeat):
                parts.append(("soft", soft_index))
                soft_index += 1
        pos = match.end()
    if pos < len(spec):
        parts.append(("literal", spec[pos:]))
    masks = sum(1 for kind, _ in parts if kind == "mask")
    codes = sum(1 for kind, _ in parts if kind == "code")
    if masks != 1:
        raise GrammarError(f"template must contain exactly one [MASK], found {masks}")
    if codes != 1:
        raise GrammarError(f"template must contain exactly one [CODE], found {codes}")
    return TemplateSpec(parts=tuple(parts))
