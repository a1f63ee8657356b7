"""Exception types shared across the pipeline."""

from __future__ import annotations


class ClozeSmellError(Exception):
    """Base class for all pipeline errors."""


class JavaSyntaxError(ClozeSmellError):
    """Source file is not parseable Java."""

    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
        self.message = message


class InvalidLabel(ClozeSmellError):
    """Combined label outside {0, 1, 2, 3}."""


class EmptyInput(ClozeSmellError):
    """An operation received an empty record or sample list."""


class BadFractions(ClozeSmellError):
    """Split fractions are negative or do not sum to 1."""


class SizeExceedsPool(ClozeSmellError):
    """A requested subsample size exceeds the training pool."""


class SchemaError(ClozeSmellError):
    """Persisted data violates the JSONL schema."""


class TemplateError(ClozeSmellError):
    """Malformed prompt template specification."""


class VerbalizerError(ClozeSmellError):
    """Malformed verbalizer (missing class, duplicate word, ...)."""


class EmptyCode(ClozeSmellError):
    """Empty code snippet passed to a prompt slot."""


class MaskMissing(ClozeSmellError):
    """Rendered prompt does not contain exactly one mask marker."""


class EmptyCandidates(ClozeSmellError):
    """Score request carries no candidate words."""


class UnmappedWord(ClozeSmellError):
    """A candidate word has no class in the verbalizer map."""


class ScorerUnavailable(ClozeSmellError):
    """Remote scorer endpoint cannot be reached or answered with an error."""


class ConfigError(ClozeSmellError):
    """Invalid run, detector, or scorer configuration."""


class LengthMismatch(ClozeSmellError):
    """Gold and predicted label lists differ in length."""


class EmptyMatrix(ClozeSmellError):
    """Confusion matrix holds no samples."""
