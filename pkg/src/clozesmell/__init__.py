"""Method-level code smell mining and cloze-prompt classification for Java."""

from .dataset import Dataset, Sample, SamplingSpec, build_dataset, load_jsonl, save_jsonl
from .evaluation import ConfusionMatrix, EvalReport, confusion, weighted_metrics
from .inference import AnswerDistribution, Prediction, ScoreRequest, classify, make_scorer, predict
from .ingest import MethodRecord, SourceFile, extract_methods, parse_file, scan_project
from .javaparse import SyntaxTree, parse_source
from .metrics import MethodMetrics, compute_metrics
from .prompts import (
    BUILTIN_TEMPLATES,
    MASK_MARKER,
    FilledPrompt,
    PromptTemplate,
    Verbalizer,
    builtin_verbalizers,
    candidate_words,
    fill,
    parse_template,
)
from .rules import CombinedLabel, DetectorConfig, SmellVerdict, combine_labels, detect, split_label

__version__ = "0.1.0"

__all__ = [
    "AnswerDistribution",
    "BUILTIN_TEMPLATES",
    "CombinedLabel",
    "ConfusionMatrix",
    "Dataset",
    "DetectorConfig",
    "EvalReport",
    "FilledPrompt",
    "MASK_MARKER",
    "MethodMetrics",
    "MethodRecord",
    "Prediction",
    "PromptTemplate",
    "Sample",
    "SamplingSpec",
    "ScoreRequest",
    "SmellVerdict",
    "SourceFile",
    "SyntaxTree",
    "Verbalizer",
    "build_dataset",
    "builtin_verbalizers",
    "candidate_words",
    "classify",
    "combine_labels",
    "compute_metrics",
    "confusion",
    "detect",
    "extract_methods",
    "fill",
    "load_jsonl",
    "make_scorer",
    "parse_file",
    "parse_source",
    "parse_template",
    "predict",
    "save_jsonl",
    "scan_project",
    "split_label",
    "weighted_metrics",
]
