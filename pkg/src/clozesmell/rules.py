"""Two-detector consensus smell rules and label-powerset combination.

A smell is present only when both of its configured detectors agree. The pair
of booleans (long parameter list, long method) maps onto one combined class:

    (False, False) -> 0    (True, False) -> 1
    (False, True)  -> 2    (True, True)  -> 3
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, InvalidLabel
from .metrics import MethodMetrics

LABELS = (0, 1, 2, 3)
NUM_CLASSES = 4


@dataclass(frozen=True)
class DetectorConfig:
    # Published defaults of the respective tools; every threshold is
    # configuration, overridable from a JSON file.
    lpl_designite_min_params: int = 6
    lpl_danphitsanuphan_min_params: int = 6
    lm_designite_min_loc: int = 101
    lm_marinescu_min_loc: int = 31
    lm_marinescu_min_cyclo: int = 10
    lm_marinescu_min_nesting: int = 3

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{f.name} must be an integer >= 1, got {value!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> "DetectorConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "DetectorConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown detector config keys: {sorted(unknown)}")
        return cls(**raw)


@dataclass(frozen=True)
class SmellVerdict:
    lpl: bool
    lm: bool


@dataclass(frozen=True)
class CombinedLabel:
    value: int

    def __post_init__(self):
        if self.value not in LABELS:
            raise InvalidLabel(f"combined label must be in 0..3, got {self.value!r}")


def detect(metrics: MethodMetrics, cfg: DetectorConfig | None = None) -> SmellVerdict:
    """Consensus verdict: each smell needs both of its detectors to fire."""
    cfg = cfg or DetectorConfig()
    lpl = (
        metrics.nop >= cfg.lpl_designite_min_params
        and metrics.nop >= cfg.lpl_danphitsanuphan_min_params
    )
    lm = metrics.loc >= cfg.lm_designite_min_loc and (
        metrics.loc >= cfg.lm_marinescu_min_loc
        and metrics.cyclo >= cfg.lm_marinescu_min_cyclo
        and metrics.max_nesting >= cfg.lm_marinescu_min_nesting
    )
    return SmellVerdict(lpl=lpl, lm=lm)


def combine_labels(verdict: SmellVerdict) -> CombinedLabel:
    return CombinedLabel(value=(1 if verdict.lpl else 0) + (2 if verdict.lm else 0))


def split_label(combined: CombinedLabel | int) -> SmellVerdict:
    value = combined.value if isinstance(combined, CombinedLabel) else combined
    if value not in LABELS:
        raise InvalidLabel(f"combined label must be in 0..3, got {value!r}")
    return SmellVerdict(lpl=bool(value & 1), lm=bool(value & 2))
