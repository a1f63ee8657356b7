"""Labeled sample assembly, persistence, splitting, and small-size subsets."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BadFractions, EmptyInput, SchemaError, SizeExceedsPool
from .ingest import MethodRecord
from .metrics import compute_metrics
from .rules import LABELS, CombinedLabel, DetectorConfig, combine_labels, detect

DEFAULT_SIZES = (0, 64, 256, 512, 1024)


@dataclass(frozen=True)
class Sample:
    id: str
    code: str
    label: int  # combined class 0..3

    @property
    def project(self) -> str:
        return self.id.split("/", 1)[0] if "/" in self.id else "unknown"


@dataclass
class Dataset:
    samples: list[Sample] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @property
    def provenance(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for sample in self.samples:
            counts[sample.project] = counts.get(sample.project, 0) + 1
        return counts

    def histogram(self) -> dict[str, int]:
        counts = {str(label): 0 for label in LABELS}
        for sample in self.samples:
            counts[str(sample.label)] += 1
        return counts

    def ids(self) -> set[str]:
        return {s.id for s in self.samples}


@dataclass(frozen=True)
class SamplingSpec:
    sizes: tuple[int, ...] = DEFAULT_SIZES
    seed: int = 0
    nested: bool = False  # draw sizes as prefixes of one shuffle instead of independently

    def __post_init__(self):
        if any(size < 0 for size in self.sizes):
            raise SizeExceedsPool("sampling sizes must be non-negative")


def sample_id(record: MethodRecord) -> str:
    digest = hashlib.sha1(
        "\x1f".join(
            [
                record.project,
                record.file_path,
                record.class_name,
                record.method_name,
                str(record.start_line),
            ]
        ).encode("utf-8")
    ).hexdigest()[:12]
    return f"{record.project}/{digest}"


@dataclass
class BuildSummary:
    total_records: int = 0
    duplicates_removed: int = 0


def build_dataset(
    records: list[MethodRecord],
    cfg: DetectorConfig | None = None,
    dedupe: bool = True,
) -> tuple[Dataset, BuildSummary]:
    """Label every record and assemble samples; exact-body duplicates are
    dropped by default with the count reported."""
    if not records:
        raise EmptyInput("no method records to build a dataset from")
    cfg = cfg or DetectorConfig()
    summary = BuildSummary(total_records=len(records))
    seen_bodies: set[str] = set()
    seen_ids: set[str] = set()
    samples = []
    for record in records:
        if dedupe:
            body_key = hashlib.sha1(record.body_text.encode("utf-8")).hexdigest()
            if body_key in seen_bodies:
                summary.duplicates_removed += 1
                continue
            seen_bodies.add(body_key)
        label = combine_labels(detect(compute_metrics(record), cfg)).value
        sid = sample_id(record)
        while sid in seen_ids:  # hash-prefix collision, disambiguate deterministically
            sid += "+"
        seen_ids.add(sid)
        samples.append(Sample(id=sid, code=record.body_text, label=label))
    return Dataset(samples=samples), summary


def _target_sizes(total: int, fractions: tuple[float, float, float]) -> list[int]:
    exact = [total * f for f in fractions]
    sizes = [int(x) for x in exact]
    remainders = sorted(
        range(3), key=lambda k: (exact[k] - sizes[k], -k), reverse=True
    )
    for k in remainders[: total - sum(sizes)]:
        sizes[k] += 1
    return sizes


def split(
    ds: Dataset,
    train_frac: float,
    val_frac: float,
    test_frac: float,
    seed: int = 0,
) -> tuple[Dataset, Dataset, Dataset]:
    """Deterministic stratified partition into train/val/test."""
    fractions = (train_frac, val_frac, test_frac)
    if any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise BadFractions(f"fractions must be non-negative and sum to 1: {fractions}")
    targets = _target_sizes(len(ds), fractions)
    by_label: dict[int, list[Sample]] = {label: [] for label in LABELS}
    for sample in ds.samples:
        by_label[sample.label].append(sample)
    rng = random.Random(f"split:{seed}")
    parts: tuple[list[Sample], list[Sample], list[Sample]] = ([], [], [])
    for label in LABELS:
        pool = list(by_label[label])
        rng.shuffle(pool)
        class_targets = _target_sizes(len(pool), fractions)
        offset = 0
        for part, take in zip(parts, class_targets):
            part.extend(pool[offset : offset + take])
            offset += take
    # per-class rounding can leave the global sizes off by a sample or two;
    # move samples between parts until the exact targets hold
    for src in range(3):
        for dst in range(3):
            while len(parts[src]) > targets[src] and len(parts[dst]) < targets[dst]:
                parts[dst].append(parts[src].pop())
    order = {s.id: k for k, s in enumerate(ds.samples)}
    return tuple(
        Dataset(samples=sorted(part, key=lambda s: order[s.id])) for part in parts
    )


def subsample(train: Dataset, spec: SamplingSpec) -> dict[int, Dataset]:
    """Uniform without-replacement subsets of the training pool, one per size.

    Size 0 yields the empty dataset (the zero-shot scenario). By default each
    size is drawn independently under the spec seed; nested mode takes
    prefixes of a single shuffle instead.
    """
    if spec.sizes and max(spec.sizes) > len(train):
        raise SizeExceedsPool(
            f"requested {max(spec.sizes)} samples from a pool of {len(train)}"
        )
    out: dict[int, Dataset] = {}
    if spec.nested:
        pool = list(train.samples)
        random.Random(f"subsample:{spec.seed}").shuffle(pool)
        for size in spec.sizes:
            out[size] = Dataset(samples=list(pool[:size]))
        return out
    for size in spec.sizes:
        pool = list(train.samples)
        rng = random.Random(f"subsample:{spec.seed}:{size}")
        out[size] = Dataset(samples=rng.sample(pool, size))
    return out


def save_jsonl(ds: Dataset, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sample in ds.samples:
            fh.write(
                json.dumps(
                    {"id": sample.id, "code": sample.code, "label": sample.label},
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_jsonl(path: str | Path) -> Dataset:
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            if not isinstance(raw, dict):
                raise SchemaError(f"{path}:{lineno}: expected an object per line")
            missing = {"id", "code", "label"} - set(raw)
            if missing:
                raise SchemaError(f"{path}:{lineno}: missing fields {sorted(missing)}")
            label = raw["label"]
            if not isinstance(label, int) or label not in LABELS:
                raise SchemaError(f"{path}:{lineno}: label outside 0..3: {label!r}")
            if not isinstance(raw["id"], str) or not isinstance(raw["code"], str):
                raise SchemaError(f"{path}:{lineno}: id and code must be strings")
            samples.append(Sample(id=raw["id"], code=raw["code"], label=label))
    return Dataset(samples=samples)


def gold_labels(ds: Dataset) -> dict[str, CombinedLabel]:
    return {s.id: CombinedLabel(s.label) for s in ds.samples}
