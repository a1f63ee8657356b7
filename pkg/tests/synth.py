"""Deterministic synthetic Java corpus for the larger test fixtures.

Generates method bodies whose metrics land in a requested smell class, so
gold labels are known by construction and verified against the detector at
build time. Everything is seeded; two calls with the same arguments produce
byte-identical datasets.
"""

from __future__ import annotations

import random

from clozesmell.dataset import Dataset, Sample
from clozesmell.ingest import MethodRecord, SourceFile, extract_methods, parse_file
from clozesmell.metrics import compute_metrics
from clozesmell.rules import DetectorConfig, combine_labels, detect

_CLEAN_BODIES = [
    "int pick_{n}(int a, int b) {{ return a > b ? a : b; }}",
    "void log_{n}(String message) {{ System.out.println(message); }}",
    "int scale_{n}(int v) {{\n    return v * {n};\n}}",
    "boolean empty_{n}(String s) {{ return s.isEmpty(); }}",
    "long sum_{n}(long a, long b, long c) {{\n    long t = a + b;\n    return t + c;\n}}",
]


def _long_params(n: int) -> str:
    params = ", ".join(f"int p{k}" for k in range(7))
    return f"int spread_{n}({params}) {{ return p0 + p6 + {n}; }}"


def _long_body(n: int, params: str, name: str) -> str:
    # loc >= 101 via 32 three-line if-stanzas inside a for; cyclo and nesting
    # clear the composite thresholds by construction
    lines = [f"int {name}_{n}({params}) {{", "    int acc = 0;"]
    lines.append("    for (int i = 0; i < 8; i++) {")
    for k in range(32):
        lines.append(f"        if (acc % {k + 2} == 0) {{")
        lines.append(f"            if (i > {k % 7}) {{ acc += {k}; }}")
        lines.append("        }")
    lines.append("    }")
    lines.append("    return acc;")
    lines.append("}")
    return "\n".join(lines)


def make_method_source(label: int, n: int, rng: random.Random) -> str:
    if label == 0:
        return _CLEAN_BODIES[rng.randrange(len(_CLEAN_BODIES))].format(n=n)
    if label == 1:
        return _long_params(n)
    if label == 2:
        return _long_body(n, "int seed", "churn")
    params = ", ".join(f"int q{k}" for k in range(8))
    return _long_body(n, params, "sprawl")


def make_records(
    n_samples: int, seed: int = 7, project: str = "synth",
    class_weights: tuple[float, ...] = (0.55, 0.18, 0.15, 0.12),
) -> list[MethodRecord]:
    rng = random.Random(f"synth:{seed}")
    records = []
    for n in range(n_samples):
        # first pass cycles the labels so every class appears even in tiny sets
        if n < 4:
            label = n
        else:
            label = rng.choices((0, 1, 2, 3), weights=class_weights)[0]
        source = f"class Synth{n} {{\n{make_method_source(label, n, rng)}\n}}\n"
        file = SourceFile(path=f"{project}/Synth{n}.java", text=source, project=project)
        recs = extract_methods(parse_file(file), file)
        assert len(recs) == 1
        records.append(recs[0])
    return records


def make_dataset(n_samples: int, seed: int = 7, project: str = "synth") -> Dataset:
    """Labeled dataset with every label present and verified by the detector."""
    cfg = DetectorConfig()
    samples = []
    for record in make_records(n_samples, seed=seed, project=project):
        label = combine_labels(detect(compute_metrics(record), cfg)).value
        samples.append(Sample(id=f"{project}/{record.method_name}", code=record.body_text, label=label))
    ds = Dataset(samples=samples)
    if n_samples >= 4:
        assert set(s.label for s in ds.samples) == {0, 1, 2, 3}, "all classes must appear"
    return ds
