"""Command-line pipeline: extract -> build -> split -> sample -> classify -> eval.

Data goes to stdout or ``--out``; logs go to stderr. Exit codes: 0 ok,
1 fatal, 2 partial success (some inputs skipped). Report-producing commands
render a PNG figure next to the output file unless ``--no-figures``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import evaluation, figures
from .dataset import (
    Dataset,
    SamplingSpec,
    build_dataset,
    load_jsonl,
    save_jsonl,
    split,
    subsample,
)
from .errors import ClozeSmellError, ConfigError
from .ingest import dump_records_jsonl, load_records_jsonl, scan_project
from .inference import classify, make_scorer
from .prompts import (
    BUILTIN_TEMPLATES,
    PromptTemplate,
    Verbalizer,
    builtin_verbalizers,
    load_prompt_config,
    parse_template,
)

log = logging.getLogger("clozesmell")

ENDPOINT_ENV = "CLOZESMELL_ENDPOINT"


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return raw


def _setting(args, config: dict, name: str, default=None):
    """Flag wins over config file wins over default."""
    value = getattr(args, name.replace("-", "_"), None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _open_out(out: str | None):
    if out:
        return open(out, "w", encoding="utf-8"), True
    return sys.stdout, False


def _resolve_template(spec: str) -> tuple[PromptTemplate, str]:
    raw = BUILTIN_TEMPLATES.get(spec, spec)
    return parse_template(raw), raw


def _resolve_verbalizer(name_or_path: str) -> Verbalizer:
    builtins = builtin_verbalizers()
    if name_or_path in builtins:
        return builtins[name_or_path]
    if Path(name_or_path).exists():
        _, verbalizer = load_prompt_config(name_or_path)
        return verbalizer
    raise ConfigError(
        f"unknown verbalizer {name_or_path!r} (builtins: {sorted(builtins)})"
    )


def _build_scorer(args, config: dict, gold: Dataset | None, verbalizer: Verbalizer):
    kind = _setting(args, config, "scorer", "hash")
    seed = int(_setting(args, config, "seed", 0))
    if kind == "oracle":
        if gold is None:
            raise ConfigError("oracle scorer needs a gold dataset")
        return make_scorer("oracle", gold=gold, verbalizer=verbalizer)
    if kind == "hash":
        return make_scorer("hash", seed=seed)
    if kind == "remote":
        endpoint = (
            getattr(args, "endpoint", None)
            or os.environ.get(ENDPOINT_ENV)
            or config.get("endpoint")
        )
        if not endpoint:
            raise ConfigError(
                f"remote scorer needs --endpoint, ${ENDPOINT_ENV}, or config endpoint"
            )
        return make_scorer("remote", endpoint=endpoint)
    raise ConfigError(f"unknown scorer kind {kind!r}")


def _figure_path(out: str | None, explicit: str | None) -> Path | None:
    if explicit:
        return Path(explicit)
    if out:
        return Path(out).with_suffix(".png")
    return None


# -- commands ----------------------------------------------------------------


def cmd_extract(args) -> int:
    config = _load_config(args.config)
    jobs = int(_setting(args, config, "jobs", os.cpu_count() or 1))
    records, summary = scan_project(args.root, args.project, jobs=jobs)
    out, close = _open_out(args.out)
    try:
        for record in records:
            out.write(record.to_json() + "\n")
    finally:
        if close:
            out.close()
    log.info(
        "scan summary: seen=%d parsed=%d skipped=%d",
        summary.seen, summary.parsed, summary.skipped,
    )
    for path, error in summary.skipped_files:
        log.warning("skipped %s: %s", path, error)
    return 2 if summary.skipped else 0


def cmd_build(args) -> int:
    config = _load_config(args.config)
    from .rules import DetectorConfig

    thresholds = _setting(args, config, "thresholds", None)
    detector = (
        DetectorConfig.from_file(thresholds)
        if isinstance(thresholds, str)
        else DetectorConfig.from_dict(thresholds or {})
    )
    try:
        records = load_records_jsonl(args.records)
    except ValueError as exc:
        log.error("%s", exc)
        return 1
    ds, summary = build_dataset(records, detector, dedupe=not args.keep_duplicates)
    out, close = _open_out(args.out)
    try:
        for sample in ds.samples:
            out.write(
                json.dumps(
                    {"id": sample.id, "code": sample.code, "label": sample.label},
                    ensure_ascii=False,
                )
                + "\n"
            )
    finally:
        if close:
            out.close()
    hist = ds.histogram()
    hist_text = json.dumps(hist)
    if args.histogram:
        Path(args.histogram).write_text(hist_text + "\n", encoding="utf-8")
    log.info("label histogram: %s", hist_text)
    log.info(
        "built %d samples from %d records (%d duplicates removed)",
        len(ds), summary.total_records, summary.duplicates_removed,
    )
    fig_path = None if args.no_figures else _figure_path(args.out, args.figure)
    if fig_path:
        figures.render_label_histogram(hist, fig_path)
        log.info("wrote %s", fig_path)
    return 0


def cmd_split(args) -> int:
    config = _load_config(args.config)
    fractions = [float(x) for x in _setting(args, config, "fractions", "0.8,0.1,0.1").split(",")]
    if len(fractions) != 3:
        raise ConfigError("--fractions needs three comma-separated values")
    seed = int(_setting(args, config, "seed", 0))
    ds = load_jsonl(args.dataset)
    train, val, test = split(ds, *fractions, seed=seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train), ("val", val), ("test", test)):
        path = out_dir / f"{name}.jsonl"
        save_jsonl(part, path)
        log.info("wrote %s (%d samples)", path, len(part))
    return 0


def cmd_sample(args) -> int:
    config = _load_config(args.config)
    sizes = tuple(
        int(x) for x in str(_setting(args, config, "sizes", "0,64,256,512,1024")).split(",")
    )
    seed = int(_setting(args, config, "seed", 0))
    spec = SamplingSpec(sizes=sizes, seed=seed, nested=args.nested)
    train = load_jsonl(args.train)
    subsets = subsample(train, spec)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for size in sizes:
        path = out_dir / f"sample_{size}.jsonl"
        save_jsonl(subsets[size], path)
        log.info("wrote %s (%d samples)", path, size)
    return 0


def cmd_classify(args) -> int:
    config = _load_config(args.config)
    ds = load_jsonl(args.dataset)
    template, _ = _resolve_template(_setting(args, config, "template", "P1"))
    verbalizer = _resolve_verbalizer(_setting(args, config, "verbalizer", "V1"))
    scorer = _build_scorer(args, config, gold=ds, verbalizer=verbalizer)
    aggregate = _setting(args, config, "aggregate", "max")
    max_len = int(_setting(args, config, "max_seq_length", 512))
    truncate = _setting(args, config, "truncate_method", "tail")
    jobs = int(_setting(args, config, "jobs", 1))

    def predict_one(sample):
        return classify(
            scorer, template, verbalizer, sample.code,
            max_seq_length=max_len, truncate_method=truncate, aggregate=aggregate,
        )

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            predictions = list(pool.map(predict_one, ds.samples))
    else:
        predictions = [predict_one(sample) for sample in ds.samples]
    out, close = _open_out(args.out)
    try:
        for sample, prediction in zip(ds.samples, predictions):
            out.write(
                json.dumps(
                    {
                        "id": sample.id,
                        "label": prediction.label.value,
                        "top_word": prediction.top_word,
                        "class_probs": [round(p, 6) for p in prediction.class_probs],
                    }
                )
                + "\n"
            )
    finally:
        if close:
            out.close()
    return 0


def _load_predictions(path: str) -> dict[str, int]:
    preds: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            raw = json.loads(line)
            if "id" not in raw or "label" not in raw:
                raise ConfigError(f"{path}:{lineno}: prediction lines need id and label")
            preds[raw["id"]] = int(raw["label"])
    return preds


def cmd_eval(args) -> int:
    preds = _load_predictions(args.predictions)
    gold = load_jsonl(args.gold)
    missing = [s.id for s in gold.samples if s.id not in preds]
    if missing:
        raise ConfigError(f"predictions missing for {len(missing)} ids, e.g. {missing[:3]}")
    golds = [s.label for s in gold.samples]
    predicted = [preds[s.id] for s in gold.samples]
    cm = evaluation.confusion(golds, predicted)
    report = evaluation.weighted_metrics(cm)
    payload = report.as_dict()
    if args.per_project:
        by_project: dict[str, tuple[list[int], list[int]]] = {}
        for sample in gold.samples:
            bucket = by_project.setdefault(sample.project, ([], []))
            bucket[0].append(sample.label)
            bucket[1].append(preds[sample.id])
        payload["per_project"] = {
            project: evaluation.evaluate_predictions(g, p).as_dict()
            for project, (g, p) in sorted(by_project.items())
        }
    out, close = _open_out(args.out)
    try:
        out.write(json.dumps(payload, indent=2) + "\n")
    finally:
        if close:
            out.close()
    fig_path = None if args.no_figures else _figure_path(args.out, args.figure)
    if fig_path:
        figures.render_confusion_matrix(cm, fig_path)
        log.info("wrote %s", fig_path)
    return 0


def cmd_grid(args) -> int:
    config = _load_config(args.config)
    ds = load_jsonl(args.dataset)
    template_names = _setting(args, config, "templates", "P1,P2,P3").split(",")
    verbalizer_names = _setting(args, config, "verbalizers", "V1,V2").split(",")
    templates = {name: _resolve_template(name)[0] for name in template_names}
    verbalizers = {name: _resolve_verbalizer(name) for name in verbalizer_names}
    scorer = _build_scorer(args, config, gold=ds, verbalizer=next(iter(verbalizers.values())))
    grid = evaluation.run_grid(scorer, templates, verbalizers, ds)
    out, close = _open_out(args.out)
    try:
        evaluation.write_grid_csv(grid, out)
    finally:
        if close:
            out.close()
    fig_path = None if args.no_figures else _figure_path(args.out, args.figure)
    if fig_path:
        figures.render_grid(grid, fig_path)
        log.info("wrote %s", fig_path)
    return 0


def cmd_small_sample(args) -> int:
    config = _load_config(args.config)
    train = load_jsonl(args.train)
    test = load_jsonl(args.test)
    sizes = tuple(
        int(x) for x in str(_setting(args, config, "sizes", "0,64,256,512,1024")).split(",")
    )
    seed = int(_setting(args, config, "seed", 0))
    spec = SamplingSpec(sizes=sizes, seed=seed, nested=args.nested)
    template_raw = _setting(args, config, "template", "P1")
    template, template_spec = _resolve_template(template_raw)
    verbalizer = _resolve_verbalizer(_setting(args, config, "verbalizer", "V1"))
    scorer = _build_scorer(args, config, gold=test, verbalizer=verbalizer)
    results = evaluation.run_small_sample(
        scorer, spec, train, test, template, verbalizer, template_spec=template_spec
    )
    payload = {str(size): report.as_dict() for size, report in results.items()}
    out, close = _open_out(args.out)
    try:
        out.write(json.dumps(payload, indent=2) + "\n")
    finally:
        if close:
            out.close()
    fig_path = None if args.no_figures else _figure_path(args.out, args.figure)
    if fig_path:
        figures.render_small_sample(results, fig_path)
        log.info("wrote %s", fig_path)
    return 0


# -- parser ------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, figures_opt: bool = False) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--seed", type=int, default=None, help="run seed")
    if figures_opt:
        parser.add_argument("--figure", help="explicit figure path")
        parser.add_argument(
            "--no-figures", action="store_true", help="skip figure rendering"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clozesmell",
        description="Mine Java methods, label smells, and classify via cloze prompts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="scan a Java project into method records")
    p.add_argument("root", help="project root directory")
    p.add_argument("--project", required=True, help="project name for provenance")
    p.add_argument("--jobs", type=int, default=None, help="parallel workers")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("build", help="label records and emit a dataset")
    p.add_argument("records", help="method-record JSONL from extract")
    p.add_argument("--thresholds", help="detector threshold JSON file")
    p.add_argument("--histogram", help="write the label histogram JSON here")
    p.add_argument("--keep-duplicates", action="store_true")
    _add_common(p, figures_opt=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("split", help="train/val/test partition")
    p.add_argument("dataset")
    p.add_argument("--fractions", default=None, help="e.g. 0.8,0.1,0.1")
    p.add_argument("--out-dir", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("sample", help="draw small-size training subsets")
    p.add_argument("train")
    p.add_argument("--sizes", default=None, help="e.g. 0,64,256,512,1024")
    p.add_argument("--nested", action="store_true", help="prefix-nested subsets")
    p.add_argument("--out-dir", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("classify", help="predict labels for a dataset")
    p.add_argument("dataset")
    p.add_argument("--scorer", choices=("oracle", "hash", "remote"), default=None)
    p.add_argument("--endpoint", help="remote scorer URL")
    p.add_argument("--template", default=None, help="builtin name (P1..P3) or spec string")
    p.add_argument("--verbalizer", default=None, help="builtin name (V1, V2) or prompt-config path")
    p.add_argument("--aggregate", choices=("max", "mean"), default=None)
    p.add_argument("--max-seq-length", dest="max_seq_length", type=int, default=None)
    p.add_argument("--truncate-method", dest="truncate_method", choices=("head", "tail"), default=None)
    p.add_argument("--jobs", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("predictions")
    p.add_argument("gold")
    p.add_argument("--per-project", action="store_true")
    _add_common(p, figures_opt=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid", help="template x verbalizer evaluation grid")
    p.add_argument("dataset")
    p.add_argument("--scorer", choices=("oracle", "hash", "remote"), default=None)
    p.add_argument("--endpoint")
    p.add_argument("--templates", default=None)
    p.add_argument("--verbalizers", default=None)
    _add_common(p, figures_opt=True)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("small-sample", help="zero/small-shot scaling runs")
    p.add_argument("train")
    p.add_argument("test")
    p.add_argument("--scorer", choices=("oracle", "hash", "remote"), default=None)
    p.add_argument("--endpoint")
    p.add_argument("--sizes", default=None)
    p.add_argument("--nested", action="store_true")
    p.add_argument("--template", default=None)
    p.add_argument("--verbalizer", default=None)
    _add_common(p, figures_opt=True)
    p.set_defaults(func=cmd_small_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s"
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ClozeSmellError as exc:
        log.error("%s", exc)
        return 1
    except OSError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
