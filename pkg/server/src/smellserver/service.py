"""JSON-over-HTTP scoring and prompt-tuning service."""

from __future__ import annotations

import json
import logging
import threading
from pathlib import Path

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse

from .config import MASK_MARKER, ServerConfig
from .grammar import GrammarError, parse_spec
from .model import MaskedScorer, UntruncatableError

log = logging.getLogger("smellserver")


class ModelHolder:
    def __init__(self, config: ServerConfig):
        self.config = config
        self.base: MaskedScorer | None = None
        self.checkpoints: dict[str, MaskedScorer] = {}
        self.train_lock = threading.Lock()

    @property
    def ready(self) -> bool:
        return self.base is not None

    def load(self) -> None:
        if self.base is None:
            log.info("loading model %s (seed %d)", self.config.model, self.config.seed)
            self.base = MaskedScorer(self.config)

    def scorer_for(self, checkpoint_id: str | None) -> MaskedScorer:
        if checkpoint_id is None:
            assert self.base is not None
            return self.base
        if checkpoint_id not in self.checkpoints:
            self.checkpoints[checkpoint_id] = MaskedScorer.load_checkpoint(
                self.config, checkpoint_id
            )
        return self.checkpoints[checkpoint_id]


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _validate_score_body(body: dict) -> str | None:
    text = body.get("text")
    candidates = body.get("candidates")
    if not isinstance(text, str):
        return "text must be a string"
    count = text.count(MASK_MARKER)
    if count != 1:
        return f"text must contain exactly one {MASK_MARKER}, found {count}"
    if not isinstance(candidates, list) or not candidates:
        return "candidates must be a non-empty list"
    if not all(isinstance(c, str) and c for c in candidates):
        return "candidates must be non-empty strings"
    return None


def create_app(config: ServerConfig | None = None, preload: bool = True) -> FastAPI:
    config = config or ServerConfig()
    app = FastAPI(title="smellserver")
    holder = ModelHolder(config)
    app.state.holder = holder
    if preload:
        holder.load()

    def score_one(body: dict):
        problem = _validate_score_body(body)
        if problem:
            return _error(400, problem)
        checkpoint_id = body.get("checkpoint_id")
        try:
            scorer = holder.scorer_for(checkpoint_id)
        except FileNotFoundError as exc:
            return _error(400, str(exc))
        try:
            outcome = scorer.score(
                text=body["text"],
                candidates=body["candidates"],
                max_seq_length=int(body.get("max_seq_length") or config.max_seq_length),
                truncate_method=body.get("truncate_method") or config.truncate_method,
                multiword_mode=body.get("multiword_mode") or config.multiword_mode,
            )
        except UntruncatableError as exc:
            return _error(422, str(exc))
        except ValueError as exc:
            return _error(400, str(exc))
        return {"probs": outcome.probs, "truncated": outcome.truncated}

    @app.get("/health")
    def health():
        if not holder.ready:
            return _error(503, "model not loaded")
        return {
            "model": config.model,
            "mask_token": MASK_MARKER,
            "multiword_mode": config.multiword_mode,
        }

    @app.post("/score")
    def score(body: dict = Body(...)):
        if not holder.ready:
            return _error(503, "model not loaded")
        return score_one(body)

    @app.post("/score_batch")
    def score_batch(body: dict = Body(...)):
        if not holder.ready:
            return _error(503, "model not loaded")
        items = body.get("items")
        if not isinstance(items, list):
            return _error(400, "body must carry items: [score requests]")
        results = []
        for item in items:
            outcome = score_one(item if isinstance(item, dict) else {})
            if isinstance(outcome, JSONResponse):
                return outcome  # first bad item fails the batch with its status
            results.append(outcome)
        return results

    @app.post("/train")
    def train(body: dict = Body(...)):
        if not holder.ready:
            return _error(503, "model not loaded")
        samples = body.get("samples")
        dataset_path = body.get("dataset_path")
        if dataset_path and not samples:
            try:
                samples = _read_jsonl(Path(dataset_path))
            except (OSError, ValueError) as exc:
                return _error(400, f"bad dataset_path: {exc}")
        if not isinstance(samples, list) or not samples:
            return _error(400, "training needs a non-empty samples list or dataset_path")
        for sample in samples:
            if not isinstance(sample, dict) or not isinstance(sample.get("code"), str):
                return _error(400, "each sample must be an object with code and label")
            if not isinstance(sample.get("label"), int) or not 0 <= sample["label"] <= 3:
                return _error(400, "sample labels must be integers in 0..3")
        try:
            spec = parse_spec(body.get("template") or "")
        except GrammarError as exc:
            return _error(400, f"bad template: {exc}")
        verbalizer_raw = body.get("verbalizer")
        if not isinstance(verbalizer_raw, dict):
            return _error(400, "training needs a verbalizer mapping")
        try:
            verbalizer = {int(k): [str(w) for w in v] for k, v in verbalizer_raw.items()}
        except (ValueError, TypeError) as exc:
            return _error(400, f"bad verbalizer: {exc}")
        if set(verbalizer) != {0, 1, 2, 3} or not all(verbalizer.values()):
            return _error(400, "verbalizer must define non-empty word lists for classes 0..3")
        try:
            run_config = config.with_overrides(body.get("overrides") or {})
        except ValueError as exc:
            return _error(400, str(exc))
        if not holder.train_lock.acquire(blocking=False):
            return _error(409, "training already running")
        try:
            scorer = MaskedScorer(run_config)
            stats = scorer.train(samples, spec, verbalizer, run_config)
            checkpoint_id = scorer.save_checkpoint(run_config)
            holder.checkpoints[checkpoint_id] = scorer
        except MemoryError:
            return _error(507, "insufficient memory for training run")
        except UntruncatableError as exc:
            return _error(400, str(exc))
        finally:
            holder.train_lock.release()
        return {
            "checkpoint_id": checkpoint_id,
            "initial_loss": stats["initial_loss"],
            "final_loss": stats["final_loss"],
            "epochs": run_config.epochs,
        }

    return app


def _read_jsonl(path: Path) -> list[dict]:
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                samples.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
    return samples
