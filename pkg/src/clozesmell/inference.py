"""Masked-answer scoring and verbalizer-based class prediction.

A Scorer turns a rendered prompt plus candidate answer words into a
probability distribution over exactly those candidates. Prediction takes the
candidate with the highest probability (lowest index on ties) and maps it to
its class through the verbalizer.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Protocol

from .dataset import Dataset
from .errors import (
    ConfigError,
    EmptyCandidates,
    MaskMissing,
    ScorerUnavailable,
    UnmappedWord,
)
from .prompts import MASK_MARKER, PromptTemplate, Verbalizer, candidate_words, fill
from .rules import LABELS, CombinedLabel

DEFAULT_MAX_SEQ_LENGTH = 512
DEFAULT_TRUNCATE_METHOD = "tail"


@dataclass(frozen=True)
class ScoreRequest:
    text: str
    candidates: tuple[str, ...]
    max_seq_length: int = DEFAULT_MAX_SEQ_LENGTH
    truncate_method: str = DEFAULT_TRUNCATE_METHOD

    def validate(self) -> None:
        if self.text.count(MASK_MARKER) != 1:
            raise MaskMissing(
                f"request text must contain exactly one {MASK_MARKER}, "
                f"found {self.text.count(MASK_MARKER)}"
            )
        if not self.candidates:
            raise EmptyCandidates("request carries no candidate words")
        if self.truncate_method not in ("head", "tail"):
            raise ConfigError(f"unknown truncate_method {self.truncate_method!r}")


@dataclass(frozen=True)
class AnswerDistribution:
    probs: tuple[float, ...]

    def validate(self, n_candidates: int) -> None:
        if len(self.probs) != n_candidates:
            raise ScorerUnavailable(
                f"scorer returned {len(self.probs)} probabilities for "
                f"{n_candidates} candidates"
            )
        if any(p < 0 for p in self.probs):
            raise ScorerUnavailable("scorer returned a negative probability")
        total = sum(self.probs)
        if abs(total - 1.0) > 1e-6:
            raise ScorerUnavailable(f"probabilities sum to {total}, not 1")


@dataclass(frozen=True)
class Prediction:
    label: CombinedLabel
    class_probs: tuple[float, float, float, float]
    top_word: str
    top_word_index: int


class Scorer(Protocol):
    def score(self, req: ScoreRequest) -> AnswerDistribution: ...


def score(scorer: Scorer, req: ScoreRequest) -> AnswerDistribution:
    """Run a scorer and enforce the distribution contract before use."""
    req.validate()
    dist = scorer.score(req)
    dist.validate(len(req.candidates))
    return dist


def predict(
    dist: AnswerDistribution,
    candidates: list[str] | tuple[str, ...],
    word_to_class: dict[str, int],
    aggregate: str = "max",
) -> Prediction:
    """Map a candidate-word distribution to a class prediction.

    The top word is the first index attaining the maximum probability. Class
    scores take the maximum word probability per class (mean available behind
    ``aggregate``), renormalized over the four classes.
    """
    unmapped = [w for w in candidates if w not in word_to_class]
    if unmapped:
        raise UnmappedWord(f"candidates missing from verbalizer map: {unmapped}")
    if aggregate not in ("max", "mean"):
        raise ConfigError(f"unknown aggregation {aggregate!r}")
    top_index = max(range(len(dist.probs)), key=lambda k: (dist.probs[k], -k))
    top_word = candidates[top_index]
    per_class: dict[int, list[float]] = {label: [] for label in LABELS}
    for word, prob in zip(candidates, dist.probs):
        per_class[word_to_class[word]].append(prob)
    if aggregate == "max":
        scores = [max(per_class[label], default=0.0) for label in LABELS]
    else:
        scores = [
            sum(per_class[label]) / len(per_class[label]) if per_class[label] else 0.0
            for label in LABELS
        ]
    total = sum(scores)
    class_probs = tuple(s / total for s in scores) if total > 0 else (0.25,) * 4
    return Prediction(
        label=CombinedLabel(word_to_class[top_word]),
        class_probs=class_probs,  # type: ignore[arg-type]
        top_word=top_word,
        top_word_index=top_index,
    )


def top_k(dist: AnswerDistribution, candidates: list[str] | tuple[str, ...], k: int) -> list[tuple[str, float]]:
    """Highest-probability candidates for debugging; classification uses k=1."""
    order = sorted(range(len(dist.probs)), key=lambda i: (-dist.probs[i], i))
    return [(candidates[i], dist.probs[i]) for i in order[:k]]


def classify(
    scorer: Scorer,
    template: PromptTemplate,
    verbalizer: Verbalizer,
    code: str,
    max_seq_length: int = DEFAULT_MAX_SEQ_LENGTH,
    truncate_method: str = DEFAULT_TRUNCATE_METHOD,
    aggregate: str = "max",
) -> Prediction:
    """fill -> score -> predict for one code snippet."""
    words, word_to_class = candidate_words(verbalizer)
    prompt = fill(template, code)
    req = ScoreRequest(
        text=prompt.render(),
        candidates=tuple(words),
        max_seq_length=max_seq_length,
        truncate_method=truncate_method,
    )
    dist = score(scorer, req)
    return predict(dist, words, word_to_class, aggregate=aggregate)


def classify_batch(
    scorer: Scorer,
    template: PromptTemplate,
    verbalizer: Verbalizer,
    codes: list[str],
    **kwargs,
) -> list[Prediction]:
    return [classify(scorer, template, verbalizer, code, **kwargs) for code in codes]


# -- scorer backends ---------------------------------------------------------


@dataclass
class OracleScorer:
    """One-hot on the first label word of the gold class.

    Gold labels are keyed by code snippet; the snippet appears verbatim in the
    rendered prompt, so the longest known code contained in the request text
    identifies the sample.
    """

    gold_by_code: dict[str, int]
    verbalizer: Verbalizer

    @classmethod
    def from_dataset(cls, ds: Dataset, verbalizer: Verbalizer) -> "OracleScorer":
        return cls(
            gold_by_code={s.code: s.label for s in ds.samples}, verbalizer=verbalizer
        )

    def score(self, req: ScoreRequest) -> AnswerDistribution:
        label = self._lookup(req.text)
        target = self.verbalizer.first_word(label)
        try:
            hit = req.candidates.index(target)
        except ValueError:
            raise ConfigError(
                f"gold word {target!r} is not among the candidates"
            ) from None
        probs = [0.0] * len(req.candidates)
        probs[hit] = 1.0
        return AnswerDistribution(probs=tuple(probs))

    def _lookup(self, text: str) -> int:
        best: str | None = None
        for code in self.gold_by_code:
            if code in text and (best is None or len(code) > len(best)):
                best = code
        if best is None:
            raise ConfigError("oracle scorer has no gold label for this prompt")
        return self.gold_by_code[best]


@dataclass
class HashScorer:
    """Deterministic pseudo-distribution derived from (text, candidates, seed)."""

    seed: int = 0

    def score(self, req: ScoreRequest) -> AnswerDistribution:
        digest = hashlib.sha256(
            json.dumps(
                [self.seed, req.text, list(req.candidates)], ensure_ascii=False
            ).encode("utf-8")
        ).digest()
        rng = random.Random(int.from_bytes(digest[:8], "big"))
        weights = [rng.random() + 1e-9 for _ in req.candidates]
        total = sum(weights)
        return AnswerDistribution(probs=tuple(w / total for w in weights))


@dataclass
class RemoteScorer:
    """Client of the model-server wire protocol."""

    endpoint: str
    timeout: float = 60.0
    checkpoint_id: str | None = None
    _session: object | None = field(default=None, repr=False, compare=False)

    def _http(self):
        if self._session is None:
            import requests

            self._session = requests.Session()
        return self._session

    def score(self, req: ScoreRequest) -> AnswerDistribution:
        payload = {
            "text": req.text,
            "candidates": list(req.candidates),
            "max_seq_length": req.max_seq_length,
            "truncate_method": req.truncate_method,
        }
        if self.checkpoint_id:
            payload["checkpoint_id"] = self.checkpoint_id
        raw = self._post("/score", payload)
        probs = raw.get("probs")
        if not isinstance(probs, list):
            raise ScorerUnavailable(f"malformed scorer response: {raw!r}")
        return AnswerDistribution(probs=tuple(float(p) for p in probs))

    def health(self) -> dict:
        import requests

        try:
            resp = self._http().get(self.endpoint.rstrip("/") + "/health", timeout=self.timeout)
        except requests.RequestException as exc:
            raise ScorerUnavailable(f"scorer endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ScorerUnavailable(f"/health returned {resp.status_code}")
        return resp.json()

    def fit(self, ds: Dataset, template_spec: str, verbalizer_mapping: dict) -> str:
        """Request prompt tuning on the server; later scores use the checkpoint."""
        samples = [
            {"id": s.id, "code": s.code, "label": s.label} for s in ds.samples
        ]
        raw = self._post(
            "/train",
            {
                "samples": samples,
                "template": template_spec,
                "verbalizer": verbalizer_mapping,
            },
        )
        checkpoint = raw.get("checkpoint_id")
        if not checkpoint:
            raise ScorerUnavailable(f"training returned no checkpoint: {raw!r}")
        self.checkpoint_id = checkpoint
        return checkpoint

    def _post(self, route: str, payload: dict) -> dict:
        import requests

        url = self.endpoint.rstrip("/") + route
        try:
            resp = self._http().post(url, json=payload, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ScorerUnavailable(f"scorer endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ScorerUnavailable(f"{route} returned {resp.status_code}: {resp.text[:200]}")
        return resp.json()


def make_scorer(kind: str, **params) -> Scorer:
    """Build a scorer backend: oracle, hash, or remote."""
    if kind == "oracle":
        gold = params.get("gold")
        verbalizer = params.get("verbalizer")
        if gold is None or verbalizer is None:
            raise ConfigError("oracle scorer needs gold= (Dataset or code->label map) and verbalizer=")
        if isinstance(gold, Dataset):
            return OracleScorer.from_dataset(gold, verbalizer)
        return OracleScorer(gold_by_code=dict(gold), verbalizer=verbalizer)
    if kind == "hash":
        return HashScorer(seed=int(params.get("seed", 0)))
    if kind == "remote":
        endpoint = params.get("endpoint")
        if not endpoint:
            raise ConfigError("remote scorer needs endpoint=")
        return RemoteScorer(endpoint=endpoint, timeout=float(params.get("timeout", 60.0)))
    raise ConfigError(f"unknown scorer kind {kind!r}")
