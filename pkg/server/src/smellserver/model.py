"""Compact masked language model with word-level hashing vocabulary.

The default backend is self-contained: a small transformer encoder over a
hash-bucketed word vocabulary, deterministic under the configured seed, so
the service runs (and trains) anywhere without downloading weights. Answer
words and phrases can be appended to the vocabulary as atomic entries
(single_token mode) or scored as the mean of their word-piece log
probabilities (subword_mean mode).
"""

from __future__ import annotations

import hashlib
import re
import uuid
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .config import MASK_MARKER, ServerConfig
from .grammar import TemplateSpec

PAD_ID = 0
UNK_ID = 1
MASK_ID = 2
SOFT_BASE = 3
SOFT_CAPACITY = 16
PHRASE_BASE = SOFT_BASE + SOFT_CAPACITY  # 19
PHRASE_CAPACITY = 64
BUCKET_BASE = PHRASE_BASE + PHRASE_CAPACITY  # 83
BUCKETS = 2048
VOCAB_SIZE = BUCKET_BASE + BUCKETS

_MARKER_RE = re.compile(r"\[MASK\]|<soft_(\d+)>")
_WORD_RE = re.compile(r"\w+|[^\w\s]")


class Tokenizer:
    """Splits text into word/punct tokens, hashing each into a fixed bucket."""

    def __init__(self):
        self.phrases: dict[str, int] = {}

    @staticmethod
    def bucket(word: str) -> int:
        digest = hashlib.sha1(word.encode("utf-8")).digest()
        return BUCKET_BASE + int.from_bytes(digest[:4], "big") % BUCKETS

    def words(self, text: str) -> list[str]:
        return _WORD_RE.findall(text)

    def encode(self, text: str) -> list[int]:
        """Token ids with [MASK] and <soft_k> markers mapped to reserved ids."""
        ids: list[int] = []
        pos = 0
        for match in _MARKER_RE.finditer(text):
            ids.extend(self.bucket(w) for w in self.words(text[pos : match.start()]))
            if match.group(0) == MASK_MARKER:
                ids.append(MASK_ID)
            else:
                soft_index = int(match.group(1))
                if soft_index >= SOFT_CAPACITY:
                    raise ValueError(f"soft token index {soft_index} exceeds capacity {SOFT_CAPACITY}")
                ids.append(SOFT_BASE + soft_index)
            pos = match.end()
        ids.extend(self.bucket(w) for w in self.words(text[pos:]))
        return ids

    def register_phrase(self, phrase: str) -> int:
        """Add an answer phrase to the word list as one vocabulary entry."""
        if phrase in self.phrases:
            return self.phrases[phrase]
        if len(self.phrases) >= PHRASE_CAPACITY:
            raise ValueError(f"phrase capacity {PHRASE_CAPACITY} exhausted")
        slot = PHRASE_BASE + len(self.phrases)
        self.phrases[phrase] = slot
        return slot

    def candidate_id(self, candidate: str) -> int:
        words = self.words(candidate)
        if len(words) == 1:
            return self.bucket(words[0])
        return self.register_phrase(candidate)

    def candidate_subtokens(self, candidate: str) -> list[int]:
        return [self.bucket(w) for w in self.words(candidate)]


class CompactMaskedLM(nn.Module):
    def __init__(self, d_model: int = 64, n_layers: int = 2, n_heads: int = 4,
                 max_len: int = 512):
        super().__init__()
        self.embedding = nn.Embedding(VOCAB_SIZE, d_model, padding_idx=PAD_ID)
        self.positions = nn.Embedding(max_len, d_model)
        layer = nn.TransformerEncoderLayer(
            d_model=d_model, nhead=n_heads, dim_feedforward=4 * d_model,
            dropout=0.0, batch_first=True, norm_first=True,
        )
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=n_layers, enable_nested_tensor=False
        )
        self.bias = nn.Parameter(torch.zeros(VOCAB_SIZE))
        self.max_len = max_len

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        # ids: (batch, seq) -> logits (batch, seq, vocab); output weights tied
        pos = torch.arange(ids.shape[1], device=ids.device)
        hidden = self.embedding(ids) + self.positions(pos)[None, :, :]
        hidden = self.encoder(hidden, src_key_padding_mask=ids == PAD_ID)
        return hidden @ self.embedding.weight.T + self.bias


@dataclass
class ScoreOutcome:
    probs: list[float]
    truncated: bool


class UntruncatableError(ValueError):
    """The mask cannot survive truncation to the requested length."""


class MaskedScorer:
    """Bundles tokenizer + model + scoring/tuning for one checkpoint state."""

    def __init__(self, config: ServerConfig):
        self.config = config
        self.tokenizer = Tokenizer()
        torch.manual_seed(config.seed)
        self.model = CompactMaskedLM(max_len=config.max_seq_length)
        self.model.eval()

    # -- scoring -------------------------------------------------------------

    def _prepare_ids(self, text: str, max_seq_length: int, truncate_method: str) -> tuple[list[int], bool]:
        ids = self.tokenizer.encode(text)
        truncated = False
        if len(ids) > max_seq_length:
            truncated = True
            ids = ids[:max_seq_length] if truncate_method == "tail" else ids[-max_seq_length:]
        if ids.count(MASK_ID) != 1:
            raise UntruncatableError(
                f"mask does not survive {truncate_method} truncation to {max_seq_length} tokens"
            )
        return ids, truncated

    def mask_log_probs(self, text: str, max_seq_length: int, truncate_method: str) -> tuple[torch.Tensor, bool]:
        ids, truncated = self._prepare_ids(text, max_seq_length, truncate_method)
        mask_pos = ids.index(MASK_ID)
        with torch.no_grad():
            logits = self.model(torch.tensor([ids]))[0, mask_pos]
        return torch.log_softmax(logits, dim=-1), truncated

    def score(
        self,
        text: str,
        candidates: list[str],
        max_seq_length: int | None = None,
        truncate_method: str | None = None,
        multiword_mode: str | None = None,
    ) -> ScoreOutcome:
        max_seq_length = max_seq_length or self.config.max_seq_length
        max_seq_length = min(max_seq_length, self.model.max_len)  # position table bound
        truncate_method = truncate_method or self.config.truncate_method
        multiword_mode = multiword_mode or self.config.multiword_mode
        log_probs, truncated = self.mask_log_probs(text, max_seq_length, truncate_method)
        scores = []
        for candidate in candidates:
            if multiword_mode == "single_token":
                scores.append(log_probs[self.tokenizer.candidate_id(candidate)])
            else:
                subtokens = self.tokenizer.candidate_subtokens(candidate)
                scores.append(torch.stack([log_probs[t] for t in subtokens]).mean())
        weights = [float(w) for w in torch.softmax(torch.stack(scores), dim=-1)]
        total = sum(weights)  # renormalize in float64 so the sum lands on 1
        return ScoreOutcome(probs=[w / total for w in weights], truncated=truncated)

    # -- prompt tuning ---------------------------------------------------------

    def _example_tensors(
        self, samples: list[dict], spec: TemplateSpec, verbalizer: dict[int, list[str]],
        multiword_mode: str,
    ) -> list[tuple[list[int], list[int]]]:
        examples = []
        for sample in samples:
            text = spec.render(sample["code"], MASK_MARKER)
            ids, _ = self._prepare_ids(
                text, self.config.max_seq_length, self.config.truncate_method
            )
            gold_word = verbalizer[int(sample["label"])][0]
            if multiword_mode == "single_token":
                targets = [self.tokenizer.candidate_id(gold_word)]
            else:
                targets = self.tokenizer.candidate_subtokens(gold_word)
            examples.append((ids, targets))
        return examples

    def _split_loss(self, examples) -> float:
        self.model.eval()
        total = 0.0
        with torch.no_grad():
            for ids, targets in examples:
                mask_pos = ids.index(MASK_ID)
                log_probs = torch.log_softmax(self.model(torch.tensor([ids]))[0, mask_pos], dim=-1)
                total += float(-torch.stack([log_probs[t] for t in targets]).mean())
        return total / len(examples)

    def train(
        self,
        samples: list[dict],
        spec: TemplateSpec,
        verbalizer: dict[int, list[str]],
        config: ServerConfig,
    ) -> dict:
        torch.manual_seed(config.seed)
        if config.soft_init == "vocab" and spec.soft_count:
            with torch.no_grad():
                mean_row = self.model.embedding.weight[BUCKET_BASE:].mean(dim=0)
                for k in range(min(spec.soft_count, SOFT_CAPACITY)):
                    self.model.embedding.weight[SOFT_BASE + k] = mean_row
        examples = self._example_tensors(samples, spec, verbalizer, config.multiword_mode)
        initial_loss = self._split_loss(examples)
        optimizer = torch.optim.Adam(self.model.parameters(), lr=config.learning_rate)
        self.model.train()
        for _ in range(config.epochs):
            for start in range(0, len(examples), config.batch_size):
                batch = examples[start : start + config.batch_size]
                optimizer.zero_grad()
                loss = torch.tensor(0.0)
                for ids, targets in batch:
                    mask_pos = ids.index(MASK_ID)
                    log_probs = torch.log_softmax(
                        self.model(torch.tensor([ids]))[0, mask_pos], dim=-1
                    )
                    loss = loss - torch.stack([log_probs[t] for t in targets]).mean()
                (loss / len(batch)).backward()
                optimizer.step()
        self.model.eval()
        final_loss = self._split_loss(examples)
        return {"initial_loss": initial_loss, "final_loss": final_loss}

    # -- persistence -----------------------------------------------------------

    def save_checkpoint(self, config: ServerConfig) -> str:
        checkpoint_id = uuid.uuid4().hex[:12]
        path = config.checkpoint_path(checkpoint_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(
            {
                "state_dict": self.model.state_dict(),
                "phrases": self.tokenizer.phrases,
                "seed": config.seed,
            },
            path,
        )
        return checkpoint_id

    @classmethod
    def load_checkpoint(cls, config: ServerConfig, checkpoint_id: str) -> "MaskedScorer":
        path = config.checkpoint_path(checkpoint_id)
        if not path.exists():
            raise FileNotFoundError(f"no checkpoint {checkpoint_id}")
        payload = torch.load(path, weights_only=True)
        scorer = cls(config)
        scorer.model.load_state_dict(payload["state_dict"])
        scorer.tokenizer.phrases = dict(payload["phrases"])
        scorer.model.eval()
        return scorer
