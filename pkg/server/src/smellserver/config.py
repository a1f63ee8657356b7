"""Server configuration."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

MASK_MARKER = "[MASK]"


@dataclass(frozen=True)
class ServerConfig:
    model: str = "builtin-compact-mlm"
    device: str = "cpu"
    max_seq_length: int = 512
    truncate_method: str = "tail"
    multiword_mode: str = "subword_mean"  # or "single_token"
    # prompt-tuning defaults
    optimizer: str = "adam"
    learning_rate: float = 1e-4
    batch_size: int = 4
    epochs: int = 5
    seed: int = 1234
    soft_init: str = "random"  # or "vocab"
    checkpoint_dir: str = "checkpoints"

    def __post_init__(self):
        if self.max_seq_length < 16:
            raise ValueError("max_seq_length must be >= 16")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.truncate_method not in ("head", "tail"):
            raise ValueError(f"unknown truncate_method {self.truncate_method!r}")
        if self.multiword_mode not in ("single_token", "subword_mean"):
            raise ValueError(f"unknown multiword_mode {self.multiword_mode!r}")
        if self.soft_init not in ("random", "vocab"):
            raise ValueError(f"unknown soft_init {self.soft_init!r}")

    def with_overrides(self, overrides: dict) -> "ServerConfig":
        allowed = {"learning_rate", "batch_size", "epochs", "seed", "multiword_mode", "soft_init"}
        unknown = set(overrides) - allowed
        if unknown:
            raise ValueError(f"unknown config overrides: {sorted(unknown)}")
        return replace(self, **overrides)

    def checkpoint_path(self, checkpoint_id: str) -> Path:
        return Path(self.checkpoint_dir) / f"{checkpoint_id}.pt"
