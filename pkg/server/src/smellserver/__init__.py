"""Masked-token scoring and prompt-tuning service."""

from .config import MASK_MARKER, ServerConfig
from .model import CompactMaskedLM, MaskedScorer, Tokenizer
from .service import create_app

__version__ = "0.1.0"

__all__ = [
    "CompactMaskedLM",
    "MASK_MARKER",
    "MaskedScorer",
    "ServerConfig",
    "Tokenizer",
    "create_app",
]
