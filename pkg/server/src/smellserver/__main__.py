"""Run the scoring service: ``python -m smellserver --port 8750``."""

from __future__ import annotations

import argparse
import logging

import uvicorn

from .config import ServerConfig
from .service import create_app


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(prog="smellserver")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8750)
    parser.add_argument("--model", default="builtin-compact-mlm")
    parser.add_argument("--seed", type=int, default=1234)
    parser.add_argument("--max-seq-length", type=int, default=512)
    parser.add_argument("--multiword-mode", choices=("single_token", "subword_mean"),
                        default="subword_mean")
    parser.add_argument("--checkpoint-dir", default="checkpoints")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO)
    config = ServerConfig(
        model=args.model,
        seed=args.seed,
        max_seq_length=args.max_seq_length,
        multiword_mode=args.multiword_mode,
        checkpoint_dir=args.checkpoint_dir,
    )
    uvicorn.run(create_app(config), host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
