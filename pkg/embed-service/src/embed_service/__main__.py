"""Run the embedding service: python -m embed_service [--model NAME] [--port 8900]."""

import argparse
import logging

import uvicorn

from .app import create_app
from .config import DEFAULT_MODEL, Settings


def main() -> None:
    parser = argparse.ArgumentParser(prog="embed-service")
    parser.add_argument("--model", default=None, help=f"model id or path (default: {DEFAULT_MODEL})")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8900)
    parser.add_argument("--max-batch", type=int, default=None)
    parser.add_argument("--preload", action="store_true", help="load the model before accepting requests")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO)
    base = Settings.from_env()
    settings = Settings(
        model=args.model or base.model,
        max_batch=args.max_batch if args.max_batch is not None else base.max_batch,
        device=base.device,
        preload=args.preload,
    )
    uvicorn.run(create_app(settings), host=args.host, port=args.port, log_level="info")


if __name__ == "__main__":
    main()
