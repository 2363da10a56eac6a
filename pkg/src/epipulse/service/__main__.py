"""Run the epipulse HTTP service: python -m epipulse.service [--port 8000]."""

from __future__ import annotations

import argparse

import uvicorn

from ..config import load_config
from .app import create_app


def main() -> None:
    parser = argparse.ArgumentParser(prog="epipulse.service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--config", default=None, help="pipeline config JSON")
    args = parser.parse_args()

    app = create_app(load_config(args.config))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")


if __name__ == "__main__":
    main()
