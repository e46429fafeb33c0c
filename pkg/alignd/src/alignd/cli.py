"""Run the alignment service: alignd --port 9000 --mode stub"""

from __future__ import annotations

import argparse
import logging

import uvicorn

from alignd.app import DEFAULT_MAX_BATCH, ServerConfig, create_app


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alignd")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=9000)
    parser.add_argument("--mode", choices=["stub", "model"], default="stub")
    parser.add_argument("--model-id", dest="model_id",
                        help="cross-encoder model for --mode model")
    parser.add_argument("--max-batch", dest="max_batch", type=int,
                        default=DEFAULT_MAX_BATCH)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.mode == "model" and not args.model_id:
        build_parser().error("--mode model requires --model-id")
    logging.basicConfig(level=logging.INFO)
    config = ServerConfig(port=args.port, model_id=args.model_id,
                          mode=args.mode, max_batch=args.max_batch)
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
