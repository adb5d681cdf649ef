import argparse
import logging
import sys

from core.config import config
from middleware.run_manifest import VERSION
from routes import decompose
from routes import moments
from routes import verify
from routes import demo


def build_parser() -> argparse.ArgumentParser:
    # create cli application
    parser = argparse.ArgumentParser(
        prog="trunk.py",
        description="Spherical vector-field scalarization and multipole toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    decompose.register(sub)
    moments.register(sub)
    verify.register(sub)
    demo.register(sub)
    return parser


def setup_logging() -> None:
    logging.basicConfig(
        level=config.logging.LEVEL.upper(),
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage()
        return 1
    setup_logging()
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
