# Prisma Command-Line Application
"""
Main entry point of the toolkit.

Reads one JSON document (stdin or --in), dispatches the named command through
the command table, caches the result, and writes one JSON document to stdout.
Logs go to stderr. Exit codes: 0 success, 1 internal error, 2 input error,
3 unsupported shape or too large, 4 verification failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional

from prisma import __version__
from prisma.core.config import parse_multipliers, settings
from prisma.core.errors import InputError, PrismaError, VerificationFailed
from prisma.core.schemas import ErrorOut, JobOptions, validate_document
from prisma.routes import compute, trees, verify
from prisma.routes.registry import Command, CommandTable, require_target
from prisma.services.cache_service import cache_service, canonical_json

logger = logging.getLogger(__name__)

# --- Command table ---

table = CommandTable()
table.include_router(compute.router)
table.include_router(trees.router)
table.include_router(verify.router)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prisma", description="Exact computations with prismal monoids.")
    parser.add_argument("command", choices=table.names())
    parser.add_argument("target", nargs="?", help="Suite name for verify; clear or health for cache.")
    parser.add_argument("--in", dest="input", type=Path, help="Read the input document from a file instead of stdin.")
    parser.add_argument("--box", type=int, help="Sampling box bound.")
    parser.add_argument("--multipliers", type=str, help="Comma-separated multipliers for purity checks, e.g. 2,3.")
    parser.add_argument("--seed", type=int, default=None, help=f"Random seed (default {settings.DEFAULT_SEED}).")
    parser.add_argument("--max-vertices", type=int, help="Cap on tree factor size for chain-extension oracles.")
    parser.add_argument("--trials", type=int, help="Random instances per suite.")
    parser.add_argument("--dim", type=int, help="Ambient dimension of random instances.")
    parser.add_argument("--workers", type=int, default=None, help=f"Worker processes for suites (default {settings.VERIFY_WORKERS}).")
    parser.add_argument("--no-cache", action="store_true", help="Neither read nor write the result cache.")
    parser.add_argument("--cache-dir", type=Path, help="Cache directory; overrides PRISMA_CACHE_DIR.")
    parser.add_argument("--check-cache", action="store_true", help="Recompute and compare with the cached result.")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    parser.add_argument("--version", action="version", version=f"prisma {__version__}")
    return parser


def configure_logging(verbose: bool) -> None:
    # Logs go to stderr; stdout carries only the result.
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True,
    )


def job_options(args: argparse.Namespace) -> JobOptions:
    try:
        multipliers = parse_multipliers(args.multipliers) if args.multipliers else settings.multipliers
    except ValueError as e:
        raise InputError(str(e), path="--multipliers")
    return validate_document(JobOptions, {
        "box": args.box,
        "multipliers": multipliers,
        "seed": settings.DEFAULT_SEED if args.seed is None else args.seed,
        "max_vertices": args.max_vertices,
        "trials": args.trials,
        "dim": args.dim,
        "budget": settings.MEMBERSHIP_BUDGET,
        "max_pairs": settings.MAX_PAIR_SAMPLES,
        "workers": settings.VERIFY_WORKERS if args.workers is None else args.workers,
    })


def read_document(source: Optional[Path]) -> Any:
    try:
        text = source.read_text(encoding="utf-8") if source is not None else sys.stdin.read()
    except OSError as e:
        raise InputError(f"cannot read input: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}", path="$")


def run(cmd: Command, data: Any, target: Optional[str], options: JobOptions, check_cache: bool) -> dict:
    """Runs one command through the cache."""
    doc = validate_document(cmd.input_model, data) if cmd.input_model is not None else None

    def compute() -> dict:
        logger.info(f"Running {cmd.name}{' ' + target if target else ''}")
        return cmd.handler(doc, options, target)

    if not cmd.cacheable:
        return compute()
    key = cache_service.make_key(cmd.name, {"input": data, "target": target}, options.model_dump(mode="json"))
    cached = cache_service.get(key)
    if check_cache:
        fresh = compute()
        if cached is None:
            cache_service.set(key, fresh)
        elif canonical_json(cached) != canonical_json(fresh):
            raise VerificationFailed("cached result differs from a fresh computation", witness={"key": key})
        return fresh
    if cached is not None:
        logger.info(f"Serving {cmd.name} from cache")
        return cached
    result = compute()
    cache_service.set(key, result)
    return result


def emit(payload: Any) -> None:
    sys.stdout.write(canonical_json(payload) + "\n")
    sys.stdout.flush()


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        cmd = table.get(args.command)
        target = require_target(cmd, args.target) if cmd.targets is not None else None
        options = job_options(args)
        cache_service.configure(
            directory=args.cache_dir,
            enabled=settings.PRISMA_CACHE_ENABLED and not args.no_cache,
        )
        data = read_document(args.input) if cmd.input_model is not None else None
        payload = run(cmd, data, target, options, args.check_cache)
        emit(payload)
        if isinstance(payload, dict) and payload.get("passed") is False:
            return VerificationFailed.exit_code
        return 0
    except PrismaError as e:
        logger.warning(f"{args.command} failed: {e.message}")
        emit(ErrorOut(exit_code=e.exit_code, **e.to_dict()).model_dump(exclude_none=True))
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error in {args.command}: {e}", exc_info=True)
        emit({"error": "internal_error", "message": str(e), "exit_code": 1})
        return 1


if __name__ == "__main__":
    sys.exit(main())
