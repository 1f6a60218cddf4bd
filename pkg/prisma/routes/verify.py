# Verify Routes - Property Suites and Cache Maintenance
"""
The `verify` command runs one named property suite; `cache` inspects or
clears the result cache.
"""

import logging

from prisma.core.schemas import JobOptions
from prisma.routes.registry import CommandRouter, dump
from prisma.services.cache_service import cache_service
from prisma.services.verification_service import SUITES, SuiteOptions, verification_service

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Verify"])


@router.command("verify", summary="Run a verification suite", targets=sorted(SUITES))
def verify(doc, options: JobOptions, target: str) -> dict:
    suite_options = SuiteOptions(
        seed=options.seed,
        box=options.box,
        trials=options.trials,
        max_vertices=options.max_vertices,
        dim=options.dim,
        multipliers=tuple(options.multipliers),
        max_pairs=options.max_pairs,
        budget=options.budget,
        workers=options.workers,
    )
    return dump(verification_service.run(target, suite_options))


@router.command("cache", summary="Inspect or clear the result cache", cacheable=False, targets=["clear", "health"])
def cache(doc, options: JobOptions, target: str) -> dict:
    if target == "clear":
        return cache_service.clear()
    return cache_service.health_check()
