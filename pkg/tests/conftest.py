# Shared Test Fixtures
"""
Fixtures and hypothesis profiles for the prisma test suite.

Every randomized test is derandomized so a failing run reproduces exactly.
"""

import json
import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "prisma",
    derandomize=True,
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("prisma-quick", parent=settings.get_profile("prisma"), max_examples=10)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "prisma"))


@pytest.fixture
def cache(tmp_path):
    """The global result cache pointed at a throwaway directory."""
    from prisma.services.cache_service import cache_service

    saved = (cache_service.directory, cache_service.enabled)
    cache_service.configure(directory=tmp_path / "cache", enabled=True)
    yield cache_service
    cache_service.configure(*saved)


@pytest.fixture
def cli(tmp_path, monkeypatch, capsys):
    """Runs `prisma` in-process and returns (exit code, parsed stdout)."""
    from prisma.main import main
    from prisma.services.cache_service import cache_service

    # main() reconfigures the global cache; restore it afterwards.
    monkeypatch.setattr(cache_service, "directory", cache_service.directory)
    monkeypatch.setattr(cache_service, "enabled", cache_service.enabled)

    def run(*argv, doc=None):
        args = list(argv) + ["--cache-dir", str(tmp_path / "cli-cache")]
        if doc is not None:
            source = tmp_path / "input.json"
            source.write_text(json.dumps(doc), encoding="utf-8")
            args += ["--in", str(source)]
        code = main(args)
        out = capsys.readouterr().out
        return code, json.loads(out)

    return run
