# Result Cache Service
"""
This service stores command results in a content-addressed file cache.

Key features include:
- Deterministic keys: SHA-256 over the canonical JSON of command, input, options and version.
- Automatic JSON serialization/deserialization of cached documents.
- Atomic writes through a temporary file and `os.replace`.
- A health check that exercises a SET/GET/DELETE round trip.

Cache failures are logged and reported as misses; they never fail a computation.
"""

import hashlib
import json
import logging
import os
import shutil
import tempfile
from pathlib import Path
from typing import Any, Optional

from prisma import __version__
from prisma.core.config import settings

logger = logging.getLogger(__name__)


def canonical_json(value: Any) -> str:
    """The single JSON rendering used for cache keys and command output."""
    return json.dumps(value, sort_keys=True, indent=2, ensure_ascii=False)


class CacheService:
    """
    A service class to handle all result cache operations.

    Attributes:
        directory: Root of the cache; one file per key.
        enabled: When False every lookup misses and nothing is written.
    """

    def __init__(self, directory: Optional[Path] = None, enabled: Optional[bool] = None):
        self.directory = Path(directory) if directory is not None else settings.cache_dir
        self.enabled = settings.PRISMA_CACHE_ENABLED if enabled is None else enabled
        logger.debug(f"Cache service using {self.directory} (enabled={self.enabled})")

    def configure(self, directory: Optional[Path] = None, enabled: Optional[bool] = None) -> None:
        """Applies per-run overrides from the command line."""
        if directory is not None:
            self.directory = Path(directory)
        if enabled is not None:
            self.enabled = enabled

    @staticmethod
    def make_key(command: str, document: Any, options: dict) -> str:
        payload = {"command": command, "input": document, "options": options, "version": __version__}
        digest = hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
        return f"{command}:{digest}"

    def _path(self, key: str) -> Path:
        command, _, digest = key.partition(":")
        return self.directory / command / f"{digest}.json"

    def set(self, key: str, value: Any) -> bool:
        """
        Stores a JSON document under a key.

        Args:
            key: The key from `make_key`.
            value: Any JSON-serializable value.

        Returns:
            True if the document was written, False otherwise.
        """
        if not self.enabled:
            return False
        path = self._path(key)
        try:
            text = canonical_json(value)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp, path)
            logger.debug(f"Set cache key '{key}' with {len(text)} bytes")
            return True
        except Exception as e:
            logger.warning(f"Error setting cache key '{key}': {e}", exc_info=True)
            return False

    def get(self, key: str) -> Optional[Any]:
        """
        Retrieves a cached document.

        Returns:
            The parsed document, or None on a miss or any read error.
        """
        if not self.enabled:
            return None
        path = self._path(key)
        try:
            if not path.exists():
                logger.debug(f"Cache miss for key '{key}'")
                return None
            value = json.loads(path.read_text(encoding="utf-8"))
            logger.debug(f"Cache hit for key '{key}'")
            return value
        except Exception as e:
            logger.error(f"Error getting cache key '{key}': {e}", exc_info=True)
            return None

    def delete(self, key: str) -> bool:
        try:
            self._path(key).unlink(missing_ok=True)
            return True
        except Exception as e:
            logger.error(f"Error deleting cache key '{key}': {e}", exc_info=True)
            return False

    def clear(self) -> dict:
        """Removes every cached document."""
        removed = sum(1 for _ in self.directory.rglob("*.json")) if self.directory.exists() else 0
        try:
            if self.directory.exists():
                shutil.rmtree(self.directory)
            logger.info(f"Cleared {removed} cached documents from {self.directory}")
            return {"status": "cleared", "removed": removed, "directory": str(self.directory)}
        except Exception as e:
            logger.error(f"Failed to clear cache at {self.directory}: {e}", exc_info=True)
            return {"status": "error", "error": str(e), "directory": str(self.directory)}

    def health_check(self) -> dict:
        """
        Performs a health check on the cache directory.

        Returns:
            A dictionary containing the health status and diagnostic information.
        """
        logger.debug("Starting cache health check...")
        if not self.enabled:
            return {"status": "disabled", "directory": str(self.directory)}
        key = self.make_key("health", {"probe": True}, {})
        try:
            if not self.set(key, {"probe": "ok"}):
                raise OSError(f"cannot write under {self.directory}")
            retrieved = self.get(key)
            self.delete(key)
            if retrieved != {"probe": "ok"}:
                raise ValueError(f"SET/GET mismatch: got {retrieved!r}")
            logger.info("Cache health check completed successfully")
            return {"status": "healthy", "directory": str(self.directory)}
        except Exception as e:
            logger.error(f"Cache health check failed: {e}", exc_info=True)
            return {"status": "error", "error": str(e), "directory": str(self.directory)}


# Create a single, global instance of the CacheService.
cache_service = CacheService()
