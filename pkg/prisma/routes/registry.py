# Command Registry
"""
A small decorator-based router for CLI commands.

Handler modules create a `CommandRouter`, register handlers with
`@router.command(...)`, and `prisma.main` includes every router into one
table, the way API routers are included into an application.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Type

from pydantic import BaseModel

from prisma.core.errors import InputError
from prisma.core.schemas import JobOptions

logger = logging.getLogger(__name__)

Handler = Callable[[Optional[BaseModel], JobOptions, Optional[str]], dict]


@dataclass(frozen=True)
class Command:
    name: str
    handler: Handler
    input_model: Optional[Type[BaseModel]]
    summary: str
    cacheable: bool
    targets: Optional[List[str]] = None


class CommandRouter:
    """Collects command handlers under a tag."""

    def __init__(self, tags: Optional[List[str]] = None):
        self.tags = tags or []
        self.commands: Dict[str, Command] = {}

    def command(
        self,
        name: str,
        input_model: Optional[Type[BaseModel]] = None,
        summary: str = "",
        cacheable: bool = True,
        targets: Optional[List[str]] = None,
    ):
        def decorator(func: Handler) -> Handler:
            if name in self.commands:
                raise RuntimeError(f"command {name!r} registered twice")
            self.commands[name] = Command(name, func, input_model, summary, cacheable, targets)
            return func
        return decorator


class CommandTable:
    def __init__(self):
        self.commands: Dict[str, Command] = {}

    def include_router(self, router: CommandRouter) -> None:
        for name, cmd in router.commands.items():
            if name in self.commands:
                raise RuntimeError(f"command {name!r} is provided by two routers")
            self.commands[name] = cmd
        logger.debug(f"Included router {router.tags} with commands {sorted(router.commands)}")

    def get(self, name: str) -> Command:
        cmd = self.commands.get(name)
        if cmd is None:
            raise InputError(f"unknown command {name!r}; expected one of {sorted(self.commands)}")
        return cmd

    def names(self) -> List[str]:
        return sorted(self.commands)


def require_target(cmd: Command, target: Optional[str]) -> str:
    if target is None:
        raise InputError(f"command {cmd.name!r} needs a target: one of {cmd.targets}")
    if cmd.targets is not None and target not in cmd.targets:
        raise InputError(f"unknown target {target!r} for {cmd.name!r}; expected one of {cmd.targets}")
    return target


def dump(model: Any) -> Any:
    return model.model_dump(mode="json") if isinstance(model, BaseModel) else model
