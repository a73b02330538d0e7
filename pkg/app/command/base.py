import argparse
import json
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Type, Union

from pydantic import BaseModel, ConfigDict, Field

from app.config import (
    FLAT_KEYS,
    FeatureConfig,
    GenConfig,
    RunConfig,
    SpatialConfig,
    TrainConfig,
    normalize_key,
)
from app.exceptions import ConflictingOverride, UsageError
from app.logger import logger


SECTION_MODELS: Dict[str, Type[BaseModel]] = {
    "train": TrainConfig,
    "features": FeatureConfig,
    "datagen": GenConfig,
    "spatial": SpatialConfig,
}


class CommandResult(BaseModel):
    """Represents the result of a command execution."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    output: Optional[str] = Field(default=None, description="Text for stdout")
    error: Optional[str] = Field(default=None)
    exit_code: int = Field(default=0)

    def __bool__(self):
        return self.exit_code == 0

    def __str__(self):
        return f"Error: {self.error}" if self.error else (self.output or "")


class CommandFailure(CommandResult):
    """A CommandResult that represents a failure."""


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as UsageError"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


class SettingAction(argparse.Action):
    """Collects a run-config override into namespace.settings.

    Giving one setting twice with different values is rejected.
    """

    def __call__(self, parser, namespace, values, option_string=None):
        value = self.const if self.nargs == 0 else values
        settings = dict(getattr(namespace, "settings", None) or {})
        key = self.dest
        if key in settings and settings[key] != value:
            raise ConflictingOverride(
                f"{option_string} given as {settings[key]!r} and {value!r}"
            )
        settings[key] = value
        namespace.settings = settings


def _setting_help(key: str) -> str:
    section, field = FLAT_KEYS[key][0]
    info = SECTION_MODELS[section].model_fields[field]
    default = info.get_default(call_default_factory=True)
    return f"{info.description or field} (default: {default})"


def add_setting(
    parser: argparse.ArgumentParser,
    flag: str,
    type: Any = None,
    choices: Optional[List[Any]] = None,
    switch: bool = False,
) -> None:
    """Register a --kebab-case flag that overrides one run-config setting"""
    key = normalize_key(flag)
    if key not in FLAT_KEYS:
        raise KeyError(f"no setting named {key}")
    kwargs: Dict[str, Any] = {
        "dest": key,
        "action": SettingAction,
        "default": argparse.SUPPRESS,
        "help": _setting_help(key),
    }
    if switch:
        kwargs.update(nargs=0, const=True)
    else:
        kwargs.update(type=type, choices=choices, metavar=key.upper())
    parser.add_argument(flag, **kwargs)


class BaseCommand(ABC, BaseModel):
    """One CLI subcommand.

    Attributes:
        name (str): Subcommand name
        description (str): Help text
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    description: str

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Register the subcommand's flags."""

    @abstractmethod
    def execute(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        """Execute the command with parsed flags and the merged run config."""

    def __call__(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        return self.execute(args, run_config)

    def success_response(
        self, data: Union[Dict[str, Any], List[Any], str, None] = None
    ) -> CommandResult:
        """Create a successful result; dicts and lists become JSON."""
        if data is None or isinstance(data, str):
            text = data
        else:
            text = json.dumps(data, indent=2) + "\n"
        logger.debug(f"Created success response for {self.__class__.__name__}")
        return CommandResult(output=text)

    def fail_response(
        self, msg: str, exit_code: int, output: Optional[str] = None
    ) -> CommandResult:
        logger.debug(f"Command {self.name} failed: {msg}")
        return CommandFailure(error=msg, exit_code=exit_code, output=output)
