# core/app.py
import argparse
import importlib
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from config.messages import MESSAGES
from config.settings import Settings
from core.errors import ReliacutError, UsageError
from services.data_manager import DataManager
from services.resource_monitor import ResourceMonitor


class CommandParser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; usage errors here exit 1 through UsageError."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


class Command:
    name: str = ""
    help: str = ""

    def __init__(self, app: "ReliacutApp"):
        self.app = app
        self.logger = logging.getLogger(type(self).__module__)

    def configure(self, parser: argparse.ArgumentParser):
        pass

    async def run(self, args: argparse.Namespace) -> int:
        raise NotImplementedError


class ReliacutApp:
    def __init__(self, settings: Settings, base_path: Optional[Path] = None):
        self.settings = settings
        self.logger = logging.getLogger(__name__)
        self.messages = MESSAGES["app"]

        # Services
        self.data_manager = DataManager(base_path=base_path or Path.cwd(), networks_dir=settings.NETWORKS_DIR)
        self.resource_monitor: Optional[ResourceMonitor] = None

        self.commands: Dict[str, Command] = {}
        self._ready = False

    async def setup(self):
        """Initializes services and loads command modules. Safe to call twice."""
        if self._ready:
            return
        try:
            self.resource_monitor = ResourceMonitor()
        except Exception as e:
            self.logger.warning(f"Resource monitor failed to initialize: {e}")

        await self._load_commands()
        self._ready = True

    async def _load_commands(self):
        loaded = 0
        failed: List[tuple] = []
        for folder in sorted(self.settings.COMMANDS_DIR.iterdir()):
            if not folder.is_dir() or folder.name.startswith("_"):
                continue
            for file in sorted(folder.glob("*.py")):
                if file.name.startswith("_"):
                    continue
                extension = f"commands.{folder.name}.{file.stem}"
                try:
                    module = importlib.import_module(extension)
                    await module.setup(self)
                    loaded += 1
                except Exception as e:
                    failed.append((extension, str(e)))
                    self.logger.error(f"Failed to load command module: {extension}", exc_info=True)

        self.logger.debug(f"Loaded {loaded} command module(s).")
        for extension, error in failed:
            self.logger.warning(f"  {extension}: {error}")

    def add_command(self, command: Command):
        if command.name in self.commands:
            raise ValueError(f"Command '{command.name}' is already registered.")
        self.commands[command.name] = command

    def build_parser(self) -> CommandParser:
        parser = CommandParser(prog="reliacut", description=self.messages["description"])
        parser.add_argument("-v", "--verbose", action="store_true", help="log progress (INFO)")
        parser.add_argument("--debug", action="store_true", help="log everything (DEBUG)")
        parser.add_argument("--log-file", type=Path, default=None, help="also write the log to this file")

        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
        for name in sorted(self.commands):
            command = self.commands[name]
            command.configure(subparsers.add_parser(name, help=command.help, description=command.help))
        return parser

    def parse_args(self, argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
        args = self.build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError(self.messages["no_command"])
        return args

    async def dispatch(self, args: argparse.Namespace) -> int:
        """Runs the parsed command; the only place exceptions turn into exit codes."""
        command = self.commands[args.command]
        try:
            return await command.run(args)
        except ReliacutError as e:
            self.logger.debug(f"{args.command} failed: {e!r}")
            print(self.messages["error"].format(command=args.command, error=e), file=sys.stderr)
            return e.exit_code
        except OSError as e:
            print(self.messages["file_error"].format(command=args.command, error=e), file=sys.stderr)
            return 2
        except Exception:
            self.logger.critical(f"Unexpected error in '{args.command}'.", exc_info=True)
            print(self.messages["unexpected"].format(command=args.command), file=sys.stderr)
            return 1
