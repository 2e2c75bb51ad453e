# commands/analysis/exact.py
import asyncio
from pathlib import Path

from config.messages import MESSAGES
from core.app import Command
from core.enumeration import exact_reliability


class ExactCommand(Command):
    name = "exact"
    help = MESSAGES["exact"]["help"]

    def configure(self, parser):
        parser.add_argument("file", type=Path, help="network file")
        parser.add_argument("--workers", type=int, default=1, help="threads for chunk evaluation")
        parser.add_argument("--limit", type=int, default=None, help="override the enumeration arc limit")

    async def run(self, args) -> int:
        net = await self.app.data_manager.load_network(args.file)
        value = await asyncio.to_thread(exact_reliability, net, args.limit, args.workers)
        print(f"{value:#.{self.app.settings.FLOAT_DIGITS}g}")
        return 0


async def setup(app):
    app.add_command(ExactCommand(app))
