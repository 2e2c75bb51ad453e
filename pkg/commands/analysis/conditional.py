# commands/analysis/conditional.py
import asyncio
import re
from pathlib import Path
from typing import List

from config.messages import MESSAGES
from core.app import Command
from core.enumeration import conditional_reliability
from core.errors import InvalidParameter
from core.network import PartialAssignment

FIX_PATTERN = re.compile(r"^\s*a?(\d+)\s*=\s*([01])\s*$", re.IGNORECASE)


def parse_fixes(values: List[str]) -> PartialAssignment:
    """'4=1' or 'a4=1' pairs into a partial assignment."""
    arcs, states = [], []
    for value in values:
        match = FIX_PATTERN.match(value)
        if not match:
            raise InvalidParameter(MESSAGES["conditional"]["bad_fix"].format(value=value))
        arcs.append(int(match.group(1)))
        states.append(int(match.group(2)))
    try:
        return PartialAssignment.of(arcs, states)
    except ValueError as e:
        raise InvalidParameter(str(e)) from e


class ConditionalCommand(Command):
    name = "conditional"
    help = MESSAGES["conditional"]["help"]

    def configure(self, parser):
        parser.add_argument("file", type=Path, help="network file")
        parser.add_argument("--fix", action="append", default=[], metavar="ARC=STATE",
                            help="fix an arc state; repeatable")
        parser.add_argument("--workers", type=int, default=1)

    async def run(self, args) -> int:
        fixed = parse_fixes(args.fix)
        net = await self.app.data_manager.load_network(args.file)
        value = await asyncio.to_thread(conditional_reliability, net, fixed, None, args.workers)
        print(f"{value:#.{self.app.settings.FLOAT_DIGITS}g}")
        return 0


async def setup(app):
    app.add_command(ConditionalCommand(app))
