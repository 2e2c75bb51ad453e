# commands/bench/gen_random.py
import sys

from config.messages import MESSAGES
from core.app import Command
from core.errors import UsageError
from core.network import serialize_network
from utils.random_networks import generate_random_network


class GenRandomCommand(Command):
    name = "gen-random"
    help = MESSAGES["gen_random"]["help"]

    def configure(self, parser):
        parser.add_argument("--nodes", type=int, required=True)
        parser.add_argument("--arcs", type=int, required=True)
        group = parser.add_mutually_exclusive_group()
        group.add_argument("--prob", type=float, default=None, help="working probability of every arc")
        group.add_argument("--prob-range", type=float, nargs=2, metavar=("LOW", "HIGH"), default=None,
                           help="draw each arc's probability uniformly from [LOW, HIGH]")
        parser.add_argument("--seed", type=int, default=self.app.settings.DEFAULT_SEED)

    async def run(self, args) -> int:
        if args.prob is None and args.prob_range is None:
            raise UsageError(MESSAGES["gen_random"]["prob_required"])
        prob = args.prob if args.prob is not None else tuple(args.prob_range)
        net = generate_random_network(args.nodes, args.arcs, prob, args.seed)
        sys.stdout.write(serialize_network(net))
        return 0


async def setup(app):
    app.add_command(GenRandomCommand(app))
