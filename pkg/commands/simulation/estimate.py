# commands/simulation/estimate.py
import asyncio
import json
from pathlib import Path

from config.messages import MESSAGES
from core.app import Command
from core.estimators import Method, estimate, round_up_budget


class EstimateCommand(Command):
    name = "estimate"
    help = MESSAGES["estimate"]["help"]

    def configure(self, parser):
        parser.add_argument("file", type=Path, help="network file")
        parser.add_argument("--method", type=Method.parse, required=True,
                            help="crude, batmcs or cbatmcs")
        parser.add_argument("--nsim", type=int, required=True, help="total number of trials")
        parser.add_argument("--seed", type=int, default=self.app.settings.DEFAULT_SEED)
        parser.add_argument("--beta", type=int, default=None, help="supervector size for batmcs")
        parser.add_argument("--skip-disconnected", action="store_true",
                            help="count no passes in strata that cannot connect")
        parser.add_argument("--integral-budget", action="store_true",
                            help="raise --nsim to the next budget with an integral allocation")

    async def run(self, args) -> int:
        net = await self.app.data_manager.load_network(args.file)
        n_sim = args.nsim
        if args.integral_budget:
            n_sim = await asyncio.to_thread(round_up_budget, net, args.method, n_sim, args.beta)
        result = await asyncio.to_thread(
            estimate, net, args.method, n_sim, args.seed, args.beta, args.skip_disconnected)
        self.logger.info(f"{result.method.value}: {result.value} from {result.n_pass}/{result.n_sim} passes "
                         f"in {result.wall_time:.3f}s")
        print(json.dumps(result.to_dict(), indent=2))
        return 0


async def setup(app):
    app.add_command(EstimateCommand(app))
