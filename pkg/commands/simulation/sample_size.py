# commands/simulation/sample_size.py
from config.messages import MESSAGES
from core.app import Command
from core.estimators import required_sample_size


class SampleSizeCommand(Command):
    name = "sample-size"
    help = MESSAGES["sample_size"]["help"]

    def configure(self, parser):
        parser.add_argument("--reliability", type=float, required=True, help="prior guess of R")
        parser.add_argument("--epsilon", type=float, required=True, help="relative error bound")
        parser.add_argument("--alpha", type=float, default=0.05, help="significance level")

    async def run(self, args) -> int:
        print(required_sample_size(args.reliability, args.epsilon, args.alpha))
        return 0


async def setup(app):
    app.add_command(SampleSizeCommand(app))
