# commands/analysis/cuts.py
import json
from pathlib import Path

from config.messages import MESSAGES
from core.app import Command
from core.network import zero_assignment_probability
from core.traversal import compute_layers, find_layer_cuts, residual_arcs, select_super_cut


class CutsCommand(Command):
    name = "cuts"
    help = MESSAGES["cuts"]["help"]

    def configure(self, parser):
        parser.add_argument("file", type=Path, help="network file")

    async def run(self, args) -> int:
        net = await self.app.data_manager.load_network(args.file)
        decomposition = compute_layers(net, full=True)
        cuts = find_layer_cuts(net)

        def describe(cut):
            return {
                "index": cut.index,
                "arcs": list(cut.arcs),
                "size": len(cut),
                "zero_probability": zero_assignment_probability(net, cut.arcs),
            }

        payload = {
            "layers": [list(layer) for layer in decomposition.layers],
            "sink_layer": decomposition.sink_layer,
            "cuts": [describe(cut) for cut in cuts],
            "residual": list(residual_arcs(net, cuts)),
            "super_cut": describe(select_super_cut(net, cuts)) if cuts else None,
        }
        print(json.dumps(payload, indent=2))
        return 0


async def setup(app):
    app.add_command(CutsCommand(app))
