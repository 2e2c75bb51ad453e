# commands/bench/bench.py
import dataclasses
import sys
from pathlib import Path

from config.messages import MESSAGES
from core.app import Command
from services.experiment_runner import REPORT_FORMATS, ExperimentConfig, ExperimentRunner
from services.report_writer import emit_report, summary_frame


class BenchCommand(Command):
    name = "bench"
    help = MESSAGES["bench"]["help"]

    def configure(self, parser):
        parser.add_argument("--config", type=Path, required=True, help="experiment JSON file")
        parser.add_argument("--out", type=Path, default=None, help="report path (default: standard output)")
        parser.add_argument("--format", choices=REPORT_FORMATS, default=None)
        parser.add_argument("--seed", type=int, default=None, help="override the config's base seed")
        parser.add_argument("--workers", type=int, default=None, help="override the config's thread count")
        parser.add_argument("--no-timing", action="store_true",
                            help="leave wall times out so reports are byte-identical across runs")

    def _load_config(self, data: dict, config_path: Path, args) -> ExperimentConfig:
        cfg = ExperimentConfig.from_dict(data, base_dir=config_path.parent)
        overrides = {}
        if args.out is not None:
            overrides["output"] = args.out
        if args.format is not None:
            overrides["format"] = args.format
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.no_timing:
            overrides["timing"] = False
        return dataclasses.replace(cfg, **overrides) if overrides else cfg

    async def run(self, args) -> int:
        config_path = self.app.data_manager.resolve(args.config)
        data = await self.app.data_manager.load_json(config_path)
        cfg = self._load_config(data, config_path, args)

        runner = ExperimentRunner(self.app.data_manager, self.app.resource_monitor)
        report = await runner.run(cfg)
        self.logger.info(f"Summary:\n{summary_frame(report)}")

        payload = emit_report(report, cfg.format)
        if cfg.output is None:
            sys.stdout.write(payload.decode("utf-8"))
            sys.stdout.flush()
        else:
            await self.app.data_manager.write_bytes(cfg.output, payload)
            self.logger.info(MESSAGES["bench"]["written"].format(path=cfg.output, rows=len(report.rows)))
        return 0


async def setup(app):
    app.add_command(BenchCommand(app))
