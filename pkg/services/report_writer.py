# services/report_writer.py
import io
import json
from typing import Optional

import polars as pl

from config.settings import settings
from core.errors import ConfigError
from services.experiment_runner import RunReport

CSV_COLUMNS = ["network", "method", "tier", "n_sim", "n_run", "mean", "variance", "mae", "mean_time_s"]


def _fmt(value: Optional[float]) -> Optional[str]:
    if value is None:
        return None
    return f"{value:.{settings.FLOAT_DIGITS}g}"


def summary_frame(report: RunReport) -> pl.DataFrame:
    """One row per (network, method, tier) with floats pre-formatted to fixed significant digits."""
    rows = [{
        "network": r.network,
        "method": r.method,
        "tier": str(r.tier),
        "n_sim": str(r.n_sim),
        "n_run": str(r.n_run),
        "mean": _fmt(r.mean),
        "variance": _fmt(r.variance),
        "mae": _fmt(r.mae),
        "mean_time_s": _fmt(r.mean_time_s),
    } for r in report.rows]
    schema = {name: pl.Utf8 for name in CSV_COLUMNS}
    return pl.DataFrame(rows, schema=schema) if rows else pl.DataFrame(schema=schema)


def emit_report(report: RunReport, format: str = "csv") -> bytes:
    """Serialises a report deterministically. JSON carries everything, CSV only the summary table."""
    if format == "csv":
        buffer = io.StringIO()
        summary_frame(report).write_csv(buffer)
        return buffer.getvalue().encode("utf-8")
    if format == "json":
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n").encode("utf-8")
    raise ConfigError(f"Unknown report format '{format}'.")
