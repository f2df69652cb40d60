"""CSV emission and run manifests."""

from __future__ import annotations

import csv
import decimal
import hashlib
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

MANIFEST_NAME = "manifest.json"
_SIX_PLACES = decimal.Decimal("0.000001")
COMMANDS = ("centrality", "attack", "stdma", "sweep", "gen-topo")


@dataclass(frozen=True)
class CsvSchema:
    columns: tuple[str, ...]
    keys: int = 1  # leading columns used for row ordering

    def sort_key(self, row: Mapping[str, Any]) -> tuple:
        return tuple(row[c] for c in self.columns[: self.keys])


CENTRALITY_SCHEMA = CsvSchema(("node_label", "metric", "value"), keys=2)
ATTACK_SCHEMA = CsvSchema(
    ("metric", "removed", "avg_hops", "connected_pairs", "disconnected_pairs", "stddev"),
    keys=2,
)
STDMA_SCHEMA = CsvSchema(
    ("mode", "rate", "throughput_bps", "mean_delay_s", "p95_delay_s", "delivered", "generated"),
    keys=2,
)


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        if v != v:  # NaN
            return ""
        if v in (math.inf, -math.inf):
            return "inf" if v > 0 else "-inf"
        # round the shortest decimal repr half-up, so 0.5555555 -> 0.555556
        d = decimal.Decimal(repr(v)).quantize(_SIX_PLACES, rounding=decimal.ROUND_HALF_UP)
        return f"{abs(d) if d == 0 else d:f}"
    return str(v)


def render_csv(rows: Iterable[Mapping[str, Any]], schema: CsvSchema) -> str:
    """CSV text with a header, CRLF line ends and rows sorted on the key columns."""
    rows = list(rows)
    for r in rows:
        missing = [c for c in schema.columns if c not in r]
        if missing:
            raise ValueError(f"row {r!r} lacks columns {missing}")
    rows.sort(key=schema.sort_key)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(schema.columns)
    for r in rows:
        w.writerow([format_value(r[c]) for c in schema.columns])
    return buf.getvalue()


def write_csv(rows: Iterable[Mapping[str, Any]], schema: CsvSchema, path: str | os.PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(rows, schema))
    return path


def file_digest(path: str | os.PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict[str, Any]
    seed: int
    output_dir: str
    tool_version: str
    inputs: dict[str, str] = field(default_factory=dict)  # input path -> sha256

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> RunManifest:
        data = json.loads(text)
        return cls(**data)

    def write(self, directory: str | os.PathLike | None = None) -> Path:
        path = Path(directory or self.output_dir) / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path


def load_config(path: str | os.PathLike) -> tuple[str | None, dict[str, Any]]:
    """Read a JSON config; a run manifest is accepted and yields its command too."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    if "command" in data and "config" in data:
        return data["command"], dict(data["config"])
    return None, data


def sequence_arg(values: Sequence[Any]) -> str:
    return ",".join(str(v) for v in values)
