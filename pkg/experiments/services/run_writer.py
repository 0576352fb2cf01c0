import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

from django.conf import settings
from django.utils import timezone


logger = logging.getLogger(__name__)

CSV = "csv"
JSON = "json"
FORMATS = (CSV, JSON)
MANIFEST_NAME = "manifest.json"


def dump_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def rows_to_csv(fields: Sequence[str], rows: Iterable[Dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


class RunWriter:
    """Writes the output files of one command run, then its manifest.

    Every file is written to a temporary file in the output directory and
    renamed into place, so readers never see partial output.
    """

    def __init__(
        self,
        out_dir: Union[str, Path],
        command: str,
        config_hash: str,
        rng_seed: int,
        threads: int = 1,
        output_format: str = CSV,
    ):
        if output_format not in FORMATS:
            raise ValueError(f"Unknown output format '{output_format}'; expected one of {FORMATS}")
        self.out_dir = Path(out_dir)
        self.command = command
        self.config_hash = config_hash
        self.rng_seed = rng_seed
        self.threads = threads
        self.output_format = output_format
        self.started_at = timezone.now()
        self.outputs: List[Dict[str, str]] = []

    def _write_atomic(self, name: str, text: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        target = self.out_dir / name
        data = text.encode("utf-8")

        handle = tempfile.NamedTemporaryFile(dir=self.out_dir, prefix=f".{name}.", suffix=".tmp", delete=False)
        try:
            with handle:
                handle.write(data)
            os.replace(handle.name, target)
        except OSError:
            Path(handle.name).unlink(missing_ok=True)
            raise

        logger.debug(f"Wrote {target}")
        return target

    def _record(self, name: str, text: str) -> Path:
        path = self._write_atomic(name, text)
        self.outputs.append({"name": name, "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest()})
        return path

    def write_table(self, stem: str, fields: Sequence[str], rows: List[Dict]) -> Path:
        """Tabular output as <stem>.csv, or as <stem>.records.json in JSON mode."""
        if self.output_format == JSON:
            return self._record(f"{stem}.records.json", dump_json([{f: row[f] for f in fields} for row in rows]))
        return self._record(f"{stem}.csv", rows_to_csv(fields, rows))

    def write_json(self, name: str, payload: Any) -> Path:
        return self._record(name, dump_json(payload))

    def manifest(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "tool_version": settings.TOOL_VERSION,
            "rng_seed": self.rng_seed,
            "threads": self.threads,
            "format": self.output_format,
            "started_at": self.started_at.isoformat(),
            "finished_at": timezone.now().isoformat(),
            "outputs": list(self.outputs),
        }

    def finish(self) -> Path:
        """Write manifest.json after every output is in place."""
        path = self._write_atomic(MANIFEST_NAME, dump_json(self.manifest()))
        logger.info(f"Run '{self.command}' wrote {len(self.outputs)} output(s) to {self.out_dir}")
        return path
