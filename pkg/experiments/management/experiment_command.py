import json
import time
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from detection.services.exceptions import DetectionError
from experiments.schemas import RunConfig
from experiments.services.exceptions import ConfigError, ExperimentError
from experiments.services.experiment_runner import ExperimentRunner
from experiments.services.run_writer import FORMATS, RunWriter
from experiments.utils.validation import load_config_json, validate_with_schema
from fitting.services.exceptions import FittingError
from kinetics.services.exceptions import KineticsError
from optics.services.exceptions import OpticsError
from quantum.services.exceptions import QuantumModelError


CONFIG_ERROR_EXIT = 2
RUNTIME_ERROR_EXIT = 3
DOMAIN_ERRORS = (OpticsError, QuantumModelError, KineticsError, DetectionError, FittingError, ExperimentError)


class ExperimentCommand(BaseCommand):
    """Shared flags, config loading and exit codes of the experiment commands.

    Subclasses set `experiment` to the ExperimentRunner method they run.
    """
    experiment = None

    def add_arguments(self, parser):
        parser.add_argument("--config", type=str, required=True, help="Path to the JSON run configuration")
        parser.add_argument(
            "--out",
            type=str,
            help="Output directory (default: <OUTPUT_ROOT>/<command>)",
        )
        parser.add_argument("--seed", type=int, help="Override the config's rng_seed")
        parser.add_argument("--threads", type=int, default=1, help="Worker threads for per-timestamp work")
        parser.add_argument(
            "--format",
            type=str,
            choices=FORMATS,
            default="csv",
            dest="output_format",
            help="Tabular outputs as CSV or as JSON records",
        )

    def load_config(self, options) -> RunConfig:
        data = load_config_json(options["config"])
        if options.get("seed") is not None:
            data["rng_seed"] = options["seed"]
        config = validate_with_schema(data, RunConfig)
        try:
            config.require_blocks(self.experiment)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        return config

    def handle(self, *args, **options):
        threads = options["threads"]
        out_dir = Path(options.get("out") or settings.OUTPUT_ROOT / self.experiment)

        try:
            if threads < 1:
                raise ConfigError(f"--threads must be >= 1 (got {threads})")
            config = self.load_config(options)
        except ConfigError as e:
            raise CommandError(f"Invalid configuration: {e}", returncode=CONFIG_ERROR_EXIT) from e

        writer = RunWriter(
            out_dir,
            command=self.experiment,
            config_hash=config.config_hash(),
            rng_seed=config.rng_seed,
            threads=threads,
            output_format=options["output_format"],
        )
        runner = ExperimentRunner(config, writer, threads=threads)

        start_time = time.time()
        try:
            summary = runner.run(self.experiment)
        except DOMAIN_ERRORS + (ValueError,) as e:
            raise CommandError(f"{self.experiment} failed: {e}", returncode=RUNTIME_ERROR_EXIT) from e
        elapsed = time.time() - start_time

        self.stdout.write(self.style.SUCCESS(f"=== {self.experiment.upper()} SUMMARY ==="))
        for key, value in summary.items():
            if key != "warnings":
                self.stdout.write(f"{key}: {json.dumps(value, sort_keys=True)}")
        for warning in summary["warnings"]:
            self.stdout.write(self.style.WARNING(f"WARNING: {warning}"))
        self.stdout.write(self.style.SUCCESS(f"\nWrote {len(writer.outputs)} output(s) to {out_dir} in {elapsed:.2f} seconds"))
