"""Command-line dispatch and the shared base for report-writing commands.

Every subcommand is a Django management command under
``geomkit/management/commands``. They all write one JSON report to stdout
(or ``--output``) and map outcomes to exit codes:

    0  success, Proved, Empty, match
    1  verified mismatch (report written first), Unknown
    2  input error, failed precondition, unknown subcommand
"""
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings
from django.core.management import execute_from_command_line
from django.core.management.base import BaseCommand, CommandError

from .errors import GeomkitError, ParameterError, ParseError
from .reports import Provenance, build_report, dumps

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    "hrr", "grr", "chi_table", "weierstrass", "divide", "fredholm", "schatten", "spectrum",
    "hh", "locale", "replay",
)
ALIASES = {"chi-table": "chi_table"}
# Django commands needed to set up the run ledger
PASSTHROUGH = ("migrate", "showmigrations", "check")

USAGE = """usage: manage.py <subcommand> [options]

subcommands:
  hrr          chi(X, V) by Hirzebruch-Riemann-Roch     --space P2 --bundle "O(3)"
  grr          Grothendieck-Riemann-Roch identity       --map "P1xP1->P1" --bundle "O(a,b)" -a 2 -b 3
  chi-table    hrr against the monomial-count oracle    --n 3 --kmin -6 --kmax 6
  weierstrass  preparation f = g * u                    --input f.json --order M [--random COUNT --nvars n]
  divide       Weierstrass division f = q g + r         --input f.json --divisor g.json | --diagonal
  fredholm     Schur-complement reduction of 1 - f      --input t.json | --random COUNT --size S
  schatten     singular values and Schatten sums        --input a.json --p P | --random COUNT
  spectrum     eigenvalues and series calculus          --input a.json [--series EXPR --radius R]
  hh           Hochschild homology and the HKR check    --vars n --deg D [--check]
  locale       subset calculus prover                   prove --lhs EXPR --rhs EXPR | empty --expr EXPR
  replay       re-run a recorded run, compare bytes     <run id>

common options: --seed S --mode exact|float --tol T --trunc N --order M
                --output PATH --record
"""

PASS, FAIL = "pass", "fail"


def dispatch(argv: list[str]) -> int:
    """Run one subcommand; returns the process exit code."""
    if not argv or argv[0] in ("-h", "--help", "help"):
        sys.stderr.write(USAGE)
        return 0 if argv else 2
    name = ALIASES.get(argv[0], argv[0])
    if name not in SUBCOMMANDS and name not in PASSTHROUGH:
        sys.stderr.write(f"Unknown subcommand {argv[0]!r}\n\n{USAGE}")
        return 2
    try:
        execute_from_command_line(["manage.py", name, *argv[1:]])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 2
    return 0


# ---------- Configuration ----------

@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    inputs: tuple[str, ...] = ()
    trunc: int = 8
    order: int = 6
    tol: float = 1e-8
    seed: int | None = None
    default_seed: int = 0
    mode: str = "exact"
    output: str | None = None
    record: bool = False
    depth: int = 3
    retry_cap: int = 16
    schema: str = "geomkit.report/1"
    argv: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def from_options(cls, subcommand: str, opts: dict, argv=()) -> "RunConfig":
        conf = settings.GEOMKIT
        config = cls(
            subcommand=subcommand,
            inputs=tuple(p for p in (opts.get("input"), opts.get("divisor")) if p),
            trunc=opts.get("trunc") if opts.get("trunc") is not None else conf["DEFAULT_TRUNC"],
            order=opts.get("order") if opts.get("order") is not None else conf["DEFAULT_ORDER"],
            tol=opts.get("tol") if opts.get("tol") is not None else conf["DEFAULT_TOL"],
            seed=opts.get("seed"),
            default_seed=conf["DEFAULT_SEED"],
            mode=opts.get("mode") or "exact",
            output=opts.get("output"),
            record=bool(opts.get("record")),
            depth=opts.get("depth") if opts.get("depth") is not None else conf["DEFAULT_DEPTH"],
            retry_cap=conf["RETRY_CAP"],
            schema=conf["REPORT_SCHEMA"],
            argv=tuple(argv),
        )
        config.validate()
        if opts.get("tol") is not None and config.mode != "float":
            logger.debug("%s: --tol has no effect in exact mode", subcommand)
        return config

    def validate(self):
        if self.trunc < 0:
            raise ParameterError(f"--trunc must be non-negative, got {self.trunc}")
        if self.order < 1:
            raise ParameterError(f"--order must be at least 1, got {self.order}")
        if not self.tol > 0:
            raise ParameterError(f"--tol must be positive, got {self.tol}")
        if self.depth < 1:
            raise ParameterError(f"--depth must be at least 1, got {self.depth}")

    @property
    def provenance(self) -> Provenance:
        return Provenance(seed=self.effective_seed, mode=self.mode, tol=self.tol)

    @property
    def effective_seed(self) -> int:
        """--seed, or the configured default that seeded generators fall back to."""
        return self.seed if self.seed is not None else self.default_seed

    @property
    def exact(self) -> bool:
        return self.mode == "exact"


@dataclass
class Outcome:
    inputs: dict
    outputs: dict
    verdict: str = PASS
    ok: bool = True


def read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ParseError(f"Failed reading JSON from {path}: {exc.msg}", exc.pos)
    except OSError as exc:
        raise ParameterError(f"Failed reading {path}: {exc.strerror}")


def parse_params(pairs) -> dict[str, int]:
    """NAME=INT pairs from --param."""
    out = {}
    for pair in pairs or ():
        name, sep, value = pair.partition("=")
        if not sep or not name.strip():
            raise ParameterError(f"--param expects NAME=INT, got {pair!r}")
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise ParameterError(f"--param expects an integer value, got {pair!r}")
    return out


# ---------- Base command ----------

class ReportCommand(BaseCommand):
    """Shared flags, error mapping, report writing and ledger recording."""
    command_name = ""

    def run_from_argv(self, argv):
        self.argv = list(argv[2:])
        super().run_from_argv(argv)

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, default=None, help="Seed for random inputs and coordinate changes")
        parser.add_argument("--mode", choices=("exact", "float"), default="exact")
        parser.add_argument("--tol", type=float, default=None, help="Float-mode tolerance")
        parser.add_argument("--trunc", type=int, default=None, help="Total-degree truncation N")
        parser.add_argument("--order", type=int, default=None, help="Working order M")
        parser.add_argument("--output", default=None, help="Write the report here instead of stdout")
        parser.add_argument("--record", action="store_true", help="Store the run in the ledger")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, config: RunConfig, opts: dict) -> Outcome:
        raise NotImplementedError

    def handle(self, *args, **opts):
        name = self.command_name
        try:
            config = RunConfig.from_options(name, opts, getattr(self, "argv", ()))
            outcome = self.run(config, opts)
        except GeomkitError as exc:
            logger.debug("%s failed: %s", name, exc.message)
            raise CommandError(exc.message, returncode=exc.exit_code)
        report = build_report(config.schema, name, outcome.inputs, outcome.outputs, outcome.verdict,
                              config.provenance)
        text = dumps(report)
        if config.output:
            Path(config.output).write_text(text, encoding="utf-8")
        else:
            self.stdout.write(text, ending="")
        exit_code = 0 if outcome.ok else 1
        if config.record:
            self.record(config, outcome.verdict, exit_code, text)
        if not outcome.ok:
            raise CommandError(f"{name}: verdict {outcome.verdict}", returncode=1)
        self.stderr.write(self.style.SUCCESS(f"{name}: {outcome.verdict}"))

    def record(self, config: RunConfig, verdict: str, exit_code: int, text: str):
        from .models import VerificationRun

        argv = [a for a in config.argv if a != "--record"]
        run = VerificationRun.objects.create(
            command=config.subcommand, argv=argv, seed=config.effective_seed, mode=config.mode,
            verdict=verdict, exit_code=exit_code, report=text,
        )
        self.stderr.write(self.style.WARNING(f"Recorded run #{run.pk}"))
