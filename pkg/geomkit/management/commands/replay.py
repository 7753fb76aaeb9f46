from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError

from geomkit.cli import Outcome, ReportCommand
from geomkit.errors import ParameterError
from geomkit.models import VerificationRun


def replayable_argv(argv: list[str]) -> list[str]:
    """Recorded argv without --record and --output, which do not change the report."""
    out, skip = [], False
    for arg in argv:
        if skip:
            skip = False
            continue
        if arg == "--record" or arg.startswith("--output="):
            continue
        if arg == "--output":
            skip = True
            continue
        out.append(arg)
    return out


class Command(ReportCommand):
    command_name = "replay"
    help = (
        "Re-run a run recorded with --record and compare the new report with the\n"
        "stored one byte for byte. Exit 0 when identical, 1 otherwise."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("run_id", type=int, help="Ledger id printed by --record")

    def run(self, config, opts):
        try:
            run = VerificationRun.objects.get(pk=opts["run_id"])
        except VerificationRun.DoesNotExist:
            raise ParameterError(f"No recorded run #{opts['run_id']}")
        argv = replayable_argv(run.argv)
        buffer = StringIO()
        exit_code = 0
        try:
            call_command(run.command, *argv, stdout=buffer, stderr=StringIO())
        except CommandError as exc:
            exit_code = exc.returncode
        identical = buffer.getvalue() == run.report
        outputs = {
            "run": run.pk,
            "command": run.command,
            "recorded_exit_code": run.exit_code,
            "exit_code": exit_code,
            "identical": identical,
        }
        inputs = {"run_id": run.pk, "argv": argv}
        return Outcome(inputs=inputs, outputs=outputs, verdict="match" if identical else "mismatch",
                       ok=identical)
