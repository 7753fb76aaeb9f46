from geomkit.cli import FAIL, PASS, Outcome, ReportCommand
from geomkit.hochschild import (
    euler_characteristic_check, hkr_check, hochschild_homology, omega_model, resolution_acyclicity_check,
)


class Command(ReportCommand):
    command_name = "hh"
    help = (
        "Graded dimensions of HH_i(Q[x_1..x_n]) in internal degrees 0..D, computed\n"
        "from the Koszul resolution by exact ranks. With --check also: acyclicity\n"
        "of the resolution, the HKR comparison with Omega^i (binom(n, i) times the\n"
        "monomials of degree m - i) and the Euler-characteristic identity."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--vars", type=int, required=True, dest="nvars", help="Number of variables n")
        parser.add_argument("--deg", type=int, required=True, help="Internal degree bound D")
        parser.add_argument("--check", action="store_true")

    def run(self, config, opts):
        n, D = opts["nvars"], opts["deg"]
        inputs = {"vars": n, "deg": D, "check": opts["check"]}
        if not opts["check"]:
            outputs = {"hh": hochschild_homology(n, D), "omega": omega_model(n, D)}
            return Outcome(inputs=inputs, outputs=outputs)
        acyclicity = resolution_acyclicity_check(n, D)
        hkr = hkr_check(n, D)
        euler = euler_characteristic_check(n, D)
        outputs = {
            "hh": hkr.computed,
            "omega": hkr.expected,
            "hkr": {"passed": hkr.passed, "diffs": list(hkr.diffs)},
            "resolution": {
                "h0_dims": acyclicity.h0_dims,
                "higher": acyclicity.higher,
                "acyclic": acyclicity.acyclic,
                "h0_matches": acyclicity.h0_matches,
            },
            "euler": euler,
        }
        ok = hkr.passed and acyclicity.passed and all(euler.values())
        return Outcome(inputs=inputs, outputs=outputs, verdict=PASS if ok else FAIL, ok=ok)
