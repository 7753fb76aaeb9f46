from geomkit.charclasses import hrr, oracle_chi_proj, proj_space
from geomkit.cli import Outcome, ReportCommand
from geomkit.errors import ParameterError


class Command(ReportCommand):
    command_name = "chi_table"
    help = (
        "Table of chi(P^n, O(k)) for kmin <= k <= kmax: the Riemann-Roch value next to\n"
        "the monomial-count oracle. Rows are {n, k, hrr, oracle, match}.\n"
        "Also reachable as chi-table."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--n", type=int, required=True, help="Dimension of P^n")
        parser.add_argument("--kmin", type=int, required=True)
        parser.add_argument("--kmax", type=int, required=True)

    def run(self, config, opts):
        n, kmin, kmax = opts["n"], opts["kmin"], opts["kmax"]
        if n < 0:
            raise ParameterError(f"--n must be non-negative, got {n}")
        if kmin > kmax:
            raise ParameterError(f"--kmin {kmin} exceeds --kmax {kmax}")
        P = proj_space(n)
        rows = []
        for k in range(kmin, kmax + 1):
            value = hrr(P, P.O(k))
            oracle = oracle_chi_proj(n, k)
            rows.append({"n": n, "k": k, "hrr": value, "oracle": oracle, "match": value == oracle})
        ok = all(row["match"] for row in rows)
        return Outcome(
            inputs={"n": n, "kmin": kmin, "kmax": kmax},
            outputs={"rows": rows},
            verdict="match" if ok else "mismatch",
            ok=ok,
        )
