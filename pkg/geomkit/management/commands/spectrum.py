from geomkit.cli import FAIL, PASS, Outcome, ReportCommand, read_json
from geomkit.errors import ParameterError
from geomkit.operators import apply_series, as_matrix, neumann_inverse, spectrum_finite
from geomkit.series import parse_series

# slack on the declared Neumann bound for float round-off
NEUMANN_SLACK = 1e-12


class Command(ReportCommand):
    command_name = "spectrum"
    help = (
        "Eigenvalues of a square matrix (input {'A': [[...]]} or a bare list of rows),\n"
        "with eigenpair residuals checked against --tol.\n"
        "--series EXPR --radius R also evaluates f(A) = sum a_n A^n for a series in x1\n"
        "converging on |x| < R, with its tail bound; --neumann inverts 1 - A by the\n"
        "Neumann series and checks the residual against s^(J+1) / (1 - s)."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--input", default=None, help="Matrix JSON file")
        parser.add_argument("--series", default=None, help="One-variable series in x1, e.g. 1 + x1 + 1/2*x1^2")
        parser.add_argument("--radius", default=None, help="Convergence radius of --series (rational)")
        parser.add_argument("--neumann", action="store_true")

    def run(self, config, opts):
        if not opts["input"]:
            raise ParameterError("Give --input FILE")
        data = read_json(opts["input"])
        A = as_matrix(data["A"] if isinstance(data, dict) and "A" in data else data)
        values = spectrum_finite(A, tol=config.tol)
        outputs = {"eigenvalues": values}
        ok = True
        if opts["series"] is not None:
            if opts["radius"] is None:
                raise ParameterError("--series needs --radius")
            f = parse_series(opts["series"], nvars=1, trunc=config.trunc)
            applied = apply_series(f, A, opts["radius"])
            outputs["series"] = {
                "matrix": applied.matrix, "opnorm": applied.opnorm,
                "ratio": applied.ratio, "tail_bound": applied.tail_bound,
            }
        if opts["neumann"]:
            inverse = neumann_inverse(A, tol=config.tol)
            within = inverse.residual <= inverse.bound + NEUMANN_SLACK
            outputs["neumann"] = {
                "inverse": inverse.inverse, "depth": inverse.depth, "certificate": inverse.certificate,
                "bound": inverse.bound, "residual": inverse.residual, "within_bound": within,
            }
            ok = within
        inputs = {"A": A, "series": opts["series"], "radius": opts["radius"], "trunc": config.trunc}
        return Outcome(inputs=inputs, outputs=outputs, verdict=PASS if ok else FAIL, ok=ok)
