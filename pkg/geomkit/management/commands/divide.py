from geomkit.cli import FAIL, PASS, Outcome, ReportCommand, read_json
from geomkit.errors import ParameterError
from geomkit.series import divide_diagonal, format_series, multiply, parse_series, series_from_json
from geomkit.weierstrass import check_divisor, divide, window

from .weierstrass import load_series


class Command(ReportCommand):
    command_name = "divide"
    help = (
        "Weierstrass division f = q g + r with deg_X1 r < k, for g monic in X1 of\n"
        "degree k whose lower coefficients vanish at the origin. Series are given\n"
        "by --input/--divisor (JSON, same shapes as 'weierstrass') or --expr/--divisor-expr.\n"
        "--diagonal instead splits F(T, U) = (U - T) Q(T, U) + F(T, T)."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--input", default=None, help="Dividend JSON file")
        parser.add_argument("--expr", default=None, help="Dividend in human syntax")
        parser.add_argument("--divisor", default=None, help="Divisor JSON file")
        parser.add_argument("--divisor-expr", default=None, dest="divisor_expr")
        parser.add_argument("--diagonal", action="store_true", help="Divide by U - T (variables x1 = T, x2 = U)")

    def run(self, config, opts):
        f = load_series(opts, config, nvars=2 if opts["diagonal"] else None)
        if opts["diagonal"]:
            return self.run_diagonal(f)
        if opts["divisor_expr"]:
            g = parse_series(opts["divisor_expr"], nvars=f.nvars, trunc=f.trunc)
        elif opts["divisor"]:
            g = series_from_json(read_json(opts["divisor"]), default_trunc=f.trunc)
        else:
            raise ParameterError("Give a divisor with --divisor FILE or --divisor-expr TEXT, or use --diagonal")
        q, r = divide(f, g, config.order)
        k = check_divisor(g)
        inside = window(k, f.trunc, config.order, slack=k)
        residual = (f - multiply(q, g, keep=inside) - r).filter(inside)
        checks = {
            "remainder_degree": all(e[0] < k for e in r.terms),
            "reconstructs": residual.is_zero(),
        }
        ok = all(checks.values())
        outputs = {"k": k, "q": q, "r": r, "q_text": format_series(q), "r_text": format_series(r),
                   "checks": checks}
        inputs = {"dividend": f, "divisor": g, "order": config.order}
        return Outcome(inputs=inputs, outputs=outputs, verdict=PASS if ok else FAIL, ok=ok)

    def run_diagonal(self, F):
        Q, R = divide_diagonal(F)
        U_minus_T = parse_series("x2 - x1", nvars=2, trunc=F.trunc)
        ok = (U_minus_T * Q + R) == F
        outputs = {"Q": Q, "R": R, "Q_text": format_series(Q, ["T", "U"]),
                   "R_text": format_series(R, ["T", "U"]), "checks": {"reconstructs": ok}}
        return Outcome(inputs={"series": F}, outputs=outputs, verdict=PASS if ok else FAIL, ok=ok)
