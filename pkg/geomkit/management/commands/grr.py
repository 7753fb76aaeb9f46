from geomkit.catalog import parse_bundle, parse_map
from geomkit.charclasses import describe_bundle, grr_check, known_pushforward
from geomkit.cli import Outcome, ReportCommand, parse_params


class Command(ReportCommand):
    command_name = "grr"
    help = (
        "Check ch(f_*V) td(T_Y) = f_*(ch(V) td(T_X)) for a catalog map f: X -> Y.\n"
        "Maps: P1xP1->P1 (first projection), P(O+O(1))/P1->P1, X->pt, X->X\n"
        "      (X stands for --space).\n"
        "The K-theory pushforward f_*V comes from --push (a bundle on Y) or, when\n"
        "omitted, from the known catalog formulas:\n"
        "  product projection, V = O(a,b):     O(a) repeated chi(P^n, O(b)) times\n"
        "  projective bundle P(W), V = O(m):   Sym^m(W^dual), m >= 0"
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--map", required=True, dest="map_text", help='e.g. "P1xP1->P1"')
        parser.add_argument("--space", default=None, help='Source space when the map is written "X->..."')
        parser.add_argument("--bundle", required=True, help='Bundle on the source, e.g. "O(a,b)"')
        parser.add_argument("--push", default=None, help="f_*V as a bundle on the target")
        parser.add_argument("-a", type=int, default=None)
        parser.add_argument("-b", type=int, default=None)
        parser.add_argument("-m", type=int, default=None)
        parser.add_argument("--param", action="append", default=[], metavar="NAME=INT")

    def run(self, config, opts):
        params = parse_params(opts["param"])
        for name in ("a", "b", "m"):
            if opts[name] is not None:
                params[name] = opts[name]
        f = parse_map(opts["map_text"], opts["space"])
        V = parse_bundle(opts["bundle"], f.source, params)
        if opts["push"] is not None:
            pushed = parse_bundle(opts["push"], f.target, params)
            push_source = "given"
        else:
            pushed = known_pushforward(f, V)
            push_source = "catalog"
        result = grr_check(f, V, pushed)
        outputs = {
            "source": f.source.name,
            "target": f.target.name,
            "map": f.kind,
            "bundle": describe_bundle(V),
            "pushforward": describe_bundle(pushed),
            "pushforward_source": push_source,
            "lhs": str(result.lhs),
            "rhs": str(result.rhs),
            "difference": str(result.lhs - result.rhs),
            "equal": result.equal,
        }
        inputs = {"map": opts["map_text"], "space": opts["space"], "bundle": opts["bundle"],
                  "push": opts["push"], "params": params}
        return Outcome(inputs=inputs, outputs=outputs,
                       verdict="match" if result.equal else "mismatch", ok=result.equal)
