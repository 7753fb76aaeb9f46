from geomkit.catalog import parse_bundle, parse_space
from geomkit.charclasses import (
    chern_character, describe_bundle, hrr, known_pushforward, to_point, todd,
)
from geomkit.cli import FAIL, PASS, Outcome, ReportCommand, parse_params


class Command(ReportCommand):
    command_name = "hrr"
    help = (
        "Euler characteristic chi(X, V) = integral over X of ch(V) td(T_X).\n"
        "Spaces:  pt | P<n> | AxB | P(<bundle>)/<base>, e.g. P2, P1xP1, P(O+O(1))/P1\n"
        "Bundles: O | O(d,...) | T, combined with k*, + and -, e.g. 2*O(1)+T-O\n"
        "Named degrees (O(a,b)) are bound with --param a=2 --param b=3.\n"
        "The verdict fails when chi is not an integer, or with --oracle when it\n"
        "disagrees with the monomial-count oracle."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--space", required=True, help="Catalog space, e.g. P2")
        parser.add_argument("--bundle", default="O", help="Bundle on the space, e.g. O(3)")
        parser.add_argument("--param", action="append", default=[], metavar="NAME=INT")
        parser.add_argument("--oracle", action="store_true",
                            help="Compare with the oracle (projective spaces and their products)")

    def run(self, config, opts):
        params = parse_params(opts["param"])
        X = parse_space(opts["space"])
        V = parse_bundle(opts["bundle"], X, params)
        chi = hrr(X, V)
        outputs = {
            "space": X.name,
            "ring": X.ring.describe(),
            "bundle": describe_bundle(V),
            "rank": V.rank,
            "ch": str(chern_character(V)),
            "td": str(todd(X.tangent)),
            "chi": chi,
            "integral": chi.denominator == 1,
        }
        ok = outputs["integral"]
        if opts["oracle"]:
            oracle = known_pushforward(to_point(X), V).rank
            outputs["oracle"] = oracle
            outputs["match"] = chi == oracle
            ok = ok and outputs["match"]
        inputs = {"space": opts["space"], "bundle": opts["bundle"], "params": params}
        return Outcome(inputs=inputs, outputs=outputs, verdict=PASS if ok else FAIL, ok=ok)
