import numpy as np

from geomkit.cli import Outcome, ReportCommand
from geomkit.errors import ParameterError
from geomkit.locale import (
    EMPTY, PROVED, decide_containment, decide_empty, find_counterexample, parse, replay,
)


class Command(ReportCommand):
    command_name = "locale"
    help = (
        "Subset calculus prover for intersections of |poly| <= r and |poly| >= r.\n"
        "  prove --lhs EXPR --rhs EXPR   is lhs contained in rhs?   (Proved | Unknown)\n"
        "  empty --expr EXPR             is the subset empty?       (Empty | Unknown)\n"
        "EXPR is atoms joined by '&', e.g. \"|f|<=1/2 & |g|<=1/3 & |f+g|>=1\".\n"
        "Radii are positive rationals. The report carries the derivation trace;\n"
        "--samples K additionally looks for a numeric counterexample at K seeded\n"
        "Gaussian-rational points."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("action", choices=("prove", "empty"))
        parser.add_argument("--lhs", default=None)
        parser.add_argument("--rhs", default=None)
        parser.add_argument("--expr", default=None)
        parser.add_argument("--depth", type=int, default=None, help="Saturation rounds")
        parser.add_argument("--samples", type=int, default=0)

    def run(self, config, opts):
        if opts["action"] == "prove":
            if not opts["lhs"] or not opts["rhs"]:
                raise ParameterError("prove needs --lhs and --rhs")
            lhs, rhs = parse(opts["lhs"]), parse(opts["rhs"])
            decision = decide_containment(lhs, rhs, config.depth)
            replay_ok = replay(decision.trace, hypotheses=lhs.atoms, goals=rhs.atoms) \
                if decision.verdict == PROVED else None
            inputs = {"action": "prove", "lhs": str(lhs), "rhs": str(rhs), "depth": config.depth}
            target = rhs
        else:
            if not opts["expr"]:
                raise ParameterError("empty needs --expr")
            lhs = parse(opts["expr"])
            decision = decide_empty(lhs, config.depth)
            replay_ok = replay(decision.trace, hypotheses=lhs.atoms) if decision.verdict == EMPTY else None
            inputs = {"action": "empty", "expr": str(lhs), "depth": config.depth}
            target = None
        outputs = {
            "trace": [step.to_json() for step in decision.trace],
            "trace_text": [str(step) for step in decision.trace],
            "rounds": decision.rounds,
            "facts": decision.facts,
            "depth_capped": decision.capped,
            "missing": [str(a) for a in decision.missing],
            "replay": replay_ok,
        }
        ok = decision.verdict in (PROVED, EMPTY) and replay_ok is not False
        if opts["samples"] > 0:
            rng = np.random.default_rng(config.effective_seed)
            point = find_counterexample(lhs, target, rng, opts["samples"])
            outputs["counterexample"] = point
            inputs["samples"] = opts["samples"]
            if point is not None and decision.verdict in (PROVED, EMPTY):
                ok = False
        return Outcome(inputs=inputs, outputs=outputs, verdict=decision.verdict, ok=ok)
