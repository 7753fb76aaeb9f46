import logging

import numpy as np

from geomkit.cli import FAIL, PASS, Outcome, ReportCommand, read_json
from geomkit.errors import DivisorError, ParameterError, RegularityError
from geomkit.series import MultiSeries, format_series, parse_series, series_from_json
from geomkit.weierstrass import (
    check_divisor, generic_coordinate_change, prepare, prepare_linear, random_regular_series,
    reconstruction_defect, window,
)

logger = logging.getLogger(__name__)


def load_series(opts, config, nvars: int | None = None) -> MultiSeries:
    if opts.get("expr"):
        return parse_series(opts["expr"], nvars=nvars, trunc=config.trunc)
    if opts.get("input"):
        return series_from_json(read_json(opts["input"]), default_trunc=config.trunc)
    raise ParameterError("Give a series with --input FILE or --expr TEXT")


def prepare_case(f: MultiSeries, order: int, seed, retry_cap: int) -> tuple[dict, bool]:
    """Prepare f (changing coordinates if needed) and check the result four ways."""
    change = None
    try:
        form = prepare(f, order)
    except RegularityError:
        if seed is None:
            raise
        f, change, _ = generic_coordinate_change(f, seed, retry_cap)
        form = prepare(f, order)
    try:
        check_divisor(form.g)
        monic = True
    except DivisorError:
        monic = False
    defect = reconstruction_defect(f, form)
    oracle = prepare_linear(f, order)
    narrowed = window(form.k, f.trunc, order, slack=form.k)
    agrees = oracle.g == form.g and oracle.u.filter(narrowed) == form.u.filter(narrowed)
    unit = bool(form.u.constant_term)
    checks = {"monic": monic, "unit": unit, "reconstructs": defect.is_zero(), "oracle_agrees": agrees}
    result = {
        "f": format_series(f),
        "k": form.k,
        "g": form.g,
        "u": form.u,
        "g_text": format_series(form.g),
        "working_order": order,
        "checks": checks,
    }
    if change is not None:
        result["change"] = change
    return result, all(checks.values())


class Command(ReportCommand):
    command_name = "weierstrass"
    help = (
        "Weierstrass preparation f = g * u with g monic in X1 of degree k = ord_X1 f(X1, 0, ..., 0).\n"
        "Input series (--input) may be written as\n"
        "  A) {'nvars': n, 'trunc': N, 'terms': [{'exp': [..], 're': 'p/q', 'im': 'p/q'}, ...]}\n"
        "  B) [{'nvars': n, 'trunc': N}, {'exp': [..], 're': ..}, ...]\n"
        "  C) {'expr': '1 - 2/3*x1^2*x2 + (1+1i)*x2^3'}\n"
        "or inline with --expr. A series that is not X1-regular is made regular by a\n"
        "random unimodular change of coordinates when --seed is given.\n"
        "--random COUNT --nvars n prepares COUNT seeded random regular series instead."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--input", default=None, help="Series JSON file")
        parser.add_argument("--expr", default=None, help="Series in human syntax")
        parser.add_argument("--random", type=int, default=None, metavar="COUNT")
        parser.add_argument("--nvars", type=int, default=2)

    def run(self, config, opts):
        if opts["random"] is not None:
            return self.run_batch(config, opts)
        f = load_series(opts, config)
        case, ok = prepare_case(f, config.order, config.seed, config.retry_cap)
        inputs = {"series": f, "order": config.order, "trunc": f.trunc}
        return Outcome(inputs=inputs, outputs=case, verdict=PASS if ok else FAIL, ok=ok)

    def run_batch(self, config, opts):
        count, nvars = opts["random"], opts["nvars"]
        if count < 1 or nvars < 1:
            raise ParameterError("--random and --nvars must be positive")
        rng = np.random.default_rng(config.effective_seed)
        cases, failures = [], 0
        for index in range(count):
            f = random_regular_series(rng, nvars, config.trunc)
            case, ok = prepare_case(f, config.order, None, config.retry_cap)
            case["index"] = index
            cases.append(case)
            failures += not ok
        logger.info("weierstrass: %d random cases, %d failures", count, failures)
        inputs = {"random": count, "nvars": nvars, "order": config.order, "trunc": config.trunc}
        outputs = {"cases": cases, "failures": failures}
        return Outcome(inputs=inputs, outputs=outputs, verdict=PASS if not failures else FAIL, ok=not failures)
