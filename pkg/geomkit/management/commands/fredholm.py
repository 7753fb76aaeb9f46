import logging

import numpy as np

from geomkit.cli import Outcome, ReportCommand, read_json
from geomkit.errors import ParameterError
from geomkit.operators import (
    dense_kernel_dims, fredholm_reduce, random_trace_class, trace_class_from_json, trace_class_to_json,
)

logger = logging.getLogger(__name__)


def reduce_case(T, config, with_matrix: bool) -> tuple[dict, bool]:
    reduction = fredholm_reduce(T, exact=config.exact, tol=config.tol, rank_tol=config.tol)
    dense = dense_kernel_dims(T, exact=config.exact, rank_tol=config.tol)
    match = (reduction.kernel_dim, reduction.cokernel_dim) == dense
    case = {
        "dim": T.dim,
        "N": reduction.N,
        "tail_sum": reduction.tail_sum,
        "neumann_depth": reduction.neumann_depth,
        "neumann_error": reduction.neumann_error,
        "kernel_dim": reduction.kernel_dim,
        "cokernel_dim": reduction.cokernel_dim,
        "index": reduction.index,
        "dense_kernel_dim": dense[0],
        "dense_cokernel_dim": dense[1],
        "match": match,
    }
    if with_matrix:
        case["E_prime"] = reduction.E_prime
    return case, match


class Command(ReportCommand):
    command_name = "fredholm"
    help = (
        "Reduce 1 - f, f trace-class, to the Schur complement E' on the first N\n"
        "coordinates (N minimal with tail sum below 1) and compare ker/coker of E'\n"
        "with a dense rank computation of 1 - f.\n"
        "Input (--input) shapes:\n"
        "  A) {'p': '1', 'dim': d, 'lambdas': [...], 'rows': [[...], ...]}  row i of f is lambdas[i] * rows[i]\n"
        "  B) {'matrix': [[...], ...]}\n"
        "Entries may be numbers or 'p/q' strings. --random COUNT --size S draws\n"
        "seeded decompositions with a planted kernel."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--input", default=None, help="Trace-class JSON file")
        parser.add_argument("--random", type=int, default=None, metavar="COUNT")
        parser.add_argument("--size", type=int, default=40)
        parser.add_argument("--kernel-dim", type=int, default=None, dest="kernel_dim")

    def run(self, config, opts):
        if opts["random"] is not None:
            return self.run_batch(config, opts)
        if not opts["input"]:
            raise ParameterError("Give --input FILE or --random COUNT")
        T = trace_class_from_json(read_json(opts["input"]), exact=config.exact)
        case, ok = reduce_case(T, config, with_matrix=True)
        inputs = {"decomposition": trace_class_to_json(T)}
        return Outcome(inputs=inputs, outputs=case, verdict="match" if ok else "mismatch", ok=ok)

    def run_batch(self, config, opts):
        count, size = opts["random"], opts["size"]
        if count < 1 or size < 1:
            raise ParameterError("--random and --size must be positive")
        rng = np.random.default_rng(config.effective_seed)
        cases, mismatches = [], 0
        for index in range(count):
            T = random_trace_class(rng, size, kernel_dim=opts["kernel_dim"], exact=config.exact)
            case, ok = reduce_case(T, config, with_matrix=False)
            case["index"] = index
            cases.append(case)
            mismatches += not ok
        logger.info("fredholm: %d random cases, %d mismatches", count, mismatches)
        inputs = {"random": count, "size": size, "kernel_dim": opts["kernel_dim"]}
        outputs = {"cases": cases, "mismatches": mismatches}
        ok = not mismatches
        return Outcome(inputs=inputs, outputs=outputs, verdict="match" if ok else "mismatch", ok=ok)
