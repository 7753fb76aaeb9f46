import numpy as np

from geomkit.cli import FAIL, PASS, Outcome, ReportCommand, read_json
from geomkit.errors import ParameterError
from geomkit.operators import (
    as_matrix, schatten_holder_check, sigma_eigen_check, singular_value_product_check, singular_values,
    tail_bound, tail_psum,
)

SIGMA_EIGEN_TOL = 1e-9


def _matrix_from(data, key: str):
    if isinstance(data, dict):
        if key not in data:
            return None
        data = data[key]
    return as_matrix(data)


class Command(ReportCommand):
    command_name = "schatten"
    help = (
        "Singular values and Schatten sums sum sigma_i^p of a matrix, cross-checked\n"
        "against the eigenvalues of A^T A. Input: {'A': [[...]], 'B'?: [[...]]} or a bare\n"
        "list of rows. With B, the Holder bound ||AB||_r <= ||A||_p ||B||_q\n"
        "(1/r = 1/p + 1/q) and sigma_{i+j}(AB) <= sigma_i(A) sigma_j(B) are checked too.\n"
        "--random COUNT runs seeded matrices of --size (default 5) and diagonal\n"
        "trace-class tail bounds."
    )

    def add_command_arguments(self, parser):
        parser.add_argument("--input", default=None, help="Matrix JSON file")
        parser.add_argument("--p", type=float, default=1.0)
        parser.add_argument("--q", type=float, default=1.0)
        parser.add_argument("--random", type=int, default=None, metavar="COUNT")
        parser.add_argument("--size", type=int, default=5)

    def run(self, config, opts):
        p, q = opts["p"], opts["q"]
        if p <= 0 or q <= 0:
            raise ParameterError("--p and --q must be positive")
        if opts["random"] is not None:
            return self.run_batch(config, opts)
        if not opts["input"]:
            raise ParameterError("Give --input FILE or --random COUNT")
        data = read_json(opts["input"])
        A = _matrix_from(data, "A")
        if A is None:
            raise ParameterError("Matrix input needs an 'A' entry")
        B = _matrix_from(data, "B") if isinstance(data, dict) else None
        spectrum = singular_values(A)
        gap = sigma_eigen_check(A, SIGMA_EIGEN_TOL)
        outputs = {
            "sigma": spectrum.sigma,
            "residual": spectrum.residual,
            "schatten_sum": spectrum.schatten_sum(p),
            "sigma_eigen_gap": gap,
        }
        ok = gap <= SIGMA_EIGEN_TOL
        if B is not None:
            holder = schatten_holder_check(A, B, p, q)
            product_ok = singular_value_product_check(A, B)
            outputs["holder"] = holder
            outputs["product_inequality"] = product_ok
            ok = ok and holder["holds"] and product_ok
        inputs = {"A": A, "B": B, "p": p, "q": q}
        return Outcome(inputs=inputs, outputs=outputs, verdict=PASS if ok else FAIL, ok=ok)

    def run_batch(self, config, opts):
        count, size, p, q = opts["random"], opts["size"], opts["p"], opts["q"]
        if count < 1 or size < 1:
            raise ParameterError("--random and --size must be positive")
        rng = np.random.default_rng(config.effective_seed)
        cases, failures = [], 0
        for index in range(count):
            A = rng.standard_normal((size, size))
            B = rng.standard_normal((size, size))
            gap = sigma_eigen_check(A, SIGMA_EIGEN_TOL)
            holder = schatten_holder_check(A, B, p, q)
            lam = rng.uniform(0, 1, 4 * size) / (1 + np.arange(4 * size)) ** 2
            C = float(rng.uniform(0.5, 2.0))
            x = rng.uniform(-C, C, 4 * size)
            head = size
            measured = tail_psum(lam, x, head, p)
            bound = tail_bound(lam, head, p, C)
            ok = gap <= SIGMA_EIGEN_TOL and holder["holds"] and measured <= bound
            cases.append({"index": index, "sigma_eigen_gap": gap, "holder": holder,
                          "tail_measured": measured, "tail_bound": bound, "ok": ok})
            failures += not ok
        inputs = {"random": count, "size": size, "p": p, "q": q}
        ok = not failures
        return Outcome(inputs=inputs, outputs={"cases": cases, "failures": failures},
                       verdict=PASS if ok else FAIL, ok=ok)
