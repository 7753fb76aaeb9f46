"""JSON report envelope.

    {"schema", "command", "inputs", "outputs", "verdict",
     "provenance": {"seed", "mode", "tol", "versions"}}

Rationals are written "p/q" (integers as "p"), Gaussian rationals as
{"re", "im"}, floats as JSON numbers. Keys are sorted and nothing
time-dependent is written, so equal argv and seed give equal bytes.
"""
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import __version__
from .series import ExactScalar, MultiSeries, series_to_json

INDENT = 2
VERSIONED_PACKAGES = ("Django", "numpy", "sympy")


@dataclass(frozen=True)
class Provenance:
    seed: int
    mode: str
    tol: float | None


def package_versions() -> dict[str, str]:
    out = {"geomkit": __version__}
    for name in VERSIONED_PACKAGES:
        try:
            out[name] = version(name)
        except PackageNotFoundError:
            out[name] = "unknown"
    return out


def encode(value):
    """Plain JSON data for kernel values."""
    if value is None or isinstance(value, (bool, str, int)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, ExactScalar):
        return {"re": str(value.re), "im": str(value.im)}
    if isinstance(value, MultiSeries):
        return series_to_json(value)
    if isinstance(value, np.ndarray):
        return encode(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if hasattr(value, "to_json"):
        return value.to_json()
    return str(value)


def build_report(schema: str, command: str, inputs: dict, outputs: dict, verdict: str,
                 provenance: Provenance) -> dict:
    return {
        "schema": schema,
        "command": command,
        "inputs": encode(inputs),
        "outputs": encode(outputs),
        "verdict": verdict,
        "provenance": {
            "seed": provenance.seed,
            "mode": provenance.mode,
            "tol": provenance.tol if provenance.mode == "float" else None,
            "versions": package_versions(),
        },
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=INDENT, ensure_ascii=False) + "\n"
