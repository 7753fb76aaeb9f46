import json
from io import StringIO
from pathlib import Path

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from geomkit.cli import dispatch

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(name, *args):
    out = StringIO()
    call_command(name, *args, stdout=out, stderr=StringIO())
    return json.loads(out.getvalue())


def fixture(name):
    return str(FIXTURES / name)


# ---------- Riemann-Roch ----------

def test_chi_table():
    report = run("chi_table", "--n", "2", "--kmin", "-3", "--kmax", "3")
    rows = report["outputs"]["rows"]
    assert len(rows) == 7
    assert all(row["match"] for row in rows)
    assert report["verdict"] == "match"
    assert report["command"] == "chi_table"
    assert [row["hrr"] for row in rows] == ["1", "0", "0", "1", "3", "6", "10"]


def test_hrr():
    report = run("hrr", "--space", "P2", "--bundle", "O(3)", "--oracle")
    assert report["outputs"]["chi"] == "10"
    assert report["outputs"]["match"] is True
    assert report["provenance"]["tol"] is None


def test_seed_is_recorded_without_flag():
    assert run("hh", "--vars", "1", "--deg", "2")["provenance"]["seed"] == 0
    assert run("hh", "--vars", "1", "--deg", "2", "--seed", "9")["provenance"]["seed"] == 9


def test_grr_with_named_degrees():
    report = run("grr", "--map", "P1xP1->P1", "--bundle", "O(a,b)", "-a", "2", "-b", "3")
    assert report["verdict"] == "match"
    assert report["outputs"]["pushforward_source"] == "catalog"


def test_grr_with_wrong_pushforward():
    out = StringIO()
    with pytest.raises(CommandError) as info:
        call_command("grr", "--map", "P1xP1->P1", "--bundle", "O(1,1)", "--push", "O(1)",
                     stdout=out, stderr=StringIO())
    assert info.value.returncode == 1
    assert json.loads(out.getvalue())["verdict"] == "mismatch"


def test_unknown_space_is_an_input_error():
    with pytest.raises(CommandError) as info:
        run("hrr", "--space", "Q3")
    assert info.value.returncode == 2


# ---------- Series ----------

def test_weierstrass():
    report = run("weierstrass", "--input", fixture("regular.json"))
    outputs = report["outputs"]
    assert report["verdict"] == "pass"
    assert outputs["k"] == 1
    assert all(outputs["checks"].values())


def test_weierstrass_after_coordinate_change():
    report = run("weierstrass", "--input", fixture("non_regular.json"), "--seed", "3")
    assert report["verdict"] == "pass"
    assert "change" in report["outputs"]
    assert report["provenance"]["seed"] == 3


def test_weierstrass_without_seed_refuses_non_regular():
    with pytest.raises(CommandError) as info:
        run("weierstrass", "--input", fixture("non_regular.json"))
    assert info.value.returncode == 2


def test_divide():
    report = run("divide", "--input", fixture("dividend.json"), "--divisor", fixture("divisor.json"))
    assert report["verdict"] == "pass"
    assert report["outputs"]["k"] == 2
    assert report["outputs"]["checks"] == {"remainder_degree": True, "reconstructs": True}


def test_divide_by_diagonal():
    report = run("divide", "--expr", "x1^2*x2 + x2^3", "--diagonal")
    assert report["outputs"]["checks"]["reconstructs"] is True


def test_malformed_json():
    with pytest.raises(CommandError) as info:
        run("weierstrass", "--input", fixture("bad.json"))
    assert info.value.returncode == 2


# ---------- Operators ----------

def test_fredholm():
    report = run("fredholm", "--input", fixture("trace_class.json"))
    outputs = report["outputs"]
    assert report["verdict"] == "match"
    assert (outputs["kernel_dim"], outputs["cokernel_dim"]) == (1, 1)
    assert outputs["N"] == 1


def test_schatten():
    report = run("schatten", "--input", fixture("matrices.json"), "--mode", "float")
    assert report["verdict"] == "pass"
    assert report["outputs"]["product_inequality"] is True
    assert report["provenance"]["mode"] == "float"


def test_spectrum_with_neumann_inverse():
    report = run("spectrum", "--input", fixture("contraction.json"), "--neumann", "--mode", "float")
    assert report["verdict"] == "pass"
    assert report["outputs"]["neumann"]["within_bound"] is True


def test_seeded_batches_are_byte_identical():
    args = ("--random", "2", "--seed", "7", "--mode", "float")
    first, second = StringIO(), StringIO()
    call_command("schatten", *args, stdout=first, stderr=StringIO())
    call_command("schatten", *args, stdout=second, stderr=StringIO())
    assert first.getvalue() == second.getvalue()


# ---------- Hochschild and locale ----------

def test_hh_check():
    report = run("hh", "--vars", "2", "--deg", "3", "--check")
    assert report["verdict"] == "pass"
    assert report["outputs"]["hkr"]["passed"] is True


def test_locale_prove():
    report = run("locale", "prove", "--lhs", "|f|<=1 & |g|<=1", "--rhs", "|f*g|<=1")
    assert report["verdict"] == "Proved"
    assert report["outputs"]["replay"] is True
    assert report["outputs"]["trace"]


def test_locale_empty():
    report = run("locale", "empty", "--expr", "|f|<=1/2 & |g|<=1/3 & |f+g|>=1")
    assert report["verdict"] == "Empty"


def test_locale_unknown_exits_one():
    out = StringIO()
    with pytest.raises(CommandError) as info:
        call_command("locale", "prove", "--lhs", "|f|<=1", "--rhs", "|f|<=1/2", "--samples", "200",
                     stdout=out, stderr=StringIO())
    assert info.value.returncode == 1
    report = json.loads(out.getvalue())
    assert report["verdict"] == "Unknown"
    assert report["outputs"]["counterexample"] is not None


def test_output_file(tmp_path):
    target = tmp_path / "report.json"
    out = StringIO()
    call_command("hh", "--vars", "1", "--deg", "2", "--output", str(target), stdout=out, stderr=StringIO())
    assert out.getvalue() == ""
    assert json.loads(target.read_text(encoding="utf-8"))["command"] == "hh"


def test_bad_common_option():
    with pytest.raises(CommandError) as info:
        run("hh", "--vars", "1", "--deg", "2", "--order", "0")
    assert info.value.returncode == 2


# ---------- Dispatch ----------

def test_dispatch_success(capsys):
    assert dispatch(["chi-table", "--n", "1", "--kmin", "0", "--kmax", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["command"] == "chi_table"


@pytest.mark.parametrize("argv, code", [
    (["nope"], 2),
    ([], 2),
    (["--help"], 0),
    (["weierstrass", "--input", fixture("bad.json")], 2),
    (["chi-table", "--n", "1"], 2),
    (["locale", "prove", "--lhs", "|f|<=1", "--rhs", "|f|<=1/2"], 1),
])
def test_dispatch_exit_codes(argv, code, capsys):
    assert dispatch(argv) == code
