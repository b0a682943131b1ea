import json

import pytest
from typer.testing import CliRunner

from iwasawa_sha.main import app
from iwasawa_sha.models import RunReport
from iwasawa_sha.utils.reports import deterministic_view

runner = CliRunner()


def invoke(*args):
    return runner.invoke(app, ["--log-level", "WARNING", *args])


def payload(result):
    return json.loads(result.stdout)


def test_table_for_three():
    result = invoke("table", "--p", "3", "--nmax", "6")
    assert result.exit_code == 0
    report = payload(result)
    assert [row["e_n"] for row in report["records"]] == [0, 0, 2, 8, 28, 88, 270]
    assert [row["q_n"] for row in report["records"]] == [0, 0, 2, 6, 20, 60, 182]
    assert report["passed"] is True


def test_table_as_csv():
    result = invoke("table", "--p", "5", "--nmax", "3", "--format", "csv")
    assert result.exit_code == 0
    lines = result.stdout.strip().splitlines()
    assert lines[0] == "n,q_n,e_n,e_prev_plus_q"
    assert lines[-1] == "3,20,24,24"


@pytest.mark.parametrize("command", ["table", "verify", "fg"])
def test_even_prime_is_a_usage_error(command):
    result = invoke(command, "--p", "2")
    assert result.exit_code == 2
    assert result.stdout == ""


def test_trace_not_divisible_by_p_is_rejected():
    result = invoke("verify", "--p", "3", "--ap", "1", "--nmax", "1", "--trials", "1")
    assert result.exit_code == 2


def test_unknown_option_is_rejected():
    assert invoke("table", "--p", "3", "--bogus").exit_code == 2


def test_verify_passes():
    result = invoke("verify", "--p", "3", "--nmax", "3", "--trials", "2", "--seed", "1")
    assert result.exit_code == 0
    report = payload(result)
    assert report["passed"] is True
    assert len(report["records"]) == 2 * 4
    assert {r["lambda"] for r in report["records"] if r["n"] == 3} == {6}
    assert {c["name"] for c in report["checks"]} >= {"order", "invariants", "norm_inclusion", "omega_order"}


def test_verify_is_reproducible_apart_from_timing():
    args = ("verify", "--p", "3", "--ap", "3", "--nmax", "2", "--trials", "2", "--seed", "11")
    first, second = invoke(*args), invoke(*args)
    views = [deterministic_view(RunReport.model_validate(payload(r))) for r in (first, second)]
    assert views[0] == views[1]
    assert "timing" not in views[0]


def test_verify_as_csv_flattens_structure_checks():
    result = invoke("verify", "--p", "3", "--nmax", "2", "--trials", "1", "--format", "csv")
    assert result.exit_code == 0
    header = result.stdout.splitlines()[0].split(",")
    assert "lambda" in header
    assert "structure_checks.vanishing" in header


def test_precision_override_still_passes():
    result = invoke("verify", "--p", "3", "--nmax", "3", "--trials", "1", "--precision", "1")
    assert result.exit_code == 0
    assert payload(result)["values"]["precisions"][0] > 1


def test_formal_group_command():
    result = invoke("fg", "--p", "3", "--ap", "0", "--deg", "8", "--target", "6", "--assoc-deg", "5")
    assert result.exit_code == 0
    report = payload(result)
    assert report["values"]["residual"] == 0
    assert report["values"]["trace_unit"] == "1 mod 3^6"
    assert report["records"] == []


def test_formal_group_dump_and_csv():
    dumped = payload(invoke("fg", "--p", "3", "--deg", "5", "--target", "4", "--assoc-deg", "3", "--dump"))
    assert dumped["records"] and {"deg", "val", "unit", "abs_prec"} <= set(dumped["records"][0])
    result = invoke("fg", "--p", "3", "--deg", "5", "--target", "4", "--assoc-deg", "3", "--format", "csv")
    assert result.stdout.splitlines()[0].startswith("name,passed")


def test_inspect_text_form():
    result = invoke("inspect", "level 1; [1, 1, 1] mod 3^6")
    assert result.exit_code == 0
    values = payload(result)["values"]
    assert values["invariants"] == {"mu": 0, "lambda": 2}
    assert values["char_valuations"]["1"] is None
    assert values["char_valuations"]["0"] == "1/1"


def test_inspect_json_list_needs_prime():
    assert invoke("inspect", "[1, 2, 3]").exit_code == 2
    result = invoke("inspect", "[1, 2, 3]", "--p", "3", "--precision", "5")
    assert result.exit_code == 0
    assert payload(result)["config"] == {"p": 3, "precision": 5, "level": 1}


def test_inspect_rejects_malformed_input():
    assert invoke("inspect", "[1, 2]", "--p", "3").exit_code == 2
    assert invoke("inspect", "level x; nonsense").exit_code == 2


@pytest.mark.parametrize("text", [
    "level 1; [1, 1] mod 2^4",
    "level 1; [1, 0, 0, 0, 0, 0, 0, 0, 1] mod 9^3",
])
def test_inspect_text_form_needs_odd_prime(text):
    assert invoke("inspect", text).exit_code == 2
