import json
import subprocess
import sys

import jsonschema
import pytest
from conftest import DATA

from fintripos.cli import emit, report_schema, run

VEE = str(DATA / "vee.manifest")
TWO = str(DATA / "two.manifest")


def call(*argv):
    code, rep = run(list(argv))
    doc = json.loads(emit(rep, "json"))
    jsonschema.validate(doc, report_schema())
    assert doc["exit_code"] == code
    return code, doc


def test_schema_is_a_valid_draft_2020_12_schema():
    jsonschema.Draft202012Validator.check_schema(report_schema())


def test_check_judgment_reports_the_false_line():
    code, doc = call("check-judgment", VEE, str(DATA / "vee.judgments"))
    assert code == 1 and doc["outcome"] == "fails"
    (cx,) = doc["counterexamples"]
    assert cx["line"] == 4
    assert cx["premises"] == "{l,top,r}" and cx["conclusion"] == "{l,r}"


@pytest.mark.parametrize("per,code,failed", [("X", 0, None), ("Z", 1, "sym")])
def test_per_check(per, code, failed):
    got, doc = call("per", "check", VEE, per)
    assert got == code
    if failed:
        assert doc["counterexamples"][0]["axiom"] == failed


@pytest.mark.parametrize("src,dst,maps,funrels", [("X", "Y", 1, 1), ("X", "X", 2, 2)])
def test_hom_count(src, dst, maps, funrels):
    code, doc = call("per", "hom-count", VEE, src, dst)
    assert code == 0
    assert doc["results"]["morphisms"] == maps
    assert doc["results"]["functional_relations"] == funrels


def test_hom_count_budget_refusal_exits_2():
    code, doc = call("per", "hom-count", VEE, "X", "X", "--budget", "10")
    assert code == 2 and "BudgetExceeded" in doc["error"]


@pytest.mark.parametrize("m,code", [("p", 0), ("s", 1)])
def test_fib_check(m, code):
    got, doc = call("fib", "check", VEE, m)
    assert got == code
    if m == "p":
        assert doc["results"]["fibration"]["ok"] is True


def test_complete_against_two():
    code, doc = call("complete", VEE, "V", "--against", "2")
    assert code == 0
    r = doc["results"]["universal_property"]
    assert r["frame_morphisms"] == r["flat_maps"] == 3
    assert r["bijective"] and r["order_isomorphism"]


def test_prime_counterexample():
    code, doc = call("prime", VEE, "lr", "--bound", "2")
    assert code == 1 and doc["results"]["status"] == "no"
    assert doc["counterexamples"]


@pytest.mark.parametrize("side,count", [("left", 1), ("right", 2)])
def test_derive(side, count):
    code, doc = call(
        "derive", "--side", side, "--source", VEE, "--target", TWO,
        "--map", str(DATA / "collapse.framemap"), "--object", "X",
    )
    assert code == 0 and doc["results"]["class_count"] == count


def test_example_derived_functors():
    code, doc = call("example", "derived-functors", "--a", "2", "--b", "1", "--c", "1",
                     "--alpha", "0", "--beta", "0")
    assert code == 0
    left, right = doc["results"]["derived"]
    assert (left["class_count"], right["class_count"]) == (1, 2)
    assert right["keyed_cross_check"] == 2


def test_example_comma_separated_lists():
    a = call("example", "derived-functors", "--a", "2", "--b", "1", "--c", "2", "--alpha", "0,1", "--beta", "0,0")
    b = call("example", "derived-functors", "--a", "2", "--b", "1", "--c", "2", "--alpha", "0", "1", "--beta", "0", "0")
    assert a[1]["results"] == b[1]["results"]


def test_example_budget_exits_2():
    code, doc = call("example", "derived-functors", "--a", "2", "--b", "2", "--c", "2",
                     "--alpha", "0,1", "--beta", "0,1")
    assert code == 2 and "BudgetExceeded" in doc["error"]


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        [],
        ["per", "check", VEE],
        ["per", "check", VEE, "NOPE"],
        ["check-judgment", VEE, str(DATA / "missing.judgments")],
        ["fuzz", "--suite", "nope"],
    ],
)
def test_usage_and_load_errors_exit_2(argv):
    code, doc = call(*argv)
    assert code == 2 and doc["outcome"] == "error" and doc["error"]


def test_fuzz_zero_iterations_is_a_valid_document():
    code, doc = call("fuzz", "--suite", "cfo", "--iters", "0")
    assert code == 0 and doc["counterexamples"] == []


def test_json_output_is_deterministic():
    argv = ["--format", "json", "fuzz", "--suite", "lemmas", "--seed", "3", "--iters", "20"]
    outs = {emit(run(argv)[1], "json") for _ in range(2)}
    assert len(outs) == 1


def test_timings_only_on_request():
    _, rep = run(["per", "check", VEE, "X"])
    assert "timings" not in rep.as_dict()
    _, rep = run(["per", "check", VEE, "X", "--timings"])
    assert rep.as_dict()["timings"]["total"] >= 0
    jsonschema.validate(json.loads(emit(rep, "json")), report_schema())


def test_text_format_leads_with_command_and_outcome():
    text = emit(run(["per", "check", VEE, "Z"])[1], "text").decode()
    first, second = text.splitlines()[:2]
    assert first.startswith("$ fintripos per check")
    assert second == "outcome: fails (exit 1)"


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "fintripos", "--format", "json", "per", "check", VEE, "X"],
        capture_output=True, check=False,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["outcome"] == "ok"
