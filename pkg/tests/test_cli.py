import json
from pathlib import Path

import pytest

from svsecant.classify import expected_tag
from svsecant.cli import grid, main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_classify_gorenstein(capsys):
    code, out = run_json(capsys, "classify", "--a", "1,1", "--b", "2,2")
    assert code == 0
    g = out["gorenstein"]
    assert (g["status"], g["beta"], g["tag"], g["agree"]) == ("Gorenstein", [2, 1, 1, 1, 1], "G5", True)
    assert out["params"] == {"a": [1, 1], "b": [2, 2], "raw_a": [1, 1], "raw_b": [2, 2]}
    assert out["dim_case"] == "D1"


def test_classify_q5(capsys):
    code, out = run_json(capsys, "classify", "--a", "6", "--b", "2")
    assert code == 0
    assert out["gorenstein"]["status"] == "QGorensteinOnly" and out["gorenstein"]["tag"] == "Q5"


def test_classify_singular_component(capsys):
    code, out = run_json(capsys, "classify", "--a", "1,2,3", "--b", "1,1,1")
    assert code == 0
    s = out["singular"]
    assert s["count"] == 1
    assert (s["components"][0]["kind"], s["components"][0]["indices"]) == ("DoubleTwo", [2])


def test_raw_order_echoed(capsys):
    _, out = run_json(capsys, "facets", "--a", "3,1", "--b", "1,2")
    assert out["params"]["raw_a"] == [3, 1] and out["params"]["a"] == [1, 3]


def test_json_is_deterministic(capsys):
    a = run(capsys, "classify", "--a", "1,1,1,1", "--b", "1,1,1,2", "--json")[1]
    b = run(capsys, "classify", "--a", "1,1,1,1", "--b", "1,1,1,2", "--json")[1]
    assert a == b
    assert a == json.dumps(json.loads(a), sort_keys=True) + "\n"


def test_text_output(capsys):
    code, out, _ = run(capsys, "classify", "--a", "1,1", "--b", "2,2")
    assert code == 0 and "Gorenstein" in out and "G5" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--a", "1,2", "--b", "1"],
        ["classify", "--a", "x", "--b", "1"],
        ["classify", "--a", "0", "--b", "1"],
        ["classify", "--b", "1"],
        ["frobnicate"],
        ["cumulants"],
    ],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "classify", "--a", "4,4,4", "--b", "4,4,4", "--max-points", "100")
    assert code == 3 and "lattice points" in err


def test_disagreement_exit_code(capsys):
    # closed-form table lists this case as Gorenstein; the cone is smooth
    code, out = run_json(capsys, "classify", "--a", "3", "--b", "1")
    assert code == 2
    assert out["gorenstein"]["status"] == "Smooth" and out["gorenstein"]["tag"] == "G9"


def test_scan_small_and_empty(capsys):
    code, out = run_json(capsys, "scan", "--k-max", "1", "--a-max", "2", "--b-max", "3")
    assert code == 0
    assert out["summary"] == {"instances": 6, "skipped": [], "disagreements": 0, "disagreeing": []}
    code, out = run_json(capsys, "scan", "--k-max", "0")
    assert code == 0 and out["rows"] == [] and out["summary"]["instances"] == 0


def test_scan_only_tags(capsys):
    code, out = run_json(capsys, "scan", "--k-max", "2", "--a-max", "3", "--b-max", "2", "--only-tags", "G*")
    want = sorted(str(p) for p in grid(2, 3, 2) if (expected_tag(p) or "").startswith("G"))
    assert sorted(r["params"] for r in out["rows"]) == want
    assert all(r["tag"].startswith("G") for r in out["rows"])


def test_scan_parallel_matches_serial(capsys):
    _, a = run_json(capsys, "scan", "--k-max", "2", "--a-max", "2", "--b-max", "2")
    _, b = run_json(capsys, "scan", "--k-max", "2", "--a-max", "2", "--b-max", "2", "--jobs", "2")
    assert a == b


def test_scan_budget_skips_recorded(capsys):
    _, out = run_json(capsys, "scan", "--k-max", "1", "--a-max", "4", "--b-max", "4", "--max-points", "20")
    assert out["summary"]["skipped"]
    assert any(r["skipped"] for r in out["rows"])


def test_cumulants_sv(capsys):
    code, out = run_json(capsys, "cumulants", "--sv", "2", "2")
    assert code == 0
    assert out["secant_identity"]["ok"] and out["reparametrization"]["ok"]


def test_cumulants_file_with_binomials(capsys):
    code, out = run_json(capsys, "cumulants", "--file", str(DATA / "two_generators.cx"), "--degree-bound", "4")
    assert code == 0
    assert "x234^2 - x23*x24*x34" in [b["binomial"] for b in out["binomials"]]


def test_binomials_command(capsys):
    code, out = run_json(capsys, "binomials", "--file", str(DATA / "repeated_label.cx"))
    assert code == 0 and out["degree_bound"] == 4
    assert "x233^2 - x23^2*x33" in [b["binomial"] for b in out["binomials"]]


def test_disconnected_complex(capsys):
    code, _, err = run(capsys, "cumulants", "--file", str(DATA / "disconnected.cx"))
    assert code == 1 and "not connected" in err


def test_normality_command(capsys):
    code, out = run_json(capsys, "normality", "--a", "1,2", "--b", "1,2", "--smax", "3")
    assert code == 0 and out["normal_up_to"] == 3 and out["lattice"]["saturated"]


def test_singular_command(capsys):
    code, out = run_json(capsys, "singular", "--a", "1,1,1,1", "--b", "1,1,1,1")
    assert code == 0 and out["n_components"] == 6
